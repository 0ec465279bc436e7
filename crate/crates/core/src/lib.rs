//! Multi-word unit extraction for Turkish text: corpus preparation, n-gram
//! counting, association measures, deterministic ranking and linguistic
//! validation of the rankings.

pub mod cli;
pub mod contingency;
pub mod count;
pub mod error;
pub mod evaluation;
pub mod measures;
pub mod pipeline;
pub mod prep;
pub mod ranking;

pub use contingency::ContingencyTable;
pub use count::{count_ngrams, CountFile, CutoffPolicy, GramSize, NgramCountTable};
pub use error::{CountError, EvalError, FormatError, MeasureError, PipelineError, PrepError};
pub use evaluation::{evaluate, EvaluationConfig, EvaluationReport, Verdict};
pub use measures::{score, MeasureId, MeasureOptions, MeasureScore};
pub use prep::{NormalizationConfig, RawText, SegmentedCorpus};
pub use ranking::{RankedList, ScoreFileFormat};
