use std::path::PathBuf;

use thiserror::Error;

use crate::measures::MeasureId;

#[derive(Debug, Error)]
pub enum PrepError {
    #[error("{source_id}: invalid UTF-8 at byte offset {offset}")]
    Decode { source_id: String, offset: usize },
    #[error("invalid normalization config: {0}")]
    Config(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CountError {
    #[error("unsupported n-gram size {0}; expected 2, 3 or 4")]
    GramSize(usize),
    #[error("cutoff must be at least 1")]
    Cutoff,
    #[error("n-gram `{0}` is not in the count table")]
    Missing(String),
    #[error("inconsistent counts for `{ngram}`: contingency cell {cell} is {value}")]
    NegativeCell { ngram: String, cell: usize, value: i128 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("{measure} is not defined for {n}-grams")]
    NotApplicable { measure: MeasureId, n: usize },
    #[error("{measure}: {reason}")]
    Domain { measure: MeasureId, reason: &'static str },
    #[error("{measure}: inconsistent table ({reason})")]
    Inconsistent { measure: MeasureId, reason: &'static str },
    #[error("{ngram}: {source}")]
    At {
        ngram: String,
        #[source]
        source: Box<MeasureError>,
    },
}

impl MeasureError {
    pub fn at(self, ngram: impl Into<String>) -> Self {
        MeasureError::At {
            ngram: ngram.into(),
            source: Box::new(self),
        }
    }

    /// True when the failure points at corrupted counts rather than bad input.
    pub fn is_inconsistency(&self) -> bool {
        match self {
            MeasureError::Inconsistent { .. } => true,
            MeasureError::At { source, .. } => source.is_inconsistency(),
            _ => false,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("cannot rank scores from different measures or gram sizes ({0} vs {1})")]
    MixedScores(String, String),
    #[error("ranking is empty; no verdict can be reached")]
    Undecidable,
    #[error("expected a ranking of {expected}-grams, got {actual}-grams")]
    WrongGramSize { expected: usize, actual: usize },
    #[error("bigram expected, got {0} tokens")]
    NotBigram(usize),
}

/// Line-numbered parse failure in one of the pipeline's file formats.
#[derive(Debug, Error)]
#[error("{}line {line}: {message}", path.as_ref().map(|p| format!("{}: ", p.display())).unwrap_or_default())]
pub struct FormatError {
    pub path: Option<PathBuf>,
    pub line: usize,
    pub message: String,
}

impl FormatError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        FormatError {
            path: None,
            line,
            message: message.into(),
        }
    }

    pub fn in_file(mut self, path: impl Into<PathBuf>) -> Self {
        self.path = Some(path.into());
        self
    }
}

/// Any failure of a pipeline stage, classified for process exit codes.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Prep(#[from] PrepError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl PipelineError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 usage error, 2 data or format error, 3 internal inconsistency.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Usage(_) => 1,
            PipelineError::Prep(PrepError::Config(_)) => 1,
            PipelineError::Count(CountError::GramSize(_) | CountError::Cutoff) => 1,
            PipelineError::Measure(MeasureError::NotApplicable { .. }) => 1,
            PipelineError::Count(CountError::NegativeCell { .. }) => 3,
            PipelineError::Measure(e) if e.is_inconsistency() => 3,
            _ => 2,
        }
    }
}
