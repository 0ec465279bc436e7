//! Deterministic rankings of scored n-grams and the score-file format.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::count::{GramSize, NGRAM_SEP};
use crate::error::{EvalError, FormatError};
use crate::measures::{MeasureId, MeasureScore};

/// Scores of one measure over n-grams of one size, best first.
///
/// Order: score descending, then joint frequency descending, then token
/// sequence ascending. Rank `i + 1` belongs to `entries()[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    measure: MeasureId,
    n: GramSize,
    entries: Vec<MeasureScore>,
}

fn rank_order(a: &MeasureScore, b: &MeasureScore) -> Ordering {
    b.value
        .total_cmp(&a.value)
        .then_with(|| b.observed_freq.cmp(&a.observed_freq))
        .then_with(|| a.ngram.cmp(&b.ngram))
}

fn check_shape(measure: MeasureId, n: GramSize, s: &MeasureScore) -> Result<(), EvalError> {
    if s.measure != measure || s.n() != n.get() {
        return Err(EvalError::MixedScores(
            format!("{measure}/{n}"),
            format!("{}/{}", s.measure, s.n()),
        ));
    }
    Ok(())
}

impl RankedList {
    /// Sorts `scores` into ranking order. All scores must belong to
    /// `measure` and have `n` tokens.
    pub fn rank(measure: MeasureId, n: GramSize, mut scores: Vec<MeasureScore>) -> Result<Self, EvalError> {
        for s in &scores {
            check_shape(measure, n, s)?;
        }
        scores.sort_by(rank_order);
        Ok(RankedList {
            measure,
            n,
            entries: scores,
        })
    }

    /// Wraps entries that are already in ranking order, e.g. read back from a
    /// score file.
    pub fn from_ranked(measure: MeasureId, n: GramSize, entries: Vec<MeasureScore>) -> Result<Self, EvalError> {
        for s in &entries {
            check_shape(measure, n, s)?;
        }
        Ok(RankedList { measure, n, entries })
    }

    pub fn measure(&self) -> MeasureId {
        self.measure
    }

    pub fn n(&self) -> GramSize {
        self.n
    }

    pub fn entries(&self) -> &[MeasureScore] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn top(&self, depth: usize) -> &[MeasureScore] {
        &self.entries[..depth.min(self.entries.len())]
    }

    /// Keeps entries satisfying `keep`, preserving order; ranks close up.
    pub fn retain(&self, mut keep: impl FnMut(&MeasureScore) -> bool) -> RankedList {
        RankedList {
            measure: self.measure,
            n: self.n,
            entries: self.entries.iter().filter(|e| keep(e)).cloned().collect(),
        }
    }

    /// First `depth` entries as a new list.
    pub fn truncated(&self, depth: usize) -> RankedList {
        RankedList {
            measure: self.measure,
            n: self.n,
            entries: self.top(depth).to_vec(),
        }
    }
}

/// Agreement between the heads of two rankings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankComparison {
    /// Depth actually compared (requested depth truncated to the shorter list).
    pub depth: usize,
    /// Fraction of the top `depth` n-grams the two lists share.
    pub overlap: f64,
    /// Length of the longest identical leading run.
    pub identical_prefix: usize,
}

pub fn compare_rankings(a: &RankedList, b: &RankedList, depth: usize) -> Result<RankComparison, EvalError> {
    if a.n != b.n {
        return Err(EvalError::WrongGramSize {
            expected: a.n.get(),
            actual: b.n.get(),
        });
    }
    let depth = depth.min(a.len()).min(b.len());
    let (ta, tb) = (a.top(depth), b.top(depth));
    let identical_prefix = ta.iter().zip(tb).take_while(|(x, y)| x.ngram == y.ngram).count();
    let set_a: HashSet<&[String]> = ta.iter().map(|e| e.ngram.as_slice()).collect();
    let shared = tb.iter().filter(|e| set_a.contains(e.ngram.as_slice())).count();
    let overlap = if depth == 0 { 0.0 } else { shared as f64 / depth as f64 };
    Ok(RankComparison {
        depth,
        overlap,
        identical_prefix,
    })
}

/// Layout of score files: a `# measure=<name> n=<n>` header, then
/// `rank w1<>w2 score joint` lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreFileFormat {
    /// Digits after the decimal point.
    pub precision: usize,
}

impl Default for ScoreFileFormat {
    fn default() -> Self {
        ScoreFileFormat { precision: 6 }
    }
}

impl ScoreFileFormat {
    pub fn write<W: Write>(&self, list: &RankedList, mut w: W) -> io::Result<()> {
        writeln!(w, "# measure={} n={}", list.measure, list.n)?;
        for (i, e) in list.entries.iter().enumerate() {
            writeln!(
                w,
                "{} {} {:.*} {}",
                i + 1,
                e.ngram.join(NGRAM_SEP),
                self.precision,
                e.value,
                e.observed_freq
            )?;
        }
        Ok(())
    }

    pub fn write_tsv<W: Write>(&self, list: &RankedList, mut w: W) -> io::Result<()> {
        writeln!(w, "rank\tngram\t{}\tjoint", list.measure)?;
        for (i, e) in list.entries.iter().enumerate() {
            writeln!(
                w,
                "{}\t{}\t{:.*}\t{}",
                i + 1,
                e.ngram_text(),
                self.precision,
                e.value,
                e.observed_freq
            )?;
        }
        Ok(())
    }

    /// Parses a score file. Entries keep their file order; ranks must run
    /// 1, 2, 3, ...
    pub fn parse(text: &str) -> Result<RankedList, FormatError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines.next().ok_or_else(|| FormatError::new(1, "empty score file"))?;
        let (measure, n) = parse_header(header)
            .ok_or_else(|| FormatError::new(1, format!("expected `# measure=<name> n=<size>`, found `{header}`")))?;
        let measure: MeasureId = measure.parse().map_err(|e: String| FormatError::new(1, e))?;
        let n = n
            .parse::<usize>()
            .ok()
            .and_then(|n| GramSize::new(n).ok())
            .ok_or_else(|| FormatError::new(1, format!("invalid gram size `{n}`")))?;

        let mut entries = Vec::new();
        for (lineno, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let err = |m: &str| FormatError::new(lineno, m.to_owned());
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [rank, ngram, value, freq] = fields[..] else {
                return Err(err("expected `rank ngram score joint`"));
            };
            let rank: usize = rank.parse().map_err(|_| err("rank is not an integer"))?;
            if rank != entries.len() + 1 {
                return Err(err(&format!("expected rank {}, found {rank}", entries.len() + 1)));
            }
            let ngram: Vec<String> = ngram.split(NGRAM_SEP).map(str::to_owned).collect();
            if ngram.len() != n.get() || ngram.iter().any(String::is_empty) {
                return Err(err(&format!("expected a {n}-gram")));
            }
            let value: f64 = value.parse().map_err(|_| err("score is not a number"))?;
            let observed_freq: u64 = freq.parse().map_err(|_| err("joint count is not an integer"))?;
            entries.push(MeasureScore {
                ngram,
                measure,
                value,
                observed_freq,
            });
        }
        Ok(RankedList { measure, n, entries })
    }
}

fn parse_header(line: &str) -> Option<(&str, &str)> {
    let rest = line.strip_prefix('#')?.trim();
    let mut measure = None;
    let mut n = None;
    for field in rest.split_whitespace() {
        match field.split_once('=')? {
            ("measure", v) => measure = Some(v),
            ("n", v) => n = Some(v),
            _ => return None,
        }
    }
    Some((measure?, n?))
}
