//! The twelve association measures and their applicability by gram size.
//!
//! All measures read a [`ContingencyTable`]; none of them looks at other
//! n-grams. Bigram notation below: `n11` joint count, `n1p`/`np1` first and
//! second position marginals, `npp` total, `m11 = n1p·np1/npp`.

mod fisher;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contingency::ContingencyTable;
use crate::count::{CountFile, GramSize, NGRAM_SEP};
use crate::error::MeasureError;

pub use fisher::{fisher_tails, FisherTails};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum MeasureId {
    Dice,
    Left,
    Right,
    TwoTailed,
    Jaccard,
    Ll,
    Tmi,
    Pmi,
    Phi,
    X2,
    Ps,
    Tscore,
}

impl MeasureId {
    pub const ALL: [MeasureId; 12] = [
        MeasureId::Dice,
        MeasureId::Left,
        MeasureId::Right,
        MeasureId::TwoTailed,
        MeasureId::Jaccard,
        MeasureId::Ll,
        MeasureId::Tmi,
        MeasureId::Pmi,
        MeasureId::Phi,
        MeasureId::X2,
        MeasureId::Ps,
        MeasureId::Tscore,
    ];

    /// Short command-line name.
    pub fn name(self) -> &'static str {
        match self {
            MeasureId::Dice => "dice",
            MeasureId::Left => "left",
            MeasureId::Right => "right",
            MeasureId::TwoTailed => "twotailed",
            MeasureId::Jaccard => "jaccard",
            MeasureId::Ll => "ll",
            MeasureId::Tmi => "mi",
            MeasureId::Pmi => "pmi",
            MeasureId::Phi => "phi",
            MeasureId::X2 => "x2",
            MeasureId::Ps => "ps",
            MeasureId::Tscore => "tscore",
        }
    }

    pub fn long_name(self) -> &'static str {
        match self {
            MeasureId::Dice => "Dice coefficient",
            MeasureId::Left => "Fisher's exact test (left-sided)",
            MeasureId::Right => "Fisher's exact test (right-sided)",
            MeasureId::TwoTailed => "Fisher's exact test (two-tailed)",
            MeasureId::Jaccard => "Jaccard coefficient",
            MeasureId::Ll => "Log-likelihood ratio",
            MeasureId::Tmi => "True mutual information",
            MeasureId::Pmi => "Pointwise mutual information",
            MeasureId::Phi => "Phi coefficient",
            MeasureId::X2 => "Pearson's chi-squared test",
            MeasureId::Ps => "Poisson-Stirling measure",
            MeasureId::Tscore => "T-score",
        }
    }

    /// Whether the measure is defined for n-grams of size `n`: every measure
    /// for bigrams; ll, mi, pmi and ps for trigrams; ll alone for 4-grams.
    pub fn applies_to(self, n: GramSize) -> bool {
        match n.get() {
            2 => true,
            3 => matches!(self, MeasureId::Ll | MeasureId::Tmi | MeasureId::Pmi | MeasureId::Ps),
            4 => self == MeasureId::Ll,
            _ => false,
        }
    }

    pub fn check_applicable(self, n: GramSize) -> Result<(), MeasureError> {
        if self.applies_to(n) {
            Ok(())
        } else {
            Err(MeasureError::NotApplicable {
                measure: self,
                n: n.get(),
            })
        }
    }

    pub fn applicable(n: GramSize) -> Vec<MeasureId> {
        MeasureId::ALL.into_iter().filter(|m| m.applies_to(n)).collect()
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        if lower == "tmi" {
            return Ok(MeasureId::Tmi);
        }
        MeasureId::ALL.into_iter().find(|m| m.name() == lower).ok_or_else(|| {
            let names: Vec<_> = MeasureId::ALL.iter().map(|m| m.name()).collect();
            format!("unknown measure `{s}`; expected one of {}", names.join(", "))
        })
    }
}

impl From<MeasureId> for String {
    fn from(m: MeasureId) -> String {
        m.name().to_owned()
    }
}

impl TryFrom<String> for MeasureId {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Numerical settings shared by all measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MeasureOptions {
    /// Base of the logarithm in ll, mi, pmi and ps.
    pub log_base: f64,
    /// Relative slack when deciding whether an outcome is no more probable
    /// than the observed one in the two-tailed Fisher test.
    pub tie_tolerance: f64,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions {
            log_base: std::f64::consts::E,
            tie_tolerance: 1e-12,
        }
    }
}

impl MeasureOptions {
    fn log(&self, x: f64) -> f64 {
        if self.log_base == std::f64::consts::E {
            x.ln()
        } else {
            x.ln() / self.log_base.ln()
        }
    }
}

struct Bigram {
    n11: u64,
    n12: u64,
    n21: u64,
    n22: u64,
    n1p: u64,
    np1: u64,
    npp: u64,
}

impl Bigram {
    fn of(ct: &ContingencyTable) -> Self {
        let o = ct.observed();
        Bigram {
            n11: o[0],
            n12: o[1],
            n21: o[2],
            n22: o[3],
            n1p: ct.single_marginal(0),
            np1: ct.single_marginal(1),
            npp: ct.total(),
        }
    }

    /// `(n11·n22 − n12·n21)² · scale / (n1p·np1·n2p·np2)`, rounded once when
    /// the integers fit in 128 bits. `None` when an expected cell is zero.
    fn phi_ratio(&self, scale: u64) -> Option<f64> {
        let n2p = self.npp - self.n1p;
        let np2 = self.npp - self.np1;
        if self.n1p == 0 || self.np1 == 0 || n2p == 0 || np2 == 0 {
            return None;
        }
        let det = self.n11 as i128 * self.n22 as i128 - self.n12 as i128 * self.n21 as i128;
        let exact = det
            .unsigned_abs()
            .checked_mul(det.unsigned_abs())
            .and_then(|d2| d2.checked_mul(scale as u128))
            .zip(
                (self.n1p as u128 * self.np1 as u128)
                    .checked_mul(n2p as u128)
                    .and_then(|p| p.checked_mul(np2 as u128)),
            );
        Some(match exact {
            Some((num, den)) => num as f64 / den as f64,
            None => {
                let d = det as f64;
                d * d * scale as f64 / (self.n1p as f64 * self.np1 as f64 * n2p as f64 * np2 as f64)
            }
        })
    }
}

fn domain(measure: MeasureId, reason: &'static str) -> MeasureError {
    MeasureError::Domain { measure, reason }
}

/// `Σ obs · log(obs/exp)` over all cells with `0 · log 0 = 0`.
fn weighted_log_ratio(measure: MeasureId, ct: &ContingencyTable, opts: &MeasureOptions) -> Result<f64, MeasureError> {
    let mut s = 0.0;
    for (&o, &e) in ct.observed().iter().zip(ct.expected()) {
        if o == 0 {
            continue;
        }
        if e <= 0.0 {
            return Err(MeasureError::Inconsistent {
                measure,
                reason: "zero expected count for a non-empty cell",
            });
        }
        s += o as f64 * opts.log(o as f64 / e);
    }
    Ok(s)
}

/// Scores one contingency table.
pub fn score(measure: MeasureId, ct: &ContingencyTable, opts: &MeasureOptions) -> Result<f64, MeasureError> {
    measure.check_applicable(ct.n())?;
    use MeasureId::*;
    let v = match measure {
        Dice | Jaccard => {
            let b = Bigram::of(ct);
            let sum = b.n1p + b.np1;
            if sum == 0 {
                return Err(domain(measure, "both marginals are zero"));
            }
            if measure == Dice {
                2.0 * b.n11 as f64 / sum as f64
            } else {
                b.n11 as f64 / (sum - b.n11) as f64
            }
        }
        Pmi | Ps => {
            let joint = ct.joint();
            if joint == 0 {
                return Err(domain(measure, "joint count is zero"));
            }
            if ct.singles().contains(&0) {
                return Err(domain(measure, "a marginal count is zero"));
            }
            let ratio = opts.log(joint as f64 / ct.expected_joint());
            if measure == Pmi {
                ratio
            } else {
                joint as f64 * (ratio - 1.0)
            }
        }
        Ll => 2.0 * weighted_log_ratio(measure, ct, opts)?,
        Tmi => {
            if ct.total() == 0 {
                return Err(domain(measure, "total is zero"));
            }
            weighted_log_ratio(measure, ct, opts)? / ct.total() as f64
        }
        X2 | Phi => {
            let b = Bigram::of(ct);
            let scale = if measure == Phi { 1 } else { b.npp };
            b.phi_ratio(scale)
                .ok_or_else(|| domain(measure, "an expected cell is zero"))?
        }
        Tscore => {
            let joint = ct.joint();
            if joint == 0 {
                return Err(domain(measure, "joint count is zero"));
            }
            (joint as f64 - ct.expected_joint()) / (joint as f64).sqrt()
        }
        Left | Right | TwoTailed => {
            let b = Bigram::of(ct);
            let tails =
                fisher_tails(b.n11, b.n1p, b.np1, b.npp, opts.tie_tolerance).ok_or(MeasureError::Inconsistent {
                    measure,
                    reason: "joint count outside the range allowed by the marginals",
                })?;
            match measure {
                Left => tails.left,
                Right => tails.right,
                _ => tails.two_tailed,
            }
        }
    };
    Ok(v)
}

/// Score of one n-gram under one measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureScore {
    pub ngram: Vec<String>,
    pub measure: MeasureId,
    pub value: f64,
    pub observed_freq: u64,
}

impl MeasureScore {
    pub fn ngram_text(&self) -> String {
        self.ngram.join(" ")
    }

    pub fn n(&self) -> usize {
        self.ngram.len()
    }
}

/// Scores every n-gram of a count file. Only the file's own counts are used.
pub fn score_count_file(
    file: &CountFile,
    measure: MeasureId,
    opts: &MeasureOptions,
) -> Result<Vec<MeasureScore>, MeasureError> {
    measure.check_applicable(file.n)?;
    file.records
        .par_iter()
        .map(|rec| {
            let here = || rec.tokens.join(NGRAM_SEP);
            let ct = rec.contingency(file.n, file.total).map_err(|_| {
                MeasureError::Inconsistent {
                    measure,
                    reason: "negative contingency cell",
                }
                .at(here())
            })?;
            let value = score(measure, &ct, opts).map_err(|e| e.at(here()))?;
            Ok(MeasureScore {
                ngram: rec.tokens.clone(),
                measure,
                value,
                observed_freq: rec.joint(),
            })
        })
        .collect()
}
