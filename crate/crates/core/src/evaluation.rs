//! Linguistic validation of rankings.
//!
//! A bigram ranking is valid for general multi-word unit extraction when it
//! starts with the positive anchor (`ya da` by default). A trigram or 4-gram
//! ranking is invalid when its first entry starts with the negative prefix.
//! Stop-word boundary filtering, reduplication detection and a tag-pattern
//! hook complement the verdicts but never change them.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::EvalError;
use crate::measures::{MeasureId, MeasureScore};
use crate::ranking::RankedList;

fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_owned).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvaluationConfig {
    pub positive_anchor: Vec<String>,
    pub negative_prefix: Vec<String>,
    pub inspection_depth: usize,
    pub stop_set: BTreeSet<String>,
    pub stop_whitelist: BTreeSet<Vec<String>>,
    /// Depth over which the reduplication share of bigram rankings is taken.
    pub reduplication_depth: usize,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig {
            positive_anchor: words("ya da"),
            negative_prefix: words("ya da"),
            inspection_depth: 20,
            stop_set: ["ve", "de", "da", "bir"].into_iter().map(str::to_owned).collect(),
            stop_whitelist: [words("ya da")].into_iter().collect(),
            reduplication_depth: 200,
        }
    }
}

impl EvaluationConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.inspection_depth == 0 {
            return Err("inspection depth must be at least 1".into());
        }
        if self.positive_anchor.len() != 2 {
            return Err("the positive anchor must be a bigram".into());
        }
        if self.negative_prefix.is_empty() {
            return Err("the negative prefix must not be empty".into());
        }
        Ok(())
    }

    /// Replaces the anchor and negative prefix with `anchor` (space-separated).
    pub fn with_anchor(mut self, anchor: &str) -> Self {
        self.positive_anchor = words(anchor);
        self.negative_prefix = words(anchor);
        self.stop_whitelist.insert(words(anchor));
        self
    }

    /// Stop set from a stop list: one token per whitespace-separated word.
    pub fn with_stoplist(mut self, list: &str) -> Self {
        self.stop_set = list.split_whitespace().map(str::to_owned).collect();
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Valid,
    Invalid,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Valid => "valid",
            Verdict::Invalid => "invalid",
        })
    }
}

/// Which anchor test produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnchorRule {
    /// Rank 1 must equal the positive anchor.
    PositiveAnchor,
    /// Rank 1 must not begin with the negative prefix.
    NegativePrefix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceEntry {
    pub rank: usize,
    pub ngram: String,
    pub score: f64,
    pub observed_freq: u64,
}

impl EvidenceEntry {
    fn at(rank: usize, s: &MeasureScore) -> Self {
        EvidenceEntry {
            rank,
            ngram: s.ngram_text(),
            score: s.value,
            observed_freq: s.observed_freq,
        }
    }
}

/// Outcome of an anchor test. `evidence[0]` is always the rank-1 entry;
/// further entries are the anchor matches found within the inspected depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub verdict: Verdict,
    pub rule: AnchorRule,
    pub evidence: Vec<EvidenceEntry>,
    /// Entries within `depth` matching the anchor (or starting with the prefix).
    pub anchor_matches: usize,
    pub depth: usize,
}

fn anchor_test(rl: &RankedList, cfg: &EvaluationConfig, rule: AnchorRule) -> Result<Validation, EvalError> {
    let top = rl.top(cfg.inspection_depth);
    let first = top.first().ok_or(EvalError::Undecidable)?;
    let matches = |s: &MeasureScore| match rule {
        AnchorRule::PositiveAnchor => s.ngram == cfg.positive_anchor,
        AnchorRule::NegativePrefix => s.ngram.starts_with(&cfg.negative_prefix),
    };
    let mut evidence = vec![EvidenceEntry::at(1, first)];
    let mut anchor_matches = 0;
    for (i, s) in top.iter().enumerate() {
        if matches(s) {
            anchor_matches += 1;
            if i > 0 {
                evidence.push(EvidenceEntry::at(i + 1, s));
            }
        }
    }
    let verdict = match (rule, matches(first)) {
        (AnchorRule::PositiveAnchor, true) | (AnchorRule::NegativePrefix, false) => Verdict::Valid,
        _ => Verdict::Invalid,
    };
    Ok(Validation {
        verdict,
        rule,
        evidence,
        anchor_matches,
        depth: top.len(),
    })
}

/// Valid iff the rank-1 bigram is the positive anchor.
pub fn validate_bigram_ranking(rl: &RankedList, cfg: &EvaluationConfig) -> Result<Validation, EvalError> {
    if rl.n().get() != 2 {
        return Err(EvalError::WrongGramSize {
            expected: 2,
            actual: rl.n().get(),
        });
    }
    anchor_test(rl, cfg, AnchorRule::PositiveAnchor)
}

/// Invalid iff the rank-1 trigram begins with the negative prefix.
pub fn validate_trigram_ranking(rl: &RankedList, cfg: &EvaluationConfig) -> Result<Validation, EvalError> {
    if rl.n().get() != 3 {
        return Err(EvalError::WrongGramSize {
            expected: 3,
            actual: rl.n().get(),
        });
    }
    anchor_test(rl, cfg, AnchorRule::NegativePrefix)
}

/// Applies the anchor test that fits the ranking's gram size. 4-grams use the
/// negative-prefix test, like trigrams.
pub fn validate_ranking(rl: &RankedList, cfg: &EvaluationConfig) -> Result<Validation, EvalError> {
    match rl.n().get() {
        2 => anchor_test(rl, cfg, AnchorRule::PositiveAnchor),
        _ => anchor_test(rl, cfg, AnchorRule::NegativePrefix),
    }
}

/// True when the n-gram starts or ends with a stop word and is not
/// whitelisted.
pub fn violates_stop_boundary(ngram: &[String], cfg: &EvaluationConfig) -> bool {
    if cfg.stop_whitelist.contains(ngram) {
        return false;
    }
    let (Some(first), Some(last)) = (ngram.first(), ngram.last()) else {
        return false;
    };
    cfg.stop_set.contains(first) || cfg.stop_set.contains(last)
}

/// Drops entries whose first or last token is a stop word, except
/// whitelisted ones. Survivors keep their order.
pub fn stopword_boundary_filter(rl: &RankedList, cfg: &EvaluationConfig) -> RankedList {
    rl.retain(|e| !violates_stop_boundary(&e.ngram, cfg))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduplication {
    /// The two tokens are identical (`teker teker`).
    Full,
    /// The tokens share a long prefix (`gizliden gizliye`).
    Partial,
    None,
}

/// Orthographic reduplication test: full when the tokens are identical,
/// partial when their common prefix has at least 3 characters and covers at
/// least half (rounded up) of the shorter token.
pub fn detect_reduplication(first: &str, second: &str) -> Reduplication {
    if first == second {
        return Reduplication::Full;
    }
    let common = first.chars().zip(second.chars()).take_while(|(a, b)| a == b).count();
    let shorter = first.chars().count().min(second.chars().count());
    if common >= 3 && common >= shorter.div_ceil(2) {
        Reduplication::Partial
    } else {
        Reduplication::None
    }
}

/// Per-token tags supplied from outside (e.g. a morphological analyzer).
pub trait TokenTagger {
    fn tag(&self, token: &str) -> Option<&str>;
}

impl TokenTagger for HashMap<String, String> {
    fn tag(&self, token: &str) -> Option<&str> {
        self.get(token).map(String::as_str)
    }
}

/// A sequence of tags, one per position; `*` matches any tag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagPattern(pub Vec<String>);

impl TagPattern {
    pub fn parse(s: &str) -> Self {
        TagPattern(
            s.split(['_', ' '])
                .filter(|t| !t.is_empty())
                .map(str::to_owned)
                .collect(),
        )
    }

    pub fn matches<T: TokenTagger + ?Sized>(&self, ngram: &[String], tagger: &T) -> bool {
        self.0.len() == ngram.len()
            && self
                .0
                .iter()
                .zip(ngram)
                .all(|(want, tok)| want == "*" || tagger.tag(tok).is_some_and(|t| t == want))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternMode {
    /// Keep only entries matching some pattern.
    Keep,
    /// Drop entries matching any pattern.
    Drop,
}

/// Grammatical-pattern filter over externally tagged tokens.
pub fn pattern_filter<T: TokenTagger + ?Sized>(
    rl: &RankedList,
    tagger: &T,
    patterns: &[TagPattern],
    mode: PatternMode,
) -> RankedList {
    rl.retain(|e| {
        let hit = patterns.iter().any(|p| p.matches(&e.ngram, tagger));
        match mode {
            PatternMode::Keep => hit,
            PatternMode::Drop => !hit,
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub measure: MeasureId,
    pub n: usize,
    pub verdict: Verdict,
    pub rule: AnchorRule,
    pub evidence: Vec<EvidenceEntry>,
    pub anchor_matches: usize,
    pub depth: usize,
    /// Share of reduplications among the top bigrams; absent for n > 2.
    pub reduplication_share: Option<f64>,
    /// How many of the top `depth` entries the stop-word filter removes.
    pub stop_filtered: usize,
    pub top: Vec<EvidenceEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub config: EvaluationConfig,
    pub records: Vec<EvaluationRecord>,
}

/// Share of full or partial reduplications among the first `depth` bigrams.
pub fn reduplication_share(rl: &RankedList, depth: usize) -> Option<f64> {
    if rl.n().get() != 2 {
        return None;
    }
    let top = rl.top(depth);
    if top.is_empty() {
        return Some(0.0);
    }
    let hits = top
        .iter()
        .filter(|e| detect_reduplication(&e.ngram[0], &e.ngram[1]) != Reduplication::None)
        .count();
    Some(hits as f64 / top.len() as f64)
}

pub fn evaluate_ranking(rl: &RankedList, cfg: &EvaluationConfig) -> Result<EvaluationRecord, EvalError> {
    let v = validate_ranking(rl, cfg)?;
    let top = rl.top(cfg.inspection_depth);
    let stop_filtered = top.iter().filter(|e| violates_stop_boundary(&e.ngram, cfg)).count();
    Ok(EvaluationRecord {
        measure: rl.measure(),
        n: rl.n().get(),
        verdict: v.verdict,
        rule: v.rule,
        evidence: v.evidence,
        anchor_matches: v.anchor_matches,
        depth: v.depth,
        reduplication_share: reduplication_share(rl, cfg.reduplication_depth),
        stop_filtered,
        top: top
            .iter()
            .enumerate()
            .map(|(i, s)| EvidenceEntry::at(i + 1, s))
            .collect(),
    })
}

/// Evaluates each ranking independently; records come out sorted by gram
/// size, then measure.
pub fn evaluate(lists: &[RankedList], cfg: &EvaluationConfig) -> Result<EvaluationReport, EvalError> {
    let mut records = lists
        .par_iter()
        .map(|rl| evaluate_ranking(rl, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    records.sort_by_key(|r| (r.n, r.measure));
    Ok(EvaluationReport {
        config: cfg.clone(),
        records,
    })
}

impl EvaluationReport {
    /// Plain-text summary table followed by the inspected top entries of
    /// every ranking.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<10} {:>2}  {:<8} {:<24} {:>9} {:>8} {:>6}",
            "measure", "n", "verdict", "rank 1", "anchor", "redup", "stop"
        );
        for r in &self.records {
            let first = r.evidence.first().map(|e| e.ngram.as_str()).unwrap_or("-");
            let redup = r
                .reduplication_share
                .map(|s| format!("{:.3}", s))
                .unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{:<10} {:>2}  {:<8} {:<24} {:>9} {:>8} {:>6}",
                r.measure.name(),
                r.n,
                r.verdict.to_string(),
                first,
                format!("{}/{}", r.anchor_matches, r.depth),
                redup,
                r.stop_filtered
            );
        }
        for r in &self.records {
            let _ = writeln!(out, "\n{} ({}-grams), top {}:", r.measure.long_name(), r.n, r.top.len());
            for e in &r.top {
                let _ = writeln!(
                    out,
                    "{:>4}  {:<32} {:>16.6} {:>10}",
                    e.rank, e.ngram, e.score, e.observed_freq
                );
            }
        }
        out
    }
}
