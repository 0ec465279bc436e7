//! N-gram counting inside segments, frequency cutoff and the count-file
//! formats.
//!
//! A table stores the joint count of every observed n-gram plus, for each
//! non-empty proper subset of positions, how many n-gram windows agree with
//! the n-gram at those positions. Marginals are always recomputed from the
//! surviving joints, so a cutoff removes the deleted n-grams from every
//! marginal and from the total.

use std::cmp::Reverse;
use std::collections::HashMap;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contingency::ContingencyTable;
use crate::error::{CountError, FormatError};
use crate::prep::SegmentedCorpus;

/// Largest supported gram size.
pub const MAX_N: usize = 4;

/// Token separator used inside count and score files.
pub const NGRAM_SEP: &str = "<>";

const ABSENT: u32 = u32::MAX;

type Key = [u32; MAX_N];

/// Validated gram size (2, 3 or 4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct GramSize(usize);

impl GramSize {
    pub fn new(n: usize) -> Result<Self, CountError> {
        if (2..=MAX_N).contains(&n) {
            Ok(GramSize(n))
        } else {
            Err(CountError::GramSize(n))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Mask with one bit per position.
    pub fn full_mask(self) -> usize {
        (1 << self.0) - 1
    }
}

impl TryFrom<usize> for GramSize {
    type Error = CountError;

    fn try_from(n: usize) -> Result<Self, Self::Error> {
        GramSize::new(n)
    }
}

impl From<GramSize> for usize {
    fn from(n: GramSize) -> usize {
        n.0
    }
}

impl std::fmt::Display for GramSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Minimum joint frequency an n-gram needs to survive counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutoffPolicy {
    min_freq: u64,
}

impl CutoffPolicy {
    pub fn new(min_freq: u64) -> Result<Self, CountError> {
        if min_freq == 0 {
            return Err(CountError::Cutoff);
        }
        Ok(CutoffPolicy { min_freq })
    }

    pub fn min_freq(self) -> u64 {
        self.min_freq
    }
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        CutoffPolicy { min_freq: 10 }
    }
}

/// Position subsets in the order the count file lists them: the full set
/// (joint count) first, then single positions, pairs, triples, each group in
/// lexicographic order of positions. Bit `i` of a mask is position `i`.
pub fn subset_order(n: GramSize) -> Vec<usize> {
    let n = n.get();
    let full = (1usize << n) - 1;
    let mut proper: Vec<usize> = (1..full).collect();
    proper.sort_by_key(|&m| {
        let positions: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).collect();
        (m.count_ones(), positions)
    });
    let mut order = vec![full];
    order.extend(proper);
    order
}

/// Conventional name of a subset count: `n11` for the joint bigram count,
/// `n1p` for the first-position marginal, `npp` for the total, and so on.
pub fn subset_label(n: GramSize, mask: usize) -> String {
    let mut s = String::from("n");
    for i in 0..n.get() {
        s.push(if mask >> i & 1 == 1 { '1' } else { 'p' });
    }
    s
}

/// Bidirectional token ↔ id map.
#[derive(Debug, Clone, Default)]
pub struct Vocab {
    words: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Vocab {
    pub fn intern(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.ids.get(word) {
            return id;
        }
        let id = self.words.len() as u32;
        self.words.push(word.to_owned());
        self.ids.insert(word.to_owned(), id);
        id
    }

    pub fn get(&self, word: &str) -> Option<u32> {
        self.ids.get(word).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// A corpus flattened into token ids with segment end offsets.
#[derive(Debug, Clone, Default)]
pub struct InternedCorpus {
    vocab: Vocab,
    tokens: Vec<u32>,
    segment_ends: Vec<usize>,
}

impl InternedCorpus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_segment<'a, I: IntoIterator<Item = &'a str>>(&mut self, tokens: I) {
        let before = self.tokens.len();
        for t in tokens {
            let id = self.vocab.intern(t);
            self.tokens.push(id);
        }
        if self.tokens.len() > before {
            self.segment_ends.push(self.tokens.len());
        }
    }

    /// Reads the line-per-segment corpus format.
    pub fn from_lines(text: &str) -> Self {
        let mut c = InternedCorpus::new();
        for line in text.lines() {
            c.push_segment(line.split_whitespace());
        }
        c
    }

    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn segment_count(&self) -> usize {
        self.segment_ends.len()
    }

    fn segments(&self) -> impl Iterator<Item = &[u32]> + '_ {
        let starts = std::iter::once(0).chain(self.segment_ends.iter().copied());
        starts
            .zip(self.segment_ends.iter().copied())
            .map(move |(s, e)| &self.tokens[s..e])
    }
}

impl From<&SegmentedCorpus> for InternedCorpus {
    fn from(corpus: &SegmentedCorpus) -> Self {
        let mut c = InternedCorpus::new();
        for seg in corpus.segments() {
            c.push_segment(seg.iter().map(String::as_str));
        }
        c
    }
}

fn window_key(window: &[u32]) -> Key {
    let mut key = [ABSENT; MAX_N];
    key[..window.len()].copy_from_slice(window);
    key
}

fn project(key: &Key, mask: usize) -> Key {
    let mut out = [ABSENT; MAX_N];
    for i in 0..MAX_N {
        if mask >> i & 1 == 1 {
            out[i] = key[i];
        }
    }
    out
}

fn count_windows<'a>(segments: impl Iterator<Item = &'a [u32]>, n: usize) -> HashMap<Key, u64> {
    let mut joint = HashMap::new();
    for seg in segments {
        for w in seg.windows(n) {
            *joint.entry(window_key(w)).or_insert(0) += 1;
        }
    }
    joint
}

/// Joint and marginal frequencies of the n-grams of one corpus.
#[derive(Debug, Clone)]
pub struct NgramCountTable {
    n: GramSize,
    vocab: Vocab,
    joint: HashMap<Key, u64>,
    // Indexed by position mask; slots 0 and the full mask stay empty.
    marginals: Vec<HashMap<Key, u64>>,
    total: u64,
}

impl NgramCountTable {
    pub fn empty(n: GramSize) -> Self {
        NgramCountTable {
            n,
            vocab: Vocab::default(),
            joint: HashMap::new(),
            marginals: vec![HashMap::new(); 1 << n.get()],
            total: 0,
        }
    }

    fn from_joint(n: GramSize, vocab: Vocab, joint: HashMap<Key, u64>) -> Self {
        let mut table = NgramCountTable {
            n,
            vocab,
            joint,
            marginals: Vec::new(),
            total: 0,
        };
        table.rebuild_marginals();
        table
    }

    fn rebuild_marginals(&mut self) {
        let full = self.n.full_mask();
        let mut marginals = vec![HashMap::new(); full + 1];
        let mut total = 0;
        for (key, &c) in &self.joint {
            total += c;
            for (mask, map) in marginals.iter_mut().enumerate().take(full).skip(1) {
                *map.entry(project(key, mask)).or_insert(0) += c;
            }
        }
        self.marginals = marginals;
        self.total = total;
    }

    pub fn n(&self) -> GramSize {
        self.n
    }

    /// Grand total of n-gram windows.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct n-grams.
    pub fn len(&self) -> usize {
        self.joint.len()
    }

    pub fn is_empty(&self) -> bool {
        self.joint.is_empty()
    }

    fn key_of<S: AsRef<str>>(&self, tokens: &[S]) -> Option<Key> {
        if tokens.len() != self.n.get() {
            return None;
        }
        let mut key = [ABSENT; MAX_N];
        for (slot, t) in key.iter_mut().zip(tokens) {
            *slot = self.vocab.get(t.as_ref())?;
        }
        Some(key)
    }

    fn tokens_of(&self, key: &Key) -> Vec<&str> {
        key[..self.n.get()].iter().map(|&id| self.vocab.word(id)).collect()
    }

    pub fn joint<S: AsRef<str>>(&self, tokens: &[S]) -> u64 {
        self.key_of(tokens)
            .and_then(|k| self.joint.get(&k).copied())
            .unwrap_or(0)
    }

    /// Count of windows matching `tokens` at the positions in `mask`; tokens
    /// at other positions are ignored. The empty mask yields the total and the
    /// full mask the joint count.
    pub fn marginal<S: AsRef<str>>(&self, mask: usize, tokens: &[S]) -> u64 {
        if mask == 0 {
            return self.total;
        }
        if mask == self.n.full_mask() {
            return self.joint(tokens);
        }
        if tokens.len() != self.n.get() {
            return 0;
        }
        let mut key = [ABSENT; MAX_N];
        for (i, t) in tokens.iter().enumerate() {
            if mask >> i & 1 == 1 {
                match self.vocab.get(t.as_ref()) {
                    Some(id) => key[i] = id,
                    None => return 0,
                }
            }
        }
        self.marginals[mask].get(&key).copied().unwrap_or(0)
    }

    fn subset_counts(&self, key: &Key) -> Vec<u64> {
        let full = self.n.full_mask();
        (0..=full)
            .map(|mask| match mask {
                0 => self.total,
                m if m == full => self.joint[key],
                m => self.marginals[m][&project(key, m)],
            })
            .collect()
    }

    /// All joint and marginal counts of one stored n-gram, in count-file order.
    fn record_counts(&self, key: &Key) -> Vec<u64> {
        let counts = self.subset_counts(key);
        subset_order(self.n).into_iter().map(|m| counts[m]).collect()
    }

    /// Full observed/expected cell table of a stored n-gram.
    pub fn contingency<S: AsRef<str>>(&self, tokens: &[S]) -> Result<ContingencyTable, CountError> {
        let key = self
            .key_of(tokens)
            .filter(|k| self.joint.contains_key(k))
            .ok_or_else(|| CountError::Missing(tokens.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ")))?;
        ContingencyTable::from_subset_counts(self.n, &self.subset_counts(&key)).map_err(|(cell, value)| {
            CountError::NegativeCell {
                ngram: self.tokens_of(&key).join(" "),
                cell,
                value,
            }
        })
    }

    /// Deletes every n-gram below the cutoff and recomputes marginals and
    /// total from the survivors.
    pub fn apply_cutoff(mut self, policy: CutoffPolicy) -> Self {
        if policy.min_freq <= 1 {
            return self;
        }
        self.joint.retain(|_, c| *c >= policy.min_freq);
        self.rebuild_marginals();
        self
    }

    /// Adds the counts of `other` (a table over a disjoint set of segments).
    pub fn merge(&mut self, other: &NgramCountTable) {
        assert_eq!(self.n, other.n, "cannot merge tables of different gram sizes");
        let remap: Vec<u32> = other.vocab.words.iter().map(|w| self.vocab.intern(w)).collect();
        let map_key = |key: &Key| {
            let mut out = *key;
            for id in out.iter_mut().filter(|id| **id != ABSENT) {
                *id = remap[*id as usize];
            }
            out
        };
        for (key, c) in &other.joint {
            *self.joint.entry(map_key(key)).or_insert(0) += c;
        }
        for (mine, theirs) in self.marginals.iter_mut().zip(&other.marginals) {
            for (key, c) in theirs {
                *mine.entry(map_key(key)).or_insert(0) += c;
            }
        }
        self.total += other.total;
    }

    /// Stored n-grams ordered by joint count (descending), then tokens.
    pub fn entries(&self) -> Vec<CountRecord> {
        let mut keyed: Vec<(Vec<&str>, &Key)> = self.joint.keys().map(|k| (self.tokens_of(k), k)).collect();
        keyed.sort_unstable_by(|a, b| (Reverse(self.joint[a.1]), &a.0).cmp(&(Reverse(self.joint[b.1]), &b.0)));
        keyed
            .into_iter()
            .map(|(tokens, key)| CountRecord {
                tokens: tokens.into_iter().map(str::to_owned).collect(),
                counts: self.record_counts(key),
            })
            .collect()
    }

    /// Converts to the file-level representation.
    pub fn to_count_file(&self) -> CountFile {
        CountFile {
            n: self.n,
            total: self.total,
            records: self.entries(),
        }
    }

    /// Checks the stored marginals against a recount from the joints.
    pub fn marginals_consistent(&self) -> bool {
        let rebuilt = NgramCountTable::from_joint(self.n, self.vocab.clone(), self.joint.clone());
        rebuilt.total == self.total && rebuilt.marginals == self.marginals
    }
}

/// Counts every window of `n` consecutive tokens inside a segment.
pub fn count_ngrams(corpus: &SegmentedCorpus, n: GramSize) -> NgramCountTable {
    count_interned(InternedCorpus::from(corpus), n)
}

/// Same as [`count_ngrams`] for an already interned corpus. Windows are
/// counted shard-parallel on the current rayon pool; the result does not
/// depend on the number of threads.
pub fn count_interned(corpus: InternedCorpus, n: GramSize) -> NgramCountTable {
    const SHARD: usize = 1 << 16;
    let segments: Vec<&[u32]> = corpus.segments().collect();
    let joint = if segments.len() <= SHARD {
        count_windows(segments.iter().copied(), n.get())
    } else {
        segments
            .par_chunks(SHARD)
            .map(|chunk| count_windows(chunk.iter().copied(), n.get()))
            .reduce(HashMap::new, |a, b| {
                let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
                for (k, c) in small {
                    *big.entry(k).or_insert(0) += c;
                }
                big
            })
    };
    NgramCountTable::from_joint(n, corpus.vocab, joint)
}

/// One line of a count file: the n-gram and its counts in [`subset_order`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub tokens: Vec<String>,
    pub counts: Vec<u64>,
}

impl CountRecord {
    pub fn joint(&self) -> u64 {
        self.counts[0]
    }

    /// Counts indexed by position mask, with the total at mask 0.
    pub fn subset_counts(&self, n: GramSize, total: u64) -> Vec<u64> {
        let mut by_mask = vec![0; n.full_mask() + 1];
        by_mask[0] = total;
        for (mask, c) in subset_order(n).into_iter().zip(&self.counts) {
            by_mask[mask] = *c;
        }
        by_mask
    }

    pub fn contingency(&self, n: GramSize, total: u64) -> Result<ContingencyTable, CountError> {
        ContingencyTable::from_subset_counts(n, &self.subset_counts(n, total)).map_err(|(cell, value)| {
            CountError::NegativeCell {
                ngram: self.tokens.join(" "),
                cell,
                value,
            }
        })
    }
}

/// Output layouts for count tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Nsp,
    Tsv,
    Json,
}

/// A parsed or ready-to-write count file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountFile {
    pub n: GramSize,
    pub total: u64,
    pub records: Vec<CountRecord>,
}

#[derive(Serialize)]
struct JsonCounts<'a> {
    n: GramSize,
    total: u64,
    columns: Vec<String>,
    ngrams: &'a [CountRecord],
}

impl CountFile {
    pub fn columns(&self) -> Vec<String> {
        subset_order(self.n)
            .into_iter()
            .map(|m| subset_label(self.n, m))
            .collect()
    }

    /// Writes the total on the first line, then `w1<>w2<>n11 n1p np1` style
    /// lines.
    pub fn write_nsp<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.total)?;
        for r in &self.records {
            let counts: Vec<String> = r.counts.iter().map(u64::to_string).collect();
            writeln!(w, "{}{NGRAM_SEP}{}", r.tokens.join(NGRAM_SEP), counts.join(" "))?;
        }
        Ok(())
    }

    /// Tab-separated: tokens, joint, each marginal, total, with a header row.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut header: Vec<String> = (1..=self.n.get()).map(|i| format!("w{i}")).collect();
        header.extend(self.columns());
        header.push(subset_label(self.n, 0));
        writeln!(w, "{}", header.join("\t"))?;
        for r in &self.records {
            let mut fields = r.tokens.clone();
            fields.extend(r.counts.iter().map(u64::to_string));
            fields.push(self.total.to_string());
            writeln!(w, "{}", fields.join("\t"))?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, w: W) -> io::Result<()> {
        let doc = JsonCounts {
            n: self.n,
            total: self.total,
            columns: self.columns(),
            ngrams: &self.records,
        };
        serde_json::to_writer_pretty(w, &doc)?;
        Ok(())
    }

    pub fn write<W: Write>(&self, format: OutputFormat, mut w: W) -> io::Result<()> {
        match format {
            OutputFormat::Nsp => self.write_nsp(w),
            OutputFormat::Tsv => self.write_tsv(w),
            OutputFormat::Json => {
                self.write_json(&mut w)?;
                writeln!(w)
            }
        }
    }

    /// Parses the `nsp` layout written by [`CountFile::write_nsp`].
    pub fn parse_nsp(text: &str) -> Result<Self, FormatError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, first) = lines
            .next()
            .ok_or_else(|| FormatError::new(1, "empty count file; expected the total"))?;
        let total: u64 = first
            .trim()
            .parse()
            .map_err(|_| FormatError::new(1, format!("expected total as an integer, found `{first}`")))?;
        let mut n: Option<GramSize> = None;
        let mut records = Vec::new();
        for (lineno, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(NGRAM_SEP).collect();
            let (counts_field, tokens) = fields.split_last().expect("split yields at least one field");
            let this_n = GramSize::new(tokens.len()).map_err(|e| FormatError::new(lineno, e.to_string()))?;
            match n {
                None => n = Some(this_n),
                Some(prev) if prev != this_n => {
                    return Err(FormatError::new(
                        lineno,
                        format!("{this_n}-gram in a file of {prev}-grams"),
                    ))
                }
                _ => {}
            }
            if tokens.iter().any(|t| t.is_empty() || t.contains(char::is_whitespace)) {
                return Err(FormatError::new(lineno, "malformed token"));
            }
            let counts = counts_field
                .split_whitespace()
                .map(|c| c.parse::<u64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| FormatError::new(lineno, format!("non-numeric count in `{counts_field}`")))?;
            let expected = this_n.full_mask();
            if counts.len() != expected {
                return Err(FormatError::new(
                    lineno,
                    format!("expected {expected} counts for a {this_n}-gram, found {}", counts.len()),
                ));
            }
            if counts[0] == 0 || counts.iter().any(|&c| c > total || c < counts[0]) {
                return Err(FormatError::new(
                    lineno,
                    "counts are inconsistent with the joint count or total",
                ));
            }
            records.push(CountRecord {
                tokens: tokens.iter().map(|t| t.to_string()).collect(),
                counts,
            });
        }
        // A file with no n-gram lines carries no size; default to bigrams.
        let n = n.unwrap_or(GramSize(2));
        Ok(CountFile { n, total, records })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize) -> GramSize {
        GramSize::new(n).unwrap()
    }

    fn corpus(segs: &[&[&str]]) -> SegmentedCorpus {
        SegmentedCorpus::from_segments(segs.iter().map(|s| s.iter().copied()))
    }

    #[test]
    fn counts_windows_within_segments() {
        let t = count_ngrams(&corpus(&[&["a", "b", "a", "b", "a"]]), g(2));
        assert_eq!(t.joint(&["a", "b"]), 2);
        assert_eq!(t.joint(&["b", "a"]), 2);
        assert_eq!(t.marginal(0b01, &["a", "_"]), 2);
        assert_eq!(t.marginal(0b01, &["b", "_"]), 2);
        assert_eq!(t.marginal(0b10, &["_", "a"]), 2);
        assert_eq!(t.marginal(0b10, &["_", "zz"]), 0);
        assert_eq!(t.marginal(0b10, &["a", "a"]), 2);
        assert_eq!(t.marginal(0b10, &["a", "b"]), 2);
        assert_eq!(t.total(), 4);
    }

    #[test]
    fn windows_do_not_cross_segments() {
        let t = count_ngrams(&corpus(&[&["a", "b"], &["a", "b"]]), g(2));
        assert_eq!(t.joint(&["a", "b"]), 2);
        assert_eq!(t.joint(&["b", "a"]), 0);
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn short_segments_contribute_nothing() {
        let t = count_ngrams(&corpus(&[&["x"]]), g(2));
        assert!(t.is_empty());
        assert_eq!(t.total(), 0);
    }

    #[test]
    fn gram_size_is_validated() {
        assert_eq!(GramSize::new(1), Err(CountError::GramSize(1)));
        assert_eq!(GramSize::new(5), Err(CountError::GramSize(5)));
        assert!(CutoffPolicy::new(0).is_err());
    }

    #[test]
    fn cutoff_removes_from_marginals_and_total() {
        let mut segs: Vec<Vec<&str>> = vec![vec!["a", "b"]; 12];
        segs.extend(vec![vec!["a", "c"]; 3]);
        let t = count_ngrams(&SegmentedCorpus::from_segments(segs), g(2));
        assert_eq!(t.marginal(0b01, &["a", "b"]), 15);
        assert_eq!(t.total(), 15);
        let cut = t.apply_cutoff(CutoffPolicy::new(10).unwrap());
        assert_eq!(cut.joint(&["a", "b"]), 12);
        assert_eq!(cut.joint(&["a", "c"]), 0);
        assert_eq!(cut.marginal(0b01, &["a", "b"]), 12);
        assert_eq!(cut.total(), 12);
        assert!(cut.marginals_consistent());
    }

    #[test]
    fn cutoff_everything_and_identity() {
        let t = count_ngrams(&corpus(&[&["a", "b", "a", "b", "a"]]), g(2));
        let same = t.clone().apply_cutoff(CutoffPolicy::new(1).unwrap());
        assert_eq!(same.entries(), t.entries());
        let gone = t.apply_cutoff(CutoffPolicy::default());
        assert!(gone.is_empty());
        assert_eq!(gone.total(), 0);
    }

    #[test]
    fn subset_order_follows_count_file_convention() {
        let labels = |n| {
            subset_order(g(n))
                .into_iter()
                .map(|m| subset_label(g(n), m))
                .collect::<Vec<_>>()
        };
        assert_eq!(labels(2), ["n11", "n1p", "np1"]);
        assert_eq!(labels(3), ["n111", "n1pp", "np1p", "npp1", "n11p", "n1p1", "np11"]);
        assert_eq!(labels(4).len(), 15);
        assert_eq!(labels(4)[0], "n1111");
        assert_eq!(&labels(4)[11..], ["n111p", "n11p1", "n1p11", "np111"]);
    }

    #[test]
    fn nsp_format_is_exact() {
        let t = count_ngrams(&corpus(&[&["ya", "da", "bu"], &["ya", "da"]]), g(2));
        let mut out = Vec::new();
        t.to_count_file().write_nsp(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "3\nya<>da<>2 2 2\nda<>bu<>1 1 1\n");
    }

    #[test]
    fn nsp_parse_roundtrip_and_errors() {
        let t = count_ngrams(&corpus(&[&["a", "b", "c", "a", "b", "c", "d"]]), g(3));
        let file = t.to_count_file();
        let mut out = Vec::new();
        file.write_nsp(&mut out).unwrap();
        let parsed = CountFile::parse_nsp(std::str::from_utf8(&out).unwrap()).unwrap();
        assert_eq!(parsed, file);

        let err = CountFile::parse_nsp("10\na<>b<>3 4 5\na<>b<>x 1 1\n").unwrap_err();
        assert_eq!(err.line, 3);
        let err = CountFile::parse_nsp("ten\n").unwrap_err();
        assert_eq!(err.line, 1);
        let err = CountFile::parse_nsp("10\na<>b<>3 4\n").unwrap_err();
        assert_eq!(err.line, 2);
        let err = CountFile::parse_nsp("10\na<>b<>3 4 5\na<>b<>c<>1 1 1 1 1 1 1\n").unwrap_err();
        assert_eq!(err.line, 3);
    }

    #[test]
    fn tsv_has_header_and_total_column() {
        let t = count_ngrams(&corpus(&[&["ya", "da"]]), g(2));
        let mut out = Vec::new();
        t.to_count_file().write_tsv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "w1\tw2\tn11\tn1p\tnp1\tnpp\nya\tda\t1\t1\t1\t1\n"
        );
    }

    #[test]
    fn contingency_of_missing_ngram_is_an_error() {
        let t = count_ngrams(&corpus(&[&["a", "b"]]), g(2));
        assert!(matches!(t.contingency(&["b", "a"]), Err(CountError::Missing(_))));
        assert!(t.contingency(&["a", "b"]).is_ok());
    }

    #[test]
    fn merge_adds_pointwise() {
        let a = corpus(&[&["a", "b", "c"], &["b", "c"]]);
        let b = corpus(&[&["c", "a", "b"], &["z", "b", "c"]]);
        let mut both = a.clone();
        both.append(b.clone());
        let mut merged = count_ngrams(&a, g(2));
        merged.merge(&count_ngrams(&b, g(2)));
        assert_eq!(merged.entries(), count_ngrams(&both, g(2)).entries());
        assert!(merged.marginals_consistent());
    }
}
