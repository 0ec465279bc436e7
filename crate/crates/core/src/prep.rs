//! Corpus preparation: decoding, locale-aware lowercasing, segmentation at
//! delimiters and tokenization.
//!
//! The output of this stage is a [`SegmentedCorpus`]. Its line-per-segment
//! serialization (tokens separated by a single space) is the input contract of
//! the counting stage.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::PrepError;

/// Case-folding rule set applied by [`normalize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LocaleRules {
    /// Unicode default lowercasing with the dotted/dotless I override
    /// (`I` → `ı`, `İ` → `i`).
    #[default]
    Turkish,
    /// Plain Unicode default lowercasing.
    Default,
}

/// Text encodings accepted on input. Everything is converted to UTF-8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InputEncoding {
    #[default]
    Utf8,
    /// Windows-1254 (Turkish), a superset of ISO-8859-9 in the printable range.
    Windows1254,
    Iso8859_9,
}

impl std::str::FromStr for InputEncoding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "utf-8" | "utf8" => Ok(InputEncoding::Utf8),
            "windows-1254" | "cp1254" => Ok(InputEncoding::Windows1254),
            "iso-8859-9" | "latin5" => Ok(InputEncoding::Iso8859_9),
            other => Err(format!("unsupported encoding `{other}`")),
        }
    }
}

/// Raw document text tagged with where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawText {
    pub content: String,
    pub source_id: String,
}

impl RawText {
    pub fn new(content: impl Into<String>, source_id: impl Into<String>) -> Self {
        RawText {
            content: content.into(),
            source_id: source_id.into(),
        }
    }

    /// Decodes `bytes` with `encoding`. Invalid UTF-8 is rejected with the
    /// offset of the first bad byte.
    pub fn from_bytes(bytes: &[u8], source_id: impl Into<String>, encoding: InputEncoding) -> Result<Self, PrepError> {
        let source_id = source_id.into();
        let content = match encoding {
            InputEncoding::Utf8 => {
                let (bom, body) = match bytes.strip_prefix(b"\xEF\xBB\xBF") {
                    Some(rest) => (3, rest),
                    None => (0, bytes),
                };
                match std::str::from_utf8(body) {
                    Ok(s) => s.to_owned(),
                    Err(e) => {
                        return Err(PrepError::Decode {
                            source_id,
                            offset: bom + e.valid_up_to(),
                        });
                    }
                }
            }
            InputEncoding::Windows1254 | InputEncoding::Iso8859_9 => {
                // Both labels resolve to windows-1254 in the WHATWG registry.
                let (cow, _) = encoding_rs::WINDOWS_1254.decode_without_bom_handling(bytes);
                cow.into_owned()
            }
        };
        Ok(RawText { content, source_id })
    }
}

/// Settings shared by [`normalize`], [`segment`] and [`tokenize`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormalizationConfig {
    pub locale_rules: LocaleRules,
    pub segment_delimiters: BTreeSet<char>,
    pub nontoken_chars: BTreeSet<char>,
}

/// Characters that end a segment unless configured otherwise.
pub const DEFAULT_DELIMITERS: [char; 6] = ['\n', ',', '.', '!', '?', '…'];

impl Default for NormalizationConfig {
    fn default() -> Self {
        let segment_delimiters: BTreeSet<char> = DEFAULT_DELIMITERS.into_iter().collect();
        // ASCII punctuation except the apostrophe (token-internal in Turkish
        // proper-noun suffixation) and the characters already used as
        // delimiters.
        let nontoken_chars = (0u8..=127)
            .map(char::from)
            .filter(|c| c.is_ascii_punctuation() && *c != '\'')
            .filter(|c| !segment_delimiters.contains(c))
            .collect();
        NormalizationConfig {
            locale_rules: LocaleRules::Turkish,
            segment_delimiters,
            nontoken_chars,
        }
    }
}

impl NormalizationConfig {
    /// Rejects configurations where a delimiter or nontoken character is a
    /// letter or digit, or where the two sets overlap.
    pub fn validate(&self) -> Result<(), PrepError> {
        let bad = self
            .segment_delimiters
            .iter()
            .chain(self.nontoken_chars.iter())
            .find(|c| c.is_alphanumeric());
        if let Some(c) = bad {
            return Err(PrepError::Config(format!(
                "character {c:?} is alphanumeric and cannot be a delimiter or nontoken"
            )));
        }
        if let Some(c) = self.segment_delimiters.intersection(&self.nontoken_chars).next() {
            return Err(PrepError::Config(format!(
                "character {c:?} is both a segment delimiter and a nontoken character"
            )));
        }
        Ok(())
    }

    /// Replaces the nontoken set with every non-whitespace character found in
    /// `list` (the contents of a nontoken file). Characters that are already
    /// segment delimiters are skipped.
    pub fn with_nontoken_list(mut self, list: &str) -> Self {
        self.nontoken_chars = list
            .chars()
            .filter(|c| !c.is_whitespace())
            .filter(|c| !self.segment_delimiters.contains(c))
            .collect();
        self
    }

    fn is_separator(&self, c: char) -> bool {
        c.is_whitespace() || self.nontoken_chars.contains(&c)
    }
}

/// Lowercases `text` under the configured locale. Characters without case are
/// passed through unchanged.
pub fn normalize(text: &str, cfg: &NormalizationConfig) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match (cfg.locale_rules, c) {
            (LocaleRules::Turkish, 'I') => out.push('ı'),
            (LocaleRules::Turkish, 'İ') => out.push('i'),
            (_, c) => out.extend(c.to_lowercase()),
        }
    }
    out
}

/// Splits normalized text at segment delimiters, trimming whitespace and
/// dropping segments that are empty or consist only of separators.
pub fn segment(text: &str, cfg: &NormalizationConfig) -> Vec<String> {
    text.split(|c: char| cfg.segment_delimiters.contains(&c))
        .filter(|s| s.chars().any(|c| !cfg.is_separator(c)))
        .map(|s| s.trim().to_owned())
        .collect()
}

/// Splits a segment into maximal runs of non-separator characters.
pub fn tokenize<'a>(segment: &'a str, cfg: &NormalizationConfig) -> Vec<&'a str> {
    segment
        .split(|c: char| cfg.is_separator(c))
        .filter(|t| !t.is_empty())
        .collect()
}

/// Token sequences that n-grams may not cross.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentedCorpus {
    segments: Vec<Vec<String>>,
    token_count: usize,
}

impl SegmentedCorpus {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a corpus from pre-tokenized segments; empty segments are dropped.
    pub fn from_segments<I, S, T>(segments: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let mut corpus = SegmentedCorpus::new();
        for seg in segments {
            corpus.push_segment(seg.into_iter().map(Into::into).collect());
        }
        corpus
    }

    /// Runs the whole preparation recipe over one document.
    pub fn from_text(text: &RawText, cfg: &NormalizationConfig) -> Self {
        let mut corpus = SegmentedCorpus::new();
        corpus.extend_from_text(text, cfg);
        corpus
    }

    pub fn extend_from_text(&mut self, text: &RawText, cfg: &NormalizationConfig) {
        let normalized = normalize(&text.content, cfg);
        for seg in segment(&normalized, cfg) {
            let tokens = tokenize(&seg, cfg).into_iter().map(str::to_owned).collect();
            self.push_segment(tokens);
        }
    }

    /// Appends all segments of `other`, keeping their order.
    pub fn append(&mut self, other: SegmentedCorpus) {
        self.token_count += other.token_count;
        self.segments.extend(other.segments);
    }

    fn push_segment(&mut self, tokens: Vec<String>) {
        if tokens.is_empty() {
            return;
        }
        self.token_count += tokens.len();
        self.segments.push(tokens);
    }

    pub fn segments(&self) -> &[Vec<String>] {
        &self.segments
    }

    pub fn token_count(&self) -> usize {
        self.token_count
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    /// Writes one segment per line with tokens separated by single spaces.
    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        for seg in &self.segments {
            writeln!(w, "{}", seg.join(" "))?;
        }
        Ok(())
    }

    /// Parses the line-per-segment format written by [`SegmentedCorpus::write_to`].
    pub fn parse(text: &str) -> Self {
        SegmentedCorpus::from_segments(text.lines().map(|l| l.split_whitespace()))
    }
}

impl fmt::Display for SegmentedCorpus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for seg in &self.segments {
            writeln!(f, "{}", seg.join(" "))?;
        }
        Ok(())
    }
}
