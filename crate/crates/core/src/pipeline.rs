//! The stages behind the command-line subcommands, usable as a library.
//!
//! Each stage talks to the next only through its file format: the prepared
//! corpus (one segment per line), the count file and the score file.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::count::{count_interned, CountFile, CutoffPolicy, GramSize, InternedCorpus, NgramCountTable, OutputFormat};
use crate::error::{FormatError, PipelineError};
use crate::evaluation::{evaluate, EvaluationConfig, EvaluationReport};
use crate::measures::{score_count_file, MeasureId, MeasureOptions};
use crate::prep::{normalize, segment, tokenize, InputEncoding, NormalizationConfig, RawText};
use crate::ranking::{RankedList, ScoreFileFormat};

/// Settings shared by all subcommands. Loaded from a TOML file, command-line
/// flags fill whatever the file leaves out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub ngrams: Vec<GramSize>,
    /// Measures to compute; empty means every measure defined for each size.
    pub measures: Vec<MeasureId>,
    pub min_freq: u64,
    pub encoding: InputEncoding,
    pub normalization: NormalizationConfig,
    pub evaluation: EvaluationConfig,
    pub measure_options: MeasureOptions,
    pub output_dir: PathBuf,
    pub count_format: OutputFormat,
    pub precision: usize,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: Vec::new(),
            ngrams: vec![GramSize::new(2).expect("valid size")],
            measures: Vec::new(),
            min_freq: 10,
            encoding: InputEncoding::Utf8,
            normalization: NormalizationConfig::default(),
            evaluation: EvaluationConfig::default(),
            measure_options: MeasureOptions::default(),
            output_dir: PathBuf::from("mwu-out"),
            count_format: OutputFormat::Nsp,
            precision: 6,
            threads: None,
        }
    }
}

impl RunConfig {
    /// Overlays the settings of a TOML document onto `self`.
    pub fn overlay_toml(&self, text: &str) -> Result<RunConfig, PipelineError> {
        let file: toml::Table = toml::from_str(text).map_err(|e| PipelineError::Usage(format!("config: {e}")))?;
        let base = toml::Table::try_from(self).map_err(|e| PipelineError::Usage(format!("config: {e}")))?;
        let merged = merge_tables(base, file);
        merged
            .try_into()
            .map_err(|e: toml::de::Error| PipelineError::Usage(format!("config: {e}")))
    }

    /// Rejects inconsistent settings before any work starts.
    pub fn validate(&self) -> Result<(), PipelineError> {
        self.normalization.validate()?;
        CutoffPolicy::new(self.min_freq)?;
        self.evaluation.validate().map_err(PipelineError::Usage)?;
        if self.ngrams.is_empty() {
            return Err(PipelineError::Usage("no n-gram sizes requested".into()));
        }
        for &n in &self.ngrams {
            for &m in &self.measures {
                if !m.applies_to(n) {
                    return Err(PipelineError::Usage(format!(
                        "{m} is not defined for {n}-grams; {n}-grams support: {}",
                        applicable_names(n)
                    )));
                }
            }
        }
        Ok(())
    }

    /// (n, measure) pairs this configuration asks for.
    pub fn jobs(&self) -> Vec<(GramSize, MeasureId)> {
        let mut jobs = Vec::new();
        for &n in &self.ngrams {
            let ms = if self.measures.is_empty() {
                MeasureId::applicable(n)
            } else {
                self.measures.clone()
            };
            jobs.extend(ms.into_iter().map(|m| (n, m)));
        }
        jobs
    }
}

pub fn applicable_names(n: GramSize) -> String {
    MeasureId::applicable(n)
        .iter()
        .map(|m| m.name())
        .collect::<Vec<_>>()
        .join(", ")
}

fn merge_tables(mut base: toml::Table, over: toml::Table) -> toml::Table {
    for (k, v) in over {
        match (base.remove(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => {
                base.insert(k, toml::Value::Table(merge_tables(b, o)));
            }
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
    base
}

/// Runs `f` on a rayon pool with `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, PipelineError> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| PipelineError::Usage(format!("cannot start {t} threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Expands directories into their files (recursively, sorted by path).
/// `-` stands for standard input.
pub fn expand_inputs(paths: &[PathBuf]) -> Result<Vec<PathBuf>, PipelineError> {
    let mut out = Vec::new();
    for p in paths {
        if p.as_os_str() == "-" {
            out.push(p.clone());
        } else if p.is_dir() {
            let mut files = Vec::new();
            collect_files(p, &mut files)?;
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn collect_files(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), PipelineError> {
    let entries = fs::read_dir(dir).map_err(|e| PipelineError::io(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| PipelineError::io(dir, e))?.path();
        if path.is_dir() {
            collect_files(&path, out)?;
        } else {
            out.push(path);
        }
    }
    Ok(())
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>, PipelineError> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| PipelineError::io("<stdin>", e))?;
        return Ok(buf);
    }
    fs::read(path).map_err(|e| PipelineError::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String, PipelineError> {
    let bytes = read_bytes(path)?;
    String::from_utf8(bytes).map_err(|e| {
        PipelineError::Prep(crate::error::PrepError::Decode {
            source_id: path.display().to_string(),
            offset: e.utf8_error().valid_up_to(),
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PrepStats {
    pub documents: usize,
    pub tokens: usize,
    pub segments: usize,
}

/// Prepares one document and writes its segments, one per line.
pub fn prep_document<W: Write>(text: &RawText, cfg: &NormalizationConfig, mut out: W) -> io::Result<PrepStats> {
    let mut stats = PrepStats {
        documents: 1,
        ..Default::default()
    };
    let normalized = normalize(&text.content, cfg);
    let mut line = String::new();
    for seg in segment(&normalized, cfg) {
        let tokens = tokenize(&seg, cfg);
        if tokens.is_empty() {
            continue;
        }
        line.clear();
        for (i, t) in tokens.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(t);
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
        stats.tokens += tokens.len();
        stats.segments += 1;
    }
    Ok(stats)
}

/// Prepares every input in order and streams the corpus to `out`.
pub fn run_prep<W: Write>(
    paths: &[PathBuf],
    cfg: &NormalizationConfig,
    encoding: InputEncoding,
    mut out: W,
) -> Result<PrepStats, PipelineError> {
    cfg.validate()?;
    let mut total = PrepStats::default();
    for path in expand_inputs(paths)? {
        let bytes = read_bytes(&path)?;
        let text = RawText::from_bytes(&bytes, path.display().to_string(), encoding)?;
        let stats = prep_document(&text, cfg, &mut out).map_err(|e| PipelineError::io(&path, e))?;
        total.documents += 1;
        total.tokens += stats.tokens;
        total.segments += stats.segments;
    }
    Ok(total)
}

/// Counts a prepared corpus and applies the cutoff.
pub fn run_count(corpus: &str, n: GramSize, cutoff: CutoffPolicy) -> NgramCountTable {
    count_interned(InternedCorpus::from_lines(corpus), n).apply_cutoff(cutoff)
}

pub fn write_counts<W: Write>(table: &NgramCountTable, format: OutputFormat, out: W) -> io::Result<()> {
    table.to_count_file().write(format, out)
}

/// Scores and ranks every n-gram of a count file.
pub fn run_score(count_file: &str, measure: MeasureId, opts: &MeasureOptions) -> Result<RankedList, PipelineError> {
    let file = CountFile::parse_nsp(count_file)?;
    measure.check_applicable(file.n).map_err(|_| {
        PipelineError::Usage(format!(
            "{measure} is not defined for {n}-grams; {n}-grams support: {}",
            applicable_names(file.n),
            n = file.n
        ))
    })?;
    let scores = score_count_file(&file, measure, opts)?;
    Ok(RankedList::rank(measure, file.n, scores)?)
}

/// Evaluates score files (already ranked).
pub fn run_eval(score_files: &[(PathBuf, String)], cfg: &EvaluationConfig) -> Result<EvaluationReport, PipelineError> {
    let lists = score_files
        .iter()
        .map(|(path, text)| ScoreFileFormat::parse(text).map_err(|e: FormatError| e.in_file(path)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(evaluate(&lists, cfg)?)
}

/// Artifacts written by [`run_all`].
#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub prep: PrepStats,
    pub count_files: Vec<PathBuf>,
    pub score_files: Vec<PathBuf>,
    pub report: Option<EvaluationReport>,
}

fn write_file(path: &Path, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), PipelineError> {
    let file = fs::File::create(path).map_err(|e| PipelineError::io(path, e))?;
    let mut w = io::BufWriter::new(file);
    f(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| PipelineError::io(path, e))
}

/// Runs prep, count, score, eval and report into `cfg.output_dir`.
pub fn run_all(cfg: &RunConfig) -> Result<RunSummary, PipelineError> {
    cfg.validate()?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
    let cutoff = CutoffPolicy::new(cfg.min_freq)?;
    let mut summary = RunSummary::default();

    let corpus_path = dir.join("corpus.txt");
    let mut corpus = Vec::new();
    summary.prep = run_prep(&cfg.inputs, &cfg.normalization, cfg.encoding, &mut corpus)?;
    write_file(&corpus_path, |w| w.write_all(&corpus))?;
    let corpus = String::from_utf8(corpus).expect("prep writes UTF-8");

    let format = ScoreFileFormat {
        precision: cfg.precision,
    };
    let mut score_files = Vec::new();
    for &n in &cfg.ngrams {
        let table = with_threads(cfg.threads, || run_count(&corpus, n, cutoff))?;
        let count_path = dir.join(format!("{n}gram.count"));
        let mut count_text = Vec::new();
        write_counts(&table, OutputFormat::Nsp, &mut count_text).map_err(|e| PipelineError::io(&count_path, e))?;
        write_file(&count_path, |w| w.write_all(&count_text))?;
        summary.count_files.push(count_path);
        let count_text = String::from_utf8(count_text).expect("count files are UTF-8");

        for (_, measure) in cfg.jobs().into_iter().filter(|(jn, _)| *jn == n) {
            let ranked = with_threads(cfg.threads, || run_score(&count_text, measure, &cfg.measure_options))??;
            let score_path = dir.join(format!("{n}gram.{measure}.txt"));
            let mut text = Vec::new();
            format
                .write(&ranked, &mut text)
                .map_err(|e| PipelineError::io(&score_path, e))?;
            write_file(&score_path, |w| w.write_all(&text))?;
            let depth = cfg.evaluation.inspection_depth;
            let top_path = dir.join(format!("{n}gram.{measure}.top{depth}.txt"));
            write_file(&top_path, |w| format.write(&ranked.truncated(depth), w))?;
            score_files.push((score_path.clone(), String::from_utf8(text).expect("UTF-8")));
            summary.score_files.push(score_path);
        }
    }

    let non_empty: Vec<_> = score_files
        .into_iter()
        .filter(|(_, text)| text.lines().nth(1).is_some())
        .collect();
    let report = run_eval(&non_empty, &cfg.evaluation)?;
    let json_path = dir.join("report.json");
    write_file(&json_path, |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        writeln!(w)
    })?;
    let text_path = dir.join("report.txt");
    write_file(&text_path, |w| w.write_all(report.render_text().as_bytes()))?;
    summary.report = Some(report);
    Ok(summary)
}
