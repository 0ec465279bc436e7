//! Command-line front end.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::count::{CutoffPolicy, GramSize, OutputFormat};
use crate::error::PipelineError;
use crate::evaluation::{stopword_boundary_filter, EvaluationConfig};
use crate::measures::MeasureId;
use crate::pipeline::{self, read_text, run_all, with_threads, RunConfig};
use crate::prep::{InputEncoding, LocaleRules};
use crate::ranking::{compare_rankings, ScoreFileFormat};

#[derive(Debug, Parser)]
#[command(
    name = "mwu",
    version,
    about = "Multi-word unit extraction with association measures"
)]
pub struct Cli {
    /// TOML file with run settings; its values override command-line flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for counting and scoring (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize, segment and tokenize raw text into a corpus file.
    Prep(PrepArgs),
    /// Count n-grams of a prepared corpus.
    Count(CountArgs),
    /// Score every n-gram of a count file with one measure.
    Score(ScoreArgs),
    /// Filter, truncate or compare score files.
    Rank(RankArgs),
    /// Validate rankings against the anchor rules.
    Eval(EvalArgs),
    /// Run every stage and write all artifacts into a directory.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct PrepArgs {
    /// Input files or directories; `-` or nothing reads standard input.
    pub inputs: Vec<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// File listing characters that are not part of tokens.
    #[arg(long)]
    pub nontoken: Option<PathBuf>,
    #[arg(long, default_value = "utf-8")]
    pub encoding: InputEncoding,
    #[arg(long, value_enum, default_value_t = Locale::Turkish)]
    pub locale: Locale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Locale {
    Turkish,
    Default,
}

impl From<Locale> for LocaleRules {
    fn from(l: Locale) -> Self {
        match l {
            Locale::Turkish => LocaleRules::Turkish,
            Locale::Default => LocaleRules::Default,
        }
    }
}

#[derive(Debug, Args)]
pub struct CountArgs {
    /// Prepared corpus; `-` reads standard input.
    pub corpus: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub ngram: usize,
    /// Drop n-grams occurring fewer than this many times.
    #[arg(long, default_value_t = 10)]
    pub remove: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Nsp)]
    pub format: OutputFormat,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScoreFormat {
    Text,
    Tsv,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Count file in the plain (nsp) layout.
    pub count_file: PathBuf,
    #[arg(long)]
    pub measure: MeasureId,
    /// Digits after the decimal point.
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
    #[arg(long, value_enum, default_value_t = ScoreFormat::Text)]
    pub format: ScoreFormat,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    pub score_file: PathBuf,
    /// Keep only the first K entries.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Remove n-grams that start or end with a stop word.
    #[arg(long)]
    pub stop_filter: bool,
    /// Whitespace-separated stop words replacing the default set.
    #[arg(long)]
    pub stoplist: Option<PathBuf>,
    /// Print the overlap with another score file instead of the ranking.
    #[arg(long)]
    pub compare: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(required = true)]
    pub score_files: Vec<PathBuf>,
    /// How many top entries are inspected.
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub stoplist: Option<PathBuf>,
    /// Positive anchor bigram, e.g. "ya da".
    #[arg(long)]
    pub anchor: Option<String>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Input files or directories.
    pub inputs: Vec<PathBuf>,
    #[arg(short, long, default_value = "mwu-out")]
    pub output_dir: PathBuf,
    /// Gram sizes, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub ngram: Vec<usize>,
    /// Measures, comma-separated; default is every measure defined for each size.
    #[arg(long, value_delimiter = ',')]
    pub measure: Vec<MeasureId>,
    #[arg(long, default_value_t = 10)]
    pub remove: u64,
    #[arg(long)]
    pub nontoken: Option<PathBuf>,
    #[arg(long, default_value = "utf-8")]
    pub encoding: InputEncoding,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub stoplist: Option<PathBuf>,
    #[arg(long)]
    pub anchor: Option<String>,
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, PipelineError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).map_err(|e| PipelineError::io(p, e))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), PipelineError> {
    let mut w = output(path)?;
    let shown = path.map(Path::to_path_buf).unwrap_or_else(|| "<stdout>".into());
    f(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| PipelineError::io(shown, e))
}

fn base_config(cli: &Cli) -> Result<RunConfig, PipelineError> {
    Ok(RunConfig {
        threads: cli.threads,
        ..Default::default()
    })
}

fn finish(cli: &Cli, flags: RunConfig) -> Result<RunConfig, PipelineError> {
    let cfg = match &cli.config {
        Some(path) => flags.overlay_toml(&read_text(path)?)?,
        None => flags,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn evaluation_flags(
    mut cfg: EvaluationConfig,
    depth: Option<usize>,
    stoplist: Option<&Path>,
    anchor: Option<&str>,
) -> Result<EvaluationConfig, PipelineError> {
    if let Some(d) = depth {
        cfg.inspection_depth = d;
    }
    if let Some(p) = stoplist {
        cfg = cfg.with_stoplist(&read_text(p)?);
    }
    if let Some(a) = anchor {
        cfg = cfg.with_anchor(a);
    }
    Ok(cfg)
}

fn gram_size(n: usize) -> Result<GramSize, PipelineError> {
    GramSize::new(n).map_err(PipelineError::from)
}

/// Runs one parsed command line.
pub fn run(cli: Cli) -> Result<(), PipelineError> {
    let mut flags = base_config(&cli)?;
    match &cli.command {
        Command::Prep(a) => {
            flags.encoding = a.encoding;
            flags.normalization.locale_rules = a.locale.into();
            if let Some(p) = &a.nontoken {
                flags.normalization = flags.normalization.with_nontoken_list(&read_text(p)?);
            }
            let cfg = finish(&cli, flags)?;
            let inputs = if a.inputs.is_empty() {
                vec![PathBuf::from("-")]
            } else {
                a.inputs.clone()
            };
            let mut w = output(a.output.as_deref())?;
            pipeline::run_prep(&inputs, &cfg.normalization, cfg.encoding, &mut w)?;
            w.flush().map_err(|e| PipelineError::io("<output>", e))
        }
        Command::Count(a) => {
            flags.ngrams = vec![gram_size(a.ngram)?];
            flags.min_freq = a.remove;
            flags.count_format = a.format;
            let cfg = finish(&cli, flags)?;
            let corpus = read_text(&a.corpus)?;
            let n = cfg.ngrams[0];
            let table = with_threads(cfg.threads, || {
                pipeline::run_count(&corpus, n, CutoffPolicy::new(cfg.min_freq).expect("validated"))
            })?;
            emit(a.output.as_deref(), |w| {
                pipeline::write_counts(&table, cfg.count_format, w)
            })
        }
        Command::Score(a) => {
            flags.measures = vec![a.measure];
            flags.precision = a.precision;
            let cfg = finish(&cli, flags)?;
            let text = read_text(&a.count_file)?;
            let ranked = with_threads(cfg.threads, || {
                pipeline::run_score(&text, a.measure, &cfg.measure_options)
            })?
            .map_err(|e| match e {
                PipelineError::Format(f) => PipelineError::Format(f.in_file(&a.count_file)),
                e => e,
            })?;
            let fmt = ScoreFileFormat {
                precision: cfg.precision,
            };
            emit(a.output.as_deref(), |w| match a.format {
                ScoreFormat::Text => fmt.write(&ranked, w),
                ScoreFormat::Tsv => fmt.write_tsv(&ranked, w),
            })
        }
        Command::Rank(a) => {
            flags.evaluation = evaluation_flags(flags.evaluation, None, a.stoplist.as_deref(), None)?;
            flags.precision = a.precision;
            let cfg = finish(&cli, flags)?;
            let load = |p: &Path| -> Result<_, PipelineError> {
                ScoreFileFormat::parse(&read_text(p)?).map_err(|e| e.in_file(p).into())
            };
            let mut list = load(&a.score_file)?;
            if a.stop_filter {
                list = stopword_boundary_filter(&list, &cfg.evaluation);
            }
            if let Some(other) = &a.compare {
                let mut other = load(other)?;
                if a.stop_filter {
                    other = stopword_boundary_filter(&other, &cfg.evaluation);
                }
                let depth = a.depth.unwrap_or(cfg.evaluation.inspection_depth);
                let cmp = compare_rankings(&list, &other, depth)?;
                return emit(a.output.as_deref(), |w| {
                    writeln!(
                        w,
                        "depth={} overlap={} identical_prefix={}",
                        cmp.depth, cmp.overlap, cmp.identical_prefix
                    )
                });
            }
            if let Some(d) = a.depth {
                list = list.truncated(d);
            }
            let fmt = ScoreFileFormat {
                precision: cfg.precision,
            };
            emit(a.output.as_deref(), |w| fmt.write(&list, w))
        }
        Command::Eval(a) => {
            flags.evaluation = evaluation_flags(flags.evaluation, a.depth, a.stoplist.as_deref(), a.anchor.as_deref())?;
            let cfg = finish(&cli, flags)?;
            let files = a
                .score_files
                .iter()
                .map(|p| Ok((p.clone(), read_text(p)?)))
                .collect::<Result<Vec<_>, PipelineError>>()?;
            let report = pipeline::run_eval(&files, &cfg.evaluation)?;
            emit(a.output.as_deref(), |w| match a.format {
                ReportFormat::Text => w.write_all(report.render_text().as_bytes()),
                ReportFormat::Json => {
                    serde_json::to_writer_pretty(&mut *w, &report)?;
                    writeln!(w)
                }
            })
        }
        Command::Report(a) => {
            flags.inputs = a.inputs.clone();
            flags.output_dir = a.output_dir.clone();
            flags.ngrams = a.ngram.iter().map(|&n| gram_size(n)).collect::<Result<_, _>>()?;
            flags.measures = a.measure.clone();
            flags.min_freq = a.remove;
            flags.encoding = a.encoding;
            flags.precision = a.precision;
            if let Some(p) = &a.nontoken {
                flags.normalization = flags.normalization.with_nontoken_list(&read_text(p)?);
            }
            flags.evaluation = evaluation_flags(flags.evaluation, a.depth, a.stoplist.as_deref(), a.anchor.as_deref())?;
            let cfg = finish(&cli, flags)?;
            if cfg.inputs.is_empty() {
                return Err(PipelineError::Usage("report needs at least one input".into()));
            }
            let summary = run_all(&cfg)?;
            let mut err = io::stderr().lock();
            let _ = writeln!(
                err,
                "{} documents, {} segments, {} tokens; {} score files in {}",
                summary.prep.documents,
                summary.prep.segments,
                summary.prep.tokens,
                summary.score_files.len(),
                cfg.output_dir.display()
            );
            Ok(())
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
