//! `l1forge` command-line front end.
//!
//! Every subcommand is a thin wrapper over `l1forge-core`. [`run`] is the
//! whole program; `main` only forwards the process arguments and exit code.

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;

/// Environment variable capping the worker threads used for parallel work.
pub const THREADS_ENV: &str = "L1FORGE_THREADS";

#[derive(Debug, Parser, Serialize)]
#[command(name = "l1forge", version, about = "Build, augment and evaluate L1-interference error corpora")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Convert standoff `.txt`/`.ann` pairs to a JSONL corpus
    Import(ImportArgs),
    /// Drop sentences shorter than a token threshold
    Filter(FilterArgs),
    /// Build per-tag correction dictionaries from an annotated corpus
    BuildDict(BuildDictArgs),
    /// Inject synthetic errors into clean sentences
    Inject(InjectArgs),
    /// Generate erroneous sentences with a chat-completions endpoint
    Gen(GenArgs),
    /// Annotate sentences with a chat-completions endpoint
    Annotate(AnnotateArgs),
    /// Remove near-duplicate sentences
    Dedup(DedupArgs),
    /// Write a TSV review sheet for expert verdicts
    ReviewExport(ReviewExportArgs),
    /// Keep the sentences accepted in a review sheet
    ReviewApply(ReviewApplyArgs),
    /// Seeded train/test split
    Split(SplitArgs),
    /// Span and sentence counts by tag, source and split
    Stats(StatsArgs),
    /// Span-level precision, recall and F1 against a gold corpus
    Eval(EvalArgs),
    /// Pairwise Cohen's kappa between annotators
    Iaa(IaaArgs),
    /// Self-BLEU and n-gram novelty
    Diversity(DiversityArgs),
    /// Sentence-initial word frequencies
    FirstWords(FirstWordsArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Import(_) => "import",
            Command::Filter(_) => "filter",
            Command::BuildDict(_) => "build-dict",
            Command::Inject(_) => "inject",
            Command::Gen(_) => "gen",
            Command::Annotate(_) => "annotate",
            Command::Dedup(_) => "dedup",
            Command::ReviewExport(_) => "review-export",
            Command::ReviewApply(_) => "review-apply",
            Command::Split(_) => "split",
            Command::Stats(_) => "stats",
            Command::Eval(_) => "eval",
            Command::Iaa(_) => "iaa",
            Command::Diversity(_) => "diversity",
            Command::FirstWords(_) => "first-words",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    #[default]
    Table,
}

#[derive(Debug, Args, Serialize)]
pub struct ImportArgs {
    /// Directory holding `<doc>.txt` and `<doc>.ann` pairs
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct FilterArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = l1forge_core::corpus::DEFAULT_MIN_TOKENS)]
    pub min_tokens: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct BuildDictArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Dictionary TSV (`tag  correct  erroneous  count`)
    #[arg(long)]
    pub out: PathBuf,
    /// Restrict to these tags (repeatable); all five by default
    #[arg(long = "tag")]
    pub tags: Vec<String>,
    /// Extra `tag  correct  erroneous  [count]` lines to merge in
    #[arg(long)]
    pub suggestions: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dict,
    Tense,
    Translit,
}

#[derive(Debug, Args, Serialize)]
pub struct InjectArgs {
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Dictionary TSV from `build-dict` (method dict)
    #[arg(long)]
    pub dict: Option<PathBuf>,
    /// Letter overrides for the transliteration table, `cyrillic  latin` per line
    #[arg(long)]
    pub translit_table: Option<PathBuf>,
    /// English-to-Russian noun list replacing the bundled one
    #[arg(long)]
    pub nouns: Option<PathBuf>,
    /// Translation service base URL; replaces the noun list (method translit)
    #[arg(long)]
    pub translate_endpoint: Option<String>,
    /// Pre-tagged tokens (`sent_id  token  start  end  coarse_pos`)
    #[arg(long)]
    pub pretagged: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EndpointArgs {
    /// Base URL; requests go to `<endpoint>/chat/completions`
    #[arg(long)]
    pub endpoint: String,
    #[arg(long)]
    pub model: String,
    #[arg(long, default_value_t = 1.0)]
    pub temperature: f64,
    #[arg(long, default_value_t = 4)]
    pub max_in_flight: usize,
    /// Retries after transport errors, 429 and 5xx
    #[arg(long, default_value_t = 4)]
    pub retries: u32,
    #[arg(long, default_value_t = 120)]
    pub timeout_secs: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    /// Annotated corpus the prompt examples are drawn from
    #[arg(long)]
    pub source: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub endpoint: EndpointArgs,
    /// Number of sentences to collect
    #[arg(long)]
    pub target: usize,
    #[arg(long, default_value_t = 10)]
    pub examples: usize,
    #[arg(long, default_value_t = 4)]
    pub paraphrases: usize,
    /// Stop after this many requests even if the target is not met
    #[arg(long)]
    pub max_requests: Option<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct AnnotateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub endpoint: EndpointArgs,
    #[arg(long, default_value_t = 10)]
    pub batch_size: usize,
    /// Tag instructions replacing the bundled text
    #[arg(long)]
    pub instructions: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DedupArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = l1forge_core::llm::DEFAULT_DEDUP_THRESHOLD)]
    pub threshold: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ReviewExportArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ReviewApplyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub sheet: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Keep rows without a verdict instead of failing
    #[arg(long)]
    pub keep_unreviewed: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SplitArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = l1forge_core::corpus::DEFAULT_TRAIN_RATIO)]
    pub ratio: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out_train: PathBuf,
    #[arg(long)]
    pub out_test: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct StatsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Expected counts; any difference exits with status 2
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Strict,
    Overlap,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Strict)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Labels {
    FirstTag,
    TagSet,
}

#[derive(Debug, Args, Serialize)]
pub struct IaaArgs {
    /// One corpus per annotator, same sentence ids (at least two)
    #[arg(long = "annotator", required = true)]
    pub annotators: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Labels::FirstTag)]
    pub labels: Labels,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args, Serialize)]
pub struct DiversityArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Reference corpus for novelty; the larger side is downsampled for Self-BLEU
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = l1forge_core::metrics::DEFAULT_MAX_N)]
    pub max_n: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args, Serialize)]
pub struct FirstWordsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub top: usize,
    /// Also draw this many weighted samples
    #[arg(long, default_value_t = 0)]
    pub sample: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

/// Failure classes and their exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or configuration: 1.
    Usage(String),
    /// Unreadable, invalid or inconsistent data: 2.
    Data(anyhow::Error),
    /// Network or endpoint failure: 3.
    Transport(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Transport(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Data(e) => write!(f, "{e:#}"),
            Failure::Transport(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    // The global pool can only be configured once per process.
    if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
        log::debug!("thread pool already initialised; {THREADS_ENV} ignored");
    }
    Ok(())
}

/// Parses `argv` (program name first) and runs the subcommand. Returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .try_init();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match configure_threads().and_then(|_| commands::dispatch(&cli)) {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("l1forge {}: {failure}", cli.command.name());
            failure.exit_code()
        }
    }
}
