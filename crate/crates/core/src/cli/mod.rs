//! The `wh` command line: training, the bundled experiments, embedding
//! export and benchmarking. Every run writes its outputs and a
//! `manifest.json` that `wh rerun` can replay.
//!
//! Any subcommand flag may also come from a `--config` file of
//! `key = value` lines; flags given on the command line win.

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Serialize, Serializer};

use crate::error::Error;
use crate::rule::Precision;

pub use config::{config_flags, flatten, parse_config};
pub use output::{Manifest, MANIFEST_FILE};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "WH_OUTPUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Help, version, or a malformed command line, as rendered by clap.
    #[error("{0}")]
    Clap(#[from] clap::Error),
    #[error("{0}")]
    Usage(String),
    /// Input could not be read or output could not be written.
    #[error(transparent)]
    Input(Error),
    #[error(transparent)]
    Runtime(Error),
}

impl CliError {
    /// 0 for help and version, 2 for usage and I/O problems, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Clap(e) if !e.use_stderr() => 0,
            CliError::Clap(_) | CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } => CliError::Input(e),
            e => CliError::Runtime(e),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "wh",
    version,
    about = "Error-correction learning over event streams"
)]
pub struct Cli {
    /// Directory for outputs and the run manifest.
    #[arg(long, global = true, env = OUTPUT_DIR_ENV, default_value = "wh-out")]
    pub out_dir: PathBuf,
    /// Worker threads for data-parallel kernels (benchmark dense backend).
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// File of `key = value` lines supplying subcommand flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a weight matrix on an event file.
    Train(TrainArgs),
    /// Learn colour names from cone-cell cues and trace the weights.
    SimulateColor(ColorArgs),
    /// Compare repeated training with least squares on Gaussian data.
    Converge(ConvergeArgs),
    /// Train on context windows and export word embeddings.
    Embed(EmbedArgs),
    /// Time the dense and sparse backends on a random batch.
    Bench(BenchArgs),
    /// Impute, scale and train on a pupil table; export weight features.
    Pupil(PupilArgs),
    /// Repeat the run recorded in a manifest.
    Rerun(RerunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Train(_) => "train",
            Command::SimulateColor(_) => "simulate-color",
            Command::Converge(_) => "converge",
            Command::Embed(_) => "embed",
            Command::Bench(_) => "bench",
            Command::Pupil(_) => "pupil",
            Command::Rerun(_) => "rerun",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventFormat {
    /// TSV with `cues` and `outcomes` columns of `_`-joined tokens.
    Indicator,
    /// CSV of numbers with `NA` for missing values.
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering {
    AsGiven,
    Shuffled,
    Sorted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelBackend {
    Sparse,
    Dense,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Imputation {
    ImputeThenScale,
    ScaleThenImpute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    MostDiverse,
    SampleDiverse,
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Script {
    Latin,
    Cyrillic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchBackends {
    Dense,
    Sparse,
    Both,
}

fn display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Wavelength interval `lo:hi` in nm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

impl FromStr for Band {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
        let lo = lo.trim().parse::<f64>().map_err(|e| e.to_string())?;
        let hi = hi.trim().parse::<f64>().map_err(|e| e.to_string())?;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(format!("empty band {s:?}"));
        }
        Ok(Band { lo, hi })
    }
}

#[derive(Clone, Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct TrainArgs {
    /// Event file.
    #[arg(long)]
    pub events: PathBuf,
    #[arg(long, value_enum, default_value_t = EventFormat::Indicator)]
    pub format: EventFormat,
    /// Learning rate.
    #[arg(long, default_value_t = 0.01)]
    pub gamma: f64,
    /// Event order [default: as-given, or shuffled when --shuffle-seed is set].
    #[arg(long, value_enum)]
    pub ordering: Option<Ordering>,
    /// Seed of the per-epoch shuffles [default: 1].
    #[arg(long)]
    pub shuffle_seed: Option<u64>,
    /// Passes over the events (as-given and shuffled orders).
    #[arg(long, default_value_t = 1)]
    pub epochs: usize,
    /// Consecutive presentations per event (sorted order).
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    #[arg(long, default_value_t = Precision::Double)]
    #[serde(serialize_with = "display")]
    pub precision: Precision,
    /// Update kernel for indicator events.
    #[arg(long, value_enum, default_value_t = KernelBackend::Sparse)]
    pub backend: KernelBackend,
    /// Weights to trace, as comma-separated `cue:outcome` labels.
    #[arg(long)]
    pub watch: Option<String>,
    /// Record traced weights every this many steps [default: automatic].
    #[arg(long)]
    pub trace_stride: Option<u64>,
    /// Numeric format: comma-separated cue columns [default: all others].
    #[arg(long)]
    pub cue_columns: Option<String>,
    /// Numeric format: comma-separated 0/1 or real-valued outcome columns.
    #[arg(long)]
    pub outcome_columns: Option<String>,
    /// Numeric format: a categorical outcome column, expanded one-hot.
    #[arg(long)]
    pub label_column: Option<String>,
    /// Numeric format: treat outcome columns as real-valued criteria.
    #[arg(long)]
    pub numeric_outcomes: bool,
    #[arg(long, value_enum, default_value_t = Imputation::ImputeThenScale)]
    pub missing_order: Imputation,
}

#[derive(Clone, Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ColorArgs {
    /// Number of learning events.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Record weights every this many steps [default: automatic].
    #[arg(long)]
    pub trace_stride: Option<u64>,
    /// Wavelengths reported as blue, `lo:hi` nm, half-open.
    #[arg(long, default_value = "450:490")]
    #[serde(serialize_with = "display")]
    pub blue: Band,
    /// Wavelengths reported as green, `lo:hi` nm, half-open.
    #[arg(long, default_value = "500:580")]
    #[serde(serialize_with = "display")]
    pub green: Band,
    /// Wavelengths reported as red, `lo:hi` nm, closed.
    #[arg(long, default_value = "620:750")]
    #[serde(serialize_with = "display")]
    pub red: Band,
}

#[derive(Clone, Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ConvergeArgs {
    /// Sample size.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Seed of the Gaussian sample.
    #[arg(long, default_value_t = 1)]
    pub data_seed: u64,
    #[arg(long, default_value_t = 0.0001)]
    pub gamma: f64,
    /// Shuffled epochs, and per-trial repeats of the sorted regime.
    #[arg(long, default_value_t = 10_000)]
    pub repeats: usize,
    /// Seed of the epoch shuffles.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Clone, Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct EmbedArgs {
    /// Plain-text corpus; events are built from four-word windows.
    #[arg(long, conflicts_with = "events", required_unless_present = "events")]
    pub corpus: Option<PathBuf>,
    /// Indicator event file with context cues and target outcomes.
    #[arg(long)]
    pub events: Option<PathBuf>,
    /// Keep only sentences written in this script.
    #[arg(long, value_enum)]
    pub alphabet: Option<Script>,
    #[arg(long, default_value_t = 0.001)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1)]
    pub epochs: usize,
    /// Embedding width.
    #[arg(long, default_value_t = 300)]
    pub dim: usize,
    #[arg(long, value_enum, default_value_t = Selection::MostDiverse)]
    pub selection: Selection,
    /// Seed of the sampled selections.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Keep only the first this many target words.
    #[arg(long)]
    pub max_words: Option<usize>,
    /// Gold similarity pairs (TSV: word1, word2, score).
    #[arg(long)]
    pub gold: Option<PathBuf>,
    /// Embedding file whose vocabulary restricts the evaluated pairs.
    #[arg(long, requires = "gold")]
    pub intersect: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct BenchArgs {
    /// Number of cues.
    #[arg(long, default_value_t = 10_000)]
    pub j: usize,
    /// Number of outcomes.
    #[arg(long, default_value_t = 10_000)]
    pub k: usize,
    /// Probability that a unit is active in an event.
    #[arg(long, default_value_t = 0.01)]
    pub density: f64,
    /// Events in the random batch.
    #[arg(long, default_value_t = 100)]
    pub events: usize,
    #[arg(long, value_enum, default_value_t = BenchBackends::Both)]
    pub backend: BenchBackends,
    #[arg(long, default_value_t = 0.01)]
    pub gamma: f64,
    #[arg(long, default_value_t = Precision::Double)]
    #[serde(serialize_with = "display")]
    pub precision: Precision,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Clone, Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PupilArgs {
    /// Table with sample columns and a `condition` column [default: synthetic].
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 141)]
    pub trials: usize,
    #[arg(long, default_value_t = 60)]
    pub samples: usize,
    #[arg(long, default_value_t = 9)]
    pub conditions: usize,
    #[arg(long, default_value_t = 0.05)]
    pub missing_rate: f64,
    /// Seed of the synthetic table.
    #[arg(long, default_value_t = 1)]
    pub data_seed: u64,
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    /// Seed of the trial shuffle.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Imputation::ImputeThenScale)]
    pub missing_order: Imputation,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct RerunArgs {
    /// Manifest of the run to repeat.
    pub manifest: PathBuf,
}

/// Parses `args` (program name first), merges any config file, and runs.
pub fn run<I, T>(args: I) -> Result<Manifest, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let mut full = args.clone();
    if let Some(path) = config_path(&args) {
        let config = config::read_config(&path)?;
        full.extend(config_flags(&config, &args[1..]));
    }
    let cli = Cli::try_parse_from(full)?;
    match &cli.command {
        Command::Rerun(r) => {
            let explicit_out = args
                .iter()
                .filter_map(|a| a.to_str())
                .any(|a| a == "--out-dir" || a.starts_with("--out-dir="));
            rerun(&cli, r, explicit_out)
        }
        _ => commands::execute(&cli),
    }
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let a = a.to_str()?;
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Replays a manifest. `--out-dir` on the command line redirects the
/// outputs; otherwise they go where the original run wrote them.
fn rerun(cli: &Cli, args: &RerunArgs, explicit_out: bool) -> Result<Manifest, CliError> {
    let manifest = Manifest::read(&args.manifest)?;
    if manifest.command == "rerun" {
        return Err(CliError::Usage("cannot rerun a rerun manifest".into()));
    }
    let out_dir = if explicit_out {
        cli.out_dir.clone()
    } else {
        manifest.out_dir.clone()
    };
    let mut argv: Vec<OsString> = vec!["wh".into(), manifest.command.clone().into()];
    argv.extend(config_flags(&manifest.args, &[]));
    argv.push("--out-dir".into());
    argv.push(out_dir.into());
    argv.push("--threads".into());
    argv.push(manifest.threads.to_string().into());
    let replay = Cli::try_parse_from(argv)?;
    commands::execute(&replay)
}
