//! The `ffa` command-line tool.
//!
//! Exit codes: 0 success, 1 a result check failed, 2 bad configuration or
//! usage, 3 file or format problems. Tables go to standard output, logs and
//! training progress to standard error. Every run writes a JSON manifest
//! that `ffa replay` can re-execute.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::anomaly::Aggregation;
use crate::error::Error;
use crate::loss::LossKind;
use crate::nn::Activation;
use crate::train::OptimizerKind;

pub use manifest::{sha256_file, FileDigest, Recorder, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ffa", version, about = "Feed-forward autoencoders: training, reconstruction, anomaly detection, denoising, kNN on latent features")]
pub struct Cli {
    /// Where to write the run manifest [default: ffa-<subcommand>.manifest.json]
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,

    /// More log output (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Train an autoencoder on an IDX image file and save it
    Train(TrainCmd),
    /// Reconstruct selected images with a saved model
    Reconstruct(ReconstructCmd),
    /// Rank observations by reconstruction error
    Anomaly(AnomalyCmd),
    /// Train a denoising autoencoder and measure how much noise it removes
    Denoise(DenoiseCmd),
    /// kNN classification on raw pixels and/or latent features
    Classify(ClassifyCmd),
    /// Curse-of-dimensionality table
    Curse(CurseCmd),
    /// Compare a linear autoencoder with PCA on synthetic data
    PcaEquiv(PcaEquivCmd),
    /// Re-run the command recorded in a manifest
    Replay(ReplayCmd),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Train(_) => "train",
            Command::Reconstruct(_) => "reconstruct",
            Command::Anomaly(_) => "anomaly",
            Command::Denoise(_) => "denoise",
            Command::Classify(_) => "classify",
            Command::Curse(_) => "curse",
            Command::PcaEquiv(_) => "pca-equiv",
            Command::Replay(_) => "replay",
        }
    }
}

/// Model and optimizer settings shared by the training subcommands.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Layer sizes, e.g. 784,16,784 [default depends on the subcommand]
    #[arg(long)]
    pub arch: Option<String>,
    #[arg(long, default_value = "bce")]
    pub loss: LossKind,
    #[arg(long, default_value = "adam")]
    pub optimizer: OptimizerKind,
    #[arg(long, default_value_t = 30)]
    pub epochs: usize,
    #[arg(long, default_value_t = 256)]
    pub batch: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,
    /// Weight-decay coefficient λ of the penalty λ·ΣW²
    #[arg(long, default_value_t = 0.0)]
    pub l2: f64,
    /// Tie decoder weights to the transposed encoder weights
    #[arg(long)]
    pub tied: bool,
    #[arg(long, default_value = "relu")]
    pub hidden_act: Activation,
    /// Output activation [default: sigmoid, or identity with --raw]
    #[arg(long)]
    pub out_act: Option<Activation>,
    /// Do not print per-epoch progress
    #[arg(long)]
    pub quiet: bool,
}

/// Input handling shared by every subcommand that reads IDX files.
#[derive(Debug, Clone, Args, Serialize)]
pub struct DataArgs {
    /// Keep raw byte values instead of dividing by 255
    #[arg(long)]
    pub raw: bool,
    /// Use only N training rows, the first N after a seeded shuffle
    #[arg(long, value_name = "N")]
    pub limit_train: Option<usize>,
    /// Use only N test or evaluation rows, the first N after a seeded shuffle
    #[arg(long, value_name = "N")]
    pub limit_test: Option<usize>,
    /// Seed for initialization, shuffling, subsampling and noise
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct TrainCmd {
    /// IDX image file
    #[arg(long)]
    pub data: PathBuf,
    /// Model file to write
    #[arg(long)]
    pub out: PathBuf,
    /// Also write a plain-text dump of the parameters
    #[arg(long)]
    pub text_out: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub input: DataArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ReconstructCmd {
    #[arg(long)]
    pub model: PathBuf,
    /// IDX image file
    #[arg(long)]
    pub data: PathBuf,
    /// Comma-separated row indices [default: 0..10]
    #[arg(long)]
    pub indices: Option<String>,
    /// PGM grid: originals above, reconstructions below
    #[arg(long)]
    pub grid_out: Option<PathBuf>,
    /// Per-image RE as `index,re` [default: standard output]
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
    #[arg(long)]
    pub raw: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct AnomalyCmd {
    /// IDX images the models are trained on
    #[arg(long)]
    pub train_data: PathBuf,
    /// IDX images to score
    #[arg(long)]
    pub eval_data: PathBuf,
    /// IDX file holding an image to append to the evaluation set
    #[arg(long)]
    pub inject: Option<PathBuf>,
    /// Row of --inject to append
    #[arg(long, default_value_t = 0)]
    pub inject_index: usize,
    /// Number of models trained with different seeds
    #[arg(long, default_value_t = 5)]
    pub ensemble: usize,
    /// How ensemble REs are combined
    #[arg(long, default_value = "mean")]
    pub agg: Aggregation,
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
    /// Ranked `index,re` table [default: standard output]
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
    /// PGM grid: top-k inputs above, their reconstructions below
    #[arg(long)]
    pub grid_out: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub input: DataArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct DenoiseCmd {
    /// IDX images used for training
    #[arg(long)]
    pub data: PathBuf,
    /// IDX images for evaluation [default: the last tenth of --data]
    #[arg(long)]
    pub test_data: Option<PathBuf>,
    /// Standard deviation of the Gaussian noise
    #[arg(long, default_value_t = 0.3)]
    pub scale: f64,
    /// Corrupt the training set once instead of every epoch
    #[arg(long)]
    pub frozen_noise: bool,
    /// PGM grid with one noisy | clean | denoised row per image
    #[arg(long)]
    pub grid_out: Option<PathBuf>,
    /// Number of images in the grid
    #[arg(long, default_value_t = 10)]
    pub show: usize,
    #[arg(long)]
    pub model_out: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub input: DataArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSet {
    Raw,
    Latent,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyCmd {
    /// Trained model; needed for latent features
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub train_data: PathBuf,
    #[arg(long)]
    pub train_labels: PathBuf,
    #[arg(long)]
    pub test_data: PathBuf,
    #[arg(long)]
    pub test_labels: PathBuf,
    #[arg(long, default_value_t = 7)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "both")]
    pub features: FeatureSet,
    /// `input,accuracy,seconds` table [default: standard output]
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
    #[command(flatten)]
    pub input: DataArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct CurseCmd {
    /// Number of points
    #[arg(long, default_value_t = 1000)]
    pub m: u64,
    /// Comma-separated dimensions
    #[arg(long, default_value = "2,3,10,100,1000")]
    pub d: String,
}

#[derive(Debug, Args, Serialize)]
pub struct PcaEquivCmd {
    /// Data dimension
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    /// Latent dimension and number of principal components
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 2000)]
    pub epochs: usize,
    #[arg(long, default_value_t = 20)]
    pub batch: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest allowed |AE MSE / PCA MSE − 1|
    #[arg(long, default_value_t = 0.05)]
    pub tolerance: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplayCmd {
    /// Manifest written by an earlier run
    pub manifest_path: PathBuf,
    /// Exit with status 1 if a deterministic output differs from the recorded digest
    #[arg(long)]
    pub check: bool,
}

/// Parses the process arguments, runs the subcommand and returns the exit
/// status.
pub fn main() -> i32 {
    run(std::env::args().collect())
}

pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match execute(&cli, &argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_usage() {
        EXIT_USAGE
    } else {
        EXIT_IO
    }
}

/// Runs a parsed command line and writes its manifest.
pub fn execute(cli: &Cli, argv: &[String]) -> crate::Result<i32> {
    let started = Instant::now();
    let mut rec = Recorder::default();
    let status = match &cli.command {
        Command::Train(c) => commands::train(c, &mut rec)?,
        Command::Reconstruct(c) => commands::reconstruct(c, &mut rec)?,
        Command::Anomaly(c) => commands::anomaly(c, &mut rec)?,
        Command::Denoise(c) => commands::denoise(c, &mut rec)?,
        Command::Classify(c) => commands::classify(c, &mut rec)?,
        Command::Curse(c) => commands::curse(c, &mut rec)?,
        Command::PcaEquiv(c) => commands::pca_equiv(c, &mut rec)?,
        Command::Replay(c) => return commands::replay(c),
    };
    let (inputs, outputs) = rec.digests()?;
    let cwd = std::env::current_dir().map_err(|e| Error::io(".", e))?;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        subcommand: cli.command.name().to_string(),
        argv: argv.to_vec(),
        cwd,
        config: serde_json::to_value(&cli.command).expect("arguments serialize"),
        seeds: rec.seeds.clone(),
        inputs,
        outputs,
        exit_status: status,
        wall_time_secs: started.elapsed().as_secs_f64(),
    };
    let path = cli
        .manifest
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("ffa-{}.manifest.json", cli.command.name())));
    manifest.write(&path)?;
    Ok(status)
}
