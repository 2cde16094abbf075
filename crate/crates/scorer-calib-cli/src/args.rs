//! Command-line argument definitions.
//!
//! Values resolve in three layers: built-in defaults, then the optional TOML
//! config file (`--config`), then explicit flags. Flags always win, so most
//! option fields are `Option` here and defaults are applied after merging.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "scorer-calib",
    version,
    about = "Scorer-aware calibration for ordinal automated scoring",
    long_about = "Trains scoring heads that model per-scorer bias and consistency, evaluates \
                  them with ordinal metrics, and analyzes the learned scorer structure. \
                  All commands are deterministic under their seeds."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset with planted scorer archetypes
    Synth(SynthArgs),
    /// Train one scoring head on one (test, validation) split
    Train(TrainArgs),
    /// Cross-validate one head/loss combination over all fold rotations
    Cv(CvArgs),
    /// Evaluate a checkpoint on a dataset
    Eval(EvalArgs),
    /// Cluster scorer embeddings and emit profile tables and a 2-D plot
    Cluster(ClusterArgs),
    /// Correlate learned scorer parameters with observed scorer behavior
    Correlate(CorrelateArgs),
    /// Compare content-driven, scorer-specific, and no-bias predictions on
    /// selected pairs of one scorer
    CaseStudy(CaseStudyArgs),
    /// Merge cross-validation CSVs into one summary table
    Report(ReportArgs),
}

/// Flags shared by commands that read a JSONL dataset.
#[derive(Debug, Args)]
pub struct DataArgs {
    /// Input dataset (JSONL)
    #[arg(long)]
    pub data: PathBuf,
    /// Smallest score value on the scale
    #[arg(long, default_value_t = 0)]
    pub min_score: i32,
    /// Largest score value on the scale
    #[arg(long, default_value_t = 4)]
    pub max_score: i32,
    /// Drop scorers with fewer than this many responses (0 keeps everyone)
    #[arg(long, default_value_t = 0)]
    pub min_count: usize,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Optional TOML config file ([synth] section)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Base preset: "table3" (six planted archetypes, strong biases) or
    /// "null" (zero biases, unit temperatures)
    #[arg(long)]
    pub preset: Option<String>,
    /// Output dataset path (JSONL)
    #[arg(long)]
    pub out: PathBuf,
    /// Output ground-truth path (JSON)
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Generator seed [default: 7]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of scorers J
    #[arg(long)]
    pub scorers: Option<usize>,
    /// Size of the shared response pool
    #[arg(long)]
    pub pairs: Option<usize>,
    /// Responses scored by each scorer
    #[arg(long)]
    pub responses_per_scorer: Option<usize>,
    /// Representation dimension D
    #[arg(long)]
    pub dim: Option<usize>,
    /// Scorer-embedding dimension suggested for training
    #[arg(long)]
    pub embed_dim: Option<usize>,
    /// Number of score categories C (scale is 0..C-1)
    #[arg(long)]
    pub categories: Option<usize>,
    /// Entry std of the base quality weights
    #[arg(long)]
    pub quality_logit_scale: Option<f64>,
    /// Archetype bias magnitude
    #[arg(long)]
    pub bias_magnitude: Option<f64>,
    /// Per-scorer bias jitter std
    #[arg(long)]
    pub bias_jitter: Option<f64>,
    /// Per-scorer temperature jitter (log-normal sigma)
    #[arg(long)]
    pub alpha_jitter: Option<f64>,
    /// Fraction of each scorer's responses taken from a shared pool prefix
    #[arg(long)]
    pub shared_pairs: Option<f64>,
}

/// Training hyperparameters shared by `train` and `cv`.
#[derive(Debug, Args)]
pub struct TrainOpts {
    /// Optional TOML config file ([train] section)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Head family: universal | scorer | content
    #[arg(long)]
    pub head: Option<String>,
    /// Training loss: ce | oll | mse
    #[arg(long)]
    pub loss: Option<String>,
    /// Learning rate [default: 1e-5]
    #[arg(long)]
    pub lr: Option<f64>,
    /// Batch size [default: 16]
    #[arg(long)]
    pub batch: Option<usize>,
    /// Training epochs [default: 10]
    #[arg(long)]
    pub epochs: Option<usize>,
    /// RNG seed for folds, init, and shuffling [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of folds [default: 10]
    #[arg(long)]
    pub k: Option<usize>,
    /// Scorer-embedding dimension [default: the representation dimension]
    #[arg(long)]
    pub d_e: Option<usize>,
    /// Kappa weighting for selection and summaries:
    /// unweighted | linear | quadratic [default: quadratic]
    #[arg(long)]
    pub kappa: Option<String>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub opts: TrainOpts,
    /// Held-out test fold [default: k-1]
    #[arg(long)]
    pub test_fold: Option<usize>,
    /// Validation fold for model selection [default: k-2]
    #[arg(long)]
    pub val_fold: Option<usize>,
    /// Checkpoint output path (JSON)
    #[arg(long)]
    pub out: PathBuf,
    /// Training report output path (JSON)
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub opts: TrainOpts,
    /// Summary CSV output path
    #[arg(long)]
    pub out: PathBuf,
    /// Optional per-fold report output path (JSON)
    #[arg(long)]
    pub reports: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Checkpoint to evaluate (JSON)
    #[arg(long)]
    pub ckpt: PathBuf,
    /// Dataset to evaluate on (JSONL); the scale comes from the checkpoint
    #[arg(long)]
    pub data: PathBuf,
    /// Which kappa weightings to include:
    /// unweighted | linear | quadratic | all
    #[arg(long, default_value = "all")]
    pub kappa: String,
    /// Output path (JSON); stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Optional TOML config file ([analysis] section)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Scorer-specific checkpoint (JSON)
    #[arg(long)]
    pub ckpt: PathBuf,
    /// Dataset the checkpoint was trained on (JSONL)
    #[arg(long)]
    pub data: PathBuf,
    /// Number of mixture components [default: 6]
    #[arg(long)]
    pub k: Option<usize>,
    /// Mixture seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Cluster profile CSV output path
    #[arg(long)]
    pub out: PathBuf,
    /// Per-scorer 2-D coordinate CSV output path
    #[arg(long)]
    pub coords: Option<PathBuf>,
    /// 2-D scatter SVG output path, colored by hard cluster
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// Scorer-specific or content-driven checkpoint (JSON)
    #[arg(long)]
    pub ckpt: PathBuf,
    /// Dataset the checkpoint was trained on (JSONL)
    #[arg(long)]
    pub data: PathBuf,
    /// Long-format CSV output path (var_a, var_b, r, p, n)
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CaseStudyArgs {
    /// Content-driven checkpoint (JSON)
    #[arg(long)]
    pub ckpt: PathBuf,
    /// Scorer-specific checkpoint (JSON)
    #[arg(long)]
    pub scorer_ckpt: PathBuf,
    /// Dataset the checkpoints were trained on (JSONL)
    #[arg(long)]
    pub data: PathBuf,
    /// Scorer id to study
    #[arg(long)]
    pub scorer: String,
    /// Comma-separated pair ids scored by that scorer
    #[arg(long, value_delimiter = ',')]
    pub pairs: Vec<String>,
    /// Output path (JSON); stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Cross-validation summary CSVs to merge
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Output path (CSV); stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}
