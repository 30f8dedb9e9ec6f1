use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "hypercoverage",
    version,
    about = "Latin Hypercube / Orthogonal sampling and coverage experiments"
)]
pub struct Cli {
    /// Key-value file supplying defaults for any flag; explicit flags win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate one trial and report its validation verdicts.
    Generate(GenerateArgs),
    /// Check a sample file for the Latin and Orthogonal properties.
    Validate(ValidateArgs),
    /// Write a strength-2 orthogonal array and its sidecar.
    Oa(OaArgs),
    /// Trials-to-threshold campaigns over a list of n, with gradient report.
    Campaign(CampaignArgs),
    /// Empirical coverage curve next to the closed-form law.
    Curve(CurveArgs),
    /// Sub-block occupancy of every 2-dimensional projection.
    Subblocks(SubblocksArgs),
    /// Reshape campaign summaries into log10/log10 plotting columns.
    Plotdata(PlotdataArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenSampler {
    Lhs,
    Os,
    Tang,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sampler {
    Lhs,
    Os,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AggregateArg {
    PerSubspace,
    MeanCoverage,
}

#[derive(Debug, Args)]
pub struct SeedArgs {
    /// Master seed; falls back to HYPERCOVERAGE_SEED, then to a fresh random seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub sampler: GenSampler,
    /// Levels per axis (lhs; os when a perfect d-th power).
    #[arg(long)]
    pub n: Option<usize>,
    /// Blocks per axis (os).
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Prime symbol count of the strength-2 array (tang).
    #[arg(long)]
    pub s: Option<usize>,
    /// Orthogonal array CSV to expand (tang); sidecar read from the same path with a .json extension.
    #[arg(long, value_name = "PATH")]
    pub oa: Option<PathBuf>,
    #[command(flatten)]
    pub seed: SeedArgs,
    /// Output file; the sample goes to standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    /// Defaults to the file extension (.json, otherwise csv).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Blocks per axis for the orthogonality check (inferred from n = p^d when omitted).
    #[arg(long)]
    pub p: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OaArgs {
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub d: usize,
    /// Randomize rows, columns and symbols with this seed.
    #[arg(long)]
    pub randomize_seed: Option<u64>,
    /// CSV path; the sidecar is written next to it with a .json extension.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CampaignArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub t: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75,1.0")]
    pub thresholds: Vec<f64>,
    #[arg(long, default_value_t = hypercoverage::campaign::DEFAULT_REPLICATES)]
    pub replicates: usize,
    /// Per-replicate trial cap; defaults to a multiple of the full-coverage estimate.
    #[arg(long)]
    pub max_trials: Option<u64>,
    #[arg(long, value_enum, default_value = "lhs")]
    pub sampler: Sampler,
    #[arg(long, value_enum, default_value = "per-subspace")]
    pub aggregate: AggregateArg,
    #[command(flatten)]
    pub seed: SeedArgs,
    /// Worker threads (scheduling only; results do not depend on it).
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub t: usize,
    #[arg(long)]
    pub k_max: u64,
    #[arg(long, default_value_t = hypercoverage::campaign::DEFAULT_REPLICATES)]
    pub replicates: usize,
    #[arg(long, value_enum, default_value = "lhs")]
    pub sampler: Sampler,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SubblocksArgs {
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, value_enum, default_value = "lhs")]
    pub sampler: Sampler,
    /// Mean 2-dimensional coverage at which each replicate stops.
    #[arg(long, default_value_t = 0.25)]
    pub coverage_target: f64,
    #[arg(long, default_value_t = hypercoverage::campaign::DEFAULT_REPLICATES)]
    pub replicates: usize,
    #[arg(long)]
    pub max_trials: Option<u64>,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlotdataArgs {
    /// Campaign output directories or summary.csv files.
    #[arg(long = "in", value_name = "PATH", required = true, value_delimiter = ',')]
    pub inputs: Vec<PathBuf>,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
