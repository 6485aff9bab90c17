use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "domsplit", version, about = "Dominated-splitting experiments on SFT cocycles")]
pub struct Cli {
    /// Worker threads for internal parallelism (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Enumerate periodic orbits of a shift.
    Periodic(PeriodicArgs),
    /// Periodic exponent intervals and their classification.
    Spectrum(SpectrumArgs),
    /// Empirical domination test on the singular-value gap.
    Dominate(DominateArgs),
    /// Construct splitting frames and check their invariance.
    Split(SplitArgs),
    /// Shadowing estimates: error terms, growth excess, binomial and singular-value bounds.
    Shadow(ShadowArgs),
    /// Closed-form feasibility calculators.
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// Run the command described by the `[command]` table of a TOML file.
    Run(RunArgs),
}

/// Shift and cocycle files. Their contents (not their paths) enter the
/// config digest.
#[derive(Debug, Clone, Args, Serialize)]
pub struct SystemArgs {
    #[arg(long)]
    #[serde(skip)]
    pub shift: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub cocycle: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutArgs {
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SampleArgs {
    /// All periodic orbits up to this period are sampled.
    #[arg(long, default_value_t = 6)]
    pub max_period: usize,
    /// Number of seeded random windows.
    #[arg(long, default_value_t = 16)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PeriodicArgs {
    #[arg(long)]
    #[serde(skip)]
    pub shift: PathBuf,
    #[arg(long, default_value_t = 6)]
    pub max_period: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub system: SystemArgs,
    #[arg(long, default_value_t = 8)]
    pub max_period: usize,
    /// Comma-separated center exponents, e.g. `log2,-log2`.
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DominateArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub system: SystemArgs,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Longest product length `N`.
    #[arg(long, default_value_t = 30)]
    pub depth: usize,
    #[command(flatten)]
    pub sample: SampleArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SplitArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub system: SystemArgs,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 30)]
    pub depth: usize,
    /// Number of consecutive base points `0..positions`.
    #[arg(long, default_value_t = 8)]
    pub positions: usize,
    /// Product length for the domination inequality check.
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    /// Use this periodic orbit instead of a random window.
    #[arg(long)]
    pub orbit: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ShadowArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub system: SystemArgs,
    /// Agreement radius `n` of the shadowing pair.
    #[arg(long, default_value_t = 20)]
    pub radius: usize,
    #[arg(long, default_value_t = 0.3)]
    pub gamma: f64,
    /// Growth rate to compare against; defaults to the top of the first
    /// exponent interval up to `--max-period`.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Product lengths `1..=steps` for the growth-excess table.
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Comma-separated κ values for the binomial scan.
    #[arg(long, default_value = "0.05,0.1,1")]
    pub kappa: String,
    #[arg(long, default_value_t = 200)]
    pub n_max: usize,
    #[command(flatten)]
    pub sample: SampleArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundsCommand {
    /// γ interval for constant data at index k.
    GammaConstant(GammaConstantArgs),
    /// γ interval for two-dimensional δ-narrow data.
    GammaNarrow(GammaNarrowArgs),
    /// Largest admissible δ for two-dimensional narrow data.
    DeltaMax(DeltaMaxArgs),
    /// The volume-preserving condition.
    Sl2(Sl2Args),
    /// Narrowness implied by the Hölder exponents of a conjugacy.
    ConjugacyDelta(ConjugacyDeltaArgs),
    /// The regularity threshold for ωθ.
    Threshold(OutOnly),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GammaConstantArgs {
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub epsilon0: f64,
    #[arg(long)]
    pub kappa: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: String,
    /// Comma-separated exponents, non-increasing.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: String,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GammaNarrowArgs {
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: String,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda1: String,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda2: String,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub kappa: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DeltaMaxArgs {
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda1: String,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda2: String,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Sl2Args {
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: String,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long)]
    pub delta: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConjugacyDeltaArgs {
    #[arg(long)]
    pub theta: f64,
    #[arg(long)]
    pub omega: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: String,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutOnly {
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunArgs {
    /// TOML file with a `[command]` table; `name` selects the subcommand and
    /// every other key becomes the flag of the same name.
    #[arg(long)]
    pub config: PathBuf,
}
