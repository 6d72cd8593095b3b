use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::table::Format;

#[derive(Debug, Parser)]
#[command(name = "rwent", version, about = "Entanglement from particle creation in an expanding 1+1 universe")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form gamma, occupation and entropy over a momentum grid
    Spectrum(SpectrumArgs),
    /// Integrate the mode equation and compare with the closed form
    Oracle(OracleArgs),
    /// Recover gamma, epsilon and sigma from measured entropies
    Invert(InvertArgs),
    /// Least-squares fit of (epsilon, sigma) to a k,entropy_bits table
    Fit(FitArgs),
    /// Convert between gamma and entropy
    Entropy(EntropyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Linear,
    Log,
}

impl Scale {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "linear" => Some(Scale::Linear),
            "log" => Some(Scale::Log),
            _ => None,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// key = value file supplying defaults for any flag
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the table here instead of standard output
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Expansion amplitude (default 1)
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Expansion rapidity (default 1)
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// Field mass (default 1)
    #[arg(long, allow_negative_numbers = true)]
    pub mass: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Explicit momentum, repeatable; overrides the grid
    #[arg(long = "k", value_name = "K", allow_negative_numbers = true)]
    pub k: Vec<f64>,
    /// Grid start (default 0)
    #[arg(long, allow_negative_numbers = true)]
    pub k_min: Option<f64>,
    /// Grid end (default 3)
    #[arg(long, allow_negative_numbers = true)]
    pub k_max: Option<f64>,
    /// Number of grid points (default 31)
    #[arg(long)]
    pub k_count: Option<usize>,
    #[arg(long, value_enum)]
    pub k_scale: Option<Scale>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Integrator relative tolerance (default 1e-10)
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Largest accepted discrepancy (default 1e-6)
    #[arg(long)]
    pub max_rel_err: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    /// Measured entropy in bits, repeatable
    #[arg(long, allow_negative_numbers = true)]
    pub entropy: Vec<f64>,
    /// Detector energy for the matching --entropy, repeatable
    #[arg(long, allow_negative_numbers = true)]
    pub energy: Vec<f64>,
    /// Field mass (default 1)
    #[arg(long, allow_negative_numbers = true)]
    pub mass: Option<f64>,
    /// CSV with header energy,entropy_bits
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with header k,entropy_bits
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Field mass (default 1)
    #[arg(long, allow_negative_numbers = true)]
    pub mass: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub init_epsilon: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub init_sigma: Option<f64>,
    /// Iteration budget per start (default 200)
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    /// Squeezing ratio to convert to entropy, repeatable
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Vec<f64>,
    /// Entropy in bits to convert to gamma, repeatable
    #[arg(long, allow_negative_numbers = true)]
    pub entropy: Vec<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}
