//! `sl3t`: run one experiment, write its tables and a manifest.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Failure;

#[derive(Debug, Parser)]
#[command(name = "sl3t", version, about = "Numerical experiments around strong property (T) for SL(3, R)")]
pub struct Cli {
    /// Directory for CSV/JSON outputs.
    #[arg(long, global = true, env = "SL3T_OUT_DIR", default_value = "sl3t-out")]
    pub out_dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// |P_n(0) - P_n(δ)| against 4√|δ| on a grid of deltas.
    LegendreBounds(LegendreBounds),
    /// ‖T_0 - T_δ‖ in Schatten norms, with a fitted power law per p.
    TdeltaNorms(TdeltaNorms),
    /// Dyadic increments of the fourth-power sums at the boundary exponent.
    SchattenProbe(SchattenProbe),
    /// Witnessed lower bound for ‖(T_0 - T_δ) ⊗ id‖ on ℓ²(ℓ^p) against the upper bounds.
    MixedNorm(MixedNorm),
    /// Cartan decomposition of a 3x3 matrix of determinant 1.
    Kak(Kak),
    /// Factorization certificates along an alpha grid.
    Embedding2(Embedding2),
    /// Zigzag ledgers on annuli and the tail constant.
    Zigzag(Zigzag),
    /// Mean contraction of the random walk on the sphere.
    Markov(Markov),
    /// Decay of the K-biinvariant coefficient of the quasi-regular representation.
    HoweMoore(HoweMoore),
    /// Minimized defect sums for the two invariant lines in each V_j.
    InvariantGap(InvariantGap),
    /// Run every acceptance check; exit 0 iff all pass.
    CheckAll,
    /// Rerun the command recorded in a manifest.
    Replay(Replay),
}

#[derive(Debug, Args)]
pub struct LegendreBounds {
    #[arg(long, default_value_t = 2000)]
    pub nmax: usize,
    /// Number of equally spaced deltas in [-1, 1].
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct TdeltaNorms {
    /// Schatten exponents (> 4), or `inf` for the operator norm.
    #[arg(long, num_args = 1.., value_delimiter = ',', default_values = ["4.5", "5", "6", "8"])]
    pub p: Vec<String>,
    /// Deltas in (0, 1/2]; defaults to 2^-1, ..., 2^-10.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub deltas: Vec<f64>,
    /// Largest truncation degree.
    #[arg(long, default_value_t = 1 << 18)]
    pub nmax: usize,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SchattenProbe {
    /// Probe the boundary exponent p = 4 (the only probe available).
    #[arg(long)]
    pub p4: bool,
    #[arg(long, num_args = 1.., value_delimiter = ',', default_values = ["0.3"])]
    pub delta: Vec<f64>,
    /// Probe N = 2^10, ..., 2^kmax.
    #[arg(long, default_value_t = 16)]
    pub kmax: u32,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct MixedNorm {
    #[arg(long, num_args = 1.., value_delimiter = ',', default_values = ["4", "6", "8"])]
    pub p: Vec<f64>,
    #[arg(long, num_args = 1.., value_delimiter = ',', default_values = ["0.025", "0.05", "0.1", "0.2"])]
    pub delta: Vec<f64>,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub iters: usize,
    /// Truncation degree of T_0 - T_δ.
    #[arg(long, default_value_t = 8)]
    pub truncation: usize,
    /// Dimension of the inner ℓ^p.
    #[arg(long, default_value_t = 3)]
    pub inner_dim: usize,
}

#[derive(Debug, Args)]
pub struct Kak {
    /// Nine entries, row by row.
    #[arg(long, num_args = 9, allow_negative_numbers = true, required = true)]
    pub matrix: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct Embedding2 {
    #[arg(long, num_args = 1.., value_delimiter = ',', default_values = ["2", "4", "8", "16"])]
    pub gamma: Vec<f64>,
    /// Number of equally spaced alphas in [γ, 7γ/6].
    #[arg(long, default_value_t = 20)]
    pub alpha_grid: usize,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct Zigzag {
    #[arg(long, default_value_t = 0.5)]
    pub s: f64,
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
    #[arg(long = "C", default_value_t = 4.0)]
    pub c: f64,
    #[arg(long = "L", default_value_t = 1.0)]
    pub l: f64,
    #[arg(long, num_args = 1.., value_delimiter = ',', default_values = ["1", "2", "4", "8", "16"])]
    pub alpha_grid: Vec<f64>,
    #[arg(long, default_value_t = 0.25)]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct Markov {
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 15)]
    pub steps: usize,
    #[arg(long, default_value_t = 100_000)]
    pub replicas: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct HoweMoore {
    #[arg(long, default_value_t = 32)]
    pub band_limit: usize,
    #[arg(long, default_value_t = 6)]
    pub nmax: usize,
}

#[derive(Debug, Args)]
pub struct InvariantGap {
    #[arg(long, default_value_t = 6)]
    pub jmax: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct Replay {
    pub manifest: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, message }) => {
            eprintln!("sl3t: {message}");
            ExitCode::from(code)
        }
    }
}
