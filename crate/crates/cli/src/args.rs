use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rotlog_core::noise::NoisePlacement;
use rotlog_core::{EncodingMode, NoiseModel, Regime};

use crate::config::{Floats, Ints, Span};

/// Rotated logical states: distance decay, logical-error scaling, fits and
/// noisy-circuit simulation.
#[derive(Debug, Parser)]
#[command(name = "rotlog", version, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Effective distance d_R = d·exp(−λ(θ² + φ²)) over an angle grid.
    Distance(DistanceArgs),
    /// p_log(p_phy) curves from the closed-form fit equations.
    Scaling(ScalingArgs),
    /// Fits α, β, γ, δ to a p_log CSV.
    Fit(FitArgs),
    /// Monte-Carlo logical failure rate of the noisy rotated circuit.
    Simulate(SimulateArgs),
    /// p_log against d_R at fixed physical error rates.
    DrSweep(DrSweepArgs),
    /// Commutator matrices at α = π/4 against the reference table.
    CommutatorTable(CommonArgs),
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Distance(a) => &a.common,
            Command::Scaling(a) => &a.common,
            Command::Fit(a) => &a.common,
            Command::Simulate(a) => &a.common,
            Command::DrSweep(a) => &a.common,
            Command::CommutatorTable(a) => a,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Flat JSON file of flag values; flags given here take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Worker threads [default: 1].
    #[arg(long, value_name = "N")]
    pub jobs: Option<usize>,
    /// Also write a gnuplot script next to the output file.
    #[arg(long)]
    pub gnuplot: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DistanceArgs {
    /// Code distance [default: 5].
    #[arg(long)]
    pub d: Option<u32>,
    /// Decay constants, comma-separated [default: 1].
    #[arg(long)]
    pub lambda: Option<Floats>,
    /// θ range `lo:hi` [default: 0.1:1.5].
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<Span>,
    /// φ range `lo:hi`; when absent φ = θ along the diagonal.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<Span>,
    /// Grid points per angle axis [default: 15].
    #[arg(long)]
    pub points: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ScalingArgs {
    /// Noise model `sd` or `si` [default: sd].
    #[arg(long)]
    pub model: Option<NoiseModel>,
    /// `small`, `large` or `combined` (both) [default: small].
    #[arg(long)]
    pub regime: Option<Regime>,
    /// Code distances, e.g. `8..16` or `3,5,7` [default: 8..16].
    #[arg(long)]
    pub d: Option<Ints>,
    /// Decay constant used for d_R [default: 0].
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Rotation angle θ [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Rotation angle φ [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Smallest p_phy [default: 1e-4].
    #[arg(long)]
    pub p_min: Option<f64>,
    /// Largest p_phy [default: 1e-2].
    #[arg(long)]
    pub p_max: Option<f64>,
    /// Log-spaced grid points [default: 41].
    #[arg(long)]
    pub points: Option<usize>,
    /// Override α of the equation.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Override β of the equation.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Override γ of the equation.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Override δ of the equation.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// CSV with header `model,regime,d,d_R,p_phy,p_log` or `d,p_phy,p_log`.
    pub input: Option<PathBuf>,
    /// Model for short-header files and the starting point [default: sd].
    #[arg(long)]
    pub model: Option<NoiseModel>,
    /// Regime for short-header files and the starting point [default: small].
    #[arg(long)]
    pub regime: Option<Regime>,
    /// Decay constant mapping d to d_R for short-header files [default: 0].
    #[arg(long)]
    pub lambda: Option<f64>,
    /// θ for the d → d_R map [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// φ for the d → d_R map [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Free parameters, `all` or e.g. `alpha,beta` [default: all].
    #[arg(long)]
    pub free: Option<String>,
    /// Point filter preset `table` (d ≥ 2, p ≤ 0.004), `low-p` (p ≥ 1e-4) or
    /// `none` [default: table].
    #[arg(long)]
    pub filter: Option<String>,
    /// Override the smallest kept d.
    #[arg(long)]
    pub d_min: Option<u32>,
    /// Override the smallest kept p_phy.
    #[arg(long)]
    pub p_min: Option<f64>,
    /// Override the largest kept p_phy.
    #[arg(long)]
    pub p_max: Option<f64>,
    /// Iteration cap per start [default: 500].
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// `text` or `json` [default: text].
    #[arg(long)]
    pub format: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Qubits [default: 7].
    #[arg(long)]
    pub n: Option<usize>,
    /// Rotation angle θ [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Rotation angle φ [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Noise model `sd` or `si` [default: sd].
    #[arg(long)]
    pub model: Option<NoiseModel>,
    /// Physical error rate per noise site [default: 1e-3].
    #[arg(long)]
    pub p: Option<f64>,
    /// Z bias of the SI channel [default: 10].
    #[arg(long)]
    pub eta: Option<f64>,
    /// Monte-Carlo trials, at least 100 [default: 10000].
    #[arg(long)]
    pub trials: Option<u64>,
    /// RNG seed; falls back to ROTLOG_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// `figure` or `per-gate` [default: figure].
    #[arg(long)]
    pub placement: Option<NoisePlacement>,
    /// `ghz` or `repetition` [default: ghz].
    #[arg(long)]
    pub encoding: Option<EncodingMode>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DrSweepArgs {
    /// Noise model `sd` or `si` [default: si].
    #[arg(long)]
    pub model: Option<NoiseModel>,
    /// `small`, `large` or `combined` (both) [default: combined].
    #[arg(long)]
    pub regime: Option<Regime>,
    /// d_R range `lo:hi` [default: 0:22].
    #[arg(long)]
    pub dr: Option<Span>,
    /// Evenly spaced d_R points [default: 23].
    #[arg(long)]
    pub points: Option<usize>,
    /// Physical error rates, comma-separated [default: 1e-3,1e-4].
    #[arg(long)]
    pub p: Option<Floats>,
    #[command(flatten)]
    pub common: CommonArgs,
}
