use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcpower_core::percolation::LatticeKind;
use qcpower_core::Model;

#[derive(Debug, Parser)]
#[command(name = "qcpower", version, about = "Computational power of thermal spin-cluster resource states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Write results here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ground and first excited energies, gap and kinks of E0.
    Spectrum(SpectrumArgs),
    /// Compare the closed-form ground state with exact diagonalization.
    GroundCheck(ParamArgs),
    /// Pauli error classes of the distilled GHZ state.
    Errors(ErrorsArgs),
    /// Site-percolation threshold by Monte Carlo.
    Percolation(PercolationArgs),
    /// Monte Carlo estimate of k(p_l).
    Kcurve(KcurveArgs),
    /// Model parameter at which the T = 0 lattice stops percolating.
    ZeroTBoundary(ZeroTArgs),
    /// 2D universality diagram and boundary temperatures.
    Phase2d(PhaseArgs),
    /// 3D universality diagram and boundary temperatures.
    Phase3d(PhaseArgs),
    /// Simulate the block protocol and check every propagation rule.
    VerifyPropagation,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    #[arg(long, default_value = "xxz")]
    pub model: Model,

    /// XXZ anisotropy δ.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["dz", "dz_range"])]
    pub delta: Option<f64>,

    /// On-site anisotropy d_z.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["delta", "delta_range"])]
    pub dz: Option<f64>,

    /// δ grid as lo:hi:step.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "delta")]
    pub delta_range: Option<String>,

    /// d_z grid as lo:hi:step.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "dz")]
    pub dz_range: Option<String>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub params: ParamArgs,

    /// Minimum slope jump reported as a kink.
    #[arg(long, default_value_t = qcpower_core::models::DEFAULT_KINK_THRESHOLD)]
    pub kink_threshold: f64,
}

#[derive(Debug, Args)]
pub struct ErrorsArgs {
    #[command(flatten)]
    pub params: ParamArgs,

    #[arg(long, default_value_t = 0.0)]
    pub temp: f64,
}

#[derive(Debug, Args)]
pub struct SeedArgs {
    #[arg(long, env = "QCPOWER_SEED", default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PercolationArgs {
    #[arg(long, default_value = "honeycomb")]
    pub lattice: LatticeKind,

    /// Trials per replica.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,

    #[arg(long, default_value_t = 128)]
    pub size: usize,

    #[command(flatten)]
    pub seed: SeedArgs,

    /// Also tabulate the spanning probability on this p grid (lo:hi:step).
    #[arg(long)]
    pub p_range: Option<String>,
}

#[derive(Debug, Args)]
pub struct KcurveOptions {
    #[arg(long, default_value_t = 64)]
    pub size: usize,

    #[arg(long, default_value_t = 20)]
    pub trials: usize,

    #[command(flatten)]
    pub seed: SeedArgs,

    /// Node spacing scale: spacing = ceil(c0 / (1 − p_l)).
    #[arg(long, default_value_t = 1.0)]
    pub c0: f64,
}

#[derive(Debug, Args)]
pub struct KcurveArgs {
    /// Loss grid as lo:hi:step.
    #[arg(long, default_value = "0:0.44:0.02")]
    pub loss_range: String,

    #[command(flatten)]
    pub options: KcurveOptions,
}

#[derive(Debug, Args)]
pub struct ZeroTArgs {
    #[arg(long, default_value = "xxz")]
    pub model: Model,

    #[arg(long, default_value = "honeycomb")]
    pub lattice: LatticeKind,

    /// Use this site threshold instead of the lattice's (e.g. for a lattice
    /// that is not built in).
    #[arg(long, conflicts_with = "estimate")]
    pub p_th: Option<f64>,

    /// Estimate the threshold by Monte Carlo instead of using the known value.
    #[arg(long)]
    pub estimate: bool,

    #[arg(long, default_value_t = 200)]
    pub trials: usize,

    #[arg(long, default_value_t = 128)]
    pub size: usize,

    #[command(flatten)]
    pub seed: SeedArgs,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    #[command(flatten)]
    pub params: ParamArgs,

    /// Single temperature to evaluate on the grid.
    #[arg(long, conflicts_with = "temp_range")]
    pub temp: Option<f64>,

    /// Temperature grid as lo:hi:step.
    #[arg(long)]
    pub temp_range: Option<String>,

    /// Margin tolerance for the boundary temperature.
    #[arg(long, default_value_t = qcpower_core::phase::DEFAULT_TOL)]
    pub tol: f64,

    /// CSV table with header p_l,k; replaces the Monte Carlo estimate.
    #[arg(long)]
    pub k_table: Option<PathBuf>,

    #[command(flatten)]
    pub kcurve: KcurveOptions,
}
