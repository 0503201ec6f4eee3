//! Command-line schema. Every option is optional here so that a JSON config
//! file can supply it; defaults are applied after merging.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "geodesy", version, about = "Generalized harmonic maps for two-Killing vacuum gravity")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// JSON file with option values; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory [default: geodesy-out].
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Record wall-clock timings in the report (breaks byte-identical reruns).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a static Weyl solution (ψ, k, f) from multipole coefficients.
    Weyl(WeylArgs),
    /// Relax the stationary axisymmetric equations with Dirichlet data.
    Solve(SolveArgs),
    /// Evolve Einstein-Rosen or Gowdy data in time.
    Evolve(EvolveArgs),
    /// Run a verification suite and exit 5 if any check fails.
    Verify(VerifyArgs),
    /// Extend a model's target space by extra decoupled fields.
    Extend(ExtendArgs),
    /// Summarize a report file, or print the report schema.
    Report(ReportArgs),
}

/// A rectangle in (ρ, z).
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct GridArgs {
    /// [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub rho_min: Option<f64>,
    /// [default: 3]
    #[arg(long, allow_negative_numbers = true)]
    pub rho_max: Option<f64>,
    /// [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub z_min: Option<f64>,
    /// [default: 3]
    #[arg(long, allow_negative_numbers = true)]
    pub z_max: Option<f64>,
    /// Samples along ρ [default: 64].
    #[arg(long)]
    pub n_rho: Option<usize>,
    /// Samples along z [default: 64].
    #[arg(long)]
    pub n_z: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct WeylArgs {
    /// JSON coefficient list, `[a0, a1, ...]` or `{"a": [...]}`.
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundarySource {
    /// Curzon solution ψ = −m/r.
    Curzon,
    /// Weyl series from --coeffs.
    Weyl,
    /// Edge values of f and omega from a CSV grid file (--input).
    Csv,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub boundary: Option<BoundarySource>,
    /// Curzon mass [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub mass: Option<f64>,
    /// Coefficient file for --boundary weyl.
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
    /// CSV grid file for --boundary csv.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// SOR factor in (1, 2) [default: 1.8].
    #[arg(long)]
    pub over_relaxation: Option<f64>,
    /// Target sup-norm residual [default: 1e-10].
    #[arg(long)]
    pub tol: Option<f64>,
    /// [default: 200000]
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Sweeps between residual checks [default: 50].
    #[arg(long)]
    pub check_every: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvolveModelArg {
    Er,
    Gowdy,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolveArgs {
    #[arg(long, value_enum)]
    pub model: Option<EvolveModelArg>,
    /// JSON initial-data description (see README).
    #[arg(long)]
    pub initial: Option<PathBuf>,
    /// End time [default: initial time + 1].
    #[arg(long, allow_negative_numbers = true)]
    pub t_final: Option<f64>,
    /// Courant number in (0, 1] [default: 0.5].
    #[arg(long)]
    pub cfl: Option<f64>,
    /// Step cap [default: 0.01].
    #[arg(long)]
    pub max_dt: Option<f64>,
    /// Steps between written frames [default: 1].
    #[arg(long)]
    pub output_stride: Option<usize>,
    /// Tolerance of the per-frame boundary classification [default: 0.01].
    #[arg(long)]
    pub boundary_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteArg {
    Conservation,
    Convergence,
    Oracle,
    Boundary,
    Extension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelArg {
    Axisym,
    Er,
    Gowdy,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Option<SuiteArg>,
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtendArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Compare the static f equation on the one- and two-field targets
    /// (axisym only).
    #[arg(long = "static")]
    #[serde(rename = "static")]
    pub static_: bool,
    /// JSON extension description (see README) [default: one flat field].
    #[arg(long)]
    pub extension: Option<PathBuf>,
    /// Samples per axis of the gravitational fixture [default: 65].
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Report to summarize; exits 5 if it records a failed check.
    #[arg(long, required_unless_present = "schema")]
    pub input: Option<PathBuf>,
    /// Print the JSON schema for report files instead.
    #[arg(long)]
    pub schema: bool,
}
