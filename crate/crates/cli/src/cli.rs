//! Command-line and config-file argument types.
//!
//! Every verb field is optional so that values from `--config` can be
//! overlaid by flags; defaults are applied after merging.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "bertrand",
    version,
    about = "Bertrand superintegrable systems: maps, orbits, integrals and spectra"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct GlobalArgs {
    /// JSON config file (`"schema": 1`); flags override its values.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Output format for stdout.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Directory receiving the JSON report and CSV table.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for every random draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for `sweep`.
    #[arg(long, global = true, env = "BERTRAND_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Tabulate h(r), V(r), |q|(r) and M(|q|) for one system.
    Family(FamilyArgs),
    /// Integrate a trajectory and report the drift of every integral.
    Simulate(SimulateArgs),
    /// Evaluate integrals, Poisson brackets and independence rank.
    Integrals(IntegralsArgs),
    /// Apsidal angle by quadrature and along a trajectory.
    Apsidal(ApsidalArgs),
    /// Darboux III spectrum against the finite-difference eigensolver.
    Spectrum(SpectrumArgs),
    /// Run another verb over a Cartesian parameter grid.
    Sweep(SweepArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Family(_) => "family",
            Command::Simulate(_) => "simulate",
            Command::Integrals(_) => "integrals",
            Command::Apsidal(_) => "apsidal",
            Command::Spectrum(_) => "spectrum",
            Command::Sweep(_) => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Darboux III oscillator, `M = 1 + λ|q|²`.
    Darboux,
    /// Darboux system outside the critical radius (λ < 0).
    DarbouxExterior,
    /// Flat isotropic oscillator.
    Oscillator,
    /// Flat Kepler problem.
    Kepler,
    /// Kepler problem on constant curvature κ.
    KappaKepler,
    /// Oscillator on constant curvature κ.
    KappaOscillator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum FamilyType {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    II,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchArg {
    Plus,
    Minus,
}

/// System selection shared by every verb.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct SystemArgs {
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Family type for explicit parameters.
    #[arg(long = "type", value_enum)]
    #[serde(rename = "type")]
    pub family_type: Option<FamilyType>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long = "K", allow_hyphen_values = true)]
    #[serde(rename = "K")]
    pub k: Option<f64>,
    #[arg(long = "D", allow_hyphen_values = true)]
    #[serde(rename = "D")]
    pub d: Option<f64>,
    #[arg(long = "G", allow_hyphen_values = true)]
    #[serde(rename = "G")]
    pub g: Option<f64>,
    #[arg(long, value_enum)]
    pub branch: Option<BranchArg>,
    /// Potential coupling for explicit families (default −1, attractive).
    #[arg(long, allow_hyphen_values = true)]
    pub coupling: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    /// Configuration-space dimension N.
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct FamilyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

/// Initial condition: explicit `(q, p)` or an `(E, L)` pair.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct StateArgs {
    /// Comma-separated position.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub q: Option<Vec<f64>>,
    /// Comma-separated momentum.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub p: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub energy: Option<f64>,
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub angular_momentum: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeArg {
    Midpoint,
    Midpoint6,
    DormandPrince,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub state: StateArgs,
    /// Duration in radial periods (default 100).
    #[arg(long)]
    pub periods: Option<f64>,
    /// Duration in time units; overrides `--periods`.
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    #[arg(long)]
    pub steps_per_period: Option<usize>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Keep every k-th step in the trajectory table (default 8).
    #[arg(long)]
    pub sample_every: Option<usize>,
    /// Relative drift budget (default 1e-8).
    #[arg(long)]
    pub budget: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegralsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub state: StateArgs,
    /// Number of random phase points (ignored when `--q/--p` are given).
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ApsidalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub state: StateArgs,
    /// Inner turning point as a fraction below the circular radius at the
    /// given `L` (used when no energy is given; default 0.2).
    #[arg(long)]
    pub eccentricity: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub hbar: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Finite-volume cells on the coarse grid.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub rho_max: Option<f64>,
    /// Relative tolerance for analytic/numeric agreement (default 1e-6).
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Grid axis `key=v1,v2,...`; compound keys `a:b=1:2,3:4` vary together;
    /// the key `seed` sets the seed of each cell.
    #[arg(long = "grid", required = true)]
    pub grid: Vec<String>,
    #[command(subcommand)]
    pub cell: CellCommand,
}

/// Verbs that can be swept.
#[derive(Debug, Clone, Subcommand)]
pub enum CellCommand {
    Family(FamilyArgs),
    Simulate(SimulateArgs),
    Integrals(IntegralsArgs),
    Apsidal(ApsidalArgs),
    Spectrum(SpectrumArgs),
}

impl CellCommand {
    pub fn name(&self) -> &'static str {
        match self {
            CellCommand::Family(_) => "family",
            CellCommand::Simulate(_) => "simulate",
            CellCommand::Integrals(_) => "integrals",
            CellCommand::Apsidal(_) => "apsidal",
            CellCommand::Spectrum(_) => "spectrum",
        }
    }
}
