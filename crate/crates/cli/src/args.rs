use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "ringshape",
    version,
    about = "Trajectories and orbit analysis for the ring-shaped oscillator and coulomb potentials"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a closed-form trajectory of the oscillator system
    OscTraj(OscTrajArgs),
    /// Sample a closed-form bounded or separatrix trajectory of the coulomb system
    CoulTraj(CoulTrajArgs),
    /// Meridian section of an equipotential surface
    Equipot(EquipotArgs),
    /// Planarity verdict and torsion along an orbit
    Planarity(PlanarityArgs),
    /// Closure of an orbit and its period
    Period(PeriodArgs),
    /// Semiclassical energy level
    Spectrum(SpectrumArgs),
    /// Local degeneracies of the coulomb spectrum
    Degeneracy(DegeneracyArgs),
    /// Check the closed forms against the integrator and print a pass/fail table
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum System {
    Osc,
    Coul,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyFormat {
    Table,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write to this file instead of standard output
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportOutput {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Sampling {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t_start: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

/// Constants (E, K, m) shared by both systems.
#[derive(Debug, Clone, Args)]
pub struct ConstantsArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub e: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OscGeometry {
    #[arg(long, conflicts_with_all = ["e", "k", "m"])]
    pub rho1: Option<f64>,
    #[arg(long, conflicts_with_all = ["e", "k", "m"])]
    pub rho2: Option<f64>,
    #[arg(long, conflicts_with_all = ["e", "k", "m"])]
    pub z0: Option<f64>,
    /// With geometry input: take m < 0
    #[arg(long)]
    pub retrograde: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CoulGeometry {
    #[arg(long, conflicts_with_all = ["e", "k", "m"])]
    pub r1: Option<f64>,
    #[arg(long, conflicts_with_all = ["e", "k", "m"])]
    pub r2: Option<f64>,
    #[arg(long, conflicts_with_all = ["e", "k", "m"])]
    pub theta0: Option<f64>,
    #[arg(long)]
    pub retrograde: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OscOrbitArgs {
    #[arg(long)]
    pub omega: f64,
    #[arg(long)]
    pub q: f64,
    #[command(flatten)]
    pub constants: ConstantsArgs,
    #[command(flatten)]
    pub geometry: OscGeometry,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t0p: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CoulOrbitArgs {
    #[arg(long)]
    pub zed: f64,
    #[arg(long)]
    pub q: f64,
    #[command(flatten)]
    pub constants: ConstantsArgs,
    #[command(flatten)]
    pub geometry: CoulGeometry,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t0: f64,
    /// Polar phase; E = 0 selects the separatrix orbit with this phase
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta0: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OscTrajArgs {
    #[command(flatten)]
    pub orbit: OscOrbitArgs,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct CoulTrajArgs {
    #[command(flatten)]
    pub orbit: CoulOrbitArgs,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct SystemParams {
    #[arg(long, value_enum)]
    pub system: System,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub zed: Option<f64>,
    #[arg(long)]
    pub q: f64,
}

#[derive(Debug, Clone, Args)]
pub struct EquipotArgs {
    #[command(flatten)]
    pub params: SystemParams,
    #[arg(long, allow_negative_numbers = true)]
    pub level: f64,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Outer cut-off for open coulomb surfaces
    #[arg(long)]
    pub rho_max: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct PlanarityArgs {
    #[arg(long, value_enum)]
    pub system: System,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub zed: Option<f64>,
    #[arg(long)]
    pub q: f64,
    #[command(flatten)]
    pub constants: ConstantsArgs,
    #[arg(long, conflicts_with_all = ["e", "k", "m"])]
    pub rho1: Option<f64>,
    #[arg(long, conflicts_with_all = ["e", "k", "m"])]
    pub rho2: Option<f64>,
    #[arg(long, conflicts_with_all = ["e", "k", "m"])]
    pub z0: Option<f64>,
    #[arg(long, conflicts_with_all = ["e", "k", "m"])]
    pub r1: Option<f64>,
    #[arg(long, conflicts_with_all = ["e", "k", "m"])]
    pub r2: Option<f64>,
    #[arg(long, conflicts_with_all = ["e", "k", "m"])]
    pub theta0: Option<f64>,
    #[arg(long)]
    pub retrograde: bool,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t0: f64,
    /// z phase (oscillator) or polar phase (coulomb)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phase: f64,
    /// Torsion is sampled over [0, t-end]; one closure period of the base motion by default
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[command(flatten)]
    pub output: ReportOutput,
}

#[derive(Debug, Clone, Args)]
pub struct PeriodArgs {
    #[command(flatten)]
    pub params: SystemParams,
    #[command(flatten)]
    pub constants: ConstantsArgs,
    #[arg(long, default_value_t = ringshape_core::RATIONAL_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = ringshape_core::RATIONAL_MAX_DEN)]
    pub max_den: u64,
    #[command(flatten)]
    pub output: ReportOutput,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub params: SystemParams,
    #[arg(long, allow_negative_numbers = true)]
    pub m: i64,
    #[arg(long)]
    pub nrho: Option<u32>,
    #[arg(long)]
    pub nz: Option<u32>,
    #[arg(long)]
    pub nr: Option<u32>,
    #[arg(long)]
    pub ntheta: Option<u32>,
    #[command(flatten)]
    pub output: ReportOutput,
}

#[derive(Debug, Clone, Args)]
#[group(id = "mode", required = true, multiple = false, args = ["q", "triple"])]
pub struct DegeneracyArgs {
    /// Search for all triples at this coupling
    #[arg(long)]
    pub q: Option<f64>,
    /// Coupling for one triple m,m',I
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub triple: Option<Vec<i64>>,
    #[arg(long, default_value_t = 10)]
    pub max_m: i64,
    #[arg(long, default_value_t = 10)]
    pub max_i: i64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub output: ReportOutput,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "table")]
    pub format: VerifyFormat,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}
