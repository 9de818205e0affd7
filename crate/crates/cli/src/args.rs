use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hookeon::cm_analytic::CmEvaluator;
use hookeon::UnitSystem;

#[derive(Debug, Parser)]
#[command(name = "hookeon", version = env!("HOOKEON_VERSION"), about = "Driven two-electron harmonic atom: closed forms and numerical checks")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Units {
    Atomic,
    Si,
    Custom,
}

impl From<Units> for UnitSystem {
    fn from(u: Units) -> Self {
        match u {
            Units::Atomic => UnitSystem::Atomic,
            Units::Si => UnitSystem::Si,
            Units::Custom => UnitSystem::Custom,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Evaluator {
    Literal,
    Coherent,
}

impl From<Evaluator> for CmEvaluator {
    fn from(e: Evaluator) -> Self {
        match e {
            Evaluator::Literal => CmEvaluator::Literal,
            Evaluator::Coherent => CmEvaluator::Coherent,
        }
    }
}

#[derive(Debug, Args)]
pub struct Common {
    /// Unit preset for the baseline parameters and for interpreting values.
    #[arg(long, global = true, value_enum, env = "HOOKEON_UNITS", default_value = "atomic")]
    pub units: Units,
    /// Config file with `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Data destination; standard output when absent.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub q: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub hbar: Option<f64>,
    /// Trap frequency.
    #[arg(long = "Omega", global = true, allow_negative_numbers = true)]
    pub big_omega: Option<f64>,
    /// Laser frequency.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    #[arg(long = "E0", global = true, allow_negative_numbers = true)]
    pub e0: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long = "pol_x", global = true, allow_negative_numbers = true)]
    pub pol_x: Option<f64>,
    #[arg(long = "pol_y", global = true, allow_negative_numbers = true)]
    pub pol_y: Option<f64>,
    #[arg(long = "pol_z", global = true, allow_negative_numbers = true)]
    pub pol_z: Option<f64>,

    #[arg(long = "tol-sin", global = true)]
    pub tol_sin: Option<f64>,
    /// Resonance band on |Omega^2 - omega^2|, in atomic units.
    #[arg(long = "tol-resonance", global = true)]
    pub tol_resonance: Option<f64>,
    #[arg(long = "tol-phase-quad", global = true)]
    pub tol_phase_quad: Option<f64>,
    #[arg(long = "tol-norm-quad", global = true)]
    pub tol_norm_quad: Option<f64>,
    #[arg(long = "tol-grid-quad", global = true)]
    pub tol_grid_quad: Option<f64>,
    #[arg(long = "tol-boundary-leak", global = true)]
    pub tol_boundary_leak: Option<f64>,
    #[arg(long = "tol-shoot", global = true)]
    pub tol_shoot: Option<f64>,
    #[arg(long = "tol-termination", global = true)]
    pub tol_termination: Option<f64>,
    #[arg(long = "tol-pair-residual", global = true)]
    pub tol_pair_residual: Option<f64>,
}

impl Common {
    /// Parameter flags as `(config key, value)` pairs.
    pub fn param_flags(&self) -> Vec<(&'static str, f64)> {
        [
            ("mu", self.mu),
            ("q", self.q),
            ("hbar", self.hbar),
            ("Omega", self.big_omega),
            ("omega", self.omega),
            ("E0", self.e0),
            ("delta", self.delta),
            ("pol_x", self.pol_x),
            ("pol_y", self.pol_y),
            ("pol_z", self.pol_z),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect()
    }

    pub fn tolerance_flags(&self) -> Vec<(&'static str, f64)> {
        [
            ("sin", self.tol_sin),
            ("resonance", self.tol_resonance),
            ("phase-quad", self.tol_phase_quad),
            ("norm-quad", self.tol_norm_quad),
            ("grid-quad", self.tol_grid_quad),
            ("boundary-leak", self.tol_boundary_leak),
            ("shoot", self.tol_shoot),
            ("termination", self.tol_termination),
            ("pair-residual", self.tol_pair_residual),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect()
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the CM wavefunction at sample points.
    CmEval(CmEvalArgs),
    /// Finite-difference residual of the CM wavefunction at random points.
    CmCheck(CmCheckArgs),
    /// Crank-Nicolson propagation of the CM z factor.
    CmPropagate(PropagateArgs),
    /// Grid propagation against the closed form, with a refinement ladder.
    CmCompare(CompareArgs),
    /// Closed-form relative levels for l = 0..lmax.
    Taut(TautArgs),
    /// Shooting eigenvalue and radial function at the trap frequency.
    RadialShoot(ShootArgs),
    /// Two-particle state along a line in (r1, r2) space.
    Assemble(AssembleArgs),
    /// Runs every invariant suite on the current parameters.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Args)]
pub struct CmEvalArgs {
    /// Sample point `X,Y,Z,t`; repeatable.
    #[arg(long = "point", allow_hyphen_values = true)]
    pub points: Vec<String>,
    /// Grid along Z at fixed X, Y: `zmin:zmax:n`.
    #[arg(long, allow_hyphen_values = true)]
    pub zgrid: Option<String>,
    /// Times for the Z grid: `tmin:tmax:n` or a single value.
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub times: String,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub x: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub y: f64,
    #[arg(long, value_enum, default_value = "coherent")]
    pub evaluator: Evaluator,
}

#[derive(Debug, Args)]
pub struct CmCheckArgs {
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Samples are drawn from the cube of this half-width around the origin
    /// (atomic units of length).
    #[arg(long, default_value_t = 2.0)]
    pub extent: f64,
    /// Latest sample time (atomic units of time).
    #[arg(long, default_value_t = 30.0)]
    pub tmax: f64,
    /// Samples with |sin(Omega t)| at or below this are skipped.
    #[arg(long, default_value_t = 0.05)]
    pub min_sin: f64,
    /// Limit on the residual in atomic units of energy.
    #[arg(long, default_value_t = 1e-5)]
    pub limit: f64,
    #[arg(long, value_enum, default_value = "literal")]
    pub evaluator: Evaluator,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Box edges; both default to the drift-aware box.
    #[arg(long, allow_negative_numbers = true)]
    pub zmin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub zmax: Option<f64>,
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    /// Time step; defaults to 1e-3 atomic units of time.
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PropagateArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    /// Where to write the JSON propagation report; standard error when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Final time; defaults to 5 atomic units of time.
    #[arg(long)]
    pub t: Option<f64>,
    /// Number of refinement levels, each halving dt and dz.
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
}

#[derive(Debug, Args)]
pub struct TautArgs {
    #[arg(long, default_value_t = 10)]
    pub lmax: u32,
}

#[derive(Debug, Args)]
pub struct ShootArgs {
    #[arg(long, default_value_t = 0)]
    pub l: u32,
    /// Energy bracket `lo,hi`; the lowest level is searched when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub bracket: Option<String>,
    /// Samples of u(r).
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct AssembleArgs {
    #[arg(long, default_value_t = 0)]
    pub l: u32,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0)]
    pub m: i32,
    /// Line start `x1,y1,z1,x2,y2,z2`.
    #[arg(long, allow_hyphen_values = true, default_value = "-2,0,0,2,0,0")]
    pub from: String,
    /// Line end `x1,y1,z1,x2,y2,z2`.
    #[arg(long, allow_hyphen_values = true, default_value = "2,0,0,-2,0,0")]
    pub to: String,
    #[arg(long, default_value_t = 101)]
    pub samples: usize,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub t: f64,
    #[arg(long, value_enum, default_value = "coherent")]
    pub evaluator: Evaluator,
}

#[derive(Debug, Args)]
pub struct SelfcheckArgs {
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}
