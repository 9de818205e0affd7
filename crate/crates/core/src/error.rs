use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every domain failure the library can report.
///
/// Variants are grouped by the module that raises them; [`Error::module`]
/// returns that module's name so front ends can attribute the failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mu must be positive (got {0})")]
    NonPositiveMass(f64),
    #[error("hbar must be positive (got {0})")]
    NonPositiveHbar(f64),
    #[error("{field} must be non-negative (got {value})")]
    NegativeFrequency { field: &'static str, value: f64 },
    #[error("E0 must be non-negative (got {0})")]
    NegativeAmplitude(f64),
    #[error("polarization (pol_x, pol_y, pol_z) must have unit length (|e| = {0})")]
    NonUnitPolarization(f64),
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error("config: {0}")]
    Config(String),

    #[error("Omega must be positive for this evaluation")]
    ZeroFrequency,
    #[error("sin(Omega t) = {sin:e} lies inside the singular band at t = {t}")]
    SingularTime { t: f64, sin: f64 },
    #[error("|Omega^2 - omega^2| = {detuning:e} lies inside the resonance band")]
    ResonanceSingularity { detuning: f64 },
    #[error("closed-form CM wavefunction requires delta = 0 (got {0})")]
    UnsupportedPhase(f64),
    #[error("closed-form CM wavefunction requires polarization along z")]
    UnsupportedPolarization,
    #[error("propagation time must be positive (got {0})")]
    NonPositiveTime(f64),
    #[error("quadrature did not reach tolerance: estimate {estimate:e} > {tolerance:e}")]
    QuadratureFailed { estimate: f64, tolerance: f64 },

    #[error("grid quadrature self-estimate {estimate:e} exceeds {tolerance:e}")]
    GridTooCoarse { estimate: f64, tolerance: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("wavefunction reached the box edge at step {step}: boundary/max = {ratio:e}")]
    BoundaryLeak { step: usize, ratio: f64 },
    #[error("time step must be positive and finite (got {0})")]
    InvalidTimeStep(f64),
    #[error("tridiagonal solve hit a zero pivot at row {0}")]
    SingularPivot(usize),

    #[error("invalid quantum numbers l = {l}, m = {m}")]
    InvalidQuantumNumbers { l: i64, m: i64 },
    #[error("no terminating solution for Omega in [{lo}, {hi}]")]
    NoSolutionInRange { lo: f64, hi: f64 },
    #[error("matching function has no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("root search exceeded {0} iterations")]
    MaxIterations(usize),

    #[error("relative level Omega = {level} differs from CM Omega = {cm}")]
    FrequencyMismatch { level: f64, cm: f64 },
}

impl Error {
    /// Name of the module that raises this error.
    pub fn module(&self) -> &'static str {
        use Error::*;
        match self {
            NonPositiveMass(_)
            | NonPositiveHbar(_)
            | NegativeFrequency { .. }
            | NegativeAmplitude(_)
            | NonUnitPolarization(_)
            | NonFinite(_)
            | Config(_) => "core-params",
            ZeroFrequency
            | SingularTime { .. }
            | ResonanceSingularity { .. }
            | UnsupportedPhase(_)
            | UnsupportedPolarization
            | NonPositiveTime(_)
            | QuadratureFailed { .. }
            | GridTooCoarse { .. } => "cm-analytic",
            InvalidGrid(_)
            | GridMismatch(_)
            | BoundaryLeak { .. }
            | InvalidTimeStep(_)
            | SingularPivot(_) => "cm-numeric",
            InvalidQuantumNumbers { .. }
            | NoSolutionInRange { .. }
            | NoSignChange { .. }
            | MaxIterations(_) => "relative-motion",
            FrequencyMismatch { .. } => "assembly",
        }
    }
}
