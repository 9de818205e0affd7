//! Exact and numerical wavefunctions for two laser-driven electrons in a
//! harmonic trap.
//!
//! The problem separates into a driven centre-of-mass oscillator
//! ([`cm_analytic`], checked against the grid propagator in [`cm_numeric`])
//! and a stationary relative-motion problem with Coulomb repulsion
//! ([`relative`]). [`assembly`] recombines both factors and tracks the spin
//! symmetry required by the Pauli principle. [`oracle`] holds the independent
//! numerical checks used by the self-test suite.

pub mod assembly;
pub mod cm_analytic;
pub mod cm_numeric;
pub mod error;
pub mod grid;
pub mod numerics;
pub mod oracle;
pub mod params;
pub mod relative;

pub use error::{Error, Result};
pub use params::{validate, SystemParams, Tolerances, UnitSystem, ValidatedParams};
