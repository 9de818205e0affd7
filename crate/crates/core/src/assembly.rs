//! Two-particle state `Psi(r1, r2, t) = psi_cm(R, t) phi(r) exp(-i eps t / hbar)`
//! with `R = (r1 + r2) / 2`, `r = r1 - r2`, tagged with the spin symmetry the
//! Pauli principle forces on it.

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::Serialize;

use crate::cm_analytic::{CmEvaluator, CmPoint};
use crate::error::{Error, Result};
use crate::params::{Tolerances, ValidatedParams};
use crate::relative::TautLevel;

/// Relative frequency mismatch accepted between the level and the trap.
pub const FREQUENCY_MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpinSymmetry {
    Singlet,
    Triplet,
}

impl SpinSymmetry {
    /// Sign of the spin factor under particle exchange.
    pub fn exchange_sign(self) -> i32 {
        match self {
            SpinSymmetry::Singlet => -1,
            SpinSymmetry::Triplet => 1,
        }
    }
}

impl std::fmt::Display for SpinSymmetry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SpinSymmetry::Singlet => "singlet",
            SpinSymmetry::Triplet => "triplet",
        })
    }
}

/// Even `l` pairs with the singlet, odd `l` with the triplet.
pub fn classify_symmetry(level: &TautLevel) -> SpinSymmetry {
    if level.parity() == 1 {
        SpinSymmetry::Singlet
    } else {
        SpinSymmetry::Triplet
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TotalState {
    pub params: ValidatedParams,
    pub level: TautLevel,
    pub spin: SpinSymmetry,
    pub evaluator: CmEvaluator,
    pub tolerances: Tolerances,
}

impl TotalState {
    /// Fails with `FrequencyMismatch` unless the level belongs to the trap
    /// frequency of `params`.
    pub fn new(
        params: ValidatedParams,
        level: TautLevel,
        evaluator: CmEvaluator,
        tolerances: Tolerances,
    ) -> Result<Self> {
        if (level.omega - params.trap_freq).abs() > FREQUENCY_MATCH_TOL * params.trap_freq {
            return Err(Error::FrequencyMismatch { level: level.omega, cm: params.trap_freq });
        }
        Ok(TotalState { spin: classify_symmetry(&level), params, level, evaluator, tolerances })
    }

    /// Combined exchange sign of the spatial and spin factors; always -1.
    pub fn exchange_sign(&self) -> i32 {
        self.level.parity() * self.spin.exchange_sign()
    }
}

/// Spatial amplitude `psi_cm((r1 + r2) / 2, t) phi(r1 - r2) exp(-i eps t / hbar)`.
pub fn eval_total(
    state: &TotalState,
    r1: &Vector3<f64>,
    r2: &Vector3<f64>,
    t: f64,
) -> Result<Complex64> {
    let center = (r1 + r2) * 0.5;
    let cm = state.evaluator.eval(
        &state.params,
        &CmPoint { r: center, t },
        &state.tolerances,
    )?;
    let rel = state.level.phi(&(r1 - r2));
    Ok(cm * rel * state.level.phase(state.params.hbar, t))
}
