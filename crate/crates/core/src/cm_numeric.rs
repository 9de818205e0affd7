//! Crank–Nicolson propagation of the CM z factor on a uniform grid.
//!
//! The kinetic term uses mass `2 mu`, the potential is
//! `mu W^2 z^2 - 2 q E0 e_z z sin(w t + d)` evaluated at the half step, and the
//! box edges are Dirichlet zeros.

use num_complex::Complex64;
use serde::Serialize;

use crate::cm_analytic::{classical_trajectory, ResonancePolicy};
use crate::error::{Error, Result};
use crate::grid::GridWavefunction1D;
use crate::numerics::tridiag;
use crate::params::{Tolerances, ValidatedParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropagationReport {
    pub steps: usize,
    pub final_time: f64,
    /// Largest `|N_k - N_0| / N_0` seen over the run.
    pub norm_drift: f64,
    /// Largest amplitude next to the box edges seen over the run.
    pub max_boundary_amplitude: f64,
}

/// Potential energy of the CM z factor at time `t`.
pub fn cm_potential(p: &ValidatedParams, z: f64, t: f64) -> f64 {
    p.mu * p.trap_freq * p.trap_freq * z * z
        - 2.0 * p.q * p.field_amplitude * p.polarization.z * z * (p.laser_freq * t + p.phase).sin()
}

/// Default symmetric box `[-h, h]` for propagating up to `t_end`:
/// `h = max(10 sqrt(hbar / (2 mu W)), 3 max|z_cl|)`, with the trajectory
/// maximum taken over 2000 samples of `[0, t_end]`.
pub fn default_box(p: &ValidatedParams, t_end: f64, tol: &Tolerances) -> Result<(f64, f64)> {
    if p.trap_freq <= 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let width = 10.0 * (p.hbar / (2.0 * p.mu * p.trap_freq)).sqrt();
    let resonance = if p.phase == 0.0 { ResonancePolicy::Limit } else { ResonancePolicy::Forbid };
    let mut z_max: f64 = 0.0;
    if p.field_amplitude > 0.0 && t_end > 0.0 {
        for k in 0..=2000 {
            let t = t_end * k as f64 / 2000.0;
            match classical_trajectory(p, t, resonance, tol) {
                Ok(c) => z_max = z_max.max(c.z.abs()),
                // nonzero phase: fall back to the a-priori drift bound
                Err(_) => {
                    let d = (p.trap_freq.powi(2) - p.laser_freq.powi(2)).abs().max(tol.resonance);
                    z_max = 2.0 * (p.q * p.field_amplitude).abs() / (p.mu * d)
                        * (1.0 + p.laser_freq / p.trap_freq);
                    break;
                }
            }
        }
    }
    let half = width.max(3.0 * z_max);
    Ok((-half, half))
}

/// Advances `psi0` by `steps` Crank–Nicolson steps of size `dt`.
///
/// The boundary samples are held at zero. Fails with `BoundaryLeak` as soon
/// as the amplitude next to an edge exceeds `tol.boundary_leak` times the
/// peak amplitude.
pub fn crank_nicolson_propagate(
    p: &ValidatedParams,
    psi0: &GridWavefunction1D,
    dt: f64,
    steps: usize,
    tol: &Tolerances,
) -> Result<(GridWavefunction1D, PropagationReport)> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidTimeStep(dt));
    }
    let n = psi0.len();
    let dz = psi0.dz();
    let zs: Vec<f64> = psi0.points().collect();
    let mut psi = psi0.clone();
    let t0 = psi0.t();
    let m = n - 2;

    // kinetic coupling hbar^2 / (2 (2 mu) dz^2) times dt / (2 hbar)
    let kin = p.hbar / (4.0 * p.mu * dz * dz) * dt / 2.0;
    let half = dt / (2.0 * p.hbar);
    let off = Complex64::new(0.0, -kin);
    let lower = vec![off; m - 1];
    let upper = vec![off; m - 1];
    let mut diag = vec![Complex64::default(); m];
    let mut rhs = vec![Complex64::default(); m];

    let norm0 = psi0.norm();
    let mut report = PropagationReport {
        steps: 0,
        final_time: t0,
        norm_drift: 0.0,
        max_boundary_amplitude: 0.0,
    };
    check_boundary(&psi, 0, tol, &mut report)?;
    {
        let s = psi.samples_mut();
        s[0] = Complex64::default();
        s[n - 1] = Complex64::default();
    }

    for step in 0..steps {
        let t_mid = t0 + (step as f64 + 0.5) * dt;
        let s = psi.samples();
        for i in 0..m {
            let j = i + 1;
            let a = 2.0 * kin + half * cm_potential(p, zs[j], t_mid);
            diag[i] = Complex64::new(1.0, a);
            // (1 - i A) psi
            let lap = s[j - 1] + s[j + 1];
            rhs[i] = s[j] * Complex64::new(1.0, -a) + Complex64::new(0.0, kin) * lap;
        }
        tridiag::solve_in_place(&lower, &mut diag, &upper, &mut rhs)?;
        psi.samples_mut()[1..n - 1].copy_from_slice(&rhs);

        let norm = psi.norm();
        report.norm_drift = report.norm_drift.max((norm - norm0).abs() / norm0);
        report.steps = step + 1;
        report.final_time = t0 + (step + 1) as f64 * dt;
        check_boundary(&psi, step + 1, tol, &mut report)?;
    }
    psi.set_t(report.final_time);
    Ok((psi, report))
}

fn check_boundary(
    psi: &GridWavefunction1D,
    step: usize,
    tol: &Tolerances,
    report: &mut PropagationReport,
) -> Result<()> {
    let s = psi.samples();
    let n = s.len();
    let edge = s[1].norm().max(s[n - 2].norm());
    report.max_boundary_amplitude = report.max_boundary_amplitude.max(edge);
    let peak = psi.max_amplitude();
    if peak > 0.0 && edge > tol.boundary_leak * peak {
        return Err(Error::BoundaryLeak { step, ratio: edge / peak });
    }
    Ok(())
}
