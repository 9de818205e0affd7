//! Closed-form centre-of-mass dynamics.
//!
//! The CM coordinate behaves as a particle of mass `2 mu` in the potential
//! `mu Omega^2 R^2`, driven by the force `2 q E0 e sin(omega t + delta)`.
//! Starting from the oscillator ground state it stays a rigid Gaussian whose
//! centre follows the classical trajectory.
//!
//! Two evaluators are provided:
//! * [`eval_psi_cm`] is the literal product of the closed-form factors. It
//!   contains `cot(Omega t)` and `1/(Omega^2 - omega^2)` and refuses the
//!   bands around those singularities.
//! * [`eval_psi_cm_coherent`] writes the same state as a displaced ground
//!   state with an accumulated action phase. It is smooth in `t` everywhere
//!   and handles the resonance through the limiting trajectory.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridWavefunction1D;
use crate::numerics::divided::{int_exp, int_exp_nested};
use crate::numerics::quadrature::integrate;
use crate::params::{Tolerances, ValidatedParams, POLARIZATION_TOL};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A CM position `R = (X, Y, Z)` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmPoint {
    pub r: Vector3<f64>,
    pub t: f64,
}

impl CmPoint {
    pub fn new(x: f64, y: f64, z: f64, t: f64) -> Self {
        CmPoint { r: Vector3::new(x, y, z), t }
    }
}

/// What to do when `|Omega^2 - omega^2|` falls inside the resonance band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResonancePolicy {
    Forbid,
    Limit,
}

/// Classical CM displacement along the polarization and its velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalState {
    pub z: f64,
    pub v: f64,
}

fn require_positive_freq(p: &ValidatedParams) -> Result<()> {
    if p.trap_freq > 0.0 {
        Ok(())
    } else {
        Err(Error::ZeroFrequency)
    }
}

fn require_zero_phase(p: &ValidatedParams) -> Result<()> {
    if p.phase == 0.0 {
        Ok(())
    } else {
        Err(Error::UnsupportedPhase(p.phase))
    }
}

fn require_z_polarization(p: &ValidatedParams) -> Result<()> {
    if (p.polarization - Vector3::z()).norm() <= POLARIZATION_TOL {
        Ok(())
    } else {
        Err(Error::UnsupportedPolarization)
    }
}

fn check_sin(p: &ValidatedParams, t: f64, tol: &Tolerances) -> Result<f64> {
    let s = (p.trap_freq * t).sin();
    if s.abs() <= tol.sin {
        Err(Error::SingularTime { t, sin: s })
    } else {
        Ok(s)
    }
}

fn detuning(p: &ValidatedParams) -> f64 {
    p.trap_freq * p.trap_freq - p.laser_freq * p.laser_freq
}

/// `sin(omega t) / omega`, finite at `omega = 0`.
fn sin_over(omega: f64, t: f64) -> f64 {
    if omega == 0.0 {
        t
    } else {
        (omega * t).sin() / omega
    }
}

/// Classical CM trajectory for `delta = 0`, starting at rest at the origin.
///
/// Off resonance this is `q E0 (sin wt - (w/W) sin Wt) / (mu (W^2 - w^2))`;
/// inside the resonance band the `omega -> Omega` limit
/// `q E0 (sin Wt - Wt cos Wt) / (2 mu W^2)` is returned when `policy` allows.
pub fn classical_trajectory(
    p: &ValidatedParams,
    t: f64,
    policy: ResonancePolicy,
    tol: &Tolerances,
) -> Result<ClassicalState> {
    require_positive_freq(p)?;
    require_zero_phase(p)?;
    let (big, small) = (p.trap_freq, p.laser_freq);
    let force = p.q * p.field_amplitude / p.mu;
    let d = detuning(p);
    if d.abs() <= tol.resonance {
        if policy == ResonancePolicy::Forbid {
            return Err(Error::ResonanceSingularity { detuning: d });
        }
        let (s, c) = (big * t).sin_cos();
        return Ok(ClassicalState {
            z: force * (s - big * t * c) / (2.0 * big * big),
            v: force * t * s / 2.0,
        });
    }
    let amp = force / d;
    Ok(ClassicalState {
        z: amp * ((small * t).sin() - small / big * (big * t).sin()),
        v: amp * small * ((small * t).cos() - (big * t).cos()),
    })
}

/// CM oscillator ground state `(2 mu W / pi hbar)^{3/4} exp(-mu W R^2 / hbar)`.
pub fn ground_state(p: &ValidatedParams, r: &Vector3<f64>) -> f64 {
    let alpha = p.mu * p.trap_freq / p.hbar;
    (2.0 * alpha / PI).powf(0.75) * (-alpha * r.norm_squared()).exp()
}

/// Normalized 1D ground-state factor along one axis.
pub fn ground_state_1d(p: &ValidatedParams, x: f64) -> f64 {
    let alpha = p.mu * p.trap_freq / p.hbar;
    (2.0 * alpha / PI).powf(0.25) * (-alpha * x * x).exp()
}

/// The closed-form driven CM wavefunction, evaluated factor by factor.
///
/// Requires `delta = 0`, polarization along z, `|sin(Omega t)| > tol.sin`
/// and `|Omega^2 - omega^2| > tol.resonance`.
pub fn eval_psi_cm(p: &ValidatedParams, point: &CmPoint, tol: &Tolerances) -> Result<Complex64> {
    require_positive_freq(p)?;
    require_zero_phase(p)?;
    require_z_polarization(p)?;
    let t = point.t;
    let s = check_sin(p, t, tol)?;
    let d = detuning(p);
    if d.abs() <= tol.resonance {
        return Err(Error::ResonanceSingularity { detuning: d });
    }

    let (mu, hbar, q, e0) = (p.mu, p.hbar, p.q, p.field_amplitude);
    let (big, small) = (p.trap_freq, p.laser_freq);
    let (x, y, z) = (point.r.x, point.r.y, point.r.z);
    let cot = (big * t).cos() / s;
    let (sw, cw) = (small * t).sin_cos();

    let prefactor = (2.0 * mu * big / (PI * hbar)).powf(0.75);
    let energy_phase = (-1.5 * I * big * t).exp();
    let transverse = (-mu / hbar * big * (x * x + y * y)).exp();
    let chirp = (I * mu / hbar * big * z * z * cot).exp();
    let drift = q * e0 * (sw - small / big * s) / (mu * d);
    let envelope = (-(mu * big * (drift - z).powi(2))
        / (hbar * s * s * (Complex64::new(1.0, 0.0) - I * cot)))
        .exp();
    let momentum = (2.0 * I * q * e0 * z * (small * cw - big * sw * cot) / (hbar * d)).exp();
    // sin(wt) cos(wt) (w + W^2/w), with sin(wt)/w kept finite at w = 0
    let osc = cw * (small * sw + big * big * sin_over(small, t));
    let ponder = (-I * q * q * e0 * e0 * (osc - 2.0 * big * cot * sw * sw)
        / (2.0 * mu * hbar * d * d))
        .exp();
    let secular = (I * q * q * e0 * e0 * t / (2.0 * mu * hbar * d)).exp();

    Ok(prefactor * energy_phase * transverse * chirp * envelope * momentum * ponder * secular)
}

/// Snapshot of the driven coherent state at one time; cheap to evaluate at
/// many positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherentState {
    pub t: f64,
    pub classical: ClassicalState,
    /// Accumulated classical action `int_0^t L dt` (action units).
    pub action: f64,
    alpha: f64,
    wavenumber: f64,
    big_omega: f64,
    hbar: f64,
}

impl CoherentState {
    pub fn at(p: &ValidatedParams, t: f64, tol: &Tolerances) -> Result<Self> {
        require_positive_freq(p)?;
        require_zero_phase(p)?;
        require_z_polarization(p)?;
        if !t.is_finite() {
            return Err(Error::NonFinite("t"));
        }
        let classical = classical_trajectory(p, t, ResonancePolicy::Limit, tol)?;
        let mass = 2.0 * p.mu;
        let force = 2.0 * p.q * p.field_amplitude;
        let omega2 = p.trap_freq * p.trap_freq;
        let lagrangian = |s: f64| {
            // trajectory errors are impossible here: preconditions already hold
            let c = classical_trajectory(p, s, ResonancePolicy::Limit, tol)
                .expect("trajectory preconditions checked above");
            0.5 * mass * (c.v * c.v - omega2 * c.z * c.z) + force * (p.laser_freq * s).sin() * c.z
        };
        let action = if p.field_amplitude == 0.0 {
            0.0
        } else {
            integrate(lagrangian, 0.0, t, tol.phase_quad * p.hbar, 0.0)?.value
        };
        Ok(CoherentState {
            t,
            classical,
            action,
            alpha: p.mu * p.trap_freq / p.hbar,
            wavenumber: mass * classical.v / p.hbar,
            big_omega: p.trap_freq,
            hbar: p.hbar,
        })
    }

    /// Global phase of the state: `-(3/2) Omega t + action / hbar`.
    pub fn global_phase(&self) -> f64 {
        -1.5 * self.big_omega * self.t + self.action / self.hbar
    }

    pub fn eval(&self, r: &Vector3<f64>) -> Complex64 {
        let dz = r.z - self.classical.z;
        let prefactor = (2.0 * self.alpha / PI).powf(0.75);
        let gauss = -self.alpha * (r.x * r.x + r.y * r.y + dz * dz);
        let phase = self.wavenumber * dz + self.global_phase();
        Complex64::from_polar(prefactor * gauss.exp(), phase)
    }

    /// Normalized z factor of the state; its phase carries `-(1/2) Omega t`.
    pub fn z_factor(&self, z: f64) -> Complex64 {
        let dz = z - self.classical.z;
        let amp = (2.0 * self.alpha / PI).powf(0.25) * (-self.alpha * dz * dz).exp();
        let phase = self.wavenumber * dz - 0.5 * self.big_omega * self.t + self.action / self.hbar;
        Complex64::from_polar(amp, phase)
    }
}

/// Driven CM wavefunction as a displaced ground state. Smooth in `t`,
/// including `sin(Omega t) = 0` and `omega = Omega`.
pub fn eval_psi_cm_coherent(
    p: &ValidatedParams,
    point: &CmPoint,
    tol: &Tolerances,
) -> Result<Complex64> {
    Ok(CoherentState::at(p, point.t, tol)?.eval(&point.r))
}

/// Choice of closed-form CM evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CmEvaluator {
    Literal,
    #[default]
    Coherent,
}

impl CmEvaluator {
    pub fn eval(self, p: &ValidatedParams, point: &CmPoint, tol: &Tolerances) -> Result<Complex64> {
        match self {
            CmEvaluator::Literal => eval_psi_cm(p, point, tol),
            CmEvaluator::Coherent => eval_psi_cm_coherent(p, point, tol),
        }
    }
}

/// The normalized z factor of the analytic CM state sampled on a grid: the
/// full wavefunction on the z axis divided by the stationary x and y factors
/// (including their `exp(-i Omega t / 2)` phases).
pub fn analytic_z_grid(
    p: &ValidatedParams,
    evaluator: CmEvaluator,
    z_min: f64,
    z_max: f64,
    n: usize,
    t: f64,
    tol: &Tolerances,
) -> Result<GridWavefunction1D> {
    match evaluator {
        CmEvaluator::Coherent => {
            let state = CoherentState::at(p, t, tol)?;
            GridWavefunction1D::from_fn(z_min, z_max, n, t, |z| state.z_factor(z))
        }
        CmEvaluator::Literal => {
            let xy = Complex64::from_polar(ground_state_1d(p, 0.0).powi(2), -p.trap_freq * t);
            GridWavefunction1D::try_from_fn(z_min, z_max, n, t, |z| {
                Ok(eval_psi_cm(p, &CmPoint::new(0.0, 0.0, z, t), tol)? / xy)
            })
        }
    }
}

/// The three time integrals of the forced-oscillator action over `[0, t]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriveIntegrals {
    /// `int_0^t sin(w tau + d) sin(W tau) d tau`, multiplies the final point.
    pub final_weight: f64,
    /// `int_0^t sin(w tau + d) sin(W (t - tau)) d tau`, multiplies the initial point.
    pub initial_weight: f64,
    /// `int_0^t int_0^tau sin(w tau + d) sin(w s + d) sin(W (t - tau)) sin(W s) ds d tau`.
    pub double: f64,
}

/// `c cos(k x + phi)`.
#[derive(Clone, Copy)]
struct CosTerm {
    coef: f64,
    freq: f64,
    phase: f64,
}

/// Closed forms of the drive integrals, built from `int e^{ik tau}` and its
/// nested version so that `omega = Omega` needs no special case.
pub fn drive_integrals(p: &ValidatedParams, t: f64) -> DriveIntegrals {
    let (w, big, d) = (p.laser_freq, p.trap_freq, p.phase);
    // sin(w tau + d) sin(W tau)
    let inner = [
        CosTerm { coef: 0.5, freq: w - big, phase: d },
        CosTerm { coef: -0.5, freq: w + big, phase: d },
    ];
    // sin(w tau + d) sin(W t - W tau)
    let outer = [
        CosTerm { coef: 0.5, freq: w + big, phase: d - big * t },
        CosTerm { coef: -0.5, freq: w - big, phase: d + big * t },
    ];
    let single = |terms: &[CosTerm]| -> f64 {
        terms
            .iter()
            .map(|c| c.coef * (Complex64::from_polar(1.0, c.phase) * int_exp(c.freq, t)).re)
            .sum()
    };
    let mut double = 0.0;
    for o in &outer {
        for i in &inner {
            // cos A cos B = (cos(A + B) + cos(A - B)) / 2
            let sum = Complex64::from_polar(1.0, o.phase + i.phase) * int_exp_nested(o.freq, i.freq, t);
            let diff =
                Complex64::from_polar(1.0, o.phase - i.phase) * int_exp_nested(o.freq, -i.freq, t);
            double += o.coef * i.coef * 0.5 * (sum.re + diff.re);
        }
    }
    DriveIntegrals {
        final_weight: single(&inner),
        initial_weight: single(&outer),
        double,
    }
}

/// Action of a single Cartesian axis whose drive component is `e_axis`.
///
/// Summing over the three axes with `e_axis = e_x, e_y, e_z` gives the full
/// action, since the double-integral weights add up to `|e|^2 = 1`.
pub fn axis_action(
    p: &ValidatedParams,
    drive: &DriveIntegrals,
    e_axis: f64,
    x: f64,
    x_prime: f64,
    t: f64,
) -> f64 {
    let (mu, big) = (p.mu, p.trap_freq);
    let (s, c) = (big * t).sin_cos();
    let qe = p.q * p.field_amplitude * e_axis;
    let bracket = (x * x + x_prime * x_prime) * c - 2.0 * x * x_prime
        + 2.0 * qe / (mu * big) * (x * drive.final_weight + x_prime * drive.initial_weight)
        - 2.0 * qe * qe / (mu * mu * big * big) * drive.double;
    mu * big / s * bracket
}

/// Classical action `S(R, t; R', 0)` of the driven CM oscillator.
pub fn propagator_action(
    p: &ValidatedParams,
    r: &Vector3<f64>,
    r_prime: &Vector3<f64>,
    t: f64,
    tol: &Tolerances,
) -> Result<f64> {
    require_positive_freq(p)?;
    check_sin(p, t, tol)?;
    let drive = drive_integrals(p, t);
    Ok((0..3)
        .map(|k| axis_action(p, &drive, p.polarization[k], r[k], r_prime[k], t))
        .sum())
}

/// One-dimensional amplitude factor `sqrt(mu W / (i pi hbar sin W t))`, with
/// the branch continued from `t = 0+`: each zero of `sin(W t)` passed adds a
/// phase of `-pi/2`.
fn axis_prefactor(p: &ValidatedParams, t: f64) -> Complex64 {
    let s = (p.trap_freq * t).sin();
    let crossings = (p.trap_freq * t / PI).floor();
    let modulus = (p.mu * p.trap_freq / (PI * p.hbar * s.abs())).sqrt();
    Complex64::from_polar(modulus, -FRAC_PI_4 - FRAC_PI_2 * crossings)
}

/// Propagator along one axis, `K_1(x, t; x', 0)`, with drive component `e_axis`.
pub fn propagator_1d(
    p: &ValidatedParams,
    e_axis: f64,
    x: f64,
    x_prime: f64,
    t: f64,
    tol: &Tolerances,
) -> Result<Complex64> {
    require_positive_freq(p)?;
    if t <= 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    check_sin(p, t, tol)?;
    let drive = drive_integrals(p, t);
    let s = axis_action(p, &drive, e_axis, x, x_prime, t);
    Ok(axis_prefactor(p, t) * Complex64::from_polar(1.0, s / p.hbar))
}

/// Full 3D propagator `[mu W / (i pi hbar sin W t)]^{3/2} exp(i S / hbar)`.
pub fn propagator(
    p: &ValidatedParams,
    r: &Vector3<f64>,
    r_prime: &Vector3<f64>,
    t: f64,
    tol: &Tolerances,
) -> Result<Complex64> {
    require_positive_freq(p)?;
    if t <= 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    let s = propagator_action(p, r, r_prime, t, tol)?;
    Ok(axis_prefactor(p, t).powi(3) * Complex64::from_polar(1.0, s / p.hbar))
}

/// Propagates the z factor of a product state by trapezoid quadrature of the
/// path-integral convolution over the input grid.
///
/// The drive acts through `e_z`. If `initial.t() != 0` the laser phase is
/// advanced accordingly. The output lives on the input grid at
/// `initial.t() + t`.
pub fn path_integral_propagate(
    p: &ValidatedParams,
    initial: &GridWavefunction1D,
    t: f64,
    tol: &Tolerances,
) -> Result<GridWavefunction1D> {
    require_positive_freq(p)?;
    if t <= 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    check_sin(p, t, tol)?;
    let shifted = p
        .into_inner()
        .with_phase(p.phase + p.laser_freq * initial.t());
    let shifted = crate::params::validate(shifted)?;
    let drive = drive_integrals(&shifted, t);

    let n = initial.len();
    let dz = initial.dz();
    let e_z = p.polarization.z;
    let pref = axis_prefactor(p, t);
    let zs: Vec<f64> = initial.points().collect();
    // split the action into out-only, in-only and cross terms
    let scale = p.mu * p.trap_freq / ((p.trap_freq * t).sin() * p.hbar);
    let zero = axis_action(&shifted, &drive, e_z, 0.0, 0.0, t) / p.hbar;
    let out_phase: Vec<Complex64> = zs
        .iter()
        .map(|&z| Complex64::from_polar(1.0, axis_action(&shifted, &drive, e_z, z, 0.0, t) / p.hbar - zero))
        .collect();
    let raw_in: Vec<Complex64> = zs
        .iter()
        .zip(initial.samples())
        .map(|(&z, &psi)| psi * Complex64::from_polar(1.0, axis_action(&shifted, &drive, e_z, 0.0, z, t) / p.hbar))
        .collect();

    // trapezoid on the full grid (h) and on every other node (2h); their
    // difference is the self-estimate
    let last_even = if (n - 1).is_multiple_of(2) { n - 1 } else { n - 2 };
    let fine_weight = |k: usize| if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
    let coarse_weight = |k: usize| {
        if k % 2 == 1 || k > last_even {
            0.0
        } else if k == 0 || k == last_even {
            1.0
        } else {
            2.0
        }
    };
    let mut fine = Vec::with_capacity(n);
    let mut worst_diff: f64 = 0.0;
    for (j, &z) in zs.iter().enumerate() {
        let mut sum_fine = Complex64::new(0.0, 0.0);
        let mut sum_coarse = Complex64::new(0.0, 0.0);
        for (k, &zk) in zs.iter().enumerate() {
            let term = raw_in[k] * Complex64::from_polar(1.0, -2.0 * scale * z * zk);
            sum_fine += term * fine_weight(k);
            sum_coarse += term * coarse_weight(k);
        }
        let common = pref * out_phase[j] * dz;
        let value = common * sum_fine;
        worst_diff = worst_diff.max((value - common * sum_coarse).norm());
        fine.push(value);
    }
    let peak = fine.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let estimate = if peak > 0.0 { worst_diff / peak } else { 0.0 };
    if estimate > tol.grid_quad {
        return Err(Error::GridTooCoarse { estimate, tolerance: tol.grid_quad });
    }
    GridWavefunction1D::new(initial.z_min(), initial.z_max(), fine, initial.t() + t)
}
