//! Relative-coordinate radial problem
//!
//! `-(hbar^2 / mu) (u'' - l(l+1) u / r^2) + (mu W^2 r^2 / 4 + q^2 / r) u = eps u`
//!
//! with `u = r^(l+1) exp(-beta r^2) sum a_n r^n`, `beta = mu W / (4 hbar)`.
//! Substituting the series gives the three-term recurrence
//!
//! `a_{n+1} (n+1)(n+2l+2) = gamma a_n - (E - 2 beta (2n+2l+1)) a_{n-1}`
//!
//! with `gamma = mu q^2 / hbar^2` and `E = mu eps / hbar^2`.

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::quadrature::integrate;
use crate::numerics::spherical::ylm;
use crate::params::{Tolerances, ValidatedParams};

pub const DEFAULT_ORDER: usize = 64;

/// Inner start radius of the outward integration, in scaled length units.
pub const SHOOT_R_MIN: f64 = 1e-6;
/// Nominal RK4 step, in scaled length units.
pub const SHOOT_DR: f64 = 1e-3;
const SHOOT_MAX_ITER: usize = 200;

/// Units in which `hbar^2 / mu = 1` and `q^2 = 1` (atomic-like units for the
/// relative particle). With no charge the oscillator units `hbar W` and
/// `sqrt(hbar / mu W)` are used instead and the Coulomb term drops out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Scaled {
    pub length: f64,
    pub energy: f64,
    pub omega: f64,
    pub coulomb: f64,
}

impl Scaled {
    pub(crate) fn new(p: &ValidatedParams, omega: f64) -> Self {
        let q2 = p.coulomb();
        if q2 > 0.0 {
            let energy = p.mu * q2 * q2 / (p.hbar * p.hbar);
            let length = p.hbar * p.hbar / (p.mu * q2);
            Scaled { length, energy, omega: omega * p.hbar / energy, coulomb: 1.0 }
        } else {
            let energy = p.hbar * omega;
            let length = (p.hbar / (p.mu * omega)).sqrt();
            Scaled { length, energy, omega: 1.0, coulomb: 0.0 }
        }
    }

    /// Outer edge of the shooting interval.
    pub(crate) fn r_max(&self) -> f64 {
        (12.0 * (2.0 / self.omega).sqrt()).max(20.0)
    }

    /// Effective radial potential in scaled units.
    pub(crate) fn potential(&self, l: u32, r: f64) -> f64 {
        let ll = (l as f64) * (l as f64 + 1.0);
        ll / (r * r) + 0.25 * self.omega * self.omega * r * r + self.coulomb / r
    }
}

/// Power series of the radial factor for one `(l, W, eps)`.
///
/// Coefficients are stored as `b_n = a_n beta^(-n/2)`, which are
/// dimensionless and stay representable in any unit system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSeries {
    pub l: u32,
    pub omega: f64,
    pub epsilon: f64,
    pub scaled: Vec<f64>,
    /// Order of the last nonzero coefficient, when the series terminates.
    pub termination: Option<usize>,
    beta: f64,
    gamma: f64,
    energy: f64,
    kinetic: f64,
}

/// Runs the recurrence from `a_0 = 1` up to `a_order`.
///
/// The series counts as terminated at `n` when `a_n != 0` while the scaled
/// `a_{n+1}` and `a_{n+2}` are both below `tol.termination` times the scaled
/// `a_n`. `W > 0` is expected.
pub fn radial_recurrence(
    p: &ValidatedParams,
    l: u32,
    omega: f64,
    epsilon: f64,
    order: usize,
    tol: &Tolerances,
) -> RadialSeries {
    let beta = p.mu * omega / (4.0 * p.hbar);
    let gamma = p.mu * p.coulomb() / (p.hbar * p.hbar);
    let energy = p.mu * epsilon / (p.hbar * p.hbar);
    let scaled = scaled_coefficients(l, gamma, energy, beta, order);
    let termination = detect_termination(&scaled, tol.termination);
    RadialSeries {
        l,
        omega,
        epsilon,
        scaled,
        termination,
        beta,
        gamma,
        energy,
        kinetic: p.hbar * p.hbar / p.mu,
    }
}

fn scaled_coefficients(l: u32, gamma: f64, energy: f64, beta: f64, order: usize) -> Vec<f64> {
    let ell = 1.0 / beta.sqrt();
    let lf = l as f64;
    let mut b = Vec::with_capacity(order + 1);
    b.push(1.0);
    let mut prev = 0.0;
    for n in 0..order {
        let nf = n as f64;
        let cur = b[n];
        let next = (gamma * ell * cur - (energy / beta - 2.0 * (2.0 * nf + 2.0 * lf + 1.0)) * prev)
            / ((nf + 1.0) * (nf + 2.0 * lf + 2.0));
        b.push(next);
        prev = cur;
    }
    b
}

fn detect_termination(b: &[f64], tol: f64) -> Option<usize> {
    for n in 0..b.len().saturating_sub(2) {
        let lead = b[n].abs();
        if lead > 0.0 && b[n + 1].abs() <= tol * lead && b[n + 2].abs() <= tol * lead {
            return Some(n);
        }
    }
    None
}

impl RadialSeries {
    pub fn order(&self) -> usize {
        self.scaled.len() - 1
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Physical coefficient `a_n`.
    pub fn coeff(&self, n: usize) -> f64 {
        self.scaled[n] * self.beta.powf(n as f64 / 2.0)
    }

    pub fn coeffs(&self) -> Vec<f64> {
        (0..self.scaled.len()).map(|n| self.coeff(n)).collect()
    }

    /// Coefficients used for evaluation: up to the termination order when
    /// the series terminates, otherwise all of them.
    fn active(&self) -> &[f64] {
        match self.termination {
            Some(n) => &self.scaled[..=n],
            None => &self.scaled,
        }
    }

    /// Polynomial part and its first two r-derivatives.
    fn poly(&self, r: f64) -> (f64, f64, f64) {
        let sb = self.beta.sqrt();
        let x = r * sb;
        let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
        for &b in self.active().iter().rev() {
            ddp = ddp * x + 2.0 * dp;
            dp = dp * x + p;
            p = p * x + b;
        }
        (p, dp * sb, ddp * self.beta)
    }

    /// `u(r)` of the (possibly truncated) series, with `a_0 = 1`.
    pub fn u(&self, r: f64) -> f64 {
        let (p, _, _) = self.poly(r);
        r.powi(self.l as i32 + 1) * (-self.beta * r * r).exp() * p
    }

    /// `(H - eps) u` for the evaluated series, from its exact derivatives.
    pub fn residual(&self, r: f64) -> f64 {
        let (p, dp, ddp) = self.poly(r);
        let s = self.l as f64 + 1.0;
        let b = self.beta;
        let bracket = ddp + 2.0 * s / r * dp - 4.0 * b * r * dp - (4.0 * b * s + 2.0 * b) * p
            - self.gamma * p / r
            + self.energy * p;
        -self.kinetic * (-b * r * r).exp() * r.powf(s) * bracket
    }

    pub fn is_terminated(&self) -> bool {
        self.termination.is_some()
    }
}

/// Trap frequency of the closed-form level with angular momentum `l`:
/// `q^4 mu / (2 hbar^3 (l + 1))`.
pub fn taut_frequency(p: &ValidatedParams, l: u32) -> f64 {
    let q2 = p.coulomb();
    q2 * q2 * p.mu / (2.0 * p.hbar.powi(3) * (l as f64 + 1.0))
}

/// Closed-form relative level
/// `phi = N r^l (1 + hbar W r / q^2) exp(-mu W r^2 / 4 hbar) Y_lm`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TautLevel {
    pub l: u32,
    pub m: i32,
    pub omega: f64,
    pub epsilon: f64,
    /// Linear coefficient `hbar W / q^2`.
    pub a1: f64,
    pub beta: f64,
    /// `u(r) = norm (r / length)^(l+1) (1 + a1 r) exp(-beta r^2)`.
    pub norm: f64,
    pub length: f64,
}

pub fn taut_level(p: &ValidatedParams, l: u32, m: i32, tol: &Tolerances) -> Result<TautLevel> {
    if m.unsigned_abs() > l {
        return Err(Error::InvalidQuantumNumbers { l: l as i64, m: m as i64 });
    }
    let omega = taut_frequency(p, l);
    if omega <= 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let q2 = p.coulomb();
    let epsilon = 0.5 * p.hbar * (3.0 * omega + q2 * q2 * p.mu / p.hbar.powi(3));
    let a1 = p.hbar * omega / q2;
    let beta = p.mu * omega / (4.0 * p.hbar);
    let length = 1.0 / (2.0 * beta).sqrt();
    // r = length x, so beta r^2 = x^2 / 2
    let c = a1 * length;
    let lp = l as i32 + 1;
    let density = |x: f64| {
        let u = x.powi(lp) * (1.0 + c * x) * (-0.5 * x * x).exp();
        u * u
    };
    let upper = (2.0 * l as f64 + 5.0).sqrt() + 14.0;
    let q = integrate(density, 0.0, upper, 0.0, tol.norm_quad)?;
    Ok(TautLevel {
        l,
        m,
        omega,
        epsilon,
        a1,
        beta,
        norm: 1.0 / (length * q.value).sqrt(),
        length,
    })
}

impl TautLevel {
    /// Normalized radial function `u(r) = r R(r)`.
    pub fn u(&self, r: f64) -> f64 {
        self.norm
            * (r / self.length).powi(self.l as i32 + 1)
            * (1.0 + self.a1 * r)
            * (-self.beta * r * r).exp()
    }

    /// `R(r) = u(r) / r`, finite at the origin.
    pub fn radial(&self, r: f64) -> f64 {
        self.norm / self.length
            * (r / self.length).powi(self.l as i32)
            * (1.0 + self.a1 * r)
            * (-self.beta * r * r).exp()
    }

    pub fn phi_spherical(&self, r: f64, theta: f64, phi: f64) -> Complex64 {
        ylm(self.l, self.m, theta, phi) * self.radial(r)
    }

    /// `phi(r)` at a Cartesian relative position.
    pub fn phi(&self, r: &Vector3<f64>) -> Complex64 {
        let rn = r.norm();
        let theta = if rn > 0.0 { (r.z / rn).clamp(-1.0, 1.0).acos() } else { 0.0 };
        let azimuth = r.y.atan2(r.x);
        self.phi_spherical(rn, theta, azimuth)
    }

    /// `(-1)^l`, the sign of `phi` under `r -> -r`.
    pub fn parity(&self) -> i32 {
        if self.l.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// `exp(-i eps t / hbar)`.
    pub fn phase(&self, hbar: f64, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, -self.epsilon * t / hbar)
    }

    /// The terminating series this level corresponds to.
    pub fn series(&self, p: &ValidatedParams, tol: &Tolerances) -> RadialSeries {
        radial_recurrence(p, self.l, self.omega, self.epsilon, DEFAULT_ORDER, tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TerminatingPair {
    pub omega: f64,
    pub epsilon: f64,
    /// `|a_{n+1}|` relative to the largest earlier scaled coefficient.
    pub residual: f64,
}

/// Closure residual at order `n`: with `eps = hbar W (n + l + 3/2)` the
/// coefficient `a_{n+2}` vanishes whenever `a_{n+1}` does, so the remaining
/// condition is the scaled `a_{n+1}(W) = 0`.
fn closure(p: &ValidatedParams, l: u32, n: usize, omega: f64) -> (f64, f64, f64) {
    let epsilon = p.hbar * omega * (n as f64 + l as f64 + 1.5);
    let beta = p.mu * omega / (4.0 * p.hbar);
    let gamma = p.mu * p.coulomb() / (p.hbar * p.hbar);
    let energy = p.mu * epsilon / (p.hbar * p.hbar);
    let b = scaled_coefficients(l, gamma, energy, beta, n + 1);
    let peak = b[..=n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    (b[n + 1] / peak, b[n] / peak, epsilon)
}

/// All `(W, eps)` in `range` for which the series terminates exactly at
/// order `order_n`, found by a geometric scan of `W` and bisection.
pub fn find_terminating_pairs(
    p: &ValidatedParams,
    l: u32,
    order_n: usize,
    range: (f64, f64),
    tol: &Tolerances,
) -> Result<Vec<TerminatingPair>> {
    let (lo, hi) = range;
    let none = Error::NoSolutionInRange { lo, hi };
    if order_n == 0 || !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(none);
    }
    const SCAN: usize = 4000;
    let ratio = (hi / lo).powf(1.0 / SCAN as f64);
    let f = |w: f64| closure(p, l, order_n, w).0;
    let mut roots = Vec::new();
    let mut a = lo;
    let mut fa = f(a);
    for k in 1..=SCAN {
        let b = if k == SCAN { hi } else { lo * ratio.powi(k as i32) };
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            let (mut x0, mut x1, mut f0) = (a, b, fa);
            for _ in 0..SHOOT_MAX_ITER {
                let mid = 0.5 * (x0 + x1);
                if mid <= x0 || mid >= x1 {
                    break;
                }
                let fm = f(mid);
                if fm == 0.0 {
                    x0 = mid;
                    x1 = mid;
                    break;
                }
                if f0 * fm < 0.0 {
                    x1 = mid;
                } else {
                    x0 = mid;
                    f0 = fm;
                }
            }
            roots.push(0.5 * (x0 + x1));
        }
        a = b;
        fa = fb;
    }
    if fa == 0.0 {
        roots.push(hi);
    }
    let pairs: Vec<TerminatingPair> = roots
        .into_iter()
        .filter_map(|w| {
            let (res, lead, epsilon) = closure(p, l, order_n, w);
            (res.abs() < tol.pair_residual && lead.abs() > tol.termination).then_some(
                TerminatingPair { omega: w, epsilon, residual: res.abs() },
            )
        })
        .collect();
    if pairs.is_empty() {
        return Err(none);
    }
    Ok(pairs)
}

/// One RK4 solution `(u, u')` of the scaled radial equation, with a running
/// log scale so it never overflows.
#[derive(Debug, Clone, Copy)]
struct Track {
    r: f64,
    u: f64,
    v: f64,
    ln_scale: f64,
}

struct RadialOde {
    scaled: Scaled,
    l: u32,
    eps: f64,
}

impl RadialOde {
    fn g(&self, r: f64) -> f64 {
        self.scaled.potential(self.l, r) - self.eps
    }

    fn step(&self, s: &mut Track, h: f64) {
        let (r, u, v) = (s.r, s.u, s.v);
        let k1u = v;
        let k1v = self.g(r) * u;
        let rm = r + 0.5 * h;
        let k2u = v + 0.5 * h * k1v;
        let k2v = self.g(rm) * (u + 0.5 * h * k1u);
        let k3u = v + 0.5 * h * k2v;
        let k3v = self.g(rm) * (u + 0.5 * h * k2u);
        let re = r + h;
        let k4u = v + h * k3v;
        let k4v = self.g(re) * (u + h * k3u);
        s.u = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        s.v = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        s.r = re;
        let size = s.u.abs().max(s.v.abs());
        if size > 1e100 || (size < 1e-100 && size > 0.0) {
            s.u /= size;
            s.v /= size;
            s.ln_scale += size.ln();
        }
    }

    /// Step size near `r`: the nominal step, refined near the origin where
    /// the centrifugal and Coulomb terms are stiff.
    fn step_size(&self, r: f64) -> f64 {
        SHOOT_DR.min(r / (20.0 * (self.l as f64 + 1.0)))
    }

    /// Advances `s` to exactly `target`, calling `visit` after each step.
    fn advance<F: FnMut(&Track)>(&self, s: &mut Track, target: f64, mut visit: F) {
        let dir = if target >= s.r { 1.0 } else { -1.0 };
        while (target - s.r) * dir > 0.0 {
            let h = self.step_size(s.r.min(target).max(SHOOT_R_MIN)).min((target - s.r).abs());
            // avoid a sliver step at the end
            let h = if (target - s.r).abs() - h < 1e-3 * h { (target - s.r).abs() } else { h };
            self.step(s, dir * h);
            visit(s);
        }
    }

    fn outward_start(&self) -> Track {
        // u = r^(l+1) (1 + a1 r), divided by r^(l+1)
        let r = SHOOT_R_MIN;
        let lf = self.l as f64;
        let a1 = self.scaled.coulomb / (2.0 * lf + 2.0);
        Track {
            r,
            u: 1.0 + a1 * r,
            v: (lf + 1.0) / r * (1.0 + a1 * r) + a1,
            ln_scale: (lf + 1.0) * r.ln(),
        }
    }

    fn inward_start(&self) -> Track {
        let r = self.scaled.r_max();
        let s = self.eps / self.scaled.omega - 0.5;
        let beta = 0.25 * self.scaled.omega;
        Track { r, u: 1.0, v: s / r - 2.0 * beta * r, ln_scale: 0.0 }
    }

    /// Normalized Wronskian of the outward and inward solutions at `r_m`.
    fn mismatch(&self, r_m: f64) -> f64 {
        let mut out = self.outward_start();
        self.advance(&mut out, r_m, |_| {});
        let mut inn = self.inward_start();
        self.advance(&mut inn, r_m, |_| {});
        let lam = (2.0 / self.scaled.omega).sqrt();
        let w = (out.u * inn.v - out.v * inn.u) * lam;
        w / (out.u.hypot(lam * out.v) * inn.u.hypot(lam * inn.v))
    }
}

/// Outer classical turning point of the effective potential at `eps`
/// (scaled units); the potential minimum when `eps` lies below it.
fn turning_point(scaled: &Scaled, l: u32, eps: f64) -> f64 {
    let r_max = scaled.r_max();
    let n = (r_max / 0.01).ceil() as usize;
    let mut best = (f64::INFINITY, r_max);
    for k in 0..n {
        let r = r_max - k as f64 * 0.01;
        if r <= 0.01 {
            break;
        }
        let v = scaled.potential(l, r);
        if v < eps {
            return r;
        }
        if v < best.0 {
            best = (v, r);
        }
    }
    best.1
}

fn check_shoot_inputs(omega: f64) -> Result<()> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::ZeroFrequency);
    }
    Ok(())
}

/// Eigenvalue of the radial equation inside `bracket` by outward/inward
/// RK4 integration and bisection on the matching Wronskian.
///
/// The bracket must enclose exactly one sign change. Convergence is
/// `|d eps| < tol.shoot` in units of the scaled energy (hartree in atomic
/// units).
pub fn shoot_radial(
    p: &ValidatedParams,
    l: u32,
    omega: f64,
    bracket: (f64, f64),
    tol: &Tolerances,
) -> Result<f64> {
    check_shoot_inputs(omega)?;
    let scaled = Scaled::new(p, omega);
    let (mut lo, mut hi) = (bracket.0 / scaled.energy, bracket.1 / scaled.energy);
    if hi < lo {
        std::mem::swap(&mut lo, &mut hi);
    }
    let r_m = turning_point(&scaled, l, 0.5 * (lo + hi));
    let w = |eps: f64| RadialOde { scaled, l, eps }.mismatch(r_m);
    let (mut wlo, whi) = (w(lo), w(hi));
    if wlo == 0.0 {
        return Ok(lo * scaled.energy);
    }
    if whi == 0.0 {
        return Ok(hi * scaled.energy);
    }
    if wlo * whi > 0.0 {
        return Err(Error::NoSignChange { lo: bracket.0, hi: bracket.1 });
    }
    for _ in 0..SHOOT_MAX_ITER {
        if hi - lo < tol.shoot {
            return Ok(0.5 * (lo + hi) * scaled.energy);
        }
        let mid = 0.5 * (lo + hi);
        let wm = w(mid);
        if wm == 0.0 {
            return Ok(mid * scaled.energy);
        }
        if wlo * wm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            wlo = wm;
        }
    }
    Err(Error::MaxIterations(SHOOT_MAX_ITER))
}

/// Rigorous bounds on the lowest level for `(l, W)`: the bare oscillator
/// energy below and the oscillator ground-state Coulomb expectation above.
pub fn lowest_level_bounds(p: &ValidatedParams, l: u32, omega: f64) -> (f64, f64) {
    let lo = p.hbar * omega * (l as f64 + 1.5);
    let beta = p.mu * omega / (4.0 * p.hbar);
    // <1/r> for u = r^(l+1) exp(-beta r^2)
    let inv_r = (2.0 * beta).sqrt() * gamma_half(2 * l + 2) / gamma_half(2 * l + 3);
    let shift = p.coulomb() * inv_r;
    (lo, lo + shift.max(0.5 * p.hbar * omega))
}

/// `Gamma(n / 2)` for a positive integer `n`, by exact recursion.
pub fn gamma_half(n: u32) -> f64 {
    assert!(n > 0, "Gamma(0) is undefined");
    let (mut value, mut k) = if n.is_multiple_of(2) {
        (1.0, 2)
    } else {
        (std::f64::consts::PI.sqrt(), 1)
    };
    while k < n {
        value *= k as f64 / 2.0;
        k += 2;
    }
    value
}

/// Lowest eigenvalue for `(l, W)`: the bounds from
/// [`lowest_level_bounds`] are scanned for the first sign change, which is
/// then refined with [`shoot_radial`].
pub fn shoot_lowest(p: &ValidatedParams, l: u32, omega: f64, tol: &Tolerances) -> Result<f64> {
    check_shoot_inputs(omega)?;
    let (lo, hi) = lowest_level_bounds(p, l, omega);
    let scaled = Scaled::new(p, omega);
    let start = (lo - 0.25 * p.hbar * omega) / scaled.energy;
    let end = hi * (1.0 + 1e-6) / scaled.energy;
    let r_m = turning_point(&scaled, l, end);
    let w = |eps: f64| RadialOde { scaled, l, eps }.mismatch(r_m);
    const PIECES: usize = 64;
    let de = (end - start) / PIECES as f64;
    let mut a = start;
    let mut wa = w(a);
    for k in 1..=PIECES {
        let b = start + k as f64 * de;
        let wb = w(b);
        if wa * wb <= 0.0 {
            return shoot_radial(p, l, omega, (a * scaled.energy, b * scaled.energy), tol);
        }
        a = b;
        wa = wb;
    }
    Err(Error::NoSignChange { lo, hi })
}

/// Normalized radial function `u(r)` of the level at `eps`, sampled on
/// `n` uniform points over `[0, r_max]` in physical units.
///
/// Outward and inward solutions are joined at the outer turning point and
/// the result is normalized by the trapezoid rule.
pub fn radial_profile(
    p: &ValidatedParams,
    l: u32,
    omega: f64,
    epsilon: f64,
    n: usize,
) -> Result<Vec<(f64, f64)>> {
    check_shoot_inputs(omega)?;
    if n < 8 {
        return Err(Error::InvalidGrid(format!("need at least 8 points, got {n}")));
    }
    let scaled = Scaled::new(p, omega);
    let eps = epsilon / scaled.energy;
    let ode = RadialOde { scaled, l, eps };
    let r_max = scaled.r_max();
    let h = r_max / (n - 1) as f64;
    let r_m = turning_point(&scaled, l, eps);
    let j_m = ((r_m / h).round() as usize).clamp(1, n - 2);

    // (u, ln_scale) per grid point
    let mut raw = vec![(0.0f64, f64::NEG_INFINITY); n];
    let mut out = ode.outward_start();
    for (j, slot) in raw.iter_mut().enumerate().take(j_m + 1).skip(1) {
        ode.advance(&mut out, j as f64 * h, |_| {});
        *slot = (out.u, out.ln_scale);
    }
    let (um_out, lm_out) = (out.u, out.ln_scale);
    let mut inn = ode.inward_start();
    raw[n - 1] = (inn.u, inn.ln_scale);
    for j in (j_m..n - 1).rev() {
        ode.advance(&mut inn, j as f64 * h, |_| {});
        raw[j] = (inn.u, inn.ln_scale);
    }
    let (um_in, lm_in) = raw[j_m];

    let mut u: Vec<f64> = raw
        .iter()
        .enumerate()
        .map(|(j, &(v, ls))| {
            if j == 0 {
                0.0
            } else if j < j_m {
                v / um_out * (ls - lm_out).exp()
            } else {
                v / um_in * (ls - lm_in).exp()
            }
        })
        .collect();
    let norm: f64 = u.iter().map(|x| x * x).sum::<f64>() * h * scaled.length;
    let c = 1.0 / norm.sqrt();
    for x in &mut u {
        *x *= c;
    }
    Ok(u
        .into_iter()
        .enumerate()
        .map(|(j, v)| (j as f64 * h * scaled.length, v))
        .collect())
}
