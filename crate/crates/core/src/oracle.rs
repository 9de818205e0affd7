//! Independent numerical checks for the closed forms.
//!
//! Nothing here reuses the closed-form machinery it checks: residuals come
//! from finite differences, integrals from adaptive quadrature of the raw
//! integrands, eigenvalues from a finite-difference matrix.

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::Result;
use crate::numerics::quadrature::integrate;
use crate::params::ValidatedParams;
use crate::relative::{gamma_half, Scaled, TautLevel};

/// Space and time steps of the CM residual check (atomic units).
pub const FD_SPACE_STEP: f64 = 1e-3;
pub const FD_TIME_STEP: f64 = 1e-4;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `H_CM psi` by central differences, for `psi(R, t)` given as a closure.
fn cm_hamiltonian<F>(p: &ValidatedParams, psi: &F, r: &Vector3<f64>, t: f64, h: f64) -> Result<Complex64>
where
    F: Fn(&Vector3<f64>, f64) -> Result<Complex64>,
{
    let center = psi(r, t)?;
    let mut lap = Complex64::default();
    for k in 0..3 {
        let mut plus = *r;
        let mut minus = *r;
        plus[k] += h;
        minus[k] -= h;
        lap += psi(&plus, t)? + psi(&minus, t)? - 2.0 * center;
    }
    lap /= h * h;
    let potential = p.mu * p.trap_freq * p.trap_freq * r.norm_squared()
        - 2.0 * p.q * p.field_amplitude * r.dot(&p.polarization) * (p.laser_freq * t + p.phase).sin();
    Ok(-p.hbar * p.hbar / (4.0 * p.mu) * lap + potential * center)
}

/// `|i hbar d_t psi - H_CM psi| / max(|psi|, 1e-30)` with central
/// differences in space (step `h`) and time (step `dt`).
pub fn cm_residual<F>(p: &ValidatedParams, psi: F, r: &Vector3<f64>, t: f64, h: f64, dt: f64) -> Result<f64>
where
    F: Fn(&Vector3<f64>, f64) -> Result<Complex64>,
{
    let dpsi = (psi(r, t + dt)? - psi(r, t - dt)?) / (2.0 * dt);
    let h_psi = cm_hamiltonian(p, &psi, r, t, h)?;
    let value = psi(r, t)?;
    Ok((I * p.hbar * dpsi - h_psi).norm() / value.norm().max(1e-30))
}

/// Classical CM trajectory `(z, v)` along the polarization by RK4 on
/// `2 mu z'' + 2 mu W^2 z = 2 q E0 sin(w t + d)`, from rest at the origin.
pub fn classical_rk4(p: &ValidatedParams, t: f64, steps: usize) -> (f64, f64) {
    let accel = |s: f64, z: f64| {
        -p.trap_freq * p.trap_freq * z
            + p.q * p.field_amplitude / p.mu * (p.laser_freq * s + p.phase).sin()
    };
    let h = t / steps as f64;
    let (mut z, mut v) = (0.0, 0.0);
    for k in 0..steps {
        let s = k as f64 * h;
        let k1z = v;
        let k1v = accel(s, z);
        let k2z = v + 0.5 * h * k1v;
        let k2v = accel(s + 0.5 * h, z + 0.5 * h * k1z);
        let k3z = v + 0.5 * h * k2v;
        let k3v = accel(s + 0.5 * h, z + 0.5 * h * k2z);
        let k4z = v + h * k3v;
        let k4v = accel(s + h, z + h * k3z);
        z += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    (z, v)
}

/// Action `S(R, t; R', 0)` with the three drive integrals done by nested
/// adaptive quadrature of their integrands.
pub fn action_by_quadrature(
    p: &ValidatedParams,
    r: &Vector3<f64>,
    r_prime: &Vector3<f64>,
    t: f64,
) -> Result<f64> {
    let (w, big, d) = (p.laser_freq, p.trap_freq, p.phase);
    let (abs, rel) = (1e-15, 1e-13);
    let i1 = integrate(|tau| (w * tau + d).sin() * (big * tau).sin(), 0.0, t, abs, rel)?.value;
    let i2 =
        integrate(|tau| (w * tau + d).sin() * (big * (t - tau)).sin(), 0.0, t, abs, rel)?.value;
    let i3 = integrate(
        |tau| {
            let inner = integrate(|s| (w * s + d).sin() * (big * s).sin(), 0.0, tau, abs, rel)
                .map(|q| q.value)
                .unwrap_or(f64::NAN);
            (w * tau + d).sin() * (big * (t - tau)).sin() * inner
        },
        0.0,
        t,
        abs,
        rel,
    )?
    .value;
    let (mu, qe) = (p.mu, p.q * p.field_amplitude);
    let (s, c) = (big * t).sin_cos();
    let e = p.polarization;
    let bracket = (r_prime.norm_squared() + r.norm_squared()) * c - 2.0 * r_prime.dot(r)
        + 2.0 * qe / (mu * big) * (r.dot(&e) * i1 + r_prime.dot(&e) * i2)
        - 2.0 * qe * qe / (mu * mu * big * big) * i3;
    Ok(mu * big / s * bracket)
}

/// `int |psi|^2 d^3R` by a tensor trapezoid rule on a cube of half-width
/// `half` centered at `center`, with `n` points per axis.
pub fn norm_tensor<F>(psi: F, center: &Vector3<f64>, half: f64, n: usize) -> f64
where
    F: Fn(&Vector3<f64>) -> Complex64,
{
    let h = 2.0 * half / (n - 1) as f64;
    let weight = |j: usize| if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
    let mut sum = 0.0;
    for i in 0..n {
        let x = center.x - half + i as f64 * h;
        for j in 0..n {
            let y = center.y - half + j as f64 * h;
            let wij = weight(i) * weight(j);
            for k in 0..n {
                let z = center.z - half + k as f64 * h;
                sum += wij * weight(k) * psi(&Vector3::new(x, y, z)).norm_sqr();
            }
        }
    }
    sum * h * h * h
}

/// `|(H_rel - eps) u| / |u|` for the level's radial function at `r`, with a
/// central second difference of step `h`.
pub fn radial_residual(p: &ValidatedParams, level: &TautLevel, r: f64, h: f64) -> f64 {
    let u = level.u(r);
    let upp = (level.u(r + h) - 2.0 * u + level.u(r - h)) / (h * h);
    let l = level.l as f64;
    let potential = l * (l + 1.0) * p.hbar * p.hbar / (p.mu * r * r)
        + 0.25 * p.mu * level.omega * level.omega * r * r
        + p.coulomb() / r;
    let h_u = -p.hbar * p.hbar / p.mu * upp + potential * u;
    (h_u - level.epsilon * u).abs() / u.abs()
}

/// Normalization constant of the closed-form level from Gamma-function
/// moments, in the same convention as [`TautLevel::norm`].
pub fn taut_norm_gamma(level: &TautLevel) -> f64 {
    // r = length x: u^2 ~ x^(2l+2) (1 + c x)^2 exp(-x^2)
    let c = level.a1 * level.length;
    let k = 2 * level.l + 2;
    let moment = |j: u32| gamma_half(j + 1) / 2.0;
    let raw = moment(k) + 2.0 * c * moment(k + 1) + c * c * moment(k + 2);
    1.0 / (level.length * raw).sqrt()
}

/// Lowest eigenvalue of the radial equation for `(l, W)` from a
/// finite-difference matrix with `n` interior points on `(0, r_max)`,
/// Dirichlet at both ends, found by Sturm-sequence bisection.
pub fn fd_radial_lowest(p: &ValidatedParams, l: u32, omega: f64, n: usize) -> f64 {
    let scaled = Scaled::new(p, omega);
    let r_max = scaled.r_max();
    let h = r_max / (n + 1) as f64;
    let off = -1.0 / (h * h);
    let diag: Vec<f64> =
        (1..=n).map(|i| 2.0 / (h * h) + scaled.potential(l, i as f64 * h)).collect();
    // number of eigenvalues below x
    let count = |x: f64| {
        let mut below = 0;
        let mut d = diag[0] - x;
        if d < 0.0 {
            below += 1;
        }
        for &a in &diag[1..] {
            let prev = if d == 0.0 { f64::EPSILON * h * h } else { d };
            d = a - x - off * off / prev;
            if d < 0.0 {
                below += 1;
            }
        }
        below
    };
    let mut lo = diag.iter().cloned().fold(f64::INFINITY, f64::min) - 2.0 * off.abs();
    let mut hi = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 2.0 * off.abs();
    lo = lo.max(0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-13 * hi.abs().max(1.0) {
            break;
        }
        if count(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi) * scaled.energy
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{validate, SystemParams, Tolerances};
    use crate::relative::taut_level;

    #[test]
    fn rk4_matches_undriven_rest() {
        let p = validate(SystemParams::atomic_default().with_field(0.0)).unwrap();
        assert_eq!(classical_rk4(&p, 3.0, 100), (0.0, 0.0));
    }

    #[test]
    fn residual_of_a_stationary_state() {
        let p = validate(SystemParams::atomic_default().with_field(0.0)).unwrap();
        let alpha = p.mu * p.trap_freq / p.hbar;
        let psi = |r: &Vector3<f64>, t: f64| {
            Ok(Complex64::from_polar((-alpha * r.norm_squared()).exp(), -1.5 * p.trap_freq * t))
        };
        let res = cm_residual(&p, psi, &Vector3::new(0.3, -0.1, 0.7), 1.0, 1e-3, 1e-4).unwrap();
        assert!(res < 1e-6, "{res}");
        // wrong energy is caught
        let bad = |r: &Vector3<f64>, t: f64| {
            Ok(Complex64::from_polar((-alpha * r.norm_squared()).exp(), -1.4 * p.trap_freq * t))
        };
        let res = cm_residual(&p, bad, &Vector3::new(0.3, -0.1, 0.7), 1.0, 1e-3, 1e-4).unwrap();
        assert!(res > 1e-2);
    }

    #[test]
    fn tensor_norm_of_gaussian() {
        let g = |r: &Vector3<f64>| Complex64::new((-0.5 * r.norm_squared()).exp(), 0.0);
        let n = norm_tensor(g, &Vector3::zeros(), 9.0, 61);
        assert!((n - std::f64::consts::PI.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn gamma_normalization_agrees_with_level() {
        let p = validate(SystemParams::atomic_default()).unwrap();
        for l in 0..8 {
            let lvl = taut_level(&p, l, 0, &Tolerances::default()).unwrap();
            assert!((taut_norm_gamma(&lvl) / lvl.norm - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn fd_eigenvalue_of_closed_form() {
        let p = validate(SystemParams::atomic_default()).unwrap();
        let e = fd_radial_lowest(&p, 0, 0.5, 4000);
        assert!((e - 1.25).abs() < 1e-4, "{e}");
    }
}
