//! Divided differences of `exp`, used to integrate products of sines in
//! closed form without removable-singularity trouble at resonance.
//!
//! `exp[0, c]` is `(e^c - 1) / c` and `exp[0, c1, c2]` equals the integral of
//! `e^(c1 x + c2 y)` over the unit simplex `x, y >= 0, x + y <= 1`. Both come
//! from the exponential of an upper bidiagonal matrix (Opitz), which stays
//! accurate when nodes coincide.

use num_complex::Complex64;

type Mat3 = [[Complex64; 3]; 3];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn matmul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn expm(a: &Mat3) -> Mat3 {
    let norm = a
        .iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scale = 0.5f64.powi(squarings);
    let scaled: Mat3 = a.map(|row| row.map(|z| z * scale));

    let mut result = [[ZERO; 3]; 3];
    let mut term = [[ZERO; 3]; 3];
    for i in 0..3 {
        result[i][i] = ONE;
        term[i][i] = ONE;
    }
    for k in 1..=30 {
        term = matmul(&term, &scaled).map(|row| row.map(|z| z / k as f64));
        let size: f64 = term.iter().flatten().map(|z| z.norm()).sum();
        for i in 0..3 {
            for j in 0..3 {
                result[i][j] += term[i][j];
            }
        }
        if size < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

/// `exp[0, c] = (e^c - 1) / c`, with the limit 1 at `c = 0`.
pub fn exp_dd1(c: Complex64) -> Complex64 {
    if c.norm() > 0.5 {
        return (c.exp() - ONE) / c;
    }
    let mut term = ONE;
    let mut sum = ONE;
    for k in 2..=24 {
        term = term * c / k as f64;
        sum += term;
    }
    sum
}

/// `exp[0, c1, c2]`, symmetric in its arguments.
pub fn exp_dd2(c1: Complex64, c2: Complex64) -> Complex64 {
    let m = [[ZERO, ONE, ZERO], [ZERO, c1, ONE], [ZERO, ZERO, c2]];
    expm(&m)[0][2]
}

/// `int_0^t exp(i k tau) d tau`.
pub fn int_exp(k: f64, t: f64) -> Complex64 {
    exp_dd1(Complex64::new(0.0, k * t)) * t
}

/// `int_0^t int_0^tau exp(i a tau + i b s) ds d tau`.
pub fn int_exp_nested(a: f64, b: f64, t: f64) -> Complex64 {
    exp_dd2(Complex64::new(0.0, (a + b) * t), Complex64::new(0.0, a * t)) * (t * t)
}
