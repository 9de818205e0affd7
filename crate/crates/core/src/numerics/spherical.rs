use std::f64::consts::PI;

use num_complex::Complex64;

/// Associated Legendre function `P_l^m(x)` for `0 <= m <= l`, including the
/// Condon–Shortley phase `(-1)^m`.
pub fn assoc_legendre(l: u32, m: u32, x: f64) -> f64 {
    assert!(m <= l, "assoc_legendre needs m <= l");
    let somx2 = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut pmm = 1.0;
    let mut fact = 1.0;
    for _ in 0..m {
        pmm *= -fact * somx2;
        fact += 2.0;
    }
    if l == m {
        return pmm;
    }
    let mut pmmp1 = x * (2 * m + 1) as f64 * pmm;
    for ll in (m + 2)..=l {
        let pll = (x * (2 * ll - 1) as f64 * pmmp1 - (ll + m - 1) as f64 * pmm) / (ll - m) as f64;
        pmm = pmmp1;
        pmmp1 = pll;
    }
    pmmp1
}

/// Orthonormal complex spherical harmonic `Y_lm(theta, phi)` with the
/// Condon–Shortley phase. Negative `m` uses `Y_{l,-m} = (-1)^m conj(Y_lm)`.
pub fn ylm(l: u32, m: i32, theta: f64, phi: f64) -> Complex64 {
    let am = m.unsigned_abs();
    assert!(am <= l, "|m| must not exceed l");
    // (l - m)! / (l + m)! as a running product
    let ratio: f64 = ((l - am + 1)..=(l + am)).map(|k| 1.0 / k as f64).product();
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * ratio).sqrt();
    let y = Complex64::from_polar(norm * assoc_legendre(l, am, theta.cos()), am as f64 * phi);
    if m >= 0 {
        y
    } else if am.is_multiple_of(2) {
        y.conj()
    } else {
        -y.conj()
    }
}
