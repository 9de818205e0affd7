use num_complex::Complex64;

use crate::error::{Error, Result};

/// Solves a complex tridiagonal system by the Thomas algorithm.
///
/// `lower[i]` couples row `i + 1` to row `i`, `upper[i]` couples row `i` to
/// row `i + 1`. `diag` and `rhs` are overwritten; the solution is left in
/// `rhs`. No pivoting, so the matrix should be diagonally dominant (the
/// Crank–Nicolson matrices here always are).
pub fn solve_in_place(
    lower: &[Complex64],
    diag: &mut [Complex64],
    upper: &[Complex64],
    rhs: &mut [Complex64],
) -> Result<()> {
    let n = diag.len();
    assert!(rhs.len() == n && lower.len() + 1 == n && upper.len() + 1 == n);
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        if diag[i - 1] == Complex64::new(0.0, 0.0) {
            return Err(Error::SingularPivot(i - 1));
        }
        let m = lower[i - 1] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        let prev = rhs[i - 1];
        rhs[i] -= m * prev;
    }
    if diag[n - 1] == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularPivot(n - 1));
    }
    rhs[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] = (rhs[i] - upper[i] * next) / diag[i];
    }
    Ok(())
}

/// Allocating wrapper around [`solve_in_place`].
pub fn solve(
    lower: &[Complex64],
    diag: &[Complex64],
    upper: &[Complex64],
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    let mut d = diag.to_vec();
    let mut x = rhs.to_vec();
    solve_in_place(lower, &mut d, upper, &mut x)?;
    Ok(x)
}
