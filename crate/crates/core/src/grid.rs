//! Complex wavefunction samples on a uniform 1D grid.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 8;

/// Samples of the CM z-wavefunction at time `t` on `n` uniform points
/// spanning `[z_min, z_max]` (both endpoints included).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridWavefunction1D {
    z_min: f64,
    z_max: f64,
    samples: Vec<Complex64>,
    t: f64,
    initial_norm: f64,
}

impl GridWavefunction1D {
    pub fn new(z_min: f64, z_max: f64, samples: Vec<Complex64>, t: f64) -> Result<Self> {
        if samples.len() < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_POINTS} points, got {}",
                samples.len()
            )));
        }
        if !(z_min.is_finite() && z_max.is_finite() && z_max > z_min) {
            return Err(Error::InvalidGrid(format!("bad extent [{z_min}, {z_max}]")));
        }
        if !t.is_finite() {
            return Err(Error::InvalidGrid("time must be finite".into()));
        }
        let mut g = GridWavefunction1D { z_min, z_max, samples, t, initial_norm: 0.0 };
        g.initial_norm = g.norm();
        Ok(g)
    }

    /// Samples `f(z)` on the grid.
    pub fn from_fn<F>(z_min: f64, z_max: f64, n: usize, t: f64, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> Complex64,
    {
        if n < MIN_POINTS {
            return Err(Error::InvalidGrid(format!("need at least {MIN_POINTS} points, got {n}")));
        }
        let dz = (z_max - z_min) / (n - 1) as f64;
        let samples = (0..n).map(|j| f(z_min + j as f64 * dz)).collect();
        Self::new(z_min, z_max, samples, t)
    }

    /// Same as [`from_fn`](Self::from_fn) for a fallible sampler.
    pub fn try_from_fn<F>(z_min: f64, z_max: f64, n: usize, t: f64, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<Complex64>,
    {
        if n < MIN_POINTS {
            return Err(Error::InvalidGrid(format!("need at least {MIN_POINTS} points, got {n}")));
        }
        let dz = (z_max - z_min) / (n - 1) as f64;
        let samples = (0..n)
            .map(|j| f(z_min + j as f64 * dz))
            .collect::<Result<Vec<_>>>()?;
        Self::new(z_min, z_max, samples, t)
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dz(&self) -> f64 {
        (self.z_max - self.z_min) / (self.samples.len() - 1) as f64
    }

    pub fn z(&self, j: usize) -> f64 {
        self.z_min + j as f64 * self.dz()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|j| self.z(j))
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn set_t(&mut self, t: f64) {
        self.t = t;
    }

    /// Norm recorded when the grid was built.
    pub fn initial_norm(&self) -> f64 {
        self.initial_norm
    }

    /// Discrete norm `sum |psi_j|^2 dz`.
    pub fn norm(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * self.dz()
    }

    /// `<z> = sum z_j |psi_j|^2 / sum |psi_j|^2`.
    pub fn centroid(&self) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for (j, s) in self.samples.iter().enumerate() {
            let w = s.norm_sqr();
            num += self.z(j) * w;
            den += w;
        }
        num / den
    }

    pub fn max_amplitude(&self) -> f64 {
        self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    /// Discrete inner product `sum conj(a_j) b_j dz`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.dz()
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.len() == other.len() && self.z_min == other.z_min && self.z_max == other.z_max
    }

    /// Elementwise linear combination `a * self + b * other` on the same grid.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch("grids differ".into()));
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Self::new(self.z_min, self.z_max, samples, self.t)
    }
}

/// `sqrt(sum |a_j - b_j|^2 dz)`. With `align_phase`, `a` is first rotated by
/// the global phase that minimizes the distance.
pub fn l2_error(a: &GridWavefunction1D, b: &GridWavefunction1D, align_phase: bool) -> Result<f64> {
    if !a.same_grid(b) {
        return Err(Error::GridMismatch(format!(
            "[{}, {}] x {} vs [{}, {}] x {}",
            a.z_min,
            a.z_max,
            a.len(),
            b.z_min,
            b.z_max,
            b.len()
        )));
    }
    if (a.t - b.t).abs() > 1e-12 * a.t.abs().max(1.0) {
        return Err(Error::GridMismatch(format!("times {} and {}", a.t, b.t)));
    }
    let rot = if align_phase {
        let overlap = a.inner(b);
        if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        }
    } else {
        Complex64::new(1.0, 0.0)
    };
    let sum: f64 = a
        .samples
        .iter()
        .zip(&b.samples)
        .map(|(x, y)| (x * rot - y).norm_sqr())
        .sum();
    Ok((sum * a.dz()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn packet() -> GridWavefunction1D {
        GridWavefunction1D::from_fn(-8.0, 8.0, 257, 0.0, |z| {
            Complex64::from_polar((-0.5 * (z - 0.3) * (z - 0.3)).exp(), 0.7 * z)
        })
        .unwrap()
    }

    #[test]
    fn construction_checks() {
        assert!(GridWavefunction1D::new(0.0, 1.0, vec![Complex64::default(); 7], 0.0).is_err());
        assert!(GridWavefunction1D::new(1.0, 1.0, vec![Complex64::default(); 8], 0.0).is_err());
        let g = packet();
        assert_eq!(g.len(), 257);
        assert!((g.dz() - 16.0 / 256.0).abs() < 1e-15);
        assert_eq!(g.z(256), 8.0);
        assert!((g.initial_norm() - PI.sqrt()).abs() < 1e-12);
        assert!((g.centroid() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn identity_has_zero_error() {
        let x = packet();
        assert_eq!(l2_error(&x, &x, false).unwrap(), 0.0);
    }

    #[test]
    fn global_phase_is_removed_by_alignment() {
        let x = packet();
        let theta = PI / 3.0;
        let y = x.combine(Complex64::from_polar(1.0, theta), &x, Complex64::default()).unwrap();
        assert!(l2_error(&x, &y, true).unwrap() < 1e-14);
        // without alignment: |1 - e^{i theta}| ||x|| = 2 |sin(theta / 2)| ||x||
        let expect = 2.0 * (theta / 2.0).sin().abs() * x.norm().sqrt();
        assert!((l2_error(&x, &y, false).unwrap() - expect).abs() < 1e-13);
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let x = packet();
        let y = GridWavefunction1D::from_fn(-8.0, 8.0, 256, 0.0, |_| Complex64::default()).unwrap();
        assert!(matches!(l2_error(&x, &y, false), Err(Error::GridMismatch(_))));
        let mut z = x.clone();
        z.set_t(1.0);
        assert!(matches!(l2_error(&x, &z, false), Err(Error::GridMismatch(_))));
    }
}
