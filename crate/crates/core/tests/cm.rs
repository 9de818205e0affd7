use std::f64::consts::PI;

use hookeon::cm_analytic::{
    analytic_z_grid, classical_trajectory, eval_psi_cm, ground_state_1d, path_integral_propagate,
    propagator, propagator_1d, propagator_action, CmEvaluator, CmPoint, CoherentState,
    ResonancePolicy,
};
use hookeon::cm_numeric::crank_nicolson_propagate;
use hookeon::grid::{l2_error, GridWavefunction1D};
use hookeon::numerics::quadrature::integrate;
use hookeon::oracle::{action_by_quadrature, classical_rk4, cm_residual};
use hookeon::params::si;
use hookeon::{validate, Error, SystemParams, Tolerances, UnitSystem, ValidatedParams};
use nalgebra::Vector3;
use num_complex::Complex64;

fn au() -> ValidatedParams {
    validate(SystemParams::atomic_default()).unwrap()
}

#[test]
fn trajectory_agrees_with_rk4() {
    let p = au();
    let tol = Tolerances::default();
    for t in [0.3, 1.0, 4.0, 9.5] {
        let c = classical_trajectory(&p, t, ResonancePolicy::Forbid, &tol).unwrap();
        let (z, v) = classical_rk4(&p, t, 20_000);
        assert!((c.z - z).abs() < 1e-10, "t={t}: {} vs {z}", c.z);
        assert!((c.v - v).abs() < 1e-10, "t={t}: {} vs {v}", c.v);
    }
    let still = validate(SystemParams::atomic_default().with_field(0.0)).unwrap();
    let c = classical_trajectory(&still, 2.0, ResonancePolicy::Forbid, &tol).unwrap();
    assert_eq!((c.z, c.v), (0.0, 0.0));
}

#[test]
fn resonant_trajectory_agrees_with_rk4() {
    let p = validate(SystemParams::atomic_default().with_laser_freq(0.5)).unwrap();
    let tol = Tolerances::default();
    assert!(matches!(
        classical_trajectory(&p, 1.0, ResonancePolicy::Forbid, &tol),
        Err(Error::ResonanceSingularity { .. })
    ));
    let c = classical_trajectory(&p, 7.0, ResonancePolicy::Limit, &tol).unwrap();
    let (z, v) = classical_rk4(&p, 7.0, 20_000);
    assert!((c.z - z).abs() < 1e-10 && (c.v - v).abs() < 1e-10);
}

#[test]
fn trajectory_is_continuous_through_resonance() {
    let tol = Tolerances::default();
    let at = |w: f64| {
        let p = validate(SystemParams::atomic_default().with_laser_freq(w)).unwrap();
        classical_trajectory(&p, 3.0, ResonancePolicy::Limit, &tol).unwrap()
    };
    let limit = at(0.5);
    for d in [1e-4, 1e-5, 1e-6] {
        let (a, b) = (at(0.5 + d), at(0.5 - d));
        let z = 0.5 * (a.z + b.z);
        let v = 0.5 * (a.v + b.v);
        assert!((z - limit.z).abs() < 1e-6, "d={d}: {z} vs {}", limit.z);
        assert!((v - limit.v).abs() < 1e-6, "d={d}: {v} vs {}", limit.v);
    }
}

#[test]
fn coherent_state_solves_the_cm_equation() {
    let p = au();
    let tol = Tolerances::default();
    let psi = |r: &Vector3<f64>, t: f64| CoherentState::at(&p, t, &tol).map(|s| s.eval(r));
    for (r, t) in [
        (Vector3::new(0.2, -0.4, 0.5), 0.8),
        (Vector3::new(-0.3, 0.1, -0.9), 2.5),
        (Vector3::new(0.0, 0.6, 0.2), 2.0 * PI / p.trap_freq),
    ] {
        let res = cm_residual(&p, psi, &r, t, 1e-3, 1e-4).unwrap();
        assert!(res < 1e-5, "t={t}: {res}");
    }
}

#[test]
fn density_is_a_rigid_gaussian() {
    let p = au();
    let tol = Tolerances::default();
    let width = |s: &CoherentState| {
        let n = integrate(|z| s.z_factor(z).norm_sqr(), -15.0, 15.0, 1e-14, 1e-13).unwrap().value;
        let m1 = integrate(|z| z * s.z_factor(z).norm_sqr(), -15.0, 15.0, 1e-14, 1e-13).unwrap().value;
        let m2 =
            integrate(|z| z * z * s.z_factor(z).norm_sqr(), -15.0, 15.0, 1e-14, 1e-13).unwrap().value;
        (n, m1, m2 - m1 * m1)
    };
    let (_, _, var0) = width(&CoherentState::at(&p, 0.0, &tol).unwrap());
    for t in [0.7, 3.1, 8.0] {
        let s = CoherentState::at(&p, t, &tol).unwrap();
        let (n, mean, var) = width(&s);
        assert!((n - 1.0).abs() < 1e-10);
        assert!((mean - s.classical.z).abs() < 1e-9, "t={t}");
        assert!((var - var0).abs() < 1e-9, "t={t}");
    }
}

#[test]
fn transverse_factors_are_stationary() {
    let p = au();
    let tol = Tolerances::default();
    let s = CoherentState::at(&p, 1.7, &tol).unwrap();
    let z = 0.35;
    let on_axis = s.eval(&Vector3::new(0.0, 0.0, z));
    for (x, y) in [(0.3, 0.0), (-0.5, 0.8), (1.1, -0.2)] {
        let got = s.eval(&Vector3::new(x, y, z));
        let ratio = (ground_state_1d(&p, x) * ground_state_1d(&p, y)) / ground_state_1d(&p, 0.0).powi(2);
        assert!((got - on_axis * ratio).norm() < 1e-14, "({x}, {y})");
    }
}

#[test]
fn literal_and_coherent_forms_agree_in_density() {
    let p = au();
    let tol = Tolerances::default();
    for t in [0.9, 2.2, 5.0] {
        for r in [Vector3::new(0.1, 0.2, -0.3), Vector3::new(-0.6, 0.0, 0.7)] {
            let point = CmPoint { r, t };
            let a = eval_psi_cm(&p, &point, &tol).unwrap();
            let b = CmEvaluator::Coherent.eval(&p, &point, &tol).unwrap();
            assert!((a.norm() - b.norm()).abs() < 1e-10 * b.norm().max(1e-300), "t={t}");
        }
    }
}

#[test]
fn action_is_symmetric_when_undriven() {
    let p = validate(SystemParams::atomic_default().with_field(0.0)).unwrap();
    let tol = Tolerances::default();
    let r = Vector3::new(0.3, -0.2, 0.8);
    let rp = Vector3::new(-0.5, 0.4, 0.1);
    for t in [0.5, 2.0, 7.5] {
        let a = propagator_action(&p, &r, &rp, t, &tol).unwrap();
        let b = propagator_action(&p, &rp, &r, t, &tol).unwrap();
        assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
    }
}

#[test]
fn action_matches_quadrature() {
    let p = au().with_trap_freq(0.7).unwrap();
    let tol = Tolerances::default();
    let r = Vector3::new(0.4, 0.1, -0.6);
    let rp = Vector3::new(-0.2, 0.3, 0.5);
    for t in [0.6, 2.9, 6.0] {
        let closed = propagator_action(&p, &r, &rp, t, &tol).unwrap();
        let quad = action_by_quadrature(&p, &r, &rp, t).unwrap();
        assert!((closed - quad).abs() < 1e-9 * closed.abs().max(1.0), "t={t}");
    }
}

#[test]
fn propagator_solves_the_cm_equation() {
    let p = au();
    let tol = Tolerances::default();
    let rp = Vector3::new(0.1, -0.2, 0.3);
    let kernel = |r: &Vector3<f64>, t: f64| propagator(&p, r, &rp, t, &tol);
    for (r, t) in [(Vector3::new(0.2, 0.1, 0.4), 1.3), (Vector3::new(-0.4, 0.3, 0.0), 4.2)] {
        let res = cm_residual(&p, kernel, &r, t, 1e-3, 1e-4).unwrap();
        assert!(res < 1e-5, "t={t}: {res}");
    }
}

#[test]
fn short_time_kernel_is_free() {
    let p = au();
    let tol = Tolerances::default();
    let t = 1e-3;
    let mass = 2.0 * p.mu;
    let rp = Vector3::new(0.2, 0.0, -0.1);
    for dr in [Vector3::new(0.0, 0.0, 0.0), Vector3::new(0.05, -0.03, 0.02), Vector3::new(0.0, 0.1, 0.0)] {
        let r = rp + dr;
        let k = propagator(&p, &r, &rp, t, &tol).unwrap();
        let free = Complex64::new(mass / (2.0 * PI * p.hbar * t), 0.0)
            .powf(1.5)
            * Complex64::new(0.0, -1.0).powf(1.5)
            * Complex64::from_polar(1.0, mass * dr.norm_squared() / (2.0 * p.hbar * t));
        assert!((k - free).norm() < 1e-2 * free.norm(), "{dr:?}");
    }
}

#[test]
fn one_dimensional_convolution_reproduces_closed_form() {
    let p = au();
    let tol = Tolerances::default();
    let t = 1.4;
    for z in [-0.8, -0.2, 0.0, 0.45, 1.0] {
        let re = integrate(
            |zp| (propagator_1d(&p, 1.0, z, zp, t, &tol).unwrap() * ground_state_1d(&p, zp)).re,
            -12.0,
            12.0,
            1e-13,
            1e-11,
        )
        .unwrap()
        .value;
        let im = integrate(
            |zp| (propagator_1d(&p, 1.0, z, zp, t, &tol).unwrap() * ground_state_1d(&p, zp)).im,
            -12.0,
            12.0,
            1e-13,
            1e-11,
        )
        .unwrap()
        .value;
        let expect = CoherentState::at(&p, t, &tol).unwrap().z_factor(z);
        assert!((Complex64::new(re, im) - expect).norm() < 1e-6, "z={z}");
    }
}

fn ground_grid(p: &ValidatedParams, n: usize) -> GridWavefunction1D {
    GridWavefunction1D::from_fn(-10.0, 10.0, n, 0.0, |z| ground_state_1d(p, z).into()).unwrap()
}

#[test]
fn path_integral_matches_closed_form() {
    let p = au();
    let tol = Tolerances::default();
    let t = 1.9;
    let out = path_integral_propagate(&p, &ground_grid(&p, 2048), t, &tol).unwrap();
    let exact = analytic_z_grid(&p, CmEvaluator::Coherent, -10.0, 10.0, 2048, t, &tol).unwrap();
    let err = l2_error(&out, &exact, false).unwrap();
    assert!(err < 1e-6, "{err}");
}

#[test]
fn path_integral_is_linear() {
    let p = au();
    let tol = Tolerances::default();
    let t = 1.1;
    let a = ground_grid(&p, 1024);
    let b = GridWavefunction1D::from_fn(-10.0, 10.0, 1024, 0.0, |z| {
        Complex64::new(z * ground_state_1d(&p, z - 0.5), 0.3 * ground_state_1d(&p, z))
    })
    .unwrap();
    let (ca, cb) = (Complex64::new(0.7, -0.2), Complex64::new(-1.3, 0.4));
    let mixed = a.combine(ca, &b, cb).unwrap();
    let lhs = path_integral_propagate(&p, &mixed, t, &tol).unwrap();
    let pa = path_integral_propagate(&p, &a, t, &tol).unwrap();
    let pb = path_integral_propagate(&p, &b, t, &tol).unwrap();
    let rhs = pa.combine(ca, &pb, cb).unwrap();
    assert!(l2_error(&lhs, &rhs, false).unwrap() < 1e-10);
}

#[test]
fn path_integral_over_a_full_period() {
    let tol = Tolerances::default();
    let still = validate(SystemParams::atomic_default().with_field(0.0)).unwrap();
    let period = 2.0 * PI / still.trap_freq;
    let start = ground_grid(&still, 2048);
    assert!(matches!(
        path_integral_propagate(&still, &start, period, &tol),
        Err(Error::SingularTime { .. })
    ));
    let mid = path_integral_propagate(&still, &start, period / 3.0, &tol).unwrap();
    let end = path_integral_propagate(&still, &mid, 2.0 * period / 3.0, &tol).unwrap();
    for (a, b) in end.samples().iter().zip(start.samples()) {
        assert!((a.norm() - b.norm()).abs() < 1e-8);
    }

    // driven: the second leg starts at T/3 and must continue the laser phase
    let p = au();
    let start = ground_grid(&p, 2048);
    let mid = path_integral_propagate(&p, &start, period / 3.0, &tol).unwrap();
    let end = path_integral_propagate(&p, &mid, 2.0 * period / 3.0, &tol).unwrap();
    let exact = analytic_z_grid(&p, CmEvaluator::Coherent, -10.0, 10.0, 2048, end.t(), &tol).unwrap();
    assert!(l2_error(&end, &exact, false).unwrap() < 1e-6);
}

#[test]
fn path_integral_keeps_the_phase_past_half_period() {
    let p = au();
    let tol = Tolerances::default();
    let half = PI / p.trap_freq;
    let start = ground_grid(&p, 2048);
    for t in [1.3 * half, 1.8 * half, 2.5 * half] {
        let out = path_integral_propagate(&p, &start, t, &tol).unwrap();
        let exact = analytic_z_grid(&p, CmEvaluator::Coherent, -10.0, 10.0, 2048, t, &tol).unwrap();
        let err = l2_error(&out, &exact, false).unwrap();
        assert!(err < 1e-6, "t={t}: {err}");
    }
}

#[test]
fn coarse_path_integral_grid_is_reported() {
    let p = au();
    let tol = Tolerances::default();
    let coarse = ground_grid(&p, 48);
    assert!(matches!(
        path_integral_propagate(&p, &coarse, 1.0, &tol),
        Err(Error::GridTooCoarse { .. })
    ));
}

#[test]
fn crank_nicolson_undriven_period() {
    let p = validate(SystemParams::atomic_default().with_field(0.0)).unwrap();
    let tol = Tolerances::default();
    let period = 2.0 * PI / p.trap_freq;
    let steps = 4096;
    let g = GridWavefunction1D::from_fn(-10.0, 10.0, 2049, 0.0, |z| ground_state_1d(&p, z).into())
        .unwrap();
    let (out, report) = crank_nicolson_propagate(&p, &g, period / steps as f64, steps, &tol).unwrap();
    assert!(report.norm_drift < 1e-12);
    let worst = out
        .samples()
        .iter()
        .zip(g.samples())
        .map(|(a, b)| (a.norm() - b.norm()).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-7, "{worst}");
}

#[test]
fn crank_nicolson_tracks_closed_form_through_resonance() {
    let p = validate(SystemParams::atomic_default().with_laser_freq(0.5)).unwrap();
    let tol = Tolerances::default();
    let g = GridWavefunction1D::from_fn(-12.0, 12.0, 2048, 0.0, |z| ground_state_1d(&p, z).into())
        .unwrap();
    let (out, _) = crank_nicolson_propagate(&p, &g, 1e-3, 3000, &tol).unwrap();
    let exact = analytic_z_grid(&p, CmEvaluator::Coherent, -12.0, 12.0, 2048, out.t(), &tol).unwrap();
    assert!(l2_error(&out, &exact, false).unwrap() < 1e-4);
}

#[test]
fn si_and_atomic_units_describe_the_same_state() {
    let tol = Tolerances::default();
    let au = validate(UnitSystem::Atomic.base_params()).unwrap();
    let si_params = validate(UnitSystem::Si.base_params()).unwrap();
    let a0 = si::bohr_radius();
    let t_au = si::atomic_time();
    for (r, t) in [(Vector3::new(0.2, -0.1, 0.4), 1.3), (Vector3::new(-0.5, 0.3, -0.2), 6.0)] {
        let expect = CoherentState::at(&au, t, &tol).unwrap().eval(&r);
        let got = CoherentState::at(&si_params, t * t_au, &tol).unwrap().eval(&(r * a0)) * a0.powf(1.5);
        assert!((got - expect).norm() < 1e-10 * expect.norm(), "{got} vs {expect}");
        let zc_au = classical_trajectory(&au, t, ResonancePolicy::Forbid, &tol).unwrap().z;
        let zc_si = classical_trajectory(&si_params, t * t_au, ResonancePolicy::Forbid, &tol).unwrap().z;
        assert!((zc_si / a0 - zc_au).abs() < 1e-10 * zc_au.abs());
    }
}

#[test]
fn grid_centroid_tracks_classical_path() {
    let p = au();
    let tol = Tolerances::default();
    // the centroid error is spatial, O(dz^2): 4.9e-5 at n = 1024
    let mut psi = GridWavefunction1D::from_fn(-12.0, 12.0, 4096, 0.0, |z| ground_state_1d(&p, z).into())
        .unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let (next, _) = crank_nicolson_propagate(&p, &psi, 1e-3, 1000, &tol).unwrap();
        psi = next;
        let zc = classical_trajectory(&p, psi.t(), ResonancePolicy::Forbid, &tol).unwrap().z;
        worst = worst.max((psi.centroid() - zc).abs());
    }
    assert!(worst < 1e-5, "{worst}");
}
