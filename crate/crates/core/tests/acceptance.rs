//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runtime limits are part of each criterion.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hookeon::assembly::{classify_symmetry, eval_total, SpinSymmetry, TotalState};
use hookeon::cm_analytic::{
    analytic_z_grid, eval_psi_cm, eval_psi_cm_coherent, ground_state_1d, propagator_action,
    CmEvaluator, CmPoint, CoherentState,
};
use hookeon::cm_numeric::crank_nicolson_propagate;
use hookeon::grid::{l2_error, GridWavefunction1D};
use hookeon::oracle;
use hookeon::relative::{
    lowest_level_bounds, radial_recurrence, shoot_radial, taut_frequency, taut_level,
    DEFAULT_ORDER,
};
use hookeon::{validate, Result, SystemParams, Tolerances, ValidatedParams};

struct Outcome {
    pass: bool,
    detail: String,
}

fn example() -> ValidatedParams {
    validate(SystemParams::atomic_default()).unwrap()
}

fn grid_ground(p: &ValidatedParams, n: usize) -> GridWavefunction1D {
    GridWavefunction1D::from_fn(-12.0, 12.0, n, 0.0, |z| ground_state_1d(p, z).into()).unwrap()
}

fn residual_verification() -> Result<Outcome> {
    let p = example();
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    while count < 200 {
        let t = rng.gen_range(0.05..30.0);
        if (p.trap_freq * t).sin().abs() <= 0.05 {
            continue;
        }
        let r = Vector3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let psi = |r: &Vector3<f64>, t: f64| eval_psi_cm(&p, &CmPoint { r: *r, t }, &tol);
        let res = oracle::cm_residual(&p, psi, &r, t, oracle::FD_SPACE_STEP, oracle::FD_TIME_STEP)?;
        worst = worst.max(res);
        count += 1;
    }
    Ok(Outcome { pass: worst < 1e-5, detail: format!("max residual {worst:.2e} (limit 1e-5)") })
}

fn evaluator_equivalence() -> Result<Outcome> {
    let p = example();
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    while count < 1000 {
        let t = rng.gen_range(0.0..40.0);
        if (p.trap_freq * t).sin().abs() <= tol.sin {
            continue;
        }
        let r = Vector3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let point = CmPoint { r, t };
        let a = eval_psi_cm(&p, &point, &tol)?;
        let b = eval_psi_cm_coherent(&p, &point, &tol)?;
        worst = worst.max((a - b).norm() / b.norm());
        count += 1;
    }
    Ok(Outcome { pass: worst < 1e-9, detail: format!("max relative difference {worst:.2e} (limit 1e-9)") })
}

fn analytic_vs_grid() -> Result<Outcome> {
    let p = example();
    let tol = Tolerances::default();
    let n = 1024;
    let g = grid_ground(&p, n);
    let mut runs = Vec::new();
    for (dt, steps) in [(4e-3, 1250), (2e-3, 2500), (1e-3, 5000)] {
        runs.push(crank_nicolson_propagate(&p, &g, dt, steps, &tol)?.0);
    }
    let fine = &runs[2];
    let exact = analytic_z_grid(&p, CmEvaluator::Literal, -12.0, 12.0, n, fine.t(), &tol)?;
    let err = l2_error(fine, &exact, false)?;
    // successive differences of the dt ladder
    let ratio = l2_error(&runs[0], &runs[1], false)? / l2_error(&runs[1], &runs[2], false)?;
    Ok(Outcome {
        pass: err < 1e-4 && (3.5..=4.5).contains(&ratio),
        detail: format!("L2 error {err:.2e} (limit 1e-4), dt-halving ratio {ratio:.3} (range [3.5, 4.5])"),
    })
}

fn action_closed_forms() -> Result<Outcome> {
    let p = example();
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let v = |rng: &mut ChaCha8Rng| {
        Vector3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
    };
    while count < 50 {
        let t = rng.gen_range(0.1..25.0);
        if (p.trap_freq * t).sin().abs() <= 0.05 {
            continue;
        }
        let (r, rp) = (v(&mut rng), v(&mut rng));
        let closed = propagator_action(&p, &r, &rp, t, &tol)?;
        let quad = oracle::action_by_quadrature(&p, &r, &rp, t)?;
        worst = worst.max((closed - quad).abs() / quad.abs());
        count += 1;
    }
    Ok(Outcome { pass: worst < 1e-10, detail: format!("max relative difference {worst:.2e} (limit 1e-10)") })
}

fn taut_family() -> Result<Outcome> {
    let p = example();
    let tol = Tolerances::default();
    let mut worst: f64 = 0.0;
    for l in 0..=10 {
        let omega = taut_frequency(&p, l);
        let closed = 0.5 * p.hbar * (3.0 * omega + p.coulomb().powi(2) * p.mu / p.hbar.powi(3));
        let eps = shoot_radial(&p, l, omega, lowest_level_bounds(&p, l, omega), &tol)?;
        worst = worst.max((eps - closed).abs());
    }
    let explicit = [(0, 1.25), (1, 0.875), (2, 0.75)]
        .iter()
        .all(|&(l, e)| (taut_level(&p, l, 0, &tol).map(|x| x.epsilon).unwrap_or(f64::NAN) - e).abs() < 1e-12);
    Ok(Outcome {
        pass: worst < 1e-6 && explicit,
        detail: format!("max |eps_shoot - eps_closed| {worst:.2e} (limit 1e-6), explicit values {}", ok(explicit)),
    })
}

fn series_machinery() -> Result<Outcome> {
    let p = example();
    let tol = Tolerances::default();
    let mut family_ok = true;
    for l in 0..=10 {
        let lvl = taut_level(&p, l, 0, &tol)?;
        let s = radial_recurrence(&p, l, lvl.omega, lvl.epsilon, DEFAULT_ORDER, &tol);
        let a1 = p.mu * p.coulomb() / (p.hbar * p.hbar * (2.0 * l as f64 + 2.0));
        family_ok &= s.termination == Some(1) && (s.coeff(1) / s.coeff(0) - a1).abs() < 1e-14 * a1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut terminated = 0;
    for _ in 0..20 {
        let l = rng.gen_range(0..6);
        let s = radial_recurrence(&p, l, rng.gen_range(0.05..2.0), rng.gen_range(0.1..5.0), DEFAULT_ORDER, &tol);
        terminated += s.is_terminated() as usize;
    }
    Ok(Outcome {
        pass: family_ok && terminated == 0,
        detail: format!("family terminates at order 1: {}, random points terminated: {terminated}/20", ok(family_ok)),
    })
}

fn pauli_suite() -> Result<Outcome> {
    let tol = Tolerances::default();
    let base = validate(SystemParams::atomic_default().with_field(0.2))?;
    let mut classes_ok = true;
    let mut exchange_ok = true;
    let r1 = Vector3::new(0.5, -0.2, 0.9);
    let r2 = Vector3::new(-0.3, 0.6, -0.4);
    for l in 0..6u32 {
        let level = taut_level(&base, l, -(l as i32).min(1), &tol)?;
        let expect = if l % 2 == 0 { SpinSymmetry::Singlet } else { SpinSymmetry::Triplet };
        classes_ok &= classify_symmetry(&level) == expect;
        let p = base.with_trap_freq(level.omega)?;
        let state = TotalState::new(p, level, CmEvaluator::Coherent, tol)?;
        let period = 2.0 * PI / p.laser_freq;
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        for t in [0.0, 0.25 * period, 0.5 * period, 1.3 * period, 4.0] {
            let a = eval_total(&state, &r1, &r2, t)?;
            let b = eval_total(&state, &r2, &r1, t)?;
            exchange_ok &= (b - sign * a).norm() <= 1e-13 * a.norm();
        }
        exchange_ok &= state.exchange_sign() == -1;
    }
    Ok(Outcome {
        pass: classes_ok && exchange_ok,
        detail: format!("classification {}, exchange sign (-1)^l at 5 times {}", ok(classes_ok), ok(exchange_ok)),
    })
}

fn conservation() -> Result<Outcome> {
    let p = example();
    let tol = Tolerances::default();
    let alpha = p.mu * p.trap_freq / p.hbar;
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let t = 0.7 + 2.3 * k as f64;
        let state = CoherentState::at(&p, t, &tol)?;
        let center = Vector3::new(0.0, 0.0, state.classical.z);
        let n = oracle::norm_tensor(|r| state.eval(r), &center, 7.0 / alpha.sqrt(), 64);
        worst = worst.max((n - 1.0).abs());
    }
    let still = validate(SystemParams::atomic_default().with_field(0.0))?;
    let (_, report) = crank_nicolson_propagate(&still, &grid_ground(&still, 1024), 1e-3, 10_000, &tol)?;
    Ok(Outcome {
        pass: worst < 1e-8 && report.norm_drift < 1e-10,
        detail: format!(
            "CM norm error {worst:.2e} (limit 1e-8), grid drift {:.2e} per 1e4 steps (limit 1e-10)",
            report.norm_drift
        ),
    })
}

fn resonance_continuity() -> Result<Outcome> {
    let tol = Tolerances::default();
    let res = validate(SystemParams::atomic_default().with_laser_freq(0.5))?;
    let t = 1.0;
    let near = |w: f64| validate(SystemParams::atomic_default().with_laser_freq(w));
    let (below, above) = (near(0.5 - 1e-4)?, near(0.5 + 1e-4)?);
    // at the origin: each side separately
    let origin = CmPoint::new(0.0, 0.0, 0.0, t);
    let at = eval_psi_cm_coherent(&res, &origin, &tol)?;
    let mut one_sided: f64 = 0.0;
    for p in [&below, &above] {
        one_sided = one_sided.max((eval_psi_cm(p, &origin, &tol)? - at).norm() / at.norm());
    }
    // off axis the O(dw) dependence of the momentum phase is physical;
    // the symmetric average removes it
    let mut two_sided: f64 = 0.0;
    for z in [0.3, -0.6, 1.1] {
        let point = CmPoint::new(0.2, -0.1, z, t);
        let at = eval_psi_cm_coherent(&res, &point, &tol)?;
        let avg = (eval_psi_cm(&below, &point, &tol)? + eval_psi_cm(&above, &point, &tol)?) * 0.5;
        two_sided = two_sided.max((avg - at).norm() / at.norm());
    }
    let n = 4096;
    let (grid, _) = crank_nicolson_propagate(&res, &grid_ground(&res, n), 5e-4, 2000, &tol)?;
    let exact = analytic_z_grid(&res, CmEvaluator::Coherent, -12.0, 12.0, n, grid.t(), &tol)?;
    let err = l2_error(&grid, &exact, false)?;
    Ok(Outcome {
        pass: one_sided < 1e-6 && two_sided < 1e-6 && err < 1e-5,
        detail: format!(
            "off-resonance difference {one_sided:.2e} at R = 0, {two_sided:.2e} two-sided off axis \
             (limit 1e-6), grid L2 {err:.2e} (limit 1e-5)"
        ),
    })
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "failed"
    }
}

type Check = fn() -> Result<Outcome>;

fn main() -> ExitCode {
    let criteria: [(&str, Check, u64); 9] = [
        ("residual verification", residual_verification, 5),
        ("evaluator equivalence", evaluator_equivalence, 5),
        ("analytic vs grid", analytic_vs_grid, 30),
        ("action closed forms", action_closed_forms, 10),
        ("closed-form relative family", taut_family, 20),
        ("series machinery", series_machinery, 5),
        ("Pauli suite", pauli_suite, 5),
        ("conservation", conservation, 10),
        ("resonance continuity", resonance_continuity, 30),
    ];
    let mut failures = 0;
    for (k, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let (pass, detail) = match outcome {
            Ok(o) => (o.pass && in_time, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "[{}] {}. {name}: {detail}; {:.2} s (limit {limit} s)",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of 9 criteria passed", 9 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
