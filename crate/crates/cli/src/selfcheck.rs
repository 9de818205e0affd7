//! Reduced versions of the library's invariant suites, run on the active
//! parameters. Sampling uses the CM oscillator length and `1 / Omega` as
//! scales and `hbar Omega` as the energy unit of residuals, so the checks
//! mean the same thing in every unit system.

use std::time::Instant;

use anyhow::Result;
use hookeon::assembly::{eval_total, TotalState};
use hookeon::cm_analytic::{
    analytic_z_grid, eval_psi_cm, ground_state_1d, propagator_action, CmEvaluator, CmPoint,
    CoherentState,
};
use hookeon::cm_numeric::{crank_nicolson_propagate, default_box};
use hookeon::grid::{l2_error, GridWavefunction1D};
use hookeon::numerics::quadrature::integrate;
use hookeon::oracle::{action_by_quadrature, cm_residual, radial_residual};
use hookeon::relative::{shoot_lowest, taut_level};
use hookeon::{validate, Tolerances, ValidatedParams};
use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::args::{Format, SelfcheckArgs};
use crate::output::{format_number, sink, write_json, Report};
use crate::{CheckFailed, Settings};

#[derive(Debug, Serialize)]
struct SuiteResult {
    suite: &'static str,
    value: Option<f64>,
    limit: f64,
    status: &'static str,
    note: String,
    seconds: f64,
}

struct Ctx<'a> {
    p: &'a ValidatedParams,
    tol: &'a Tolerances,
    length: f64,
    time: f64,
    seed: u64,
}

impl Ctx<'_> {
    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(31).wrapping_add(salt))
    }
}

type Suite = fn(&Ctx) -> hookeon::Result<f64>;

const SUITES: [(&str, f64, Suite); 10] = [
    ("cm-residual", 1e-5, cm_residual_suite),
    ("evaluator-equivalence", 1e-9, evaluator_suite),
    ("action-quadrature", 1e-10, action_suite),
    ("cm-norm", 1e-8, cm_norm_suite),
    ("grid-vs-analytic", 1e-4, grid_suite),
    ("grid-norm-drift", 1e-10, drift_suite),
    ("taut-shooting", 1e-6, shooting_suite),
    ("series-termination", 1e-12, series_suite),
    ("radial-residual", 1e-6, radial_suite),
    ("exchange-sign", 1e-12, exchange_suite),
];

fn cm_residual_suite(c: &Ctx) -> hookeon::Result<f64> {
    let mut rng = c.rng(1);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 50 {
        let t = rng.gen_range(0.0..20.0) * c.time;
        if (c.p.trap_freq * t).sin().abs() <= 0.05 {
            continue;
        }
        let zc = CoherentState::at(c.p, t, c.tol)?.classical.z;
        let mut draw = || rng.gen_range(-1.5..1.5) * c.length;
        let r = Vector3::new(draw(), draw(), zc + draw());
        let psi = |r: &Vector3<f64>, t: f64| CoherentState::at(c.p, t, c.tol).map(|s| s.eval(r));
        let res = cm_residual(c.p, psi, &r, t, 1e-3 * c.length, 1e-4 * c.time)?;
        worst = worst.max(res / (c.p.hbar * c.p.trap_freq));
        n += 1;
    }
    Ok(worst)
}

fn evaluator_suite(c: &Ctx) -> hookeon::Result<f64> {
    let mut rng = c.rng(2);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 200 {
        let t = rng.gen_range(0.0..20.0) * c.time;
        if (c.p.trap_freq * t).sin().abs() <= c.tol.sin {
            continue;
        }
        let mut draw = || rng.gen_range(-1.5..1.5) * c.length;
        let point = CmPoint { r: Vector3::new(draw(), draw(), draw()), t };
        let a = eval_psi_cm(c.p, &point, c.tol)?;
        let b = CmEvaluator::Coherent.eval(c.p, &point, c.tol)?;
        worst = worst.max((a - b).norm() / b.norm());
        n += 1;
    }
    Ok(worst)
}

fn action_suite(c: &Ctx) -> hookeon::Result<f64> {
    let mut rng = c.rng(3);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 10 {
        let t = rng.gen_range(0.05..6.0) * c.time;
        if (c.p.trap_freq * t).sin().abs() <= 0.05 {
            continue;
        }
        let mut draw = || rng.gen_range(-1.5..1.5) * c.length;
        let r = Vector3::new(draw(), draw(), draw());
        let rp = Vector3::new(draw(), draw(), draw());
        let closed = propagator_action(c.p, &r, &rp, t, c.tol)?;
        let quad = action_by_quadrature(c.p, &r, &rp, t)?;
        worst = worst.max((closed - quad).abs() / closed.abs().max(c.p.hbar));
        n += 1;
    }
    Ok(worst)
}

fn cm_norm_suite(c: &Ctx) -> hookeon::Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..5 {
        let s = CoherentState::at(c.p, 3.7 * k as f64 * c.time, c.tol)?;
        let (lo, hi) = (s.classical.z - 15.0 * c.length, s.classical.z + 15.0 * c.length);
        let z = integrate(|z| s.z_factor(z).norm_sqr(), lo, hi, 0.0, 1e-12)?.value;
        worst = worst.max((z - 1.0).abs());
    }
    Ok(worst)
}

fn grid_suite(c: &Ctx) -> hookeon::Result<f64> {
    let t_end = 2.0 * c.time;
    let (lo, hi) = default_box(c.p, t_end, c.tol)?;
    let n = 1024;
    let steps = 2000;
    let start = GridWavefunction1D::from_fn(lo, hi, n, 0.0, |z| ground_state_1d(c.p, z).into())?;
    let (psi, _) = crank_nicolson_propagate(c.p, &start, t_end / steps as f64, steps, c.tol)?;
    let exact = analytic_z_grid(c.p, CmEvaluator::Coherent, lo, hi, n, psi.t(), c.tol)?;
    // dimensionless: the L2 norm of a unit-norm profile difference
    l2_error(&psi, &exact, false)
}

fn drift_suite(c: &Ctx) -> hookeon::Result<f64> {
    let still = validate(c.p.into_inner().with_field(0.0))?;
    let half = 8.0 * c.length;
    let start = GridWavefunction1D::from_fn(-half, half, 256, 0.0, |z| ground_state_1d(&still, z).into())?;
    let (_, rep) = crank_nicolson_propagate(&still, &start, 2e-3 * c.time, 10_000, c.tol)?;
    Ok(rep.norm_drift)
}

fn shooting_suite(c: &Ctx) -> hookeon::Result<f64> {
    let mut worst: f64 = 0.0;
    for l in 0..5 {
        let level = taut_level(c.p, l, 0, c.tol)?;
        let shot = shoot_lowest(c.p, l, level.omega, c.tol)?;
        worst = worst.max((shot - level.epsilon).abs() / level.epsilon);
    }
    Ok(worst)
}

fn series_suite(c: &Ctx) -> hookeon::Result<f64> {
    let mut worst: f64 = 0.0;
    for l in 0..5 {
        let level = taut_level(c.p, l, 0, c.tol)?;
        let series = level.series(c.p, c.tol);
        if series.termination != Some(1) {
            return Ok(f64::INFINITY);
        }
        let expect = c.p.mu * c.p.coulomb() / (c.p.hbar * c.p.hbar * (2.0 * l as f64 + 2.0));
        worst = worst.max((series.coeff(1) / series.coeff(0) - expect).abs() / expect);
    }
    Ok(worst)
}

fn radial_suite(c: &Ctx) -> hookeon::Result<f64> {
    let mut worst: f64 = 0.0;
    for l in 0..5 {
        let level = taut_level(c.p, l, 0, c.tol)?;
        for x in [0.3, 0.9, 1.7, 2.6] {
            let res = radial_residual(c.p, &level, x * level.length, 3e-5 * level.length);
            worst = worst.max(res / level.epsilon);
        }
    }
    Ok(worst)
}

fn exchange_suite(c: &Ctx) -> hookeon::Result<f64> {
    let mut rng = c.rng(10);
    let mut worst: f64 = 0.0;
    for l in 0..4 {
        let level = taut_level(c.p, l, l as i32, c.tol)?;
        let p = c.p.with_trap_freq(level.omega)?;
        let state = TotalState::new(p, level, CmEvaluator::Coherent, *c.tol)?;
        if state.exchange_sign() != -1 {
            return Ok(f64::INFINITY);
        }
        let scale = level.length;
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        for _ in 0..10 {
            let mut draw = || rng.gen_range(-1.5..1.5) * scale;
            let r1 = Vector3::new(draw(), draw(), draw());
            let r2 = Vector3::new(draw(), draw(), draw());
            let t = rng.gen_range(0.0..10.0) / level.omega;
            let a = eval_total(&state, &r1, &r2, t)?;
            let b = eval_total(&state, &r2, &r1, t)?;
            if a.norm() > 0.0 {
                worst = worst.max((b - a * Complex64::from(sign)).norm() / a.norm());
            }
        }
    }
    Ok(worst)
}

pub fn run(s: &Settings, a: &SelfcheckArgs) -> Result<()> {
    let p = &s.params;
    if p.trap_freq <= 0.0 {
        return Err(hookeon::Error::ZeroFrequency.into());
    }
    let ctx = Ctx {
        p,
        tol: &s.tolerances,
        length: (p.hbar / (p.mu * p.trap_freq)).sqrt(),
        time: 1.0 / p.trap_freq,
        seed: a.seed,
    };
    let mut results = Vec::new();
    for (suite, limit, f) in SUITES {
        let start = Instant::now();
        let (value, status, note) = match f(&ctx) {
            Ok(v) if v < limit => (Some(v), "PASS", String::new()),
            Ok(v) => (Some(v), "FAIL", String::new()),
            // outside the suite's domain, e.g. delta != 0 for the closed forms
            Err(e) => (None, "SKIP", format!("[{}] {e}", e.module())),
        };
        results.push(SuiteResult { suite, value, limit, status, note, seconds: start.elapsed().as_secs_f64() });
    }

    for r in &results {
        let value = r.value.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "-".into());
        eprintln!("{:<22} {:>10}  limit {:.0e}  {} {}", r.suite, value, r.limit, r.status, r.note);
    }
    let out = sink(s.output.as_deref())?;
    match s.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["suite", "value", "limit", "status"])?;
            for r in &results {
                let value = r.value.map(format_number).unwrap_or_default();
                w.write_record([r.suite, &value, &format_number(r.limit), r.status])?;
            }
            w.flush()?;
        }
        Format::Json => {
            let rep = Report {
                version: env!("HOOKEON_VERSION"),
                command: "selfcheck",
                units: s.units,
                params: p,
                tolerances: &s.tolerances,
            };
            write_json(out, &rep.with(json!({ "seed": a.seed, "suites": results })))?;
        }
    }
    let failed: Vec<&str> = results.iter().filter(|r| r.status == "FAIL").map(|r| r.suite).collect();
    if !failed.is_empty() {
        return Err(CheckFailed(format!("failed suites: {}", failed.join(", "))).into());
    }
    Ok(())
}
