use anyhow::{bail, Result};
use hookeon::assembly::{eval_total, TotalState};
use hookeon::cm_analytic::{analytic_z_grid, ground_state_1d, CmEvaluator, CmPoint};
use hookeon::cm_numeric::{crank_nicolson_propagate, default_box};
use hookeon::grid::{l2_error, GridWavefunction1D};
use hookeon::oracle::{cm_residual, FD_SPACE_STEP, FD_TIME_STEP};
use hookeon::params::si;
use hookeon::relative::{radial_profile, shoot_lowest, shoot_radial, taut_level};
use hookeon::UnitSystem;
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::args::{
    AssembleArgs, CmCheckArgs, CmEvalArgs, CompareArgs, Format, GridArgs, PropagateArgs, ShootArgs,
    TautArgs,
};
use crate::output::{format_number, sink, write_json, Report, Table};
use crate::{usage, CheckFailed, Settings};

fn report<'a>(s: &'a Settings, command: &'a str) -> Report<'a> {
    Report {
        version: env!("HOOKEON_VERSION"),
        command,
        units: s.units,
        params: &s.params,
        tolerances: &s.tolerances,
    }
}

/// Writes `table` as CSV, or as JSON together with `extra` fields.
fn emit(s: &Settings, command: &str, table: &Table, extra: serde_json::Value) -> Result<()> {
    let out = sink(s.output.as_deref())?;
    match s.format {
        Format::Csv => table.write_csv(out),
        Format::Json => {
            let mut body = json!({ "data": table.to_json() });
            if let (Some(b), serde_json::Value::Object(e)) = (body.as_object_mut(), extra) {
                b.extend(e);
            }
            write_json(out, &report(s, command).with(body))
        }
    }
}

fn parse_list(text: &str, len: usize, what: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = text
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| usage(format!("{what}: cannot parse '{text}'")))?;
    if values.len() != len {
        return Err(usage(format!("{what}: expected {len} comma-separated numbers, got '{text}'")));
    }
    Ok(values)
}

/// `a:b:n` into `n` evenly spaced values, or a single number.
fn parse_range(text: &str, what: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || usage(format!("{what}: expected 'min:max:n' or a number, got '{text}'"));
    match parts.as_slice() {
        [v] => Ok(vec![v.trim().parse().map_err(|_| bad())?]),
        [a, b, n] => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            let n: usize = n.trim().parse().map_err(|_| bad())?;
            match n {
                0 => Err(bad()),
                1 => Ok(vec![a]),
                _ => Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()),
            }
        }
        _ => Err(bad()),
    }
}

/// Atomic units of length, time and energy expressed in the active unit
/// system.
pub(crate) fn atomic_scales(units: UnitSystem) -> (f64, f64, f64) {
    match units {
        UnitSystem::Si => (si::bohr_radius(), si::atomic_time(), si::hartree()),
        _ => (1.0, 1.0, 1.0),
    }
}

pub fn cm_eval(s: &Settings, a: &CmEvalArgs) -> Result<()> {
    let mut points = Vec::new();
    for p in &a.points {
        let v = parse_list(p, 4, "--point")?;
        points.push(CmPoint::new(v[0], v[1], v[2], v[3]));
    }
    if let Some(z) = &a.zgrid {
        let zs = parse_range(z, "--zgrid")?;
        for &t in &parse_range(&a.times, "--times")? {
            points.extend(zs.iter().map(|&z| CmPoint::new(a.x, a.y, z, t)));
        }
    }
    if points.is_empty() {
        return Err(usage("cm-eval needs --point or --zgrid"));
    }
    let evaluator = CmEvaluator::from(a.evaluator);
    let mut table = Table::new(&["X", "Y", "Z", "t", "re_psi", "im_psi", "abs2_psi"]);
    for p in &points {
        let psi = evaluator.eval(&s.params, p, &s.tolerances)?;
        table.push(vec![p.r.x, p.r.y, p.r.z, p.t, psi.re, psi.im, psi.norm_sqr()]);
    }
    emit(s, "cm-eval", &table, json!({ "evaluator": evaluator }))
}

pub fn cm_check(s: &Settings, a: &CmCheckArgs) -> Result<()> {
    let p = &s.params;
    let (length, time, energy) = atomic_scales(s.units);
    let evaluator = CmEvaluator::from(a.evaluator);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut table = Table::new(&["X", "Y", "Z", "t", "residual"]);
    let mut worst: f64 = 0.0;
    let mut attempts = 0usize;
    while table.rows.len() < a.samples {
        attempts += 1;
        if attempts > 1000 * a.samples.max(1) {
            bail!("could not draw samples with |sin(Omega t)| > {}", a.min_sin);
        }
        let t = rng.gen_range(0.0..a.tmax) * time;
        if (p.trap_freq * t).sin().abs() <= a.min_sin {
            continue;
        }
        let mut draw = || rng.gen_range(-a.extent..a.extent) * length;
        let r = Vector3::new(draw(), draw(), draw());
        let psi = |r: &Vector3<f64>, t: f64| evaluator.eval(p, &CmPoint { r: *r, t }, &s.tolerances);
        let res = cm_residual(p, psi, &r, t, FD_SPACE_STEP * length, FD_TIME_STEP * time)? / energy;
        worst = worst.max(res);
        table.push(vec![r.x, r.y, r.z, t, res]);
    }
    let pass = worst < a.limit;
    eprintln!("max residual {} over {} samples (limit {})", format_number(worst), a.samples, a.limit);
    emit(
        s,
        "cm-check",
        &table,
        json!({ "max_residual": worst, "limit": a.limit, "pass": pass, "seed": a.seed }),
    )?;
    if !pass {
        return Err(CheckFailed(format!("max residual {worst:e} exceeds {:e}", a.limit)).into());
    }
    Ok(())
}

fn box_edges(s: &Settings, g: &GridArgs, t_end: f64) -> Result<(f64, f64)> {
    let (lo, hi) = default_box(&s.params, t_end, &s.tolerances)?;
    let (lo, hi) = (g.zmin.unwrap_or(lo), g.zmax.unwrap_or(hi));
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(usage(format!("empty box [{lo}, {hi}]")));
    }
    Ok((lo, hi))
}

fn ground_grid(s: &Settings, lo: f64, hi: f64, n: usize) -> Result<GridWavefunction1D> {
    Ok(GridWavefunction1D::from_fn(lo, hi, n, 0.0, |z| ground_state_1d(&s.params, z).into())?)
}

fn time_step(s: &Settings, g: &GridArgs) -> f64 {
    g.dt.unwrap_or(1e-3 * atomic_scales(s.units).1)
}

pub fn cm_propagate(s: &Settings, a: &PropagateArgs) -> Result<()> {
    let dt = time_step(s, &a.grid);
    let (lo, hi) = box_edges(s, &a.grid, dt * a.steps as f64)?;
    let start = ground_grid(s, lo, hi, a.grid.n)?;
    let (psi, rep) = crank_nicolson_propagate(&s.params, &start, dt, a.steps, &s.tolerances)?;
    let mut table = Table::new(&["z", "re", "im", "abs2"]);
    for (z, v) in psi.points().zip(psi.samples()) {
        table.push(vec![z, v.re, v.im, v.norm_sqr()]);
    }
    if s.format == Format::Csv {
        let text = serde_json::to_string_pretty(&report(s, "cm-propagate").with(json!({ "report": rep })))?;
        match &a.report {
            Some(path) => std::fs::write(path, text + "\n")?,
            None => eprintln!("{text}"),
        }
    }
    emit(s, "cm-propagate", &table, json!({ "report": rep }))
}

pub fn cm_compare(s: &Settings, a: &CompareArgs) -> Result<()> {
    if a.levels == 0 {
        return Err(usage("--levels must be at least 1"));
    }
    let t_end = a.t.unwrap_or(5.0 * atomic_scales(s.units).1);
    if t_end.is_nan() || t_end <= 0.0 {
        return Err(usage("--t must be positive"));
    }
    let (lo, hi) = box_edges(s, &a.grid, t_end)?;
    let mut table = Table::new(&["level", "n", "dz", "dt", "l2_error"]);
    for level in 0..a.levels {
        let n = a.grid.n << level;
        let dt = time_step(s, &a.grid) / f64::from(1u32 << level);
        let steps = ((t_end / dt).round() as usize).max(1);
        let dt = t_end / steps as f64;
        let start = ground_grid(s, lo, hi, n)?;
        let (psi, _) = crank_nicolson_propagate(&s.params, &start, dt, steps, &s.tolerances)?;
        let exact = analytic_z_grid(&s.params, CmEvaluator::Coherent, lo, hi, n, psi.t(), &s.tolerances)?;
        let err = l2_error(&psi, &exact, false)?;
        table.push(vec![level as f64, n as f64, psi.dz(), dt, err]);
    }
    let errors: Vec<f64> = table.rows.iter().map(|r| r[4]).collect();
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    eprintln!("{:>5} {:>7} {:>12} {:>12} {:>12}", "level", "n", "dz", "dt", "l2_error");
    for r in &table.rows {
        eprintln!("{:>5} {:>7} {:>12.4e} {:>12.4e} {:>12.4e}", r[0], r[1], r[2], r[3], r[4]);
    }
    eprintln!("error decreases monotonically: {}", if monotone { "yes" } else { "no" });
    emit(s, "cm-compare", &table, json!({ "t": t_end, "box": [lo, hi], "monotone": monotone }))
}

pub fn taut(s: &Settings, a: &TautArgs) -> Result<()> {
    let mut table = Table::new(&["l", "Omega", "epsilon"]);
    for l in 0..=a.lmax {
        let level = taut_level(&s.params, l, 0, &s.tolerances)?;
        table.push(vec![l as f64, level.omega, level.epsilon]);
    }
    emit(s, "taut", &table, json!({}))
}

pub fn radial_shoot(s: &Settings, a: &ShootArgs) -> Result<()> {
    let omega = s.params.trap_freq;
    let epsilon = match &a.bracket {
        Some(b) => {
            let v = parse_list(b, 2, "--bracket")?;
            shoot_radial(&s.params, a.l, omega, (v[0], v[1]), &s.tolerances)?
        }
        None => shoot_lowest(&s.params, a.l, omega, &s.tolerances)?,
    };
    let mut table = Table::new(&["r", "u"]);
    for (r, u) in radial_profile(&s.params, a.l, omega, epsilon, a.samples)? {
        table.push(vec![r, u]);
    }
    eprintln!("l = {}, Omega = {}, epsilon = {}", a.l, format_number(omega), format_number(epsilon));
    emit(s, "radial-shoot", &table, json!({ "l": a.l, "Omega": omega, "epsilon": epsilon }))
}

pub fn assemble(s: &Settings, a: &AssembleArgs) -> Result<()> {
    let level = taut_level(&s.params, a.l, a.m, &s.tolerances)?;
    let params = if s.omega_explicit { s.params } else { s.params.with_trap_freq(level.omega)? };
    let state = TotalState::new(params, level, a.evaluator.into(), s.tolerances)?;
    let from = parse_list(&a.from, 6, "--from")?;
    let to = parse_list(&a.to, 6, "--to")?;
    if a.samples < 2 {
        return Err(usage("--samples must be at least 2"));
    }
    let mut table = Table::new(&["s", "x1", "y1", "z1", "x2", "y2", "z2", "re", "im", "abs2"]);
    for k in 0..a.samples {
        let f = k as f64 / (a.samples - 1) as f64;
        let c: Vec<f64> = from.iter().zip(&to).map(|(x, y)| x + f * (y - x)).collect();
        let r1 = Vector3::new(c[0], c[1], c[2]);
        let r2 = Vector3::new(c[3], c[4], c[5]);
        let v = eval_total(&state, &r1, &r2, a.t)?;
        let mut row = vec![f];
        row.extend_from_slice(&c);
        row.extend([v.re, v.im, v.norm_sqr()]);
        table.push(row);
    }
    eprintln!(
        "l = {}, m = {}, Omega = {}, epsilon = {}, spin = {}, exchange sign = {}",
        a.l,
        a.m,
        format_number(level.omega),
        format_number(level.epsilon),
        state.spin,
        state.exchange_sign()
    );
    emit(
        s,
        "assemble",
        &table,
        json!({
            "l": a.l,
            "m": a.m,
            "Omega": level.omega,
            "epsilon": level.epsilon,
            "spin": state.spin.to_string(),
            "exchange_sign": state.exchange_sign(),
        }),
    )
}
