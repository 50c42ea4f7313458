use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use monopole_core::dynamics::{
    integrate_e3, integrate_limit, integrate_torus, random_e3_state, random_limit_state, random_torus_state,
    seeded_rng, E3State, PhaseState, Trajectory, TwoCentre,
};
use monopole_core::fields::{Family, Geometry, SystemSpec};
use monopole_core::geometry::{
    area_and_flux, area_and_flux_stackel, curvature_closed, curvature_numeric, random_regular_point, system_metric,
    FluxReport, CURVATURE_STEP,
};
use monopole_core::polyroots;
use monopole_core::verify::{check_classical_with, check_duality_mixed, AnsatzGrid, Stencil};
use rayon::prelude::*;

use crate::config::{ConfigError, RunConfig};

/// Result of a subcommand that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Breach,
}

impl Outcome {
    fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Breach
        }
    }
}

/// 17 significant digits, enough for a lossless round trip.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_row(out: &mut String, values: &[f64]) {
    let row: Vec<String> = values.iter().map(|&v| fmt17(v)).collect();
    out.push_str(&row.join(","));
    out.push('\n');
}

/// Writes `body` to `path`, or to stdout when there is no path.
fn emit(path: Option<&Path>, body: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            std::fs::write(p, body).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

/// Summary lines go to stdout when data went to a file, else to stderr.
fn summary(to_file: bool, line: &str) {
    if to_file {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn require(family: Family, allowed: &[Family], what: &str) -> Result<(), ConfigError> {
    if allowed.contains(&family) {
        Ok(())
    } else {
        Err(ConfigError(format!("{what} does not support family {family:?}")))
    }
}

// ---------------------------------------------------------------- roots

pub fn roots(cfg: &RunConfig) -> Result<Outcome> {
    require(cfg.family, &[Family::CaseII], "roots")?;
    let params = cfg.quartic()?;
    let rep = polyroots::admissibility(&params);
    let mut s = String::new();
    writeln!(s, "a3 = {}, a2 = {}, a0 = {} (linear), a1 = {} (constant)", params.a3, params.a2, params.a0, params.a1)?;
    match (&rep.roots, &rep.root_error) {
        (Some(r), _) => writeln!(s, "beta = [{}, {}, {}, {}]", r.beta[0], r.beta[1], r.beta[2], r.beta[3])?,
        (None, Some(e)) => writeln!(s, "beta = unavailable ({e})")?,
        (None, None) => writeln!(s, "beta = unavailable")?,
    }
    writeln!(s, "discriminant = {:e}", rep.discriminant)?;
    writeln!(s, "coefficient_signs = {}", rep.coefficient_signs)?;
    writeln!(s, "discriminant_sign = {}", rep.discriminant_sign)?;
    writeln!(s, "root_inequalities = {}", rep.root_inequalities)?;
    writeln!(s, "admissible = {}", rep.admissible())?;
    print!("{s}");
    Ok(Outcome::from_pass(rep.admissible()))
}

// ---------------------------------------------------------------- elliptic table

pub fn elliptic_table(cfg: &RunConfig, samples: usize, out: Option<&Path>) -> Result<Outcome> {
    require(cfg.family, &[Family::CaseII], "elliptic-table")?;
    let spec = cfg.system()?;
    let m = spec.model()?;
    let mut body = String::from("u,Q,dQ\n");
    for (u, q, dq) in m.table(samples.max(2)) {
        csv_row(&mut body, &[u, q, dq]);
    }
    emit(out, &body)?;
    summary(
        out.is_some(),
        &format!("elliptic-table samples={} K1={} K2={}", samples.max(2), fmt17(m.k1()), fmt17(m.k2())),
    );
    Ok(Outcome::Pass)
}

// ---------------------------------------------------------------- metric check


pub fn metric_check(cfg: &RunConfig, samples: usize, tol: f64, seed: u64, out: Option<&Path>) -> Result<Outcome> {
    require(cfg.family, &[Family::CaseI, Family::CaseII], "metric-check")?;
    let spec = cfg.system()?;
    let rows: Vec<Result<[f64; 5]>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let p = random_regular_point(&spec, &mut seeded_rng(seed, i))?;
            let k_closed = curvature_closed(&spec, p)?;
            let k_num = curvature_numeric(|a, b| system_metric(&spec, a, b), p, CURVATURE_STEP)?;
            Ok([p[0], p[1], system_metric(&spec, p[0], p[1]).lambda, k_closed, k_num])
        })
        .collect();
    let mut body = String::from("u1,u2,lambda,K_closed,K_numeric\n");
    let mut worst = 0.0_f64;
    for r in rows {
        let r = r?;
        worst = worst.max((r[3] - r[4]).abs());
        csv_row(&mut body, &r);
    }
    emit(out, &body)?;
    let pass = worst <= tol;
    summary(
        out.is_some(),
        &format!("metric-check samples={samples} max_abs_K_error={worst:e} tol={tol:e} pass={pass}"),
    );
    Ok(Outcome::from_pass(pass))
}

// ---------------------------------------------------------------- simulate

#[derive(Debug, Clone, Copy)]
pub struct SimulateOptions {
    pub t_end: f64,
    pub tol: f64,
    pub stride: usize,
    pub seed: u64,
    pub trajectories: usize,
    pub drift_tol: f64,
    pub casimir_tol: f64,
}

enum Run {
    Torus(Trajectory<PhaseState>),
    E3(Trajectory<E3State>),
}

impl Run {
    fn drifts(&self) -> (f64, f64, f64) {
        match self {
            Run::Torus(t) => (t.h_drift(), t.f_drift(), 0.0),
            Run::E3(t) => (t.h_drift(), t.f_drift(), t.casimir_drift()),
        }
    }

    fn csv(&self) -> String {
        let mut body = String::new();
        match self {
            Run::Torus(t) => {
                body.push_str("t,u1,u2,p1,p2,H,F\n");
                for i in 0..t.len() {
                    let s = &t.states[i];
                    csv_row(&mut body, &[t.times[i], s.u1, s.u2, s.p1, s.p2, t.h[i], t.f[i]]);
                }
            }
            Run::E3(t) => {
                body.push_str("t,M1,M2,M3,x1,x2,x3,H,F,C1,C2\n");
                for i in 0..t.len() {
                    let s = &t.states[i];
                    let (c1, c2) = t.casimirs[i];
                    csv_row(
                        &mut body,
                        &[t.times[i], s.m[0], s.m[1], s.m[2], s.x[0], s.x[1], s.x[2], t.h[i], t.f[i], c1, c2],
                    );
                }
            }
        }
        body
    }
}

fn two_centre(spec: &SystemSpec) -> Option<TwoCentre> {
    match spec.geometry {
        Geometry::TwoCentre { vy_a, vy_b } => Some(TwoCentre { a: vy_a, b: vy_b, mu: spec.mu }),
        _ => None,
    }
}

fn initial_length(family: Family) -> usize {
    match family {
        Family::CaseII | Family::CaseIILimit => 4,
        Family::CaseI | Family::Vy => 6,
    }
}

fn run_one(cfg: &RunConfig, spec: &SystemSpec, opt: &SimulateOptions, index: usize) -> Result<Run> {
    let mut rng = seeded_rng(opt.seed, index as u64);
    let given = cfg.integrator.initial.as_deref();
    let phase = |v: &[f64]| PhaseState::new(v[0], v[1], v[2], v[3]);
    let e3 = |v: &[f64]| E3State::new([v[0], v[1], v[2]], [v[3], v[4], v[5]]);
    let (t, tol, stride) = (opt.t_end, opt.tol, opt.stride);
    Ok(match cfg.family {
        Family::CaseII => {
            let s0 = match given {
                Some(v) => phase(v),
                None => random_torus_state(spec, &mut rng)?,
            };
            Run::Torus(integrate_torus(spec, &s0, t, tol, stride)?)
        }
        Family::CaseIILimit => {
            let s0 = match given {
                Some(v) => phase(v),
                None => random_limit_state(spec, &mut rng)?,
            };
            Run::Torus(integrate_limit(spec, &s0, t, tol, stride)?)
        }
        Family::CaseI | Family::Vy => {
            let s0 = match given {
                Some(v) => e3(v),
                None => random_e3_state(&mut rng, cfg.leaf_nu(), two_centre(spec).as_ref()),
            };
            Run::E3(integrate_e3(spec, &s0, t, tol, stride)?)
        }
    })
}

fn numbered(path: &Path, i: usize) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("trajectory");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}_{i:03}.{ext}"))
}

pub fn simulate(cfg: &RunConfig, opt: &SimulateOptions, out: Option<&Path>) -> Result<Outcome> {
    let spec = cfg.system()?;
    if let Some(v) = &cfg.integrator.initial {
        let n = initial_length(cfg.family);
        if v.len() != n {
            return Err(ConfigError(format!("integrator.initial needs {n} values, got {}", v.len())).into());
        }
        if opt.trajectories != 1 {
            return Err(ConfigError("integrator.initial fixes a single trajectory".into()).into());
        }
    }
    if opt.trajectories > 1 && out.is_none() {
        return Err(ConfigError("several trajectories need --out".into()).into());
    }
    let runs: Vec<Result<Run>> = (0..opt.trajectories)
        .into_par_iter()
        .map(|i| run_one(cfg, &spec, opt, i).with_context(|| format!("trajectory {i}")))
        .collect();
    let (mut h, mut f, mut c) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut samples = 0;
    for (i, run) in runs.into_iter().enumerate() {
        let run = run?;
        let (dh, df, dc) = run.drifts();
        h = h.max(dh);
        f = f.max(df);
        c = c.max(dc);
        let body = run.csv();
        samples += body.lines().count() - 1;
        match out {
            Some(p) if opt.trajectories > 1 => emit(Some(&numbered(p, i)), &body)?,
            _ => emit(out, &body)?,
        }
    }
    let pass = h <= opt.drift_tol && f <= opt.drift_tol && c <= opt.casimir_tol;
    summary(
        out.is_some(),
        &format!(
            "simulate family={:?} trajectories={} samples={samples} max_H_drift={h:e} max_F_drift={f:e} max_casimir_drift={c:e} pass={pass}",
            cfg.family, opt.trajectories
        ),
    );
    Ok(Outcome::from_pass(pass))
}

// ---------------------------------------------------------------- verify

pub fn verify(cfg: &RunConfig, n: usize, stencil: usize, tol: f64, out: Option<&Path>) -> Result<Outcome> {
    require(cfg.family, &[Family::CaseI, Family::CaseII], "verify")?;
    let stencil = Stencil::from_order(stencil)
        .ok_or_else(|| ConfigError(format!("stencil order must be 2 or 4, got {stencil}")))?;
    let spec = cfg.system()?;
    let grid = AnsatzGrid::builtin(&spec, n)?;
    let rep = check_classical_with(&grid, stencil)?;
    let dual = check_duality_mixed(&grid, stencil, stencil)?;
    let mut table = format!("{:<10} {:>24}\n", "condition", "residual");
    let mut body = String::from("condition,residual\n");
    let extra = [("C6*-C6", rep.c6_star_correction), ("duality", dual)];
    for (name, v) in rep.entries().iter().chain(extra.iter()) {
        writeln!(table, "{name:<10} {:>24}", format!("{v:.6e}"))?;
        writeln!(body, "{name},{}", fmt17(*v))?;
    }
    print!("{table}");
    if out.is_some() {
        emit(out, &body)?;
    }
    let pass = rep.max() <= tol;
    println!(
        "verify family={:?} grid={n}x{n} stencil={} max_residual={:e} tol={tol:e} pass={pass}",
        cfg.family,
        stencil.order(),
        rep.max()
    );
    Ok(Outcome::from_pass(pass))
}

// ---------------------------------------------------------------- flux

pub fn flux(cfg: &RunConfig, n: usize, tol: f64, out: Option<&Path>) -> Result<Outcome> {
    require(cfg.family, &[Family::CaseI, Family::CaseII], "flux")?;
    let spec = cfg.system()?;
    let compute = |n: usize| -> FluxReport {
        match &spec.geometry {
            Geometry::Stackel { alpha, a3 } => area_and_flux_stackel(*alpha, *a3, spec.b, n),
            Geometry::Elliptic(m) => area_and_flux(m, spec.b, n),
            _ => unreachable!("family checked above"),
        }
    };
    let n = n.max(8);
    let (coarse, fine) = (compute(n), compute(2 * n));
    let change = (fine.area - coarse.area).abs() / fine.area;
    let mut body = String::from("n,area,flux_over_2pi\n");
    csv_row(&mut body, &[n as f64, coarse.area, coarse.flux_over_2pi]);
    csv_row(&mut body, &[(2 * n) as f64, fine.area, fine.flux_over_2pi]);
    if out.is_some() {
        emit(out, &body)?;
    }
    let pass = change <= tol;
    println!(
        "flux family={:?} n={} area={} flux_over_2pi={:.6} nearest_integer={} gap={:e} refinement_change={change:e} pass={pass}",
        cfg.family,
        2 * n,
        fmt17(fine.area),
        fine.flux_over_2pi,
        fine.nearest_integer,
        fine.gap
    );
    Ok(Outcome::from_pass(pass))
}

pub fn ensure_positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(anyhow!(ConfigError(format!("{name} must be positive, got {v}"))))
    }
}
