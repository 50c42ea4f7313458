//! Hamiltonians, integrals, flows and conservation monitors.
//!
//! Torus flows are integrated in kinetic variables `(u, π)`, `π = p - A`, where
//! the equations are gauge independent:
//! `u̇ = 2π/λ`, `π̇1 = -∂1H + 2Bπ2`, `π̇2 = -∂2H - 2Bπ1`.
//! Near a fixed point of `σ` the state moves to the quotient chart `w = z²`,
//! where the metric `μ_w = λ / (4|w|)` is regular, `π_w = π_z / (2 z̄)` and the
//! same equations hold with `μ_w` in place of `λ`.

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::elliptic::{EllipticModel, LimitModel};
use crate::fields::{gauge_a2_unchecked, limit_gauge_a1, FieldError, Geometry, SystemSpec};
use crate::geometry::{atlas_radius, fixed_points, nearest_fixed_point, offset_from_fixed_point, ChartTag, TorusPoint};
use crate::ode::{Flow, OdeError, Stepper};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("state sits on a fixed point ({0}, {1}) of the involution")]
    FixedPointSingularity(f64, f64),
    #[error("state sits on a Coulomb centre, R(q) = {0}")]
    CenterSingularity(f64),
    #[error(transparent)]
    Step(#[from] OdeError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Canonical state on `T*T²`, momenta anchored to the Landau gauge.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PhaseState {
    pub u1: f64,
    pub u2: f64,
    pub p1: f64,
    pub p2: f64,
}

impl PhaseState {
    pub fn new(u1: f64, u2: f64, p1: f64, p2: f64) -> Self {
        Self { u1, u2, p1, p2 }
    }
}

/// Point of `e(3)*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct E3State {
    pub m: Vector3<f64>,
    pub x: Vector3<f64>,
}

impl E3State {
    pub fn new(m: [f64; 3], x: [f64; 3]) -> Self {
        Self {
            m: Vector3::from(m),
            x: Vector3::from(x),
        }
    }

    /// `(|x|², (M, x))`.
    pub fn casimirs(&self) -> (f64, f64) {
        (self.x.norm_squared(), self.m.dot(&self.x))
    }

    fn to_array(self) -> [f64; 6] {
        [self.m[0], self.m[1], self.m[2], self.x[0], self.x[1], self.x[2]]
    }

    fn from_array(y: &[f64; 6]) -> Self {
        Self::new([y[0], y[1], y[2]], [y[3], y[4], y[5]])
    }
}

/// Sampled states with monitored `H`, `F` and, for `e(3)*`, the Casimirs.
#[derive(Debug, Clone)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub h: Vec<f64>,
    pub f: Vec<f64>,
    pub casimirs: Vec<(f64, f64)>,
}

impl<S> Default for Trajectory<S> {
    fn default() -> Self {
        Self {
            times: Vec::new(),
            states: Vec::new(),
            h: Vec::new(),
            f: Vec::new(),
            casimirs: Vec::new(),
        }
    }
}

fn relative_drift(v: &[f64], floor: f64) -> f64 {
    let Some(&v0) = v.first() else { return 0.0 };
    let scale = v0.abs().max(floor);
    v.iter().map(|x| (x - v0).abs()).fold(0.0, f64::max) / scale
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max |H(t) - H(0)| / max(|H(0)|, 1)`. The energy is defined up to an
    /// additive constant and can pass through zero, so small values are
    /// measured absolutely.
    pub fn h_drift(&self) -> f64 {
        relative_drift(&self.h, 1.0)
    }

    /// `max |F(t) - F(0)| / max(|F(0)|, 1)`, for the same reason.
    pub fn f_drift(&self) -> f64 {
        relative_drift(&self.f, 1.0)
    }

    /// Largest absolute deviation of either Casimir from its initial value.
    pub fn casimir_drift(&self) -> f64 {
        let Some(&(a0, b0)) = self.casimirs.first() else { return 0.0 };
        self.casimirs
            .iter()
            .map(|(a, b)| (a - a0).abs().max((b - b0).abs()))
            .fold(0.0, f64::max)
    }

    fn push(&mut self, t: f64, s: S, h: f64, f: f64) {
        self.times.push(t);
        self.states.push(s);
        self.h.push(h);
        self.f.push(f);
    }
}

/// Reproducible generator: stream `stream` of the ChaCha8 sequence `seed`.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

// ---------------------------------------------------------------- torus

#[derive(Debug, Clone, Copy)]
struct TorusLocal {
    x1: f64,
    x2: f64,
    d1: f64,
    d2: f64,
    gap: f64,
    lambda: f64,
}

fn torus_local(m: &EllipticModel, u1: f64, u2: f64) -> TorusLocal {
    let (s1, s2) = (m.slice1(u1), m.slice2(u2));
    let gap = s1.offset - s2.offset;
    let b2 = m.beta()[1];
    TorusLocal {
        x1: s1.x,
        x2: s2.x,
        d1: s1.dx,
        d2: s2.dx,
        gap,
        lambda: (gap * (2.0 * b2 + s1.offset + s2.offset)).max(0.0),
    }
}

fn h_kinetic(spec: &SystemSpec, l: &TorusLocal, pi: [f64; 2]) -> f64 {
    (pi[0] * pi[0] + pi[1] * pi[1]) / l.lambda + spec.mu / (l.x1 + l.x2)
}

fn f_kinetic(spec: &SystemSpec, k: f64, l: &TorusLocal, pi: [f64; 2]) -> f64 {
    let s = l.x1 + l.x2;
    let quad = (l.x2 * l.x2 * pi[0] * pi[0] + l.x1 * l.x1 * pi[1] * pi[1]) / l.lambda;
    let lin = 2.0 * k * (l.d2 * pi[0] - l.d1 * pi[1]) / l.gap;
    quad + lin - spec.mu * l.x1 * l.x2 / s - k * spec.b * s * s
}

fn kinetic(m: &EllipticModel, b: f64, s: &PhaseState) -> [f64; 2] {
    [s.p1, s.p2 - gauge_a2_unchecked(m, b, s.u1, s.u2)]
}

fn torus_parts<'a>(spec: &'a SystemSpec, s: &PhaseState) -> Result<(&'a EllipticModel, TorusLocal, [f64; 2]), DynamicsError> {
    let m = spec.model()?;
    let l = torus_local(m, s.u1, s.u2);
    if !(l.lambda > 0.0) || l.gap == 0.0 {
        return Err(DynamicsError::FixedPointSingularity(s.u1, s.u2));
    }
    Ok((m, l, kinetic(m, spec.b, s)))
}

/// `H = |p - A|² / (Q1² - Q2²) + μ / (Q1 + Q2)`.
pub fn h_eval(spec: &SystemSpec, s: &PhaseState) -> Result<f64, DynamicsError> {
    let (_, l, pi) = torus_parts(spec, s)?;
    Ok(h_kinetic(spec, &l, pi))
}

/// `F = (Q2² π1² + Q1² π2²)/λ + 2k(Q2' π1 - Q1' π2)/(Q1 - Q2)
///      - μ Q1 Q2/(Q1 + Q2) - kB (Q1 + Q2)²`.
pub fn f_eval(spec: &SystemSpec, s: &PhaseState) -> Result<f64, DynamicsError> {
    let (_, l, pi) = torus_parts(spec, s)?;
    Ok(f_kinetic(spec, spec.k().unwrap_or(0.0), &l, pi))
}

/// The integral in the Stäckel coordinates `x_i = Q_i(u_i)` with
/// `g^{ii} = ±P(x_i) / (4(x1² - x2²))`, `v¹ = x2²`, `v² = x1²` and
/// `φ¹ = -φ² = k_x √(-P(x1)P(x2)) / (2(x1 - x2))`, momenta `π_x = π_u / Q'`.
/// The map `u → x` has orientation `sign(Q1' Q2')`, which flips the sign of the
/// magnetic density and hence of `k_x`. Undefined on the turning lines.
pub fn f_eval_stackel(spec: &SystemSpec, s: &PhaseState) -> Result<f64, DynamicsError> {
    let (m, l, pi) = torus_parts(spec, s)?;
    let p = m.params();
    let k = spec.k().unwrap_or(0.0) * (l.d1 * l.d2).signum();
    let (x1, x2) = (l.x1, l.x2);
    let (px1, px2) = (pi[0] / l.d1, pi[1] / l.d2);
    let den = 4.0 * (x1 * x1 - x2 * x2);
    let (pp1, pp2) = (p.eval(x1), p.eval(x2));
    let g11 = pp1 / den;
    let g22 = -pp2 / den;
    let phi = k * (-pp1 * pp2).max(0.0).sqrt() / (2.0 * (x1 - x2));
    let sum = x1 + x2;
    Ok(g11 * x2 * x2 * px1 * px1 + g22 * x1 * x1 * px2 * px2 + phi * px1 - phi * px2
        - spec.mu * x1 * x2 / sum
        - spec.k().unwrap_or(0.0) * spec.b * sum * sum)
}

/// Canonical bracket `Σ ∂a/∂u_i ∂b/∂p_i - ∂a/∂p_i ∂b/∂u_i` by central
/// differences with one Richardson step.
pub fn poisson_bracket_fd<A, B>(a: A, b: B, s: &PhaseState, h: f64) -> f64
where
    A: Fn(&PhaseState) -> f64,
    B: Fn(&PhaseState) -> f64,
{
    let ga = fd_gradient4(&a, s, h);
    let gb = fd_gradient4(&b, s, h);
    ga[0] * gb[2] + ga[1] * gb[3] - ga[2] * gb[0] - ga[3] * gb[1]
}

/// Gradient with respect to `(u1, u2, p1, p2)`.
pub fn fd_gradient4<A: Fn(&PhaseState) -> f64>(a: &A, s: &PhaseState, h: f64) -> [f64; 4] {
    let base = [s.u1, s.u2, s.p1, s.p2];
    let mut g = [0.0; 4];
    for (i, gi) in g.iter_mut().enumerate() {
        let eval = |d: f64| {
            let mut v = base;
            v[i] += d;
            a(&PhaseState::new(v[0], v[1], v[2], v[3]))
        };
        let c = |h: f64| (eval(h) - eval(-h)) / (2.0 * h);
        *gi = (4.0 * c(0.5 * h) - c(h)) / 3.0;
    }
    g
}

/// Conformal chart data: factor, its gradient and the potential gradient.
struct ChartFields {
    mu: f64,
    grad_mu: [f64; 2],
    grad_h: [f64; 2],
}

struct TorusFlow<'a> {
    m: &'a EllipticModel,
    mu: f64,
    b: f64,
    chart: ChartTag,
    r0: f64,
    centres: [TorusPoint; 4],
}

const SERIES_RADIUS: f64 = 1e-8;

impl<'a> TorusFlow<'a> {
    fn new(spec: &'a SystemSpec) -> Result<Self, DynamicsError> {
        let m = spec.model()?;
        Ok(Self {
            m,
            mu: spec.mu,
            b: spec.b,
            chart: ChartTag::Bulk,
            r0: atlas_radius(m),
            centres: fixed_points(m),
        })
    }

    fn bulk_fields(&self, u1: f64, u2: f64) -> Option<(TorusLocal, ChartFields)> {
        let l = torus_local(self.m, u1, u2);
        if !(l.lambda > 0.0) {
            return None;
        }
        let s2 = (l.x1 + l.x2).powi(2);
        let f = ChartFields {
            mu: l.lambda,
            grad_mu: [2.0 * l.x1 * l.d1, -2.0 * l.x2 * l.d2],
            grad_h: [-self.mu * l.d1 / s2, -self.mu * l.d2 / s2],
        };
        Some((l, f))
    }

    fn chart_fields(&self, index: usize, w: Complex64) -> Option<ChartFields> {
        let r = w.norm();
        if r < SERIES_RADIUS {
            let c = self.m.turning_coefficient();
            let d = self.m.turning_quartic_coefficient();
            let b2 = self.m.beta()[1];
            let w1 = w.re;
            let s = 2.0 * b2 + c * w1;
            return Some(ChartFields {
                mu: 0.25 * (c + d * w1) * s,
                grad_mu: [0.25 * (d * s + c * (c + d * w1)), 0.0],
                grad_h: [-self.mu * c / (s * s), 0.0],
            });
        }
        let z = w.sqrt();
        let c = self.centres[index];
        let (l, f) = self.bulk_fields(c.u1 + z.re, c.u2 + z.im)?;
        let jac = 2.0 * z.conj();
        let gl = Complex64::new(f.grad_mu[0], f.grad_mu[1]) / jac;
        let gm = gl / (4.0 * r) - w * (l.lambda / (4.0 * r * r * r));
        let gh = Complex64::new(f.grad_h[0], f.grad_h[1]) / jac;
        Some(ChartFields {
            mu: l.lambda / (4.0 * r),
            grad_mu: [gm.re, gm.im],
            grad_h: [gh.re, gh.im],
        })
    }

    fn field_rhs(&self, f: &ChartFields, pi: [f64; 2]) -> [f64; 4] {
        let kin = (pi[0] * pi[0] + pi[1] * pi[1]) / f.mu;
        let dh1 = -kin * f.grad_mu[0] / f.mu + f.grad_h[0];
        let dh2 = -kin * f.grad_mu[1] / f.mu + f.grad_h[1];
        [
            2.0 * pi[0] / f.mu,
            2.0 * pi[1] / f.mu,
            -dh1 + 2.0 * self.b * pi[1],
            -dh2 - 2.0 * self.b * pi[0],
        ]
    }

    fn canonical(&self, u1: f64, u2: f64) -> TorusPoint {
        TorusPoint::new(u1, u2).canonical(self.m)
    }

    /// Torus position and kinetic momentum of an internal state.
    fn to_torus(&self, y: &[f64; 4]) -> ([f64; 2], [f64; 2]) {
        match self.chart {
            ChartTag::Bulk => ([y[0], y[1]], [y[2], y[3]]),
            ChartTag::FixedPoint(i) => {
                let z = Complex64::new(y[0], y[1]).sqrt();
                let c = self.centres[i];
                let p = self.canonical(c.u1 + z.re, c.u2 + z.im);
                let pz = 2.0 * z.conj() * Complex64::new(y[2], y[3]);
                ([p.u1, p.u2], [pz.re, pz.im])
            }
        }
    }

    fn enter_chart_if_close(&mut self, y: &mut [f64; 4]) {
        let p = TorusPoint::new(y[0], y[1]);
        let (i, dist) = nearest_fixed_point(self.m, p);
        if dist < self.r0 && dist > 0.0 {
            let z = offset_from_fixed_point(self.m, i, p);
            let w = z * z;
            let pw = Complex64::new(y[2], y[3]) / (2.0 * z.conj());
            *y = [w.re, w.im, pw.re, pw.im];
            self.chart = ChartTag::FixedPoint(i);
        }
    }
}

impl Flow<4> for TorusFlow<'_> {
    fn rhs(&self, y: &[f64; 4]) -> Option<[f64; 4]> {
        let pi = [y[2], y[3]];
        let f = match self.chart {
            ChartTag::Bulk => self.bulk_fields(y[0], y[1])?.1,
            ChartTag::FixedPoint(i) => self.chart_fields(i, Complex64::new(y[0], y[1]))?,
        };
        Some(self.field_rhs(&f, pi))
    }

    fn post_step(&mut self, y: &mut [f64; 4]) {
        match self.chart {
            ChartTag::Bulk => {
                let p = self.canonical(y[0], y[1]);
                y[0] = p.u1;
                y[1] = p.u2;
                self.enter_chart_if_close(y);
            }
            ChartTag::FixedPoint(_) => {
                let exit = 1.5 * self.r0;
                if Complex64::new(y[0], y[1]).norm() > exit * exit {
                    let (u, pi) = self.to_torus(y);
                    *y = [u[0], u[1], pi[0], pi[1]];
                    self.chart = ChartTag::Bulk;
                }
            }
        }
    }
}

struct TorusRun<'a> {
    flow: TorusFlow<'a>,
    y: [f64; 4],
    k: f64,
}

impl<'a> TorusRun<'a> {
    fn new(spec: &'a SystemSpec, s: &PhaseState) -> Result<Self, DynamicsError> {
        let mut flow = TorusFlow::new(spec)?;
        let pi = kinetic(flow.m, spec.b, s);
        let p = flow.canonical(s.u1, s.u2);
        let mut y = [p.u1, p.u2, pi[0], pi[1]];
        flow.enter_chart_if_close(&mut y);
        if torus_local(flow.m, p.u1, p.u2).lambda <= 0.0 {
            return Err(DynamicsError::FixedPointSingularity(s.u1, s.u2));
        }
        Ok(Self {
            flow,
            y,
            k: spec.k().unwrap_or(0.0),
        })
    }

    fn observe(spec: &SystemSpec, flow: &TorusFlow, k: f64, y: &[f64; 4]) -> (PhaseState, f64, f64) {
        let (u, pi) = flow.to_torus(y);
        let l = torus_local(flow.m, u[0], u[1]);
        let a2 = gauge_a2_unchecked(flow.m, spec.b, u[0], u[1]);
        let s = PhaseState::new(u[0], u[1], pi[0], pi[1] + a2);
        (s, h_kinetic(spec, &l, pi), f_kinetic(spec, k, &l, pi))
    }
}

/// Advances a Case II state by `dt` with adaptive substeps of local error `tol`.
pub fn flow_step(spec: &SystemSpec, s: &PhaseState, dt: f64, tol: f64) -> Result<PhaseState, DynamicsError> {
    let mut run = TorusRun::new(spec, s)?;
    let mut stepper = Stepper::new(tol);
    stepper.advance(&mut run.flow, &mut run.y, dt, |_, _, _| {})?;
    Ok(TorusRun::observe(spec, &run.flow, run.k, &run.y).0)
}

/// Integrates a Case II state over `[0, t_end]`, recording every `stride`-th
/// accepted step and the final state.
pub fn integrate_torus(
    spec: &SystemSpec,
    s0: &PhaseState,
    t_end: f64,
    tol: f64,
    stride: usize,
) -> Result<Trajectory<PhaseState>, DynamicsError> {
    let mut run = TorusRun::new(spec, s0)?;
    let stride = stride.max(1);
    let mut traj = Trajectory::default();
    let (s, h, f) = TorusRun::observe(spec, &run.flow, run.k, &run.y);
    traj.push(0.0, s, h, f);
    let mut stepper = Stepper::new(tol);
    let mut count = 0usize;
    let k = run.k;
    stepper.advance(&mut run.flow, &mut run.y, t_end, |t, flow, y| {
        count += 1;
        if count.is_multiple_of(stride) || t >= t_end {
            let (s, h, f) = TorusRun::observe(spec, flow, k, y);
            traj.push(t, s, h, f);
        }
    })?;
    Ok(traj)
}

/// Random Case II state at distance at least `2 r0` from the fixed points,
/// with kinetic energy `|π|²/λ` in `[0.5, 2]`.
pub fn random_torus_state<R: Rng>(spec: &SystemSpec, rng: &mut R) -> Result<PhaseState, DynamicsError> {
    let m = spec.model()?;
    let r0 = atlas_radius(m);
    loop {
        let p = TorusPoint::new(rng.gen_range(0.0..4.0 * m.k1()), rng.gen_range(0.0..4.0 * m.k2()));
        if nearest_fixed_point(m, p).1 < 2.0 * r0 {
            continue;
        }
        let lambda = torus_local(m, p.u1, p.u2).lambda;
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let mag = (rng.gen_range(0.5..2.0) * lambda).sqrt();
        let (p1, pi2) = (mag * angle.cos(), mag * angle.sin());
        let a2 = gauge_a2_unchecked(m, spec.b, p.u1, p.u2);
        return Ok(PhaseState::new(p.u1, p.u2, p1, pi2 + a2));
    }
}

// ---------------------------------------------------------------- e(3)*

/// A Hamiltonian on `e(3)*` with its gradient and companion integral.
pub trait E3System {
    fn hamiltonian(&self, s: &E3State) -> f64;
    fn integral(&self, s: &E3State) -> f64;
    /// `(∂H/∂M, ∂H/∂x)`; `None` at singular points.
    fn gradient(&self, s: &E3State) -> Option<(Vector3<f64>, Vector3<f64>)>;
}

/// `H = |M|² - μ Σ α_i x_i²`, `F = Σ α_i M_i² + μ(α2α3 x1² + α1α3 x2² + α1α2 x3²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clebsch {
    pub alpha: [f64; 3],
    pub mu: f64,
}

impl E3System for Clebsch {
    fn hamiltonian(&self, s: &E3State) -> f64 {
        let a = self.alpha;
        s.m.norm_squared() - self.mu * (0..3).map(|i| a[i] * s.x[i] * s.x[i]).sum::<f64>()
    }

    fn integral(&self, s: &E3State) -> f64 {
        let a = self.alpha;
        let kin: f64 = (0..3).map(|i| a[i] * s.m[i] * s.m[i]).sum();
        let pot = a[1] * a[2] * s.x[0] * s.x[0] + a[0] * a[2] * s.x[1] * s.x[1] + a[0] * a[1] * s.x[2] * s.x[2];
        kin + self.mu * pot
    }

    fn gradient(&self, s: &E3State) -> Option<(Vector3<f64>, Vector3<f64>)> {
        let a = self.alpha;
        let gx = Vector3::new(a[0] * s.x[0], a[1] * s.x[1], a[2] * s.x[2]) * (-2.0 * self.mu);
        Some((2.0 * s.m, gx))
    }
}

/// Two-centre system:
/// `H = ½|M|² - μ|q|/√R`,
/// `F = A M1² + B M2² + (2√(AB)/|q|)(M, q) M3 - 2μ√(AB) q3/√R`,
/// `R = A q2² + B q1² + (A + B) q3² - 2√(AB)|q| q3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoCentre {
    pub a: f64,
    pub b: f64,
    pub mu: f64,
}

/// Position `q = c + d` stored as an anchor `c` (zero or a centre) and an
/// offset `d`, with the derived quantities the two-centre terms need.
#[derive(Debug, Clone, Copy)]
struct Anchored {
    q: Vector3<f64>,
    n: f64,
    /// `√A q3 - √B |q|`.
    lin: f64,
    r: f64,
}

impl TwoCentre {
    /// `R` in the cancellation-free form `(√A q3 - √B |q|)² + (A - B) q2²`,
    /// which vanishes exactly at the two centres.
    pub fn r(&self, q: &Vector3<f64>) -> f64 {
        self.anchored(None, q).r
    }

    /// The Coulomb centres `(±√(1 - B/A), 0, √(B/A))` on the unit sphere.
    pub fn centres(&self) -> [Vector3<f64>; 2] {
        let c3 = (self.b / self.a).sqrt();
        let c1 = (1.0 - self.b / self.a).sqrt();
        [Vector3::new(c1, 0.0, c3), Vector3::new(-c1, 0.0, c3)]
    }

    /// With an anchor `c` on a centre of the sphere of radius `ρ`,
    /// `√A c3 = √B ρ` and `|c| = ρ`, so
    /// `√A q3 - √B |q| = √A d3 - √B (2c·d + |d|²)/(ρ + |q|)` keeps full
    /// relative precision as `d → 0`.
    fn anchored(&self, anchor: Option<(&Vector3<f64>, f64)>, d: &Vector3<f64>) -> Anchored {
        let (sa, sb) = (self.a.sqrt(), self.b.sqrt());
        let (q, n, lin) = match anchor {
            None => {
                let n = d.norm();
                (*d, n, sa * d[2] - sb * n)
            }
            Some((c, rho)) => {
                let q = c + d;
                let n = q.norm();
                (q, n, sa * d[2] - sb * (2.0 * c.dot(d) + d.norm_squared()) / (rho + n))
            }
        };
        let r = lin * lin + (self.a - self.b) * q[1] * q[1];
        Anchored { q, n, lin, r }
    }

    fn h_at(&self, m: &Vector3<f64>, g: &Anchored) -> f64 {
        0.5 * m.norm_squared() - self.mu * g.n / g.r.sqrt()
    }

    fn f_at(&self, m: &Vector3<f64>, g: &Anchored) -> f64 {
        let sab = (self.a * self.b).sqrt();
        self.a * m[0] * m[0] + self.b * m[1] * m[1] + 2.0 * sab / g.n * m.dot(&g.q) * m[2]
            - 2.0 * self.mu * sab * g.q[2] / g.r.sqrt()
    }

    fn grad_x_at(&self, g: &Anchored) -> Option<Vector3<f64>> {
        if !(g.r > 0.0) || g.n == 0.0 {
            return None;
        }
        let (sa, sb) = (self.a.sqrt(), self.b.sqrt());
        let mut grad_r = g.q * (-2.0 * g.lin * sb / g.n);
        grad_r[2] += 2.0 * g.lin * sa;
        grad_r[1] += 2.0 * (self.a - self.b) * g.q[1];
        let sr = g.r.sqrt();
        Some(-self.mu * (g.q / (g.n * sr) - grad_r * (0.5 * g.n / (g.r * sr))))
    }
}

impl E3System for TwoCentre {
    fn hamiltonian(&self, s: &E3State) -> f64 {
        self.h_at(&s.m, &self.anchored(None, &s.x))
    }

    fn integral(&self, s: &E3State) -> f64 {
        self.f_at(&s.m, &self.anchored(None, &s.x))
    }

    fn gradient(&self, s: &E3State) -> Option<(Vector3<f64>, Vector3<f64>)> {
        let gx = self.grad_x_at(&self.anchored(None, &s.x))?;
        Some((s.m, gx))
    }
}
fn clebsch_of(spec: &SystemSpec) -> Result<Clebsch, DynamicsError> {
    match spec.geometry {
        Geometry::Stackel { alpha, .. } => Ok(Clebsch { alpha, mu: spec.mu }),
        _ => Err(FieldError::WrongFamily(spec.family()).into()),
    }
}

fn two_centre_of(spec: &SystemSpec) -> Result<TwoCentre, DynamicsError> {
    match spec.geometry {
        Geometry::TwoCentre { vy_a, vy_b } => Ok(TwoCentre {
            a: vy_a,
            b: vy_b,
            mu: spec.mu,
        }),
        _ => Err(FieldError::WrongFamily(spec.family()).into()),
    }
}

pub fn clebsch_eval(spec: &SystemSpec, s: &E3State) -> Result<(f64, f64), DynamicsError> {
    let c = clebsch_of(spec)?;
    Ok((c.hamiltonian(s), c.integral(s)))
}

pub fn vy_eval(spec: &SystemSpec, s: &E3State) -> Result<(f64, f64), DynamicsError> {
    let c = two_centre_of(spec)?;
    let r = c.r(&s.x);
    if !(r > 0.0) {
        return Err(DynamicsError::CenterSingularity(r));
    }
    Ok((c.hamiltonian(s), c.integral(s)))
}

/// Lie–Poisson bracket
/// `{a, b} = M·(∇_M a × ∇_M b) + x·(∇_M a × ∇_x b + ∇_x a × ∇_M b)`
/// with gradients by central differences and one Richardson step.
pub fn lie_poisson_bracket<A, B>(a: A, b: B, s: &E3State, h: f64) -> f64
where
    A: Fn(&E3State) -> f64,
    B: Fn(&E3State) -> f64,
{
    let (am, ax) = fd_gradient6(&a, s, h);
    let (bm, bx) = fd_gradient6(&b, s, h);
    lie_poisson_from_gradients(s, (am, ax), (bm, bx))
}

type Grad6 = (Vector3<f64>, Vector3<f64>);

pub fn lie_poisson_from_gradients(s: &E3State, a: Grad6, b: Grad6) -> f64 {
    s.m.dot(&a.0.cross(&b.0)) + s.x.dot(&(a.0.cross(&b.1) + a.1.cross(&b.0)))
}

/// Gradient with respect to `(M, x)`.
pub fn fd_gradient6<A: Fn(&E3State) -> f64>(a: &A, s: &E3State, h: f64) -> Grad6 {
    let base = s.to_array();
    let mut g = [0.0; 6];
    for (i, gi) in g.iter_mut().enumerate() {
        let eval = |d: f64| {
            let mut v = base;
            v[i] += d;
            a(&E3State::from_array(&v))
        };
        let c = |h: f64| (eval(h) - eval(-h)) / (2.0 * h);
        *gi = (4.0 * c(0.5 * h) - c(h)) / 3.0;
    }
    (Vector3::new(g[0], g[1], g[2]), Vector3::new(g[3], g[4], g[5]))
}

struct E3Flow<'a, S: E3System> {
    sys: &'a S,
    c1: f64,
    nu: f64,
}

impl<S: E3System> Flow<6> for E3Flow<'_, S> {
    fn rhs(&self, y: &[f64; 6]) -> Option<[f64; 6]> {
        let s = E3State::from_array(y);
        let (gm, gx) = self.sys.gradient(&s)?;
        let md = gm.cross(&s.m) + gx.cross(&s.x);
        let xd = gm.cross(&s.x);
        Some([md[0], md[1], md[2], xd[0], xd[1], xd[2]])
    }

    /// Restores `|x|² = C1` and `(M, x) = ν`.
    fn post_step(&mut self, y: &mut [f64; 6]) {
        let mut s = E3State::from_array(y);
        s.x *= (self.c1 / s.x.norm_squared()).sqrt();
        let shift = (self.nu - s.m.dot(&s.x)) / s.x.norm_squared();
        s.m += s.x * shift;
        *y = s.to_array();
    }
}

fn integrate_e3_with<S: E3System>(
    sys: &S,
    s0: &E3State,
    t_end: f64,
    tol: f64,
    stride: usize,
) -> Result<Trajectory<E3State>, DynamicsError> {
    let (c1, nu) = s0.casimirs();
    let mut flow = E3Flow { sys, c1, nu };
    let mut y = s0.to_array();
    let mut traj = Trajectory::default();
    let record = |traj: &mut Trajectory<E3State>, t: f64, s: E3State| {
        traj.casimirs.push(s.casimirs());
        traj.push(t, s, sys.hamiltonian(&s), sys.integral(&s));
    };
    record(&mut traj, 0.0, *s0);
    let stride = stride.max(1);
    let mut count = 0usize;
    Stepper::new(tol).advance(&mut flow, &mut y, t_end, |t, _, y| {
        count += 1;
        if count.is_multiple_of(stride) || t >= t_end {
            record(&mut traj, t, E3State::from_array(y));
        }
    })?;
    Ok(traj)
}

/// Two-centre flow in the Sundman time `ds = dt / g`, `g = R/(R + ρ0²)`.
/// Close to a centre `g ~ R`, so `dM/ds` and `dx/ds` stay bounded as the
/// orbit grazes the centre; far away `g → 1`. Inside the disk
/// `R < R_IN` around a centre the position is stored as the offset from that
/// centre, so that it keeps full relative precision. Component 6 is the
/// physical time.
struct TimedTwoCentre<'a> {
    sys: &'a TwoCentre,
    c1: f64,
    nu: f64,
    anchor: Option<Vector3<f64>>,
}

const SUNDMAN_RHO0: f64 = 0.1;
const R_IN: f64 = 1e-2;
const R_OUT: f64 = 4e-2;

impl TimedTwoCentre<'_> {
    fn geometry(&self, y: &[f64]) -> Anchored {
        let rho = self.c1.sqrt();
        self.sys.anchored(self.anchor.as_ref().map(|c| (c, rho)), &Vector3::new(y[3], y[4], y[5]))
    }

    fn state(&self, y: &[f64; 7]) -> E3State {
        let g = self.geometry(y);
        E3State {
            m: Vector3::new(y[0], y[1], y[2]),
            x: g.q,
        }
    }

    fn observe(&self, y: &[f64; 7]) -> (E3State, f64, f64) {
        let g = self.geometry(y);
        let m = Vector3::new(y[0], y[1], y[2]);
        (E3State { m, x: g.q }, self.sys.h_at(&m, &g), self.sys.f_at(&m, &g))
    }

    fn set_position(&self, y: &mut [f64; 7], d: Vector3<f64>) {
        y[3..6].copy_from_slice(d.as_slice());
    }
}

impl Flow<7> for TimedTwoCentre<'_> {
    fn rhs(&self, y: &[f64; 7]) -> Option<[f64; 7]> {
        let g = self.geometry(y);
        let m = Vector3::new(y[0], y[1], y[2]);
        let gx = self.sys.grad_x_at(&g)?;
        let clock = g.r / (g.r + SUNDMAN_RHO0 * SUNDMAN_RHO0);
        let md = (m.cross(&m) + gx.cross(&g.q)) * clock;
        let xd = m.cross(&g.q) * clock;
        Some([md[0], md[1], md[2], xd[0], xd[1], xd[2], clock])
    }

    /// Energy-weighted scale: an error `δx` moves the potential by about
    /// `δx / R` and `δM` moves the kinetic term by `|M| δM`, so both are
    /// tightened near a centre.
    fn error_scale(&self, y: &[f64; 7], next: &[f64; 7]) -> [f64; 7] {
        let r = self.geometry(y).r;
        let wx = r / (r + 1.0);
        let m = Vector3::new(y[0], y[1], y[2]).norm().max(Vector3::new(next[0], next[1], next[2]).norm());
        let wm = 1.0 / (1.0 + m);
        [wm, wm, wm, wx, wx, wx, 1.0 + y[6].abs()]
    }

    /// Restores `|x|² = C1`, `(M, x) = ν` and updates the anchor.
    fn post_step(&mut self, y: &mut [f64; 7]) {
        let g = self.geometry(y);
        let rho = self.c1.sqrt();
        let d = Vector3::new(y[3], y[4], y[5]);
        let d = match self.anchor {
            // ρq/|q| - c = (ρd + c (ρ - |q|)) / |q|, with ρ - |q| from the offset
            Some(c) => (d * rho - c * ((2.0 * c.dot(&d) + d.norm_squared()) / (rho + g.n))) / g.n,
            None => g.q * (rho / g.n),
        };
        self.set_position(y, d);
        let s = self.state(y);
        let shift = (self.nu - s.m.dot(&s.x)) / s.x.norm_squared();
        for i in 0..3 {
            y[i] += s.x[i] * shift;
        }
        let r = self.geometry(y).r;
        match self.anchor {
            None if r < R_IN * self.c1 => {
                let q = self.state(y).x;
                let c = self
                    .sys
                    .centres()
                    .map(|c| c * rho)
                    .into_iter()
                    .min_by(|a, b| (q - a).norm().total_cmp(&(q - b).norm()))
                    .unwrap();
                self.anchor = Some(c);
                self.set_position(y, q - c);
            }
            Some(_) if r > R_OUT * self.c1 => {
                let q = self.state(y).x;
                self.anchor = None;
                self.set_position(y, q);
            }
            _ => {}
        }
    }
}

fn integrate_two_centre(
    sys: &TwoCentre,
    s0: &E3State,
    t_end: f64,
    tol: f64,
    stride: usize,
) -> Result<Trajectory<E3State>, DynamicsError> {
    let (c1, nu) = s0.casimirs();
    let mut flow = TimedTwoCentre { sys, c1, nu, anchor: None };
    let z = s0.to_array();
    let mut y = [z[0], z[1], z[2], z[3], z[4], z[5], 0.0];
    let mut traj = Trajectory::default();
    let record = |traj: &mut Trajectory<E3State>, flow: &TimedTwoCentre, y: &[f64; 7]| {
        let (s, h, f) = flow.observe(y);
        traj.casimirs.push(s.casimirs());
        traj.push(y[6], s, h, f);
    };
    // anchors a start inside a centre disk
    flow.post_step(&mut y);
    record(&mut traj, &flow, &y);
    let stride = stride.max(1);
    let mut count = 0usize;
    Stepper::new(tol).advance_clock(&mut flow, &mut y, 6, t_end, |flow, y| {
        count += 1;
        if count.is_multiple_of(stride) || y[6] >= t_end {
            record(&mut traj, flow, y);
        }
    })?;
    Ok(traj)
}
fn e3_system_dispatch<T>(
    spec: &SystemSpec,
    clebsch: impl FnOnce(&Clebsch) -> Result<T, DynamicsError>,
    two: impl FnOnce(&TwoCentre) -> Result<T, DynamicsError>,
) -> Result<T, DynamicsError> {
    match spec.geometry {
        Geometry::Stackel { .. } => clebsch(&clebsch_of(spec)?),
        Geometry::TwoCentre { .. } => two(&two_centre_of(spec)?),
        _ => Err(FieldError::WrongFamily(spec.family()).into()),
    }
}

/// Integrates `Ṁ = ∂_M H × M + ∂_x H × x`, `ẋ = ∂_M H × x` with a Casimir
/// projection after every accepted step.
pub fn integrate_e3(
    spec: &SystemSpec,
    s0: &E3State,
    t_end: f64,
    tol: f64,
    stride: usize,
) -> Result<Trajectory<E3State>, DynamicsError> {
    e3_system_dispatch(
        spec,
        |c| integrate_e3_with(c, s0, t_end, tol, stride),
        |c| integrate_two_centre(c, s0, t_end, tol, stride),
    )
}

/// Advances an `e(3)*` state by `dt` on its symplectic leaf.
pub fn e3_flow_step(spec: &SystemSpec, s: &E3State, dt: f64, tol: f64) -> Result<E3State, DynamicsError> {
    let traj = integrate_e3(spec, s, dt, tol, usize::MAX)?;
    Ok(*traj.states.last().unwrap())
}

/// Random point of the leaf `|x| = 1`, `(M, x) = ν` with `|M_⊥| ≤ 1`, at
/// least `0.2` away (in `R`) from any Coulomb centre of `avoid`.
pub fn random_e3_state<R: Rng>(rng: &mut R, nu: f64, avoid: Option<&TwoCentre>) -> E3State {
    loop {
        let x = loop {
            let v = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let n = v.norm();
            if n > 0.1 && n <= 1.0 {
                break v / n;
            }
        };
        if let Some(tc) = avoid {
            if tc.r(&x) < 0.2 {
                continue;
            }
        }
        let v = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let perp = v - x * v.dot(&x);
        return E3State { m: perp + x * nu, x };
    }
}

// ---------------------------------------------------------------- limit

fn limit_of(spec: &SystemSpec) -> Result<&LimitModel, DynamicsError> {
    match &spec.geometry {
        Geometry::Limit(lm) => Ok(lm),
        _ => Err(FieldError::WrongFamily(spec.family()).into()),
    }
}

/// `H = c/(4λ₀) (p1 - A1(u2))² + p2²/λ₀ + μ/(β1 + Q2)`, `λ₀ = β1² - Q2²`.
pub fn limit_h(spec: &SystemSpec, s: &PhaseState) -> Result<f64, DynamicsError> {
    let lm = limit_of(spec)?;
    let q = lm.q2(s.u2);
    let l0 = lm.beta1 * lm.beta1 - q * q;
    if !(l0 > 0.0) {
        return Err(DynamicsError::FixedPointSingularity(s.u1, s.u2));
    }
    let a1 = limit_gauge_a1(lm, spec.b, s.u2);
    Ok(lm.c / (4.0 * l0) * (s.p1 - a1).powi(2) + s.p2 * s.p2 / l0 + spec.mu / (lm.beta1 + q))
}

struct LimitFlow<'a> {
    lm: &'a LimitModel,
    mu: f64,
    b: f64,
}

impl Flow<4> for LimitFlow<'_> {
    fn rhs(&self, y: &[f64; 4]) -> Option<[f64; 4]> {
        let lm = self.lm;
        let (q, dq) = (lm.q2(y[1]), lm.dq2(y[1]));
        let l0 = lm.beta1 * lm.beta1 - q * q;
        if !(l0 > 0.0) {
            return None;
        }
        let pi1 = y[2] - limit_gauge_a1(lm, self.b, y[1]);
        let dl0 = -2.0 * q * dq;
        let kin = 0.25 * lm.c * pi1 * pi1 + y[3] * y[3];
        let p2dot = dl0 / (l0 * l0) * kin - self.b * lm.c.sqrt() * pi1 + self.mu * dq / (lm.beta1 + q).powi(2);
        Some([lm.c * pi1 / (2.0 * l0), 2.0 * y[3] / l0, 0.0, p2dot])
    }
}

/// Integrates the cylinder system; `F = p1` is recorded as the integral.
pub fn integrate_limit(
    spec: &SystemSpec,
    s0: &PhaseState,
    t_end: f64,
    tol: f64,
    stride: usize,
) -> Result<Trajectory<PhaseState>, DynamicsError> {
    let lm = limit_of(spec)?;
    let mut flow = LimitFlow {
        lm,
        mu: spec.mu,
        b: spec.b,
    };
    let mut y = [s0.u1, s0.u2, s0.p1, s0.p2];
    let mut traj = Trajectory::default();
    traj.push(0.0, *s0, limit_h(spec, s0)?, s0.p1);
    let stride = stride.max(1);
    let mut count = 0usize;
    let mut failure = None;
    Stepper::new(tol).advance(&mut flow, &mut y, t_end, |t, _, y| {
        count += 1;
        if count.is_multiple_of(stride) || t >= t_end {
            let s = PhaseState::new(y[0], y[1], y[2], y[3]);
            match limit_h(spec, &s) {
                Ok(h) => traj.push(t, s, h, s.p1),
                Err(e) => failure = Some(e),
            }
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(traj),
    }
}

/// Advances the cylinder system by `dt`.
pub fn limit_system_step(spec: &SystemSpec, s: &PhaseState, dt: f64, tol: f64) -> Result<PhaseState, DynamicsError> {
    let traj = integrate_limit(spec, s, dt, tol, usize::MAX)?;
    Ok(*traj.states.last().unwrap())
}

/// Random cylinder state with `u2` within `2/√c` of the symmetry centre.
pub fn random_limit_state<R: Rng>(spec: &SystemSpec, rng: &mut R) -> Result<PhaseState, DynamicsError> {
    let lm = limit_of(spec)?;
    let w = 2.0 / lm.c.sqrt();
    let u2 = lm.delta + rng.gen_range(-w..w);
    let a1 = limit_gauge_a1(lm, spec.b, u2);
    Ok(PhaseState::new(
        rng.gen_range(0.0..std::f64::consts::TAU),
        u2,
        a1 + rng.gen_range(-0.5..0.5),
        rng.gen_range(-0.5..0.5),
    ))
}
