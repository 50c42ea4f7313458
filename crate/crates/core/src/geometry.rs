//! Metrics, curvature, charts, Neumann coordinates and area/flux integrals.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::elliptic::{EllipticModel, LimitModel};
use crate::fields::{stackel_cubic, Geometry, SystemSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("coordinates coincide (q1 = q2 = {0})")]
    DegenerateCoordinates(f64),
    #[error("metric is not positive definite: g11 = {g11}, g22 = {g22}")]
    WrongSignature { g11: f64, g22: f64 },
    #[error("degenerate point ({0}, {1})")]
    DegeneratePoint(f64, f64),
    #[error("finite-difference stencil leaves the chart near ({0}, {1})")]
    StencilOutsideChart(f64, f64),
    #[error("|w| = {0} exceeds the chart radius {1}")]
    ChartOverflow(f64, f64),
    #[error("coordinates violate α1 > q1 > α2 > q2 > α3")]
    InterlacingViolated,
    #[error("point lies on a coordinate axis")]
    AxisPoint,
    #[error("coordinate must satisfy q1 > 0 > q2, got ({0}, {1})")]
    NonPositiveCoordinate(f64, f64),
    #[error("no closed-form curvature for this family")]
    UnsupportedFamily,
}

/// Point of the torus `R² / (4K1 Z ⊕ 4K2 Z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusPoint {
    pub u1: f64,
    pub u2: f64,
}

impl TorusPoint {
    pub fn new(u1: f64, u2: f64) -> Self {
        Self { u1, u2 }
    }

    /// Representative in `[0, 4K1) × [0, 4K2)`.
    pub fn canonical(self, model: &EllipticModel) -> Self {
        Self {
            u1: wrap(self.u1, 4.0 * model.k1()),
            u2: wrap(self.u2, 4.0 * model.k2()),
        }
    }

    /// The involution `σ(u) = -u`.
    pub fn sigma(self) -> Self {
        Self {
            u1: -self.u1,
            u2: -self.u2,
        }
    }
}

fn wrap(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Signed displacement `x - c` reduced to `[-period/2, period/2)`.
fn periodic_offset(x: f64, c: f64, period: f64) -> f64 {
    (x - c + 0.5 * period).rem_euclid(period) - 0.5 * period
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartTag {
    Bulk,
    FixedPoint(usize),
}

/// A `σ`-orbit of torus points, i.e. a point of the quotient sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    /// Lexicographically smaller canonical member of `{p, σ(p)}`.
    pub rep: TorusPoint,
    pub chart: ChartTag,
}

impl SpherePoint {
    pub fn from_torus(model: &EllipticModel, p: TorusPoint) -> Self {
        let a = p.canonical(model);
        let b = p.sigma().canonical(model);
        let rep = if (a.u1, a.u2) <= (b.u1, b.u2) { a } else { b };
        let chart = match nearest_fixed_point(model, rep) {
            (i, d) if d < atlas_radius(model) => ChartTag::FixedPoint(i),
            _ => ChartTag::Bulk,
        };
        Self { rep, chart }
    }
}

/// The four fixed points of `σ`: `(0,0)`, `(2K1,0)`, `(0,2K2)`, `(2K1,2K2)`.
pub fn fixed_points(model: &EllipticModel) -> [TorusPoint; 4] {
    let (a, b) = (2.0 * model.k1(), 2.0 * model.k2());
    [
        TorusPoint::new(0.0, 0.0),
        TorusPoint::new(a, 0.0),
        TorusPoint::new(0.0, b),
        TorusPoint::new(a, b),
    ]
}

/// Radius of the coordinate disks around the fixed points, `min(K1, K2) / 8`.
pub fn atlas_radius(model: &EllipticModel) -> f64 {
    model.k1().min(model.k2()) / 8.0
}

/// Displacement `z = u - c_i` from fixed point `i`, reduced periodically.
pub fn offset_from_fixed_point(model: &EllipticModel, index: usize, p: TorusPoint) -> Complex64 {
    let c = fixed_points(model)[index];
    Complex64::new(
        periodic_offset(p.u1, c.u1, 4.0 * model.k1()),
        periodic_offset(p.u2, c.u2, 4.0 * model.k2()),
    )
}

/// Index and distance of the closest fixed point.
pub fn nearest_fixed_point(model: &EllipticModel, p: TorusPoint) -> (usize, f64) {
    (0..4)
        .map(|i| (i, offset_from_fixed_point(model, i, p).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
}

/// Diagonal metric components. `lambda` is the area density `√(g11 g22)`,
/// which is the conformal factor whenever `g11 = g22`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSample {
    pub g11: f64,
    pub g22: f64,
    pub lambda: f64,
}

impl MetricSample {
    pub fn conformal(lambda: f64) -> Self {
        Self {
            g11: lambda,
            g22: lambda,
            lambda,
        }
    }

    pub fn diagonal(g11: f64, g22: f64) -> Self {
        Self {
            g11,
            g22,
            lambda: (g11 * g22).max(0.0).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeumannConstants {
    pub alpha: [f64; 3],
}

/// `ds² = (q1-q2)/f(q1) dq1² + (q2-q1)/f(q2) dq2²`.
pub fn stackel_metric<F: Fn(f64) -> f64>(f: F, q1: f64, q2: f64) -> Result<MetricSample, GeometryError> {
    if q1 == q2 {
        return Err(GeometryError::DegenerateCoordinates(q1));
    }
    let g11 = (q1 - q2) / f(q1);
    let g22 = (q2 - q1) / f(q2);
    if !(g11 > 0.0 && g22 > 0.0) {
        return Err(GeometryError::WrongSignature { g11, g22 });
    }
    Ok(MetricSample::diagonal(g11, g22))
}

/// `Q1² - Q2²` evaluated from offsets to `β2`, accurate near the fixed points.
pub fn torus_lambda(model: &EllipticModel, u1: f64, u2: f64) -> f64 {
    let (o1, o2) = (model.slice1(u1).offset, model.slice2(u2).offset);
    let b2 = model.beta()[1];
    ((o1 - o2) * (2.0 * b2 + o1 + o2)).max(0.0)
}

/// `ds² = (Q1² - Q2²)(du1² + du2²)`.
pub fn torus_metric(model: &EllipticModel, p: TorusPoint) -> MetricSample {
    MetricSample::conformal(torus_lambda(model, p.u1, p.u2))
}

/// Gaussian curvature from the closed forms: `-a3/4` for the Stäckel sphere
/// and `-a3/4 + a0/(8 (x1 + x2)³)` on the elliptic torus, `x_i = Q_i`.
pub fn curvature_closed(system: &SystemSpec, point: [f64; 2]) -> Result<f64, GeometryError> {
    match &system.geometry {
        Geometry::Stackel { a3, .. } => {
            if point[0] == point[1] {
                return Err(GeometryError::DegeneratePoint(point[0], point[1]));
            }
            Ok(-a3 / 4.0)
        }
        Geometry::Elliptic(m) => {
            if torus_lambda(m, point[0], point[1]) <= 0.0 {
                return Err(GeometryError::DegeneratePoint(point[0], point[1]));
            }
            let p = m.params();
            let s = m.q1(point[0]) + m.q2(point[1]);
            Ok(-p.a3 / 4.0 + p.a0 / (8.0 * s * s * s))
        }
        Geometry::Limit(_) | Geometry::TwoCentre { .. } => Err(GeometryError::UnsupportedFamily),
    }
}

fn second_difference<F: Fn(f64) -> f64>(f: F, h: f64) -> f64 {
    (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h)
}

fn first_difference<F: Fn(f64) -> f64>(f: F, h: f64) -> f64 {
    (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h)
}

/// Default finite-difference step for [`curvature_numeric`] in the built-in
/// coordinates.
pub const CURVATURE_STEP: f64 = 5e-4;

/// Gaussian curvature by finite differences of a diagonal metric.
///
/// Conformal samples use `-Δ ln λ / (2λ)` with five-point stencils and one
/// Richardson step; general orthogonal metrics use Brioschi's formula
/// `K = -1/(2√(EG)) [∂1(G_1/√(EG)) + ∂2(E_2/√(EG))]`.
pub fn curvature_numeric<S>(sampler: S, point: [f64; 2], h: f64) -> Result<f64, GeometryError>
where
    S: Fn(f64, f64) -> MetricSample,
{
    let [x, y] = point;
    let probe = |a: f64, b: f64| -> Result<MetricSample, GeometryError> {
        let m = sampler(a, b);
        if m.g11 > 0.0 && m.g22 > 0.0 && m.g11.is_finite() && m.g22.is_finite() {
            Ok(m)
        } else {
            Err(GeometryError::StencilOutsideChart(x, y))
        }
    };
    for i in -4..=4 {
        let s = i as f64 * h;
        probe(x + s, y)?;
        probe(x, y + s)?;
        probe(x + s, y + s)?;
        probe(x + s, y - s)?;
    }
    let centre = probe(x, y)?;
    if centre.g11 == centre.g22 {
        let ln = |a: f64, b: f64| sampler(a, b).g11.ln();
        let lap = |h: f64| {
            second_difference(|s| ln(x + s, y), h) + second_difference(|s| ln(x, y + s), h)
        };
        let (coarse, fine) = (lap(h), lap(0.5 * h));
        let lap = (16.0 * fine - coarse) / 15.0;
        Ok(-lap / (2.0 * centre.g11))
    } else {
        let root = |a: f64, b: f64| {
            let m = sampler(a, b);
            (m.g11 * m.g22).sqrt()
        };
        let term1 = |a: f64, b: f64| first_difference(|s| sampler(a + s, b).g22, h) / root(a, b);
        let term2 = |a: f64, b: f64| first_difference(|s| sampler(a, b + s).g11, h) / root(a, b);
        let div = first_difference(|s| term1(x + s, y), h) + first_difference(|s| term2(x, y + s), h);
        Ok(-div / (2.0 * root(x, y)))
    }
}

/// Metric coefficient `μ_w = λ / (4|w|)` in the quotient coordinate `w = z²`
/// centred at fixed point `index`, with `z = √w` on the torus.
pub fn fixed_point_chart(model: &EllipticModel, index: usize, w: Complex64) -> Result<MetricSample, GeometryError> {
    let radius = (model.k1() * model.k2()).sqrt() / 4.0;
    let r = w.norm();
    if r > radius || index > 3 {
        return Err(GeometryError::ChartOverflow(r, radius));
    }
    if r == 0.0 {
        return Ok(MetricSample::conformal(
            0.5 * model.turning_coefficient() * model.beta()[1],
        ));
    }
    let c = fixed_points(model)[index];
    let z = w.sqrt();
    let lambda = torus_lambda(model, c.u1 + z.re, c.u2 + z.im);
    Ok(MetricSample::conformal(lambda / (4.0 * r)))
}

/// Uniform random coordinate point for the curvature checks: Case I points
/// stay 5% inside the Stäckel cell, Case II points stay outside the atlas
/// radius of every fixed point.
pub fn random_regular_point<R: rand::Rng>(system: &SystemSpec, rng: &mut R) -> Result<[f64; 2], GeometryError> {
    match &system.geometry {
        Geometry::Stackel { alpha, .. } => {
            let t1 = rng.gen_range(0.05..0.95);
            let t2 = rng.gen_range(0.05..0.95);
            Ok([alpha[1] + t1 * (alpha[0] - alpha[1]), alpha[2] + t2 * (alpha[1] - alpha[2])])
        }
        Geometry::Elliptic(m) => loop {
            let p = TorusPoint::new(rng.gen_range(0.0..4.0 * m.k1()), rng.gen_range(0.0..4.0 * m.k2()));
            if nearest_fixed_point(m, p).1 > atlas_radius(m) {
                return Ok([p.u1, p.u2]);
            }
        },
        Geometry::Limit(_) | Geometry::TwoCentre { .. } => Err(GeometryError::UnsupportedFamily),
    }
}

/// Diagonal metric of a Case I or Case II system at a coordinate point;
/// NaN components outside the chart.
pub fn system_metric(system: &SystemSpec, a: f64, b: f64) -> MetricSample {
    let nan = MetricSample { g11: f64::NAN, g22: f64::NAN, lambda: f64::NAN };
    match &system.geometry {
        Geometry::Stackel { alpha, a3 } => {
            stackel_metric(|q| crate::fields::stackel_cubic(alpha, *a3, q), a, b).unwrap_or(nan)
        }
        Geometry::Elliptic(m) => torus_metric(m, TorusPoint::new(a, b)),
        Geometry::Limit(_) | Geometry::TwoCentre { .. } => nan,
    }
}

/// Area of the quotient sphere and the flux number `B·area / 2π`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FluxReport {
    pub area: f64,
    pub flux_over_2pi: f64,
    pub nearest_integer: f64,
    pub gap: f64,
}

impl FluxReport {
    fn new(area: f64, b: f64) -> Self {
        let flux = b * area / (2.0 * PI);
        let nearest = flux.round();
        Self {
            area,
            flux_over_2pi: flux,
            nearest_integer: nearest,
            gap: (flux - nearest).abs(),
        }
    }
}

/// Midpoint rule for `∫ λ du1 du2` over the half domain `[0, 2K1) × [0, 4K2)`,
/// a fundamental domain of `σ`. The integrand is periodic and smooth, so the
/// rule converges spectrally. Since `λ` separates, the `n × n` sum is formed
/// from two `n`-point sums.
pub fn area_and_flux(model: &EllipticModel, b: f64, n: usize) -> FluxReport {
    let n = n.max(1);
    let (l1, l2) = (2.0 * model.k1(), 4.0 * model.k2());
    let (h1, h2) = (l1 / n as f64, l2 / n as f64);
    let s1: f64 = (0..n).map(|i| model.q1((i as f64 + 0.5) * h1).powi(2)).sum();
    let s2: f64 = (0..n).map(|j| model.q2((j as f64 + 0.5) * h2).powi(2)).sum();
    let area = (n as f64 * s1 - n as f64 * s2) * h1 * h2;
    FluxReport::new(area, b)
}

/// Area of the Stäckel sphere `f(q) = -a3 Π(α_i - q)`: eight copies of
/// `∫∫ (q1 - q2)/√(-f(q1) f(q2))`, integrated in angles `q = m + r cos θ`
/// that absorb the square-root endpoint singularities.
pub fn area_and_flux_stackel(alpha: [f64; 3], a3: f64, b: f64, n: usize) -> FluxReport {
    let n = n.max(1);
    let [a1, a2, a3r] = alpha;
    let (m1, r1) = (0.5 * (a1 + a2), 0.5 * (a1 - a2));
    let (m2, r2) = (0.5 * (a2 + a3r), 0.5 * (a2 - a3r));
    let h = PI / n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        let q1 = m1 + r1 * ((i as f64 + 0.5) * h).cos();
        for j in 0..n {
            let q2 = m2 + r2 * ((j as f64 + 0.5) * h).cos();
            sum += (q1 - q2) / ((q1 - a3r) * (a1 - q2)).sqrt();
        }
    }
    let area = 8.0 * sum * h * h / a3.abs();
    FluxReport::new(area, b)
}

/// `x_i² = Π_j (α_i - q_j) / Π_{k≠i} (α_i - α_k)`, with sign bits `signs[i]`
/// (`true` for negative components).
pub fn neumann_to_cartesian(
    c: &NeumannConstants,
    q1: f64,
    q2: f64,
    signs: [bool; 3],
) -> Result<[f64; 3], GeometryError> {
    let a = c.alpha;
    if !(a[0] >= q1 && q1 >= a[1] && a[1] >= q2 && q2 >= a[2] && q1 > q2) {
        return Err(GeometryError::InterlacingViolated);
    }
    let mut x = [0.0; 3];
    for i in 0..3 {
        let mut den = 1.0;
        for k in 0..3 {
            if k != i {
                den *= a[i] - a[k];
            }
        }
        let sq = ((a[i] - q1) * (a[i] - q2) / den).max(0.0);
        x[i] = if signs[i] { -sq.sqrt() } else { sq.sqrt() };
    }
    Ok(x)
}

/// Roots `q1 > q2` of `q² - S q + P = 0`, with
/// `S = Σ (α_j + α_k) x_i²` and `P = Σ α_j α_k x_i²`.
pub fn cartesian_to_neumann(c: &NeumannConstants, x: [f64; 3]) -> Result<(f64, f64), GeometryError> {
    let a = c.alpha;
    if !(a[0] > a[1] && a[1] > a[2]) {
        return Err(GeometryError::InterlacingViolated);
    }
    let zeros = x.iter().filter(|v| v.abs() < 1e-14).count();
    if zeros >= 2 {
        return Err(GeometryError::AxisPoint);
    }
    let [x1, x2, x3] = [x[0] * x[0], x[1] * x[1], x[2] * x[2]];
    let s = (a[1] + a[2]) * x1 + (a[0] + a[2]) * x2 + (a[0] + a[1]) * x3;
    let p = a[1] * a[2] * x1 + a[0] * a[2] * x2 + a[0] * a[1] * x3;
    let disc = (s * s - 4.0 * p).max(0.0).sqrt();
    let (q1, q2) = if s >= 0.0 {
        let q1 = 0.5 * (s + disc);
        (q1, if q1 != 0.0 { p / q1 } else { 0.0 })
    } else {
        let q2 = 0.5 * (s - disc);
        (p / q2, q2)
    };
    Ok((q1.clamp(a[1], a[0]), q2.clamp(a[2], a[1])))
}

/// Degenerate cubic `f = 4q³` mapped to the upper half plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicPoint {
    pub u: f64,
    pub v: f64,
    pub metric: MetricSample,
    pub h_over_mu: f64,
}

/// `X = q1^{-1/2}`, `Y = (-q2)^{-1/2}`, `u + iv = (X + iY)²`; the metric is
/// `(du² + dv²)/v²` and `q1 + q2 = -4u/v²`. Positivity of the Stäckel form
/// with `f = 4q³` requires `q1 > 0 > q2`.
pub fn hyperbolic_chart(q1: f64, q2: f64) -> Result<HyperbolicPoint, GeometryError> {
    if !(q1 > 0.0 && q2 < 0.0) {
        return Err(GeometryError::NonPositiveCoordinate(q1, q2));
    }
    let z = Complex64::new(q1.powf(-0.5), (-q2).powf(-0.5)).powi(2);
    let (u, v) = (z.re, z.im);
    Ok(HyperbolicPoint {
        u,
        v,
        metric: MetricSample::conformal(1.0 / (v * v)),
        h_over_mu: -4.0 * u / (v * v),
    })
}

/// Limit metric `16(β1² - Q̃2²)/c (dũ1² + dũ2²)` on the cylinder.
pub fn limit_cylinder_metric(lm: &LimitModel, u_tilde: (f64, f64)) -> MetricSample {
    let q = lm.q2_tilde(u_tilde.1);
    MetricSample::conformal(16.0 * (lm.beta1 * lm.beta1 - q * q) / lm.c)
}

/// Covariant Stäckel metric of the sphere with constants `alpha`.
pub fn neumann_metric(c: &NeumannConstants, q1: f64, q2: f64) -> Result<MetricSample, GeometryError> {
    stackel_metric(|q| stackel_cubic(&c.alpha, -4.0, q), q1, q2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> EllipticModel {
        EllipticModel::from_roots([3.0, 2.0, -1.0, -4.0], -1.0).unwrap()
    }

    #[test]
    fn stackel_examples() {
        let f = |q| stackel_cubic(&[3.0, 2.0, 1.0], -4.0, q);
        let m = stackel_metric(f, 2.5, 1.5).unwrap();
        assert!(m.g11 > 0.0 && m.g22 > 0.0);
        assert!(matches!(
            stackel_metric(f, 1.5, 1.5),
            Err(GeometryError::DegenerateCoordinates(_))
        ));
        assert!(matches!(
            stackel_metric(f, 2.5, 2.2),
            Err(GeometryError::WrongSignature { .. })
        ));
    }

    #[test]
    fn torus_metric_values() {
        let m = model();
        assert_eq!(torus_metric(&m, TorusPoint::new(0.0, 0.0)).lambda, 0.0);
        let l = torus_metric(&m, TorusPoint::new(m.k1(), m.k2())).lambda;
        assert!((l - 8.0).abs() < 1e-12);
        let p = TorusPoint::new(0.37, 1.91);
        assert_eq!(torus_metric(&m, p), torus_metric(&m, p.sigma()));
        for fp in fixed_points(&m) {
            assert!(torus_lambda(&m, fp.u1, fp.u2) < 1e-14);
        }
    }

    #[test]
    fn sphere_points() {
        let m = model();
        let p = TorusPoint::new(0.4, 0.3);
        let a = SpherePoint::from_torus(&m, p);
        let b = SpherePoint::from_torus(&m, p.sigma());
        assert_eq!(a, b);
        let near = SpherePoint::from_torus(&m, TorusPoint::new(2.0 * m.k1() + 1e-3, -1e-3));
        assert_eq!(near.chart, ChartTag::FixedPoint(1));
    }

    #[test]
    fn curvature_values() {
        let s1 = SystemSpec::case_i([3.0, 2.0, 1.0], -4.0, 1.0, 0.5).unwrap();
        assert_eq!(curvature_closed(&s1, [2.5, 1.5]).unwrap(), 1.0);
        let s2 = SystemSpec::case_ii(model(), 1.0, 0.5);
        let m = s2.model().unwrap();
        let k = curvature_closed(&s2, [m.k1(), m.k2()]).unwrap();
        assert!((k - 0.09375).abs() < 1e-12);
        let flat = curvature_numeric(|_, _| MetricSample::conformal(2.0), [0.0, 0.0], 1e-2).unwrap();
        assert!(flat.abs() < 1e-10);
    }

    #[test]
    fn chart_limit_and_symmetry() {
        let m = model();
        let c0 = fixed_point_chart(&m, 0, Complex64::new(0.0, 0.0)).unwrap().lambda;
        assert!((c0 - 1.125).abs() < 1e-14);
        let w = Complex64::from_polar(1e-4, 0.7);
        let a = fixed_point_chart(&m, 0, w).unwrap().lambda;
        assert!((a / c0 - 1.0).abs() < 1e-3);
        let z = w.sqrt();
        let l1 = torus_lambda(&m, z.re, z.im);
        let l2 = torus_lambda(&m, -z.re, -z.im);
        assert_eq!(l1, l2);
        assert!(fixed_point_chart(&m, 0, Complex64::new(10.0, 0.0)).is_err());
    }

    #[test]
    fn hyperbolic_example() {
        let p = hyperbolic_chart(1.0, -1.0).unwrap();
        assert!((p.u).abs() < 1e-15 && (p.v - 2.0).abs() < 1e-15);
        assert_eq!(p.h_over_mu, 0.0);
        assert!(hyperbolic_chart(1.0, 1.0).is_err());
    }

    #[test]
    fn neumann_axis() {
        let c = NeumannConstants { alpha: [3.0, 2.0, 1.0] };
        let x = neumann_to_cartesian(&c, 2.0, 1.0, [false; 3]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && x[1] == 0.0 && x[2] == 0.0);
        assert_eq!(cartesian_to_neumann(&c, [0.0, 0.0, 1.0]), Err(GeometryError::AxisPoint));
        assert!(neumann_to_cartesian(&c, 1.5, 2.5, [false; 3]).is_err());
    }

    #[test]
    fn limit_cylinder_centre() {
        let lm = LimitModel::new(1.0, -0.5, -1.5).unwrap();
        let q = lm.beta3;
        let want = 16.0 * (1.0 - q * q) / lm.c;
        assert!((limit_cylinder_metric(&lm, (0.0, 0.0)).lambda - want).abs() < 1e-13);
    }
}
