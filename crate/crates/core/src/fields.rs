//! Electric potential, integral coefficients and gauge potentials.
//!
//! Points are given in the native coordinates of each family: `(q1, q2)`
//! elliptic coordinates for the Stäckel sphere, `(u1, u2)` torus or cylinder
//! coordinates otherwise. Metric components of the integral are the
//! contravariant `g^{ii}`, so `F = Σ g^{ii} v^i π_i² + φ^i π_i + ϕ` with
//! kinetic momenta `π = p - A`.

use thiserror::Error;

use crate::elliptic::{EllipticModel, LimitModel};
use crate::geometry::{MetricSample, TorusPoint};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("negative radicand -f(q1) f(q2) = {0}")]
    NegativeRadicand(f64),
    #[error("point ({0}, {1}) lies outside the gauge chart")]
    OutsideChart(f64, f64),
    #[error("degenerate metric at ({0}, {1})")]
    DegeneratePoint(f64, f64),
    #[error("operation not defined for the {0:?} family")]
    WrongFamily(Family),
    #[error("invalid system: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Family {
    CaseI,
    CaseII,
    CaseIILimit,
    #[serde(rename = "VY")]
    Vy,
}

#[derive(Debug, Clone)]
pub enum Geometry {
    /// Cubic `f(q) = -a3 (α1 - q)(α2 - q)(α3 - q)`; `a3 = -4` is the unit sphere.
    Stackel { alpha: [f64; 3], a3: f64 },
    Elliptic(Box<EllipticModel>),
    Limit(LimitModel),
    /// Metric parameters `A > B > 0` of the two-centre system.
    TwoCentre { vy_a: f64, vy_b: f64 },
}

#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub geometry: Geometry,
    pub mu: f64,
    /// Magnetic density.
    pub b: f64,
}

impl SystemSpec {
    pub fn case_i(alpha: [f64; 3], a3: f64, mu: f64, b: f64) -> Result<Self, FieldError> {
        if !(alpha[0] > alpha[1] && alpha[1] > alpha[2]) {
            return Err(FieldError::InvalidSpec(format!(
                "alpha must be strictly decreasing, got {alpha:?}"
            )));
        }
        if !(a3 < 0.0) {
            return Err(FieldError::InvalidSpec(format!("a3 = {a3} must be negative")));
        }
        Ok(Self {
            geometry: Geometry::Stackel { alpha, a3 },
            mu,
            b,
        })
    }

    pub fn case_ii(model: EllipticModel, mu: f64, b: f64) -> Self {
        Self {
            geometry: Geometry::Elliptic(Box::new(model)),
            mu,
            b,
        }
    }

    pub fn limit(lm: LimitModel, mu: f64, b: f64) -> Self {
        Self {
            geometry: Geometry::Limit(lm),
            mu,
            b,
        }
    }

    pub fn two_centre(vy_a: f64, vy_b: f64, mu: f64) -> Result<Self, FieldError> {
        if !(vy_a > vy_b && vy_b > 0.0) {
            return Err(FieldError::InvalidSpec(format!(
                "need vyA > vyB > 0, got ({vy_a}, {vy_b})"
            )));
        }
        Ok(Self {
            geometry: Geometry::TwoCentre { vy_a, vy_b },
            mu,
            b: 0.0,
        })
    }

    pub fn family(&self) -> Family {
        match self.geometry {
            Geometry::Stackel { .. } => Family::CaseI,
            Geometry::Elliptic(_) => Family::CaseII,
            Geometry::Limit(_) => Family::CaseIILimit,
            Geometry::TwoCentre { .. } => Family::Vy,
        }
    }

    /// Leading coefficient of `f` (Case I) or `P` (Case II; `-1` in the limit).
    pub fn a3(&self) -> Option<f64> {
        match &self.geometry {
            Geometry::Stackel { a3, .. } => Some(*a3),
            Geometry::Elliptic(m) => Some(m.params().a3),
            Geometry::Limit(_) => Some(-1.0),
            Geometry::TwoCentre { .. } => None,
        }
    }

    /// `k = -4B / a3`.
    pub fn k(&self) -> Option<f64> {
        self.a3().map(|a3| -4.0 * self.b / a3)
    }

    pub fn model(&self) -> Result<&EllipticModel, FieldError> {
        match &self.geometry {
            Geometry::Elliptic(m) => Ok(m),
            _ => Err(FieldError::WrongFamily(self.family())),
        }
    }

    fn require_k(&self) -> Result<f64, FieldError> {
        self.k().ok_or(FieldError::WrongFamily(self.family()))
    }
}

/// `f(q) = -a3 Π (α_i - q)`.
pub fn stackel_cubic(alpha: &[f64; 3], a3: f64, q: f64) -> f64 {
    -a3 * (alpha[0] - q) * (alpha[1] - q) * (alpha[2] - q)
}

pub fn electric_h(spec: &SystemSpec, point: [f64; 2]) -> Result<f64, FieldError> {
    let mu = spec.mu;
    match &spec.geometry {
        Geometry::Stackel { .. } => Ok(mu * (point[0] + point[1])),
        Geometry::Elliptic(m) => Ok(mu / (m.q1(point[0]) + m.q2(point[1]))),
        Geometry::Limit(lm) => Ok(mu / (lm.beta1 + lm.q2(point[1]))),
        Geometry::TwoCentre { .. } => Err(FieldError::WrongFamily(Family::Vy)),
    }
}

/// Linear-in-momentum coefficients `(φ¹, φ²)`.
///
/// Case II uses the torus form `(2kQ2'/(Q1-Q2), 2kQ1'/(Q2-Q1))`, which is
/// singular only at the four fixed points where `Q1 = Q2`.
pub fn phi_components(spec: &SystemSpec, point: [f64; 2]) -> Result<(f64, f64), FieldError> {
    let k = spec.require_k()?;
    match &spec.geometry {
        Geometry::Stackel { alpha, a3 } => {
            let [q1, q2] = point;
            let rad = -stackel_cubic(alpha, *a3, q1) * stackel_cubic(alpha, *a3, q2);
            if rad < 0.0 {
                return Err(FieldError::NegativeRadicand(rad));
            }
            let phi = k * rad.sqrt() / (q1 - q2);
            Ok((phi, -phi))
        }
        Geometry::Elliptic(m) => {
            let (s1, s2) = (m.slice1(point[0]), m.slice2(point[1]));
            let gap = s1.offset - s2.offset;
            if gap == 0.0 {
                return Err(FieldError::DegeneratePoint(point[0], point[1]));
            }
            Ok((2.0 * k * s2.dx / gap, -2.0 * k * s1.dx / gap))
        }
        Geometry::Limit(_) | Geometry::TwoCentre { .. } => {
            Err(FieldError::WrongFamily(spec.family()))
        }
    }
}

/// Scalar part `ϕ` of the integral.
pub fn varphi(spec: &SystemSpec, point: [f64; 2]) -> Result<f64, FieldError> {
    let k = spec.require_k()?;
    let (mu, b) = (spec.mu, spec.b);
    match &spec.geometry {
        Geometry::Stackel { .. } => {
            let [q1, q2] = point;
            Ok(mu * q1 * q2 - k * b * (q1 + q2))
        }
        Geometry::Elliptic(m) => {
            let (x1, x2) = (m.q1(point[0]), m.q2(point[1]));
            let s = x1 + x2;
            Ok(-mu * x1 * x2 / s - k * b * s * s)
        }
        Geometry::Limit(_) | Geometry::TwoCentre { .. } => {
            Err(FieldError::WrongFamily(spec.family()))
        }
    }
}

/// Landau-type gauge.
///
/// Case II: `A1 = 0`, `A2 = B (I1(u1) - u1 Q2²(u2))` with `I1(u) = ∫_0^u Q1²`,
/// valid on the fundamental domain `[0, 4K1) × [0, 4K2)`.
/// Limit cylinder: `A2 = 0` and `A1` from [`limit_gauge_a1`].
pub fn gauge_a(spec: &SystemSpec, point: [f64; 2]) -> Result<(f64, f64), FieldError> {
    match &spec.geometry {
        Geometry::Elliptic(m) => {
            let [u1, u2] = point;
            let slack = 1e-9 * (m.k1() + m.k2());
            if !(u1 >= -slack && u1 < 4.0 * m.k1() + slack && u2 >= -slack && u2 < 4.0 * m.k2() + slack)
            {
                return Err(FieldError::OutsideChart(u1, u2));
            }
            Ok((0.0, gauge_a2_unchecked(m, spec.b, u1, u2)))
        }
        Geometry::Limit(lm) => Ok((limit_gauge_a1(lm, spec.b, point[1]), 0.0)),
        _ => Err(FieldError::WrongFamily(spec.family())),
    }
}

/// `B (I1(u1) - u1 Q2²(u2))` for any real `(u1, u2)`.
pub fn gauge_a2_unchecked(m: &EllipticModel, b: f64, u1: f64, u2: f64) -> f64 {
    if b == 0.0 {
        return 0.0;
    }
    let x2 = m.q2(u2);
    b * (m.moment1(u1) - u1 * x2 * x2)
}

/// Gauge of the limit cylinder, `A1(u2) = -(2B/√c) ∫_0^{u2} (β1² - Q2²) du`,
/// so that `-∂2 A1 = B √(g11 g22)`.
///
/// With `θ = ½√c (u - δ)`, `g = 2c / (√D cosh θ + b)` and
/// `β1² - Q2² = 2β1 g - g²`, both pieces integrate in closed form.
pub fn limit_gauge_a1(lm: &LimitModel, b: f64, u2: f64) -> f64 {
    if b == 0.0 {
        return 0.0;
    }
    let sc = lm.c.sqrt();
    let a = lm.d.sqrt();
    let r = ((lm.b - a) / (lm.b + a)).sqrt();
    let j1 = |th: f64| (r * (0.5 * th).tanh()).atanh() / sc;
    let j2 = |th: f64| (lm.b * j1(th) - a * th.sinh() / (lm.b + a * th.cosh())) / (4.0 * lm.c);
    let prim = |u: f64| {
        let th = 0.5 * sc * (u - lm.delta);
        (2.0 / sc) * (4.0 * lm.beta1 * lm.c * j1(th) - 4.0 * lm.c * lm.c * j2(th))
    };
    -(2.0 * b / sc) * (prim(u2) - prim(0.0))
}

/// `√(g^{11} g^{22}) (∂1 A2 - ∂2 A1)` by fourth-order central differences.
/// `metric` returns covariant components.
pub fn magnetic_density<M, G>(metric: M, gauge: G, point: [f64; 2], h: f64) -> Result<f64, FieldError>
where
    M: Fn([f64; 2]) -> MetricSample,
    G: Fn([f64; 2]) -> (f64, f64),
{
    let [x, y] = point;
    let g = metric(point);
    let det = g.g11 * g.g22;
    if !(det > 0.0) {
        return Err(FieldError::DegeneratePoint(x, y));
    }
    let d = |f: &dyn Fn(f64) -> f64| {
        (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h)
    };
    let d1a2 = d(&|s| gauge([x + s, y]).1);
    let d2a1 = d(&|s| gauge([x, y + s]).0);
    Ok((d1a2 - d2a1) / det.sqrt())
}

/// [`magnetic_density`] on the Case II torus with the built-in metric and gauge.
pub fn magnetic_density_torus(spec: &SystemSpec, point: [f64; 2]) -> Result<f64, FieldError> {
    let m = spec.model()?;
    magnetic_density(
        |p| crate::geometry::torus_metric(m, TorusPoint::new(p[0], p[1])),
        |p| (0.0, gauge_a2_unchecked(m, spec.b, p[0], p[1])),
        point,
        1e-3,
    )
}
