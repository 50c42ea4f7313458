//! Grid checks of the integrability conditions for
//!
//! `H = g¹¹π1² + g²²π2² + h`,
//! `F = g¹¹v¹π1² + g²²v²π2² + φ¹π1 + φ²π2 + ϕ`,
//!
//! plus closed-form checks of the auxiliary ODE and functional identities.
//!
//! Grids store contravariant `g^{ii}`; covariant samples from
//! [`crate::geometry`] are inverted on ingestion.

use thiserror::Error;

use crate::fields::{electric_h, phi_components, varphi, FieldError, Geometry, SystemSpec};
use crate::geometry::{stackel_metric, torus_metric, GeometryError, TorusPoint};
use crate::fields::stackel_cubic;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("grid {0}x{1} is too small, need at least 9x9")]
    GridTooSmall(usize, usize),
    #[error("sample q = {0} hits a zero of the quadratic")]
    SingularSample(f64),
    #[error("outside the domain: {0}")]
    DomainError(String),
    #[error("non-finite field sample at ({0}, {1})")]
    NonFinite(f64, f64),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum Stencil {
    Second,
    #[default]
    Fourth,
}

impl Stencil {
    pub fn order(self) -> usize {
        match self {
            Stencil::Second => 2,
            Stencil::Fourth => 4,
        }
    }

    pub fn from_order(order: usize) -> Option<Self> {
        match order {
            2 => Some(Stencil::Second),
            4 => Some(Stencil::Fourth),
            _ => None,
        }
    }

    /// Antisymmetric first-derivative weights as `(offset > 0, c)`:
    /// `f' ≈ Σ c (f(x + o h) - f(x - o h)) / h`.
    fn weights(self) -> &'static [(isize, f64)] {
        match self {
            Stencil::Second => &[(1, 0.5)],
            Stencil::Fourth => &[(1, 8.0 / 12.0), (2, -1.0 / 12.0)],
        }
    }
}

/// Field values at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldSample {
    pub g11: f64,
    pub g22: f64,
    pub v1: f64,
    pub v2: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub h: f64,
    pub varphi: f64,
    pub b: f64,
}

/// Uniform rectangular grid of ansatz fields, row-major in `(i1, i2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzGrid {
    pub n: [usize; 2],
    pub lo: [f64; 2],
    pub step: [f64; 2],
    pub g11: Vec<f64>,
    pub g22: Vec<f64>,
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
    pub h: Vec<f64>,
    pub varphi: Vec<f64>,
    pub b: Vec<f64>,
}

impl AnsatzGrid {
    /// Samples `f` on `n × n` nodes spanning `[lo, hi]` (endpoints included).
    pub fn sample<F>(lo: [f64; 2], hi: [f64; 2], n: usize, f: F) -> Result<Self, VerifyError>
    where
        F: Fn([f64; 2]) -> Result<FieldSample, VerifyError>,
    {
        if n < 9 {
            return Err(VerifyError::GridTooSmall(n, n));
        }
        let step = [(hi[0] - lo[0]) / (n - 1) as f64, (hi[1] - lo[1]) / (n - 1) as f64];
        let len = n * n;
        let mut g = Self {
            n: [n, n],
            lo,
            step,
            g11: Vec::with_capacity(len),
            g22: Vec::with_capacity(len),
            v1: Vec::with_capacity(len),
            v2: Vec::with_capacity(len),
            phi1: Vec::with_capacity(len),
            phi2: Vec::with_capacity(len),
            h: Vec::with_capacity(len),
            varphi: Vec::with_capacity(len),
            b: Vec::with_capacity(len),
        };
        for i in 0..n {
            for j in 0..n {
                let p = [lo[0] + i as f64 * step[0], lo[1] + j as f64 * step[1]];
                let s = f(p)?;
                let vals = [s.g11, s.g22, s.v1, s.v2, s.phi1, s.phi2, s.h, s.varphi, s.b];
                if vals.iter().any(|v| !v.is_finite()) {
                    return Err(VerifyError::NonFinite(p[0], p[1]));
                }
                g.g11.push(s.g11);
                g.g22.push(s.g22);
                g.v1.push(s.v1);
                g.v2.push(s.v2);
                g.phi1.push(s.phi1);
                g.phi2.push(s.phi2);
                g.h.push(s.h);
                g.varphi.push(s.varphi);
                g.b.push(s.b);
            }
        }
        Ok(g)
    }

    /// Case I in Stäckel coordinates `(q1, q2)`, `v¹ = q2`, `v² = q1`, on the
    /// middle 30% of the cell `α2 < q1 < α1`, `α3 < q2 < α2`.
    pub fn case_i(spec: &SystemSpec, n: usize) -> Result<Self, VerifyError> {
        let Geometry::Stackel { alpha, a3 } = spec.geometry else {
            return Err(FieldError::WrongFamily(spec.family()).into());
        };
        let lo = [alpha[1] + 0.35 * (alpha[0] - alpha[1]), alpha[2] + 0.35 * (alpha[1] - alpha[2])];
        let hi = [alpha[1] + 0.65 * (alpha[0] - alpha[1]), alpha[2] + 0.65 * (alpha[1] - alpha[2])];
        Self::sample(lo, hi, n, |p| {
            let g = stackel_metric(|q| stackel_cubic(&alpha, a3, q), p[0], p[1])?;
            let (phi1, phi2) = phi_components(spec, p)?;
            Ok(FieldSample {
                g11: 1.0 / g.g11,
                g22: 1.0 / g.g22,
                v1: p[1],
                v2: p[0],
                phi1,
                phi2,
                h: electric_h(spec, p)?,
                varphi: varphi(spec, p)?,
                b: spec.b,
            })
        })
    }

    /// Case II on the torus `(u1, u2)`, `v¹ = Q2²`, `v² = Q1²`, on
    /// `[0.35, 0.65]·K1 × [0.35, 0.65]·K2`, away from turning lines and fixed points.
    pub fn case_ii(spec: &SystemSpec, n: usize) -> Result<Self, VerifyError> {
        let m = spec.model()?;
        let lo = [0.35 * m.k1(), 0.35 * m.k2()];
        let hi = [0.65 * m.k1(), 0.65 * m.k2()];
        Self::sample(lo, hi, n, |p| {
            let g = torus_metric(m, TorusPoint::new(p[0], p[1]));
            let (phi1, phi2) = phi_components(spec, p)?;
            let (x1, x2) = (m.q1(p[0]), m.q2(p[1]));
            Ok(FieldSample {
                g11: 1.0 / g.g11,
                g22: 1.0 / g.g22,
                v1: x2 * x2,
                v2: x1 * x1,
                phi1,
                phi2,
                h: electric_h(spec, p)?,
                varphi: varphi(spec, p)?,
                b: spec.b,
            })
        })
    }

    /// Built-in grid for a Case I or Case II system.
    pub fn builtin(spec: &SystemSpec, n: usize) -> Result<Self, VerifyError> {
        match spec.geometry {
            Geometry::Stackel { .. } => Self::case_i(spec, n),
            Geometry::Elliptic(_) => Self::case_ii(spec, n),
            _ => Err(FieldError::WrongFamily(spec.family()).into()),
        }
    }

    /// The same grid with the potential and the magnetic density exchanged.
    pub fn swap_h_b(&self) -> Self {
        let mut g = self.clone();
        std::mem::swap(&mut g.h, &mut g.b);
        g
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n[1] + j
    }

    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        [self.lo[0] + i as f64 * self.step[0], self.lo[1] + j as f64 * self.step[1]]
    }

    fn check_size(&self) -> Result<(), VerifyError> {
        if self.n[0] < 9 || self.n[1] < 9 {
            return Err(VerifyError::GridTooSmall(self.n[0], self.n[1]));
        }
        Ok(())
    }

    /// Interior nodes where every stencil fits.
    fn interior(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        const M: usize = 2;
        (M..self.n[0] - M).flat_map(move |i| (M..self.n[1] - M).map(move |j| (i, j)))
    }
}

/// Central-difference operators on one grid.
struct Diff<'g> {
    g: &'g AnsatzGrid,
    w: &'static [(isize, f64)],
}

impl<'g> Diff<'g> {
    fn new(g: &'g AnsatzGrid, s: Stencil) -> Self {
        Self { g, w: s.weights() }
    }

    fn at(&self, f: &[f64], i: usize, j: usize, di: isize, dj: isize) -> f64 {
        f[self.g.index((i as isize + di) as usize, (j as isize + dj) as usize)]
    }

    fn d1(&self, f: &[f64], i: usize, j: usize) -> f64 {
        self.w
            .iter()
            .map(|&(o, c)| c * (self.at(f, i, j, o, 0) - self.at(f, i, j, -o, 0)))
            .sum::<f64>()
            / self.g.step[0]
    }

    fn d2(&self, f: &[f64], i: usize, j: usize) -> f64 {
        self.w
            .iter()
            .map(|&(o, c)| c * (self.at(f, i, j, 0, o) - self.at(f, i, j, 0, -o)))
            .sum::<f64>()
            / self.g.step[1]
    }

    fn d12(&self, f: &[f64], i: usize, j: usize) -> f64 {
        let mut s = 0.0;
        for &(a, ca) in self.w {
            for &(b, cb) in self.w {
                let cross = (self.at(f, i, j, a, b) - self.at(f, i, j, -a, b))
                    - (self.at(f, i, j, a, -b) - self.at(f, i, j, -a, -b));
                s += ca * cb * cross;
            }
        }
        s / (self.g.step[0] * self.g.step[1])
    }
}

/// Max residual and max individual term magnitude of one condition.
#[derive(Debug, Clone, Copy, Default)]
struct Accum {
    res: f64,
    term: f64,
}

impl Accum {
    fn add(&mut self, terms: &[f64]) {
        let s: f64 = terms.iter().sum();
        self.res = self.res.max(s.abs());
        for t in terms {
            self.term = self.term.max(t.abs());
        }
    }

    fn normalised(&self, floor: f64) -> f64 {
        let scale = self.term.max(floor);
        if scale == 0.0 {
            0.0
        } else {
            self.res / scale
        }
    }
}

/// Normalised maximum residuals. Each residual is divided by the largest
/// magnitude of the individual terms of its condition over the grid; (C1) has
/// a single term that vanishes identically, so it is measured against
/// `max |v| / L`, `L` the larger side of the grid.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ConditionReport {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub c6_star: f64,
    /// Max of the quantum correction term, divided by the (C6)* term scale.
    pub c6_star_correction: f64,
    pub grid: [usize; 2],
    pub stencil: Stencil,
}

impl ConditionReport {
    pub fn entries(&self) -> [(&'static str, f64); 7] {
        [
            ("C1", self.c1),
            ("C2", self.c2),
            ("C3", self.c3),
            ("C4", self.c4),
            ("C5", self.c5),
            ("C6", self.c6),
            ("C6*", self.c6_star),
        ]
    }

    pub fn max(&self) -> f64 {
        self.entries().iter().map(|e| e.1).fold(0.0, f64::max)
    }
}

/// Pointwise values of the (C6)* residual and its quantum correction term.
fn c6star_terms(d: &Diff, g: &AnsatzGrid, i: usize, j: usize) -> ([f64; 3], f64) {
    let k = g.index(i, j);
    let sq = (g.g11[k] * g.g22[k]).sqrt();
    let corr = sq
        * (g.v2[k] - g.v1[k])
        * (d.d2(&g.g11, i, j) / g.g11[k] * d.d1(&g.b, i, j) + d.d1(&g.g22, i, j) / g.g22[k] * d.d2(&g.b, i, j)
            - d.d12(&g.b, i, j));
    (
        [g.phi1[k] * d.d1(&g.h, i, j), g.phi2[k] * d.d2(&g.h, i, j), corr],
        corr,
    )
}

/// Evaluates (C1)-(C6) and (C6)* by central differences at every interior node.
pub fn check_classical_with(grid: &AnsatzGrid, stencil: Stencil) -> Result<ConditionReport, VerifyError> {
    grid.check_size()?;
    let d = Diff::new(grid, stencil);
    let ln11: Vec<f64> = grid.g11.iter().map(|v| v.ln()).collect();
    let ln22: Vec<f64> = grid.g22.iter().map(|v| v.ln()).collect();
    let mut acc = [Accum::default(); 7];
    let mut corr = Accum::default();
    for (i, j) in grid.interior() {
        let k = grid.index(i, j);
        let (g11, g22) = (grid.g11[k], grid.g22[k]);
        let (v1, v2) = (grid.v1[k], grid.v2[k]);
        let (p1, p2) = (grid.phi1[k], grid.phi2[k]);
        let b = grid.b[k];
        let sq = (g11 * g22).sqrt();

        acc[0].add(&[d.d1(&grid.v1, i, j)]);
        acc[0].add(&[d.d2(&grid.v2, i, j)]);

        acc[1].add(&[d.d2(&grid.v1, i, j), -(v2 - v1) * d.d2(&ln11, i, j)]);
        acc[1].add(&[d.d1(&grid.v2, i, j), -(v1 - v2) * d.d1(&ln22, i, j)]);

        acc[2].add(&[
            d.d1(&grid.phi1, i, j),
            -p1 * d.d1(&grid.g11, i, j) / (2.0 * g11),
            -p2 * d.d2(&grid.g11, i, j) / (2.0 * g11),
        ]);
        acc[2].add(&[
            d.d2(&grid.phi2, i, j),
            -p1 * d.d1(&grid.g22, i, j) / (2.0 * g22),
            -p2 * d.d2(&grid.g22, i, j) / (2.0 * g22),
        ]);

        acc[3].add(&[
            2.0 * sq * (v2 - v1) * b,
            -g22 * d.d2(&grid.phi1, i, j),
            -g11 * d.d1(&grid.phi2, i, j),
        ]);

        acc[4].add(&[d.d1(&grid.varphi, i, j), -v1 * d.d1(&grid.h, i, j), -p2 * b / sq]);
        acc[4].add(&[d.d2(&grid.varphi, i, j), -v2 * d.d2(&grid.h, i, j), p1 * b / sq]);

        acc[5].add(&[p1 * d.d1(&grid.h, i, j), p2 * d.d2(&grid.h, i, j)]);

        let (terms, c) = c6star_terms(&d, grid, i, j);
        acc[6].add(&terms);
        corr.res = corr.res.max(c.abs());
    }
    let vmax = grid.v1.iter().chain(&grid.v2).fold(0.0_f64, |m, v| m.max(v.abs()));
    let side = ((grid.n[0] - 1) as f64 * grid.step[0]).max((grid.n[1] - 1) as f64 * grid.step[1]);
    corr.term = acc[6].term;
    Ok(ConditionReport {
        c1: acc[0].normalised(vmax / side),
        c2: acc[1].normalised(0.0),
        c3: acc[2].normalised(0.0),
        c4: acc[3].normalised(0.0),
        c5: acc[4].normalised(0.0),
        c6: acc[5].normalised(0.0),
        c6_star: acc[6].normalised(0.0),
        c6_star_correction: corr.normalised(0.0),
        grid: grid.n,
        stencil,
    })
}

/// [`check_classical_with`] using fourth-order stencils.
pub fn check_classical(grid: &AnsatzGrid) -> Result<ConditionReport, VerifyError> {
    check_classical_with(grid, Stencil::Fourth)
}

/// Pointwise (C6)* residual
/// `φ¹∂1h + φ²∂2h + √(g¹¹g²²)(v²-v¹)(∂2g¹¹/g¹¹ ∂1B + ∂1g²²/g²² ∂2B - ∂1∂2B)`
/// on the interior nodes, row-major.
pub fn c6star_field(grid: &AnsatzGrid, stencil: Stencil) -> Result<Vec<f64>, VerifyError> {
    grid.check_size()?;
    let d = Diff::new(grid, stencil);
    Ok(grid
        .interior()
        .map(|(i, j)| c6star_terms(&d, grid, i, j).0.iter().sum())
        .collect())
}

/// Pointwise consistency residual of the two (C5) equations,
/// `φ¹∂1B + φ²∂2B + √(g¹¹g²²)(v²-v¹)(∂2g¹¹/g¹¹ ∂1h + ∂1g²²/g²² ∂2h - ∂1∂2h)`.
pub fn consistency_field(grid: &AnsatzGrid, stencil: Stencil) -> Result<Vec<f64>, VerifyError> {
    grid.check_size()?;
    let d = Diff::new(grid, stencil);
    Ok(grid
        .interior()
        .map(|(i, j)| {
            let k = grid.index(i, j);
            let sq = (grid.g11[k] * grid.g22[k]).sqrt();
            let lin = grid.phi1[k] * d.d1(&grid.b, i, j);
            let lin2 = grid.phi2[k] * d.d2(&grid.b, i, j);
            let second = sq
                * (grid.v2[k] - grid.v1[k])
                * (d.d2(&grid.g11, i, j) / grid.g11[k] * d.d1(&grid.h, i, j)
                    + d.d1(&grid.g22, i, j) / grid.g22[k] * d.d2(&grid.h, i, j)
                    - d.d12(&grid.h, i, j));
            lin + lin2 + second
        })
        .collect())
}

/// Normalised (C6)* residual with fourth-order stencils.
pub fn check_quantum_c6star(grid: &AnsatzGrid) -> Result<f64, VerifyError> {
    Ok(check_classical(grid)?.c6_star)
}

/// `max |consistency(grid) - C6*(grid with h and B swapped)|`.
pub fn check_duality(grid: &AnsatzGrid) -> Result<f64, VerifyError> {
    check_duality_mixed(grid, Stencil::Fourth, Stencil::Fourth)
}

/// As [`check_duality`], with independent stencils for the two sides.
pub fn check_duality_mixed(grid: &AnsatzGrid, consistency: Stencil, quantum: Stencil) -> Result<f64, VerifyError> {
    let a = consistency_field(grid, consistency)?;
    let b = c6star_field(&grid.swap_h_b(), quantum)?;
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

// ---------------------------------------------------------------- identities

/// Value and first three derivatives of `s^p`, `s = c0 + c1 q + c2 q²`.
fn power_jet(c: [f64; 3], p: f64, q: f64) -> Result<[f64; 4], VerifyError> {
    let s = c[0] + c[1] * q + c[2] * q * q;
    if !(s > 0.0) {
        return Err(VerifyError::SingularSample(q));
    }
    let (s1, s2) = (c[1] + 2.0 * c[2] * q, 2.0 * c[2]);
    let g = s.powf(p);
    let g1 = p * s.powf(p - 1.0) * s1;
    let g2 = p * (p - 1.0) * s.powf(p - 2.0) * s1 * s1 + p * s.powf(p - 1.0) * s2;
    let g3 = p * (p - 1.0) * (p - 2.0) * s.powf(p - 3.0) * s1 * s1 * s1 + 3.0 * p * (p - 1.0) * s.powf(p - 2.0) * s1 * s2;
    Ok([g, g1, g2, g3])
}

fn relative(terms: &[f64]) -> f64 {
    let scale = terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
    if scale == 0.0 {
        0.0
    } else {
        terms.iter().sum::<f64>().abs() / scale
    }
}

/// `(n-1)(n-2)y'³ + 3(n-1) y y' y'' + y² y'''` relative to its largest term.
pub fn pz_residual(n: f64, y: [f64; 4]) -> f64 {
    relative(&[
        (n - 1.0) * (n - 2.0) * y[1].powi(3),
        3.0 * (n - 1.0) * y[0] * y[1] * y[2],
        y[0] * y[0] * y[3],
    ])
}

/// Maximum relative residuals over the samples.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct IdentityReport {
    /// `40/9 g'³ - 5 g g' g'' + g² g'''` at `g = s^{-3/2}`.
    pub g_case_a: f64,
    /// `(n, residual)` for `y = s^{1/n}`.
    pub pz: Vec<(f64, f64)>,
    /// `3 g² g' g'' + g³ g'''` at `g = √s`.
    pub g_relation: f64,
}

impl IdentityReport {
    pub fn max(&self) -> f64 {
        self.pz.iter().map(|p| p.1).fold(self.g_case_a.max(self.g_relation), f64::max)
    }
}

pub const PZ_EXPONENTS: [f64; 3] = [-2.0 / 3.0, 2.0, 3.0];

/// Checks the three ODE identities at every sample with closed-form derivatives.
pub fn check_ode_identities(c: [f64; 3], samples: &[f64]) -> Result<IdentityReport, VerifyError> {
    let mut r = IdentityReport {
        g_case_a: 0.0,
        pz: PZ_EXPONENTS.iter().map(|&n| (n, 0.0)).collect(),
        g_relation: 0.0,
    };
    for &q in samples {
        let g = power_jet(c, -1.5, q)?;
        let ga = relative(&[40.0 / 9.0 * g[1].powi(3), -5.0 * g[0] * g[1] * g[2], g[0] * g[0] * g[3]]);
        r.g_case_a = r.g_case_a.max(ga);
        for (n, res) in r.pz.iter_mut() {
            *res = res.max(pz_residual(*n, power_jet(c, 1.0 / *n, q)?));
        }
        let g = power_jet(c, 0.5, q)?;
        let gr = relative(&[3.0 * g[0] * g[0] * g[1] * g[2], g[0].powi(3) * g[3]]);
        r.g_relation = r.g_relation.max(gr);
    }
    Ok(r)
}

/// The two surviving cases of the functional equation for `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionalCase {
    /// `a = b = μ√q`.
    Sqrt { mu: f64 },
    /// `a = b = c q²`.
    Quadratic { c: f64 },
}

impl FunctionalCase {
    fn jet(self, q: f64) -> [f64; 3] {
        match self {
            FunctionalCase::Sqrt { mu } => {
                let r = q.sqrt();
                [mu * r, 0.5 * mu / r, -0.25 * mu / (q * r)]
            }
            FunctionalCase::Quadratic { c } => [c * q * q, 2.0 * c * q, 2.0 * c],
        }
    }
}

/// `a''(q1)(a(q1) - b(q2) - (q1-q2)b'(q2))³ - b''(q2)(b(q2) - a(q1) + (q1-q2)a'(q1))³`
/// divided by the same expression with every difference replaced by the sum
/// of magnitudes. The brackets cancel to `O((q1-q2)²)` near the diagonal, so
/// scaling by their values would measure rounding, not the identity.
pub fn check_functional_equation(case: FunctionalCase, q1: f64, q2: f64) -> Result<f64, VerifyError> {
    if q1 == q2 {
        return Err(VerifyError::DomainError(format!("q1 = q2 = {q1}")));
    }
    if matches!(case, FunctionalCase::Sqrt { .. }) && !(q1 > 0.0 && q2 > 0.0) {
        return Err(VerifyError::DomainError(format!("square root needs q > 0, got ({q1}, {q2})")));
    }
    let (a, b) = (case.jet(q1), case.jet(q2));
    let d = q1 - q2;
    let lhs = a[2] * (a[0] - b[0] - d * b[1]).powi(3);
    let rhs = b[2] * (b[0] - a[0] + d * a[1]).powi(3);
    let scale = (a[2] * (a[0].abs() + b[0].abs() + (d * b[1]).abs()).powi(3))
        .abs()
        .max((b[2] * (b[0].abs() + a[0].abs() + (d * a[1]).abs()).powi(3)).abs());
    Ok(if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale })
}
