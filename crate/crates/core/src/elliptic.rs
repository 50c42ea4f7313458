//! The elliptic function `Q(z)`, inverse of `z = ∫_{β2}^{w} 2dξ/√P(ξ)`, on the
//! real and imaginary axes.
//!
//! `Q1(u) = Q(u)` oscillates in `[β2, β1]` with period `2K1`, and
//! `Q2(u) = Q(iu)` oscillates in `[β3, β2]` with period `2K2`. They satisfy
//! `4 Q1'^2 = P(Q1)` and `4 Q2'^2 = -P(Q2)`.
//!
//! Each quarter period is parametrised from both of its turning points by
//! `x = β ± t^2`. This removes the inverse square-root endpoint singularity, so
//! `u(t)` is smooth and strictly increasing. A table of `u(t)` gives a Hermite
//! starting guess and Newton iterations against the integral finish the inversion.
//! Derivatives come from `dx/du = 2 t (dt/du)`, which stays accurate at the
//! turning points.

use std::f64::consts::PI;

use thiserror::Error;

use crate::polyroots::{real_roots, QuarticParams, RootError, RootQuadruple};
use crate::quad::gl16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EllipticError {
    #[error(transparent)]
    Roots(#[from] RootError),
    #[error("inadmissible quartic: {0}")]
    InadmissibleParams(String),
    #[error("x = {x} lies outside [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },
    #[error("quartic is not even (a0 = {0:e})")]
    NotEvenQuartic(f64),
    #[error("invalid limit model: {0}")]
    InvalidLimit(String),
}

/// Which real slice of `Q` an abscissa belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `x ∈ [β2, β1]`, `u1 ∈ [0, K1]`.
    U1,
    /// `x ∈ [β3, β2]`, `u2 ∈ [0, K2]`.
    U2,
}

const PANELS: usize = 64;

/// `x = root + dir * t^2` for `t ∈ [0, t_end]`, with the cumulative tables of
/// `u(t)` and `∫ x^2 du`.
#[derive(Debug, Clone)]
struct HalfArc {
    root: f64,
    dir: f64,
    others: [f64; 3],
    lead: f64,
    t_end: f64,
    step: f64,
    u: Vec<f64>,
    rate: Vec<f64>,
    moment: Vec<f64>,
}

impl HalfArc {
    fn new(root: f64, dir: f64, others: [f64; 3], lead: f64, t_end: f64) -> Self {
        let step = t_end / PANELS as f64;
        let mut arc = Self {
            root,
            dir,
            others,
            lead,
            t_end,
            step,
            u: Vec::with_capacity(PANELS + 1),
            rate: Vec::with_capacity(PANELS + 1),
            moment: Vec::with_capacity(PANELS + 1),
        };
        let (mut u, mut m) = (0.0, 0.0);
        for k in 0..=PANELS {
            let t = step * k as f64;
            if k > 0 {
                let lo = t - step;
                u += gl16().integrate(lo, t, |s| arc.du_dt(s));
                m += gl16().integrate(lo, t, |s| {
                    let x = arc.x(s);
                    x * x * arc.du_dt(s)
                });
            }
            arc.u.push(u);
            arc.moment.push(m);
            arc.rate.push(arc.du_dt(t));
        }
        arc
    }

    #[inline]
    fn x(&self, t: f64) -> f64 {
        self.root + self.dir * t * t
    }

    #[inline]
    fn du_dt(&self, t: f64) -> f64 {
        let x = self.x(t);
        let prod = self.lead * (x - self.others[0]) * (x - self.others[1]) * (x - self.others[2]);
        4.0 / prod.abs().sqrt()
    }

    fn total(&self) -> f64 {
        self.u[PANELS]
    }

    fn panel_of_t(&self, t: f64) -> usize {
        ((t / self.step) as usize).min(PANELS - 1)
    }

    fn u_of_t(&self, t: f64) -> f64 {
        let k = self.panel_of_t(t);
        let lo = self.step * k as f64;
        self.u[k] + gl16().integrate(lo, t, |s| self.du_dt(s))
    }

    fn moment_of_t(&self, t: f64) -> f64 {
        let k = self.panel_of_t(t);
        let lo = self.step * k as f64;
        self.moment[k]
            + gl16().integrate(lo, t, |s| {
                let x = self.x(s);
                x * x * self.du_dt(s)
            })
    }

    fn t_of_u(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let k = match self.u.partition_point(|&v| v <= u) {
            0 => 0,
            p => (p - 1).min(PANELS - 1),
        };
        let (u0, u1) = (self.u[k], self.u[k + 1]);
        let du = u1 - u0;
        let s = ((u - u0) / du).clamp(0.0, 1.0);
        let (t0, t1) = (self.step * k as f64, self.step * (k + 1) as f64);
        let (m0, m1) = (du / self.rate[k], du / self.rate[k + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        let mut t = (2.0 * s3 - 3.0 * s2 + 1.0) * t0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * t1
            + (s3 - s2) * m1;
        for _ in 0..4 {
            let dt = (u - self.u_of_t(t)) / self.du_dt(t);
            t += dt;
            if dt.abs() <= 4.0 * f64::EPSILON * t.abs().max(self.step) {
                break;
            }
        }
        t.clamp(0.0, self.t_end * 1.000_000_1)
    }
}

/// Value of a real slice: abscissa, its offset from `β2`, and the derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceValue {
    pub x: f64,
    /// `x - β2`, computed without cancellation near `β2`.
    pub offset: f64,
    pub dx: f64,
}

/// One real slice of `Q`, built from its two turning points.
#[derive(Debug, Clone)]
struct RealSlice {
    start: HalfArc,
    end: HalfArc,
    half: f64,
    switch: f64,
    half_moment: f64,
}

impl RealSlice {
    fn new(lead: f64, start_root: f64, end_root: f64, others_start: [f64; 3], others_end: [f64; 3]) -> Self {
        let dir = (end_root - start_root).signum();
        let t_end = (0.5 * (end_root - start_root).abs()).sqrt();
        let start = HalfArc::new(start_root, dir, others_start, lead, t_end);
        let end = HalfArc::new(end_root, -dir, others_end, lead, t_end);
        let switch = start.total();
        let half = switch + end.total();
        let half_moment = start.moment[PANELS] + end.moment[PANELS];
        Self {
            start,
            end,
            half,
            switch,
            half_moment,
        }
    }

    /// Folds `u` into `[0, K]`; the sign is that of the derivative.
    fn fold(&self, u: f64) -> (f64, f64) {
        let period = 2.0 * self.half;
        let parity = if u < 0.0 { -1.0 } else { 1.0 };
        let r = u.abs().rem_euclid(period);
        if r > self.half {
            (period - r, -parity)
        } else {
            (r, parity)
        }
    }

    fn eval(&self, u: f64) -> SliceValue {
        let (r, sign) = self.fold(u);
        let dir = self.start.dir;
        if r <= self.switch {
            let t = self.start.t_of_u(r);
            let offset = dir * t * t;
            SliceValue {
                x: self.start.root + offset,
                offset,
                dx: sign * 2.0 * dir * t / self.start.du_dt(t),
            }
        } else {
            let s = self.end.t_of_u(self.half - r);
            let x = self.end.x(s);
            SliceValue {
                x,
                offset: x - self.start.root,
                dx: sign * 2.0 * dir * s / self.end.du_dt(s),
            }
        }
    }

    /// `∫_0^r x^2 du` for `r ∈ [0, K]`.
    fn quarter_moment(&self, r: f64) -> f64 {
        if r <= self.switch {
            self.start.moment_of_t(self.start.t_of_u(r))
        } else {
            let s = self.end.t_of_u(self.half - r);
            self.half_moment - self.end.moment_of_t(s)
        }
    }

    /// `∫_0^u Q^2 du'` for any real `u`.
    fn moment(&self, u: f64) -> f64 {
        let period = 2.0 * self.half;
        let full = 2.0 * self.half_moment;
        let n = (u / period).floor();
        let r = u - n * period;
        let part = if r <= self.half {
            self.quarter_moment(r)
        } else {
            full - self.quarter_moment((period - r).max(0.0))
        };
        n * full + part
    }

    fn invert(&self, x: f64) -> f64 {
        let span = (self.end.root - self.start.root).abs();
        let from_start = (x - self.start.root).abs();
        if from_start <= 0.5 * span {
            self.start.u_of_t(from_start.sqrt())
        } else {
            let s = (x - self.end.root).abs().sqrt();
            self.half - self.end.u_of_t(s)
        }
    }
}

/// Periods and real-slice evaluators of `Q` for an admissible quartic.
#[derive(Debug, Clone)]
pub struct EllipticModel {
    params: QuarticParams,
    roots: RootQuadruple,
    q1: RealSlice,
    q2: RealSlice,
}

/// Constructs the model; see [`EllipticModel::build`].
pub fn build_model(params: QuarticParams) -> Result<EllipticModel, EllipticError> {
    EllipticModel::build(params)
}

impl EllipticModel {
    /// Requires `a3 < 0`, four distinct real roots and the (non-strict) root
    /// inequalities `β1 + β4 <= 0 <= β2 + β3`, so that the even quartic is
    /// accepted as the boundary case.
    pub fn build(params: QuarticParams) -> Result<Self, EllipticError> {
        if !(params.a3 < 0.0) {
            return Err(EllipticError::InadmissibleParams(format!(
                "a3 = {} must be negative",
                params.a3
            )));
        }
        let roots = real_roots(&params)?;
        let [b1, b2, b3, b4] = roots.beta;
        let tol = 1e-12 * b1.abs().max(b4.abs());
        if !(b2 > 0.0 && b3 < 0.0) {
            return Err(EllipticError::InadmissibleParams(format!(
                "need β2 > 0 > β3, roots {:?}",
                roots.beta
            )));
        }
        if b1 + b4 > tol || b2 + b3 < -tol {
            return Err(EllipticError::InadmissibleParams(format!(
                "root inequalities violated: β1+β4 = {}, β2+β3 = {}",
                b1 + b4,
                b2 + b3
            )));
        }
        let lead = params.a3.abs();
        let q1 = RealSlice::new(lead, b2, b1, [b1, b3, b4], [b2, b3, b4]);
        let q2 = RealSlice::new(lead, b2, b3, [b1, b3, b4], [b1, b2, b4]);
        Ok(Self {
            params,
            roots,
            q1,
            q2,
        })
    }

    pub fn from_roots(beta: [f64; 4], a3: f64) -> Result<Self, EllipticError> {
        Self::build(crate::polyroots::from_roots(beta, a3)?)
    }

    pub fn params(&self) -> &QuarticParams {
        &self.params
    }

    pub fn roots(&self) -> &RootQuadruple {
        &self.roots
    }

    pub fn beta(&self) -> [f64; 4] {
        self.roots.beta
    }

    /// Half real period.
    pub fn k1(&self) -> f64 {
        self.q1.half
    }

    /// Half imaginary period divided by `i`.
    pub fn k2(&self) -> f64 {
        self.q2.half
    }

    pub fn q1(&self, u1: f64) -> f64 {
        self.q1.eval(u1).x
    }

    pub fn q2(&self, u2: f64) -> f64 {
        self.q2.eval(u2).x
    }

    pub fn dq1(&self, u1: f64) -> f64 {
        self.q1.eval(u1).dx
    }

    pub fn dq2(&self, u2: f64) -> f64 {
        self.q2.eval(u2).dx
    }

    pub fn slice1(&self, u1: f64) -> SliceValue {
        self.q1.eval(u1)
    }

    pub fn slice2(&self, u2: f64) -> SliceValue {
        self.q2.eval(u2)
    }

    /// `∫_0^{u1} Q1(s)^2 ds`.
    pub fn moment1(&self, u1: f64) -> f64 {
        self.q1.moment(u1)
    }

    /// `∫_0^{u2} Q2(s)^2 ds`.
    pub fn moment2(&self, u2: f64) -> f64 {
        self.q2.moment(u2)
    }

    /// First-quarter inverse of `Q1` (branch `U1`) or `Q2` (branch `U2`).
    pub fn invert_u(&self, x: f64, branch: Branch) -> Result<f64, EllipticError> {
        let [b1, b2, b3, _] = self.roots.beta;
        let (lo, hi, slice) = match branch {
            Branch::U1 => (b2, b1, &self.q1),
            Branch::U2 => (b3, b2, &self.q2),
        };
        if !(lo..=hi).contains(&x) {
            return Err(EllipticError::OutOfRange { x, lo, hi });
        }
        Ok(slice.invert(x))
    }

    /// `C` in `Q1(u) ≈ β2 + C u^2`, i.e. `P'(β2) / 16`.
    pub fn turning_coefficient(&self) -> f64 {
        self.params.derivative(self.roots.beta[1]) / 16.0
    }

    /// Quartic coefficient `D` in `Q1(u) ≈ β2 + C u^2 + D u^4`.
    pub fn turning_quartic_coefficient(&self) -> f64 {
        self.params.second_derivative(self.roots.beta[1]) * self.turning_coefficient() / 96.0
    }

    /// Evaluation through Jacobi's `dn`, valid only for even quartics:
    /// `Q1(z) = β2 / dn(α z | m)`, `α = β1 √(-a3) / 2`, `m = 1 - β2²/β1²`.
    pub fn jacobi_special(&self, z: f64) -> Result<f64, EllipticError> {
        let a0 = self.params.a0;
        if a0.abs() > 1e-12 * self.params.scale() {
            return Err(EllipticError::NotEvenQuartic(a0));
        }
        let [b1, b2, _, _] = self.roots.beta;
        let alpha = b1 * (-self.params.a3).sqrt() / 2.0;
        let m = 1.0 - (b2 / b1).powi(2);
        let (_, _, dn) = jacobi_sn_cn_dn(alpha * z, m);
        Ok(b2 / dn)
    }

    /// `n` samples of `(u, Q1(u), Q1'(u))` over one period `[0, 2 K1]`.
    pub fn table(&self, n: usize) -> Vec<(f64, f64, f64)> {
        let period = 2.0 * self.k1();
        (0..n)
            .map(|i| {
                let u = if n > 1 {
                    period * i as f64 / (n - 1) as f64
                } else {
                    0.0
                };
                let v = self.q1.eval(u);
                (u, v.x, v.dx)
            })
            .collect()
    }
}

/// Jacobi `sn`, `cn`, `dn` with parameter `m = k^2 ∈ [0, 1)` by the
/// arithmetic-geometric mean.
pub fn jacobi_sn_cn_dn(u: f64, m: f64) -> (f64, f64, f64) {
    if m < 1e-300 {
        return (u.sin(), u.cos(), 1.0);
    }
    let mut a = vec![1.0];
    let mut c = vec![m.sqrt()];
    let mut b = (1.0 - m).sqrt();
    while c.last().unwrap().abs() > 1e-16 && a.len() < 40 {
        let an = *a.last().unwrap();
        c.push(0.5 * (an - b));
        a.push(0.5 * (an + b));
        b = (an * b).sqrt();
    }
    let n = a.len() - 1;
    let mut phi = 2f64.powi(n as i32) * a[n] * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    // dn >= sqrt(1 - m) > 0, so this form loses nothing for m < 1
    let dn = (1.0 - m * sn * sn).sqrt();
    (sn, cn, dn)
}

/// Complete elliptic integral of the first kind, parameter `m = k^2`.
pub fn complete_elliptic_k(m: f64) -> f64 {
    let (mut a, mut b) = (1.0_f64, (1.0 - m).sqrt());
    for _ in 0..40 {
        let (an, bn) = (0.5 * (a + b), (a * b).sqrt());
        a = an;
        b = bn;
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
    }
    PI / (2.0 * a)
}

/// Degenerate model `β1 = β2` with `a3 = -1`: `Q2` becomes elementary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitModel {
    pub beta1: f64,
    pub beta3: f64,
    pub beta4: f64,
    /// `2β1 - β3 - β4 = 4β1`.
    pub b: f64,
    /// `R(β1) = (β1 - β3)(β1 - β4)`.
    pub c: f64,
    /// `b^2 - 4c = (β3 - β4)^2`.
    pub d: f64,
    /// Symmetry centre of `Q2`, `ln(D) / √c`.
    pub delta: f64,
}

impl LimitModel {
    pub fn new(beta1: f64, beta3: f64, beta4: f64) -> Result<Self, EllipticError> {
        if !(beta1 > 0.0 && 0.0 > beta3 && beta3 > beta4) {
            return Err(EllipticError::InvalidLimit(format!(
                "need β1 > 0 > β3 > β4, got ({beta1}, {beta3}, {beta4})"
            )));
        }
        let sum = 2.0 * beta1 + beta3 + beta4;
        if sum.abs() > 1e-10 * beta1.max(beta4.abs()) {
            return Err(EllipticError::InvalidLimit(format!(
                "2β1 + β3 + β4 = {sum:e} must vanish"
            )));
        }
        let b = 2.0 * beta1 - beta3 - beta4;
        let c = (beta1 - beta3) * (beta1 - beta4);
        let d = b * b - 4.0 * c;
        if !(d > 0.0) {
            return Err(EllipticError::InvalidLimit(format!("b^2 - 4c = {d} must be positive")));
        }
        Ok(Self {
            beta1,
            beta3,
            beta4,
            b,
            c,
            d,
            delta: d.ln() / c.sqrt(),
        })
    }

    /// `R(ξ) = (ξ - β3)(ξ - β4)` at `ξ = β1`.
    pub fn r_beta1(&self) -> f64 {
        self.c
    }

    /// `β1 - 2c / (√D cosh(½√c (u - δ)) + b)`.
    pub fn q2(&self, u2: f64) -> f64 {
        let theta = 0.5 * self.c.sqrt() * (u2 - self.delta);
        self.beta1 - 2.0 * self.c / (self.d.sqrt() * theta.cosh() + self.b)
    }

    /// Exponential form `β1 - 4c e^s / ((b + e^s)^2 - 4c)`, `s = ½√c u`.
    pub fn q2_exponential(&self, u2: f64) -> f64 {
        let e = (0.5 * self.c.sqrt() * u2).exp();
        self.beta1 - 4.0 * self.c * e / ((self.b + e).powi(2) - 4.0 * self.c)
    }

    pub fn dq2(&self, u2: f64) -> f64 {
        let sc = self.c.sqrt();
        let theta = 0.5 * sc * (u2 - self.delta);
        let den = self.d.sqrt() * theta.cosh() + self.b;
        2.0 * self.c * self.d.sqrt() * theta.sinh() * 0.5 * sc / (den * den)
    }

    /// `Q̃2(ũ) = Q2(4ũ/√c + δ)`.
    pub fn q2_tilde(&self, ut: f64) -> f64 {
        self.beta1 - 2.0 * self.c / (self.d.sqrt() * (2.0 * ut).cosh() + self.b)
    }

    /// Decay constant of `β1² - Q̃2²`: `A = 8 β1 c / √D`.
    pub fn decay_constant(&self) -> f64 {
        8.0 * self.beta1 * self.c / self.d.sqrt()
    }
}

/// Evaluates `Q2` of a limit model; free-function form of [`LimitModel::q2`].
pub fn limit_q2(lm: &LimitModel, u2: f64) -> f64 {
    lm.q2(u2)
}
