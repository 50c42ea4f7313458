//! The depressed quartic `P(x) = a3 x^4 + a2 x^2 + a0 x + a1` and its real roots.
//!
//! Coefficient naming follows the monopole literature: `a0` multiplies the
//! *linear* term and `a1` is the *constant* term. The JSON keys use the same
//! names, so `{"a3": -1, "a2": 15, "a0": -10, "a1": -24}` is
//! `-(x-3)(x-2)(x+1)(x+4)`.

use nalgebra::{linalg::Schur, Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("quartic has fewer than four real roots (discriminant {discriminant:e})")]
    FewerThanFourRealRoots { discriminant: f64 },
    #[error("quartic has a multiple root (|discriminant| = {discriminant:e} below threshold {threshold:e})")]
    MultipleRootDetected { discriminant: f64, threshold: f64 },
    #[error("roots must sum to zero, got {sum:e}")]
    NonZeroRootSum { sum: f64 },
    #[error("leading coefficient a3 must be negative, got {0}")]
    NonNegativeLeading(f64),
}

/// Coefficients of `P(x) = a3 x^4 + a2 x^2 + a0 x + a1` (no cubic term).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticParams {
    pub a3: f64,
    pub a2: f64,
    /// Linear coefficient.
    pub a0: f64,
    /// Constant coefficient.
    pub a1: f64,
}

impl QuarticParams {
    pub fn new(a3: f64, a2: f64, a0: f64, a1: f64) -> Self {
        Self { a3, a2, a0, a1 }
    }

    /// `max(1, |a3|, |a2|, |a0|, |a1|)`; all relative tolerances use this.
    pub fn scale(&self) -> f64 {
        [1.0, self.a3.abs(), self.a2.abs(), self.a0.abs(), self.a1.abs()]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn eval(&self, x: f64) -> f64 {
        eval_p(self, x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        4.0 * self.a3 * x * x * x + 2.0 * self.a2 * x + self.a0
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        12.0 * self.a3 * x * x + 2.0 * self.a2
    }
}

pub fn eval_p(params: &QuarticParams, x: f64) -> f64 {
    let x2 = x * x;
    (params.a3 * x2 + params.a2) * x2 + params.a0 * x + params.a1
}

/// Discriminant of the quartic, specialised to a vanishing cubic coefficient.
pub fn discriminant(params: &QuarticParams) -> f64 {
    let QuarticParams { a3, a2, a0, a1 } = *params;
    256.0 * a1.powi(3) * a3.powi(3) - 128.0 * a1 * a1 * a2 * a2 * a3 * a3
        + 144.0 * a0 * a0 * a1 * a2 * a3 * a3
        - 27.0 * a0.powi(4) * a3 * a3
        + 16.0 * a1 * a2.powi(4) * a3
        - 4.0 * a0 * a0 * a2.powi(3) * a3
}

/// Four distinct real roots in strictly descending order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootQuadruple {
    pub beta: [f64; 4],
}

impl RootQuadruple {
    pub fn sum(&self) -> f64 {
        self.beta.iter().sum()
    }

    /// `beta1 + beta4 < 0` and `beta2 + beta3 > 0`.
    pub fn root_inequalities(&self) -> bool {
        let [b1, b2, b3, b4] = self.beta;
        b1 + b4 < 0.0 && b2 + b3 > 0.0
    }

    pub fn is_strictly_descending(&self) -> bool {
        self.beta.windows(2).all(|w| w[0] > w[1])
    }
}

/// `Δ = a3^6 * prod (βi - βj)^2`, so compare against the twelfth power of the
/// root scale of the monic quartic. Invariant under rescaling either the
/// coefficients or the roots.
fn multiple_root_threshold(params: &QuarticParams) -> f64 {
    let QuarticParams { a3, a2, a0, a1 } = *params;
    let rho = (a2 / a3).abs().sqrt().max((a0 / a3).abs().cbrt()).max((a1 / a3).abs().sqrt().sqrt());
    1e-10 * a3.powi(6) * rho.powi(12)
}

/// Real roots by companion-matrix eigenvalues, Newton-polished and sorted
/// descending.
pub fn real_roots(params: &QuarticParams) -> Result<RootQuadruple, RootError> {
    if params.a3 == 0.0 {
        return Err(RootError::NonNegativeLeading(params.a3));
    }
    let disc = discriminant(params);
    let threshold = multiple_root_threshold(params);
    if disc.abs() < threshold {
        return Err(RootError::MultipleRootDetected {
            discriminant: disc,
            threshold,
        });
    }
    if disc < 0.0 {
        return Err(RootError::FewerThanFourRealRoots { discriminant: disc });
    }
    // monic: x^4 + c2 x^2 + c1 x + c0
    let c2 = params.a2 / params.a3;
    let c1 = params.a0 / params.a3;
    let c0 = params.a1 / params.a3;
    #[rustfmt::skip]
    let companion = Matrix4::new(
        0.0, 0.0, 0.0, -c0,
        1.0, 0.0, 0.0, -c1,
        0.0, 1.0, 0.0, -c2,
        0.0, 0.0, 1.0, 0.0,
    );
    let eig = companion_eigenvalues(&companion, 1.0 + c2.abs().sqrt() + c1.abs().cbrt() + c0.abs().sqrt().sqrt());
    let root_scale = eig.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut beta = [0.0; 4];
    for (slot, z) in beta.iter_mut().zip(eig.iter()) {
        // Δ > 0 also admits four non-real roots.
        if z.im.abs() > 1e-7 * root_scale {
            return Err(RootError::FewerThanFourRealRoots { discriminant: disc });
        }
        *slot = polish(params, z.re);
    }
    beta.sort_by(|a, b| b.total_cmp(a));
    let quad = RootQuadruple { beta };
    if !quad.is_strictly_descending() {
        return Err(RootError::MultipleRootDetected {
            discriminant: disc,
            threshold,
        });
    }
    Ok(quad)
}

/// Unshifted QR stalls on companions of even quartics with complex roots,
/// where the spectrum is symmetric under `z -> -z`. Shifting by a multiple of
/// the root bound breaks the symmetry; Newton polishing recovers the digits.
fn companion_eigenvalues(companion: &Matrix4<f64>, bound: f64) -> Vector4<Complex64> {
    for shift in [0.0, 0.37 * bound, -0.61 * bound] {
        let shifted = companion + Matrix4::identity() * shift;
        if let Some(schur) = Schur::try_new(shifted, f64::EPSILON, 500) {
            return schur.complex_eigenvalues().map(|z| z - shift);
        }
    }
    unreachable!("QR iteration failed on every shifted companion matrix")
}

fn polish(params: &QuarticParams, mut x: f64) -> f64 {
    for _ in 0..8 {
        let d = params.derivative(x);
        if d == 0.0 {
            break;
        }
        let step = params.eval(x) / d;
        x -= step;
        if step.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

/// Expands `a3 * prod(x - beta_i)`; the roots must sum to zero.
pub fn from_roots(beta: [f64; 4], a3: f64) -> Result<QuarticParams, RootError> {
    if !(a3 < 0.0) {
        return Err(RootError::NonNegativeLeading(a3));
    }
    let sum: f64 = beta.iter().sum();
    let bmax = beta.iter().fold(0.0_f64, |m, b| m.max(b.abs()));
    if sum.abs() > 1e-10 * bmax.max(f64::MIN_POSITIVE) {
        return Err(RootError::NonZeroRootSum { sum });
    }
    let [b1, b2, b3, b4] = beta;
    let e2 = b1 * b2 + b1 * b3 + b1 * b4 + b2 * b3 + b2 * b4 + b3 * b4;
    let e3 = b1 * b2 * b3 + b1 * b2 * b4 + b1 * b3 * b4 + b2 * b3 * b4;
    let e4 = b1 * b2 * b3 * b4;
    Ok(QuarticParams {
        a3,
        a2: a3 * e2,
        a0: -a3 * e3,
        a1: a3 * e4,
    })
}

/// Coefficient and root conditions for a regular system on the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    /// `a2 > 0`, `a3 < 0`, `a1 < a2/(4 a3) < 0`.
    pub coefficient_signs: bool,
    /// The discriminant inequality divided through by `a3`.
    pub discriminant_sign: bool,
    /// `beta1 + beta4 < 0` and `beta2 + beta3 > 0`; false when roots are unavailable.
    pub root_inequalities: bool,
    pub discriminant: f64,
    pub roots: Option<RootQuadruple>,
    pub root_error: Option<RootError>,
}

impl AdmissibilityReport {
    pub fn admissible(&self) -> bool {
        self.coefficient_signs && self.discriminant_sign && self.root_inequalities
    }
}

pub fn admissibility(params: &QuarticParams) -> AdmissibilityReport {
    let QuarticParams { a3, a2, a0, a1 } = *params;
    let ratio = a2 / (4.0 * a3);
    let coefficient_signs = a2 > 0.0 && a3 < 0.0 && a1 < ratio && ratio < 0.0;
    let disc_lhs = 256.0 * a1.powi(3) * a3 * a3 - 128.0 * a1 * a1 * a2 * a2 * a3
        + 144.0 * a0 * a0 * a1 * a2 * a3
        - 27.0 * a0.powi(4) * a3
        + 16.0 * a1 * a2.powi(4)
        - 4.0 * a0 * a0 * a2.powi(3);
    let discriminant_sign = disc_lhs < 0.0;
    let (roots, root_error) = match real_roots(params) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e)),
    };
    AdmissibilityReport {
        coefficient_signs,
        discriminant_sign,
        root_inequalities: roots.is_some_and(|r| r.root_inequalities()),
        discriminant: discriminant(params),
        roots,
        root_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3214() -> QuarticParams {
        QuarticParams::new(-1.0, 15.0, -10.0, -24.0)
    }

    /// Direct product form, independent of the coefficient expansion.
    fn product(beta: [f64; 4], a3: f64, x: f64) -> f64 {
        a3 * beta.iter().map(|b| x - b).product::<f64>()
    }

    #[test]
    fn eval_matches_factored_form() {
        let p = p3214();
        assert_eq!(eval_p(&p, 3.0), 0.0);
        assert_eq!(eval_p(&p, 2.0), 0.0);
        assert_eq!(eval_p(&p, 0.0), -24.0);
        for x in [-3.3, -0.7, 0.4, 1.9, 5.1] {
            let want = product([3.0, 2.0, -1.0, -4.0], -1.0, x);
            assert!((eval_p(&p, x) - want).abs() < 1e-10 * want.abs().max(1.0));
        }
    }

    #[test]
    fn discriminant_cases() {
        // -(x-2)^2 (x+1)(x+3)
        let double = from_roots([2.0, 2.0, -1.0, -3.0], -1.0).unwrap();
        assert!(discriminant(&double).abs() < 1e-9);
        // a3^6 * prod_{i<j} (bi - bj)^2 = (1*4*7*3*6*3)^2
        let d = discriminant(&p3214());
        assert!((d - 1512.0_f64.powi(2)).abs() < 1e-6 * d);
        // a0 = a1 = 0 leaves no surviving terms
        let q = QuarticParams::new(-2.0, 3.0, 0.0, 0.0);
        assert_eq!(discriminant(&q), 0.0);
        let q = QuarticParams::new(-2.0, 3.0, 0.0, 1.5);
        let want = 256.0 * 1.5f64.powi(3) * (-8.0) - 128.0 * 2.25 * 9.0 * 4.0
            + 16.0 * 1.5 * 81.0 * (-2.0);
        assert!((discriminant(&q) - want).abs() < 1e-9);
    }

    #[test]
    fn roots_of_examples() {
        let r = real_roots(&p3214()).unwrap();
        for (got, want) in r.beta.iter().zip([3.0, 2.0, -1.0, -4.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let r = real_roots(&QuarticParams::new(-1.0, 5.0, 0.0, -4.0)).unwrap();
        for (got, want) in r.beta.iter().zip([2.0, 1.0, -1.0, -2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_discriminant_rejected() {
        // -(x^2+1)(x-1)(x+1) has two complex roots
        let p = QuarticParams::new(-1.0, 0.0, 0.0, 1.0);
        assert!(discriminant(&p) < 0.0);
        assert!(matches!(
            real_roots(&p),
            Err(RootError::FewerThanFourRealRoots { .. })
        ));
        // four complex roots: -(x^2+1)(x^2+4), discriminant positive
        let p = QuarticParams::new(-1.0, -5.0, 0.0, -4.0);
        assert!(discriminant(&p) > 0.0);
        assert!(matches!(
            real_roots(&p),
            Err(RootError::FewerThanFourRealRoots { .. })
        ));
    }

    #[test]
    fn repeated_root_flagged() {
        let p = from_roots([1.0, 1.0, -1.0, -1.0], -1.0).unwrap();
        assert!(matches!(
            real_roots(&p),
            Err(RootError::MultipleRootDetected { .. })
        ));
    }

    #[test]
    fn from_roots_expansion() {
        assert_eq!(
            from_roots([3.0, 2.0, -1.0, -4.0], -1.0).unwrap(),
            QuarticParams::new(-1.0, 15.0, -10.0, -24.0)
        );
        assert_eq!(
            from_roots([2.0, 1.0, -1.0, -2.0], -1.0).unwrap(),
            QuarticParams::new(-1.0, 5.0, 0.0, -4.0)
        );
        assert!(matches!(
            from_roots([3.0, 2.0, -1.0, -3.0], -1.0),
            Err(RootError::NonZeroRootSum { .. })
        ));
        assert!(from_roots([3.0, 2.0, -1.0, -4.0], 1.0).is_err());
    }

    #[test]
    fn admissibility_examples() {
        let rep = admissibility(&p3214());
        assert!(rep.coefficient_signs && rep.discriminant_sign && rep.root_inequalities);
        assert!(rep.admissible());

        let rep = admissibility(&from_roots([4.0, 1.0, -2.0, -3.0], -1.0).unwrap());
        assert!(!rep.root_inequalities);
        assert!(!rep.admissible());

        let rep = admissibility(&QuarticParams::new(-1.0, -3.0, -1.0, -4.0));
        assert!(!rep.coefficient_signs);
    }

    #[test]
    fn json_keys_use_linear_a0() {
        let p: QuarticParams =
            serde_json::from_str(r#"{"a3": -1, "a2": 15, "a0": -10, "a1": -24}"#).unwrap();
        assert_eq!(p, p3214());
        assert_eq!(p.eval(3.0), 0.0);
    }
}
