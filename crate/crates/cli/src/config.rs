//! JSON run configuration.
//!
//! ```json
//! {
//!   "family": "CaseII",
//!   "mu": 1.0,
//!   "B": 0.5,
//!   "geometry": { "roots": [3, 2, -1, -4], "a3": -1 },
//!   "integrator": { "t_end": 50, "tol": 1e-10, "stride": 10, "seed": 7 },
//!   "grid": { "n": 64, "stencil": 4 }
//! }
//! ```
//!
//! Case II geometry takes either `roots` with `a3`, or all four coefficients
//! of `P(x) = a3 x⁴ + a2 x² + a0 x + a1`. Note that `a0` is the **linear**
//! coefficient and `a1` the constant one. Case I takes `alpha` and `a3`, the
//! limit family `beta1`, `beta3`, `beta4`, and VY takes `vyA > vyB > 0`.
//! `k` is derived from `B` and `a3`; it may be given only as a cross-check.

use std::fmt;
use std::path::Path;

use monopole_core::elliptic::{EllipticModel, LimitModel};
use monopole_core::fields::{Family, SystemSpec};
use monopole_core::polyroots::{self, QuarticParams};
use serde::Deserialize;

/// Invalid or inconsistent configuration; maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub roots: Option<[f64; 4]>,
    pub a3: Option<f64>,
    pub a2: Option<f64>,
    pub a0: Option<f64>,
    pub a1: Option<f64>,
    pub alpha: Option<[f64; 3]>,
    pub beta1: Option<f64>,
    pub beta3: Option<f64>,
    pub beta4: Option<f64>,
    #[serde(rename = "vyA")]
    pub vy_a: Option<f64>,
    #[serde(rename = "vyB")]
    pub vy_b: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub t_end: f64,
    pub tol: f64,
    pub stride: usize,
    pub seed: u64,
    pub trajectories: usize,
    /// `(u1, u2, p1, p2)` or `(M, x)`; random when absent.
    pub initial: Option<Vec<f64>>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            t_end: 10.0,
            tol: 1e-10,
            stride: 1,
            seed: 0,
            trajectories: 1,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n: usize,
    pub stencil: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 64, stencil: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: Family,
    pub mu: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(default)]
    pub k: Option<f64>,
    /// Leaf parameter `(M, x)`; must equal `B` when present.
    #[serde(default)]
    pub nu: Option<f64>,
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub grid: GridConfig,
}

fn need(v: Option<f64>, key: &str) -> Result<f64, ConfigError> {
    v.ok_or_else(|| ConfigError(format!("missing key \"geometry.{key}\"")))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
    }

    /// Built-in example system of each family.
    pub fn example(family: Family) -> Self {
        let mut geometry = GeometryConfig::default();
        let (mu, b) = match family {
            Family::CaseI => {
                geometry.alpha = Some([3.0, 2.0, 1.0]);
                geometry.a3 = Some(-4.0);
                (1.0, 0.5)
            }
            Family::CaseII => {
                geometry.roots = Some([3.0, 2.0, -1.0, -4.0]);
                geometry.a3 = Some(-1.0);
                (1.0, 0.5)
            }
            Family::CaseIILimit => {
                geometry.beta1 = Some(1.0);
                geometry.beta3 = Some(-0.5);
                geometry.beta4 = Some(-1.5);
                (1.0, 0.5)
            }
            Family::Vy => {
                geometry.vy_a = Some(2.0);
                geometry.vy_b = Some(1.0);
                (1.0, 0.5)
            }
        };
        Self {
            family,
            mu,
            b,
            k: None,
            nu: None,
            geometry,
            integrator: IntegratorConfig::default(),
            grid: GridConfig::default(),
        }
    }

    /// Case II quartic from either roots or coefficients.
    pub fn quartic(&self) -> Result<QuarticParams, ConfigError> {
        let g = &self.geometry;
        let a3 = need(g.a3, "a3")?;
        let coeffs = [g.a2, g.a0, g.a1];
        match g.roots {
            Some(beta) => {
                if coeffs.iter().any(Option::is_some) {
                    return err("give either \"roots\" or the coefficients \"a2\", \"a0\", \"a1\", not both");
                }
                polyroots::from_roots(beta, a3).map_err(|e| ConfigError(format!("geometry.roots: {e}")))
            }
            None => Ok(QuarticParams::new(a3, need(g.a2, "a2")?, need(g.a0, "a0")?, need(g.a1, "a1")?)),
        }
    }

    /// Validated system; `k` and `ν` cross-checks included.
    pub fn system(&self) -> Result<SystemSpec, ConfigError> {
        let g = &self.geometry;
        let spec = match self.family {
            Family::CaseI => {
                let alpha = g.alpha.ok_or_else(|| ConfigError("missing key \"geometry.alpha\"".into()))?;
                if let Some(nu) = self.nu {
                    if nu != self.b {
                        return err(format!("nu = {nu} must equal B = {} for Case I", self.b));
                    }
                }
                SystemSpec::case_i(alpha, need(g.a3, "a3")?, self.mu, self.b)
                    .map_err(|e| ConfigError(e.to_string()))?
            }
            Family::CaseII => {
                let model = EllipticModel::build(self.quartic()?).map_err(|e| ConfigError(e.to_string()))?;
                SystemSpec::case_ii(model, self.mu, self.b)
            }
            Family::CaseIILimit => {
                if let Some(a3) = g.a3 {
                    if a3 != -1.0 {
                        return err(format!("the limit family is normalised to a3 = -1, got {a3}"));
                    }
                }
                let lm = LimitModel::new(need(g.beta1, "beta1")?, need(g.beta3, "beta3")?, need(g.beta4, "beta4")?)
                    .map_err(|e| ConfigError(e.to_string()))?;
                SystemSpec::limit(lm, self.mu, self.b)
            }
            Family::Vy => SystemSpec::two_centre(need(g.vy_a, "vyA")?, need(g.vy_b, "vyB")?, self.mu)
                .map_err(|e| ConfigError(e.to_string()))?,
        };
        if let Some(k) = self.k {
            match spec.k() {
                Some(derived) if (k - derived).abs() <= 1e-12 * derived.abs().max(1.0) => {}
                Some(derived) => return err(format!("k = {k} contradicts the derived k = -4B/a3 = {derived}")),
                None => return err("k is not defined for this family"),
            }
        }
        if self.integrator.tol <= 0.0 || self.integrator.t_end < 0.0 {
            return err("integrator.tol must be positive and integrator.t_end non-negative");
        }
        Ok(spec)
    }

    /// Leaf parameter `ν = (M, x)` for the e(3)* families.
    pub fn leaf_nu(&self) -> f64 {
        self.nu.unwrap_or(self.b)
    }
}
