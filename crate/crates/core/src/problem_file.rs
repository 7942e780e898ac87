//! Problem definition files (JSON or TOML) built from a fixed catalog of
//! ψ functions, right-hand sides, kernels and Lipschitz coefficients.
//!
//! ```toml
//! interval = [0.0, 1.0]
//! alpha = 0.6
//! beta = 0.4
//! z_a = 1.0
//! psi = { kind = "linear" }
//! f = { kind = "linear", lambda = 0.5, mu = 0.1 }   # f = offset + λ z + μ W
//! w = { kind = "separable", kappa = 0.5, p = 0.0, q = -1.0 }
//! q1 = 0.5
//! q2 = 0.5
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::order::FractionalOrder;
use crate::problem::{InnerKernel, IvProblem};
use crate::psi::PsiFunction;

pub const PSI_KINDS: &[&str] = &["linear", "power", "log", "exp"];
pub const F_KINDS: &[&str] = &["zero", "constant", "linear", "linear-in-z", "linear-in-z-and-w"];
pub const W_KINDS: &[&str] = &["zero", "constant", "linear", "linear-in-z", "separable"];
pub const COEFFICIENT_KINDS: &[&str] = &["constant", "linear", "exp"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PsiSpec {
    Linear,
    Power { p: f64 },
    Log,
    Exp { k: f64 },
}

/// f(x, z, W).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum RhsSpec {
    Zero,
    Constant {
        value: f64,
    },
    /// offset + λ z + μ W
    #[serde(alias = "linear-in-z", alias = "linear-in-z-and-w")]
    Linear {
        lambda: f64,
        #[serde(default)]
        mu: f64,
        #[serde(default)]
        offset: f64,
    },
}

/// w(x, t, z).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum KernelSpec {
    #[default]
    Zero,
    Constant {
        value: f64,
    },
    /// κ z
    #[serde(alias = "linear-in-z")]
    Linear { kappa: f64 },
    /// κ e^{p x + q t} z
    Separable { kappa: f64, p: f64, q: f64 },
}

/// A nonnegative coefficient function Q(x).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientSpec {
    Value(f64),
    Function(CoefficientFn),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CoefficientFn {
    Constant { value: f64 },
    /// c0 + c1 x
    Linear { c0: f64, c1: f64 },
    /// c e^{k x}
    Exp { c: f64, k: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub interval: [f64; 2],
    pub alpha: f64,
    pub beta: f64,
    pub z_a: f64,
    pub psi: PsiSpec,
    pub f: RhsSpec,
    #[serde(default)]
    pub w: KernelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q3: Option<CoefficientSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q4: Option<CoefficientSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Json,
    Toml,
}

impl FileFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Ok(FileFormat::Json),
            Some(e) if e.eq_ignore_ascii_case("toml") => Ok(FileFormat::Toml),
            other => Err(Error::Config(format!(
                "cannot infer problem file format from extension {:?} (expected .json or .toml)",
                other.unwrap_or("")
            ))),
        }
    }
}

fn check_kind(value: &Value, field: &str, known: &[&str]) -> Result<()> {
    let Some(kind) = value.get(field).and_then(|v| v.get("kind")) else {
        return Ok(());
    };
    match kind.as_str() {
        Some(k) if known.contains(&k) => Ok(()),
        Some(k) => Err(Error::Config(format!(
            "unknown {field} kind '{k}' (known: {})",
            known.join(", ")
        ))),
        None => Err(Error::Config(format!("{field}.kind must be a string"))),
    }
}

impl ProblemSpec {
    pub fn parse(text: &str, format: FileFormat) -> Result<Self> {
        let value: Value = match format {
            FileFormat::Json => serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?,
            FileFormat::Toml => {
                let table: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
                serde_json::to_value(table).map_err(|e| Error::Config(e.to_string()))?
            }
        };
        check_kind(&value, "psi", PSI_KINDS)?;
        check_kind(&value, "f", F_KINDS)?;
        check_kind(&value, "w", W_KINDS)?;
        check_kind(&value, "q3", COEFFICIENT_KINDS)?;
        check_kind(&value, "q4", COEFFICIENT_KINDS)?;
        serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let format = FileFormat::from_path(path)?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, format)
    }

    pub fn order(&self) -> Result<FractionalOrder> {
        FractionalOrder::new(self.alpha, self.beta)
    }

    pub fn build(&self) -> Result<IvProblem> {
        let order = self.order()?;
        let psi = match self.psi {
            PsiSpec::Linear => PsiFunction::linear(),
            PsiSpec::Power { p } if p > 0.0 => PsiFunction::power(p),
            PsiSpec::Exp { k } if k > 0.0 => PsiFunction::exp(k),
            PsiSpec::Log => PsiFunction::log(),
            PsiSpec::Power { p } => return Err(Error::Config(format!("power psi needs p > 0, got {p}"))),
            PsiSpec::Exp { k } => return Err(Error::Config(format!("exp psi needs k > 0, got {k}"))),
        };
        let interval = (self.interval[0], self.interval[1]);
        let mut problem = match self.f {
            RhsSpec::Zero => IvProblem::new(interval, order, psi, self.z_a, |_, _, _| 0.0)?,
            RhsSpec::Constant { value } => IvProblem::new(interval, order, psi, self.z_a, move |_, _, _| value)?,
            RhsSpec::Linear { lambda, mu, offset } => {
                IvProblem::new(interval, order, psi, self.z_a, move |_, z, w| offset + lambda * z + mu * w)?
            }
        };
        problem = problem.with_kernel(match self.w {
            KernelSpec::Zero => InnerKernel::Zero,
            KernelSpec::Constant { value } => InnerKernel::new(move |_, _, _| value),
            KernelSpec::Linear { kappa } => InnerKernel::new(move |_, _, z| kappa * z),
            KernelSpec::Separable { kappa, p, q } => {
                InnerKernel::new(move |x, t, z| kappa * (p * x + q * t).exp() * z)
            }
        });
        let kernel_is_zero = matches!(self.w, KernelSpec::Zero);

        match (self.q1, self.q2) {
            (None, None) => {}
            (Some(q1), Some(q2)) => problem = problem.with_constants(q1, q2)?,
            (Some(q1), None) if kernel_is_zero => problem = problem.with_constants(q1, 0.0)?,
            _ => {
                return Err(Error::Config(
                    "q1 and q2 must be given together (q2 may be omitted only when w is zero)".into(),
                ))
            }
        }
        let q3 = self.q3.as_ref().map(coefficient).transpose()?;
        let q4 = self.q4.as_ref().map(coefficient).transpose()?;
        match (q3, q4) {
            (None, None) => {}
            (Some(q3), Some(q4)) => problem = problem.with_coefficients(q3, q4),
            (Some(q3), None) if kernel_is_zero => problem = problem.with_coefficients(q3, |_| 0.0),
            _ => {
                return Err(Error::Config(
                    "q3 and q4 must be given together (q4 may be omitted only when w is zero)".into(),
                ))
            }
        }
        Ok(problem)
    }
}

type Coefficient = Box<dyn Fn(f64) -> f64 + Send + Sync>;

fn coefficient(spec: &CoefficientSpec) -> Result<Coefficient> {
    let check = |v: f64, name: &str| {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Config(format!("coefficient parameter {name} must be finite")))
        }
    };
    Ok(match *spec {
        CoefficientSpec::Value(v) | CoefficientSpec::Function(CoefficientFn::Constant { value: v }) => {
            let v = check(v, "value")?;
            if v < 0.0 {
                return Err(Error::Config(format!("coefficient must be nonnegative, got {v}")));
            }
            Box::new(move |_| v)
        }
        CoefficientSpec::Function(CoefficientFn::Linear { c0, c1 }) => {
            let (c0, c1) = (check(c0, "c0")?, check(c1, "c1")?);
            Box::new(move |x| c0 + c1 * x)
        }
        CoefficientSpec::Function(CoefficientFn::Exp { c, k }) => {
            let (c, k) = (check(c, "c")?, check(k, "k")?);
            Box::new(move |x| c * (k * x).exp())
        }
    })
}
