use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Number of probe points used to check monotonicity on an interval.
const PROBE_POINTS: usize = 257;

/// The increasing weight function ψ that sets the geometry of every
/// fractional operator: kernels are written in terms of ψ(x) − ψ(t) and the
/// measure ψ′(t) dt.
#[derive(Clone)]
pub struct PsiFunction {
    psi: ScalarFn,
    psi_prime: ScalarFn,
    inverse: Option<ScalarFn>,
    label: String,
}

impl fmt::Debug for PsiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PsiFunction")
            .field("label", &self.label)
            .field("analytic_inverse", &self.inverse.is_some())
            .finish()
    }
}

impl PsiFunction {
    pub fn new(
        label: impl Into<String>,
        psi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        psi_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            psi: Arc::new(psi),
            psi_prime: Arc::new(psi_prime),
            inverse: None,
            label: label.into(),
        }
    }

    /// Registers an analytic inverse, used instead of bisection by grid
    /// construction.
    pub fn with_inverse(mut self, inverse: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.inverse = Some(Arc::new(inverse));
        self
    }

    /// ψ(x) = x, the classical Riemann-Liouville geometry.
    pub fn linear() -> Self {
        Self::new("linear", |x| x, |_| 1.0).with_inverse(|u| u)
    }

    /// ψ(x) = x^p, p > 0. Increasing on x > 0.
    pub fn power(p: f64) -> Self {
        Self::new(format!("power(p={p})"), move |x| x.powf(p), move |x| p * x.powf(p - 1.0))
            .with_inverse(move |u| u.powf(1.0 / p))
    }

    /// ψ(x) = ln x on x > 0 (Hadamard-type geometry).
    pub fn log() -> Self {
        Self::new("log", f64::ln, |x| 1.0 / x).with_inverse(f64::exp)
    }

    /// ψ(x) = exp(k x), k > 0.
    pub fn exp(k: f64) -> Self {
        Self::new(format!("exp(k={k})"), move |x| (k * x).exp(), move |x| k * (k * x).exp())
            .with_inverse(move |u| u.ln() / k)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.psi)(x)
    }

    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        (self.psi_prime)(x)
    }

    pub fn has_analytic_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    /// Checks ψ′ > 0, finiteness, and strict increase of ψ on a probe grid
    /// over [a, b].
    pub fn validate_on(&self, a: f64, b: f64) -> Result<()> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidInput(format!(
                "interval must be finite with a < b, got [{a}, {b}]"
            )));
        }
        let mut prev = f64::NEG_INFINITY;
        for k in 0..PROBE_POINTS {
            let x = if k + 1 == PROBE_POINTS {
                b
            } else {
                a + (b - a) * k as f64 / (PROBE_POINTS - 1) as f64
            };
            let value = self.eval(x);
            let slope = self.derivative(x);
            if !value.is_finite() || !slope.is_finite() {
                return Err(Error::Construction(format!(
                    "psi '{}' is not finite at x = {x}",
                    self.label
                )));
            }
            if slope <= 0.0 {
                return Err(Error::Construction(format!(
                    "psi '{}' has non-positive derivative {slope} at x = {x}",
                    self.label
                )));
            }
            if value <= prev {
                return Err(Error::Construction(format!(
                    "psi '{}' is not strictly increasing near x = {x}",
                    self.label
                )));
            }
            prev = value;
        }
        Ok(())
    }

    /// Solves ψ(x) = target on [a, b]. Uses the registered inverse when there
    /// is one (clamped into [a, b]), otherwise bisection to `tol`.
    pub fn invert(&self, target: f64, a: f64, b: f64, tol: f64) -> Result<f64> {
        if let Some(inv) = &self.inverse {
            let x = inv(target);
            if !x.is_finite() {
                return Err(Error::Construction(format!(
                    "analytic inverse of psi '{}' is not finite at {target}",
                    self.label
                )));
            }
            return Ok(x.clamp(a, b));
        }
        let (mut lo, mut hi) = (a, b);
        let (flo, fhi) = (self.eval(lo) - target, self.eval(hi) - target);
        if flo > 0.0 || fhi < 0.0 {
            return Err(Error::Construction(format!(
                "psi '{}' does not bracket {target} on [{a}, {b}]",
                self.label
            )));
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_functions_validate_on_their_natural_domains() {
        PsiFunction::linear().validate_on(0.0, 1.0).unwrap();
        PsiFunction::power(2.0).validate_on(1.0, 2.0).unwrap();
        PsiFunction::log().validate_on(1.0, std::f64::consts::E).unwrap();
        PsiFunction::exp(0.5).validate_on(-1.0, 3.0).unwrap();
    }

    #[test]
    fn zero_derivative_is_rejected() {
        // x^2 has psi'(0) = 0
        let err = PsiFunction::power(2.0).validate_on(0.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::Construction(_)));
    }

    #[test]
    fn non_monotone_psi_is_rejected() {
        let bumpy = PsiFunction::new("bumpy", |x: f64| x + 0.3 * (8.0 * x).sin(), |x: f64| {
            1.0 + 2.4 * (8.0 * x).cos()
        });
        assert!(bumpy.validate_on(0.0, 1.0).is_err());
    }

    #[test]
    fn log_is_not_finite_at_zero() {
        assert!(PsiFunction::log().validate_on(0.0, 1.0).is_err());
    }

    #[test]
    fn bisection_matches_analytic_inverse() {
        let cubic = PsiFunction::new("cubic", |x: f64| x * x * x + x, |x: f64| 3.0 * x * x + 1.0);
        let x = cubic.invert(2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((x - 1.0).abs() < 1e-13);
    }
}
