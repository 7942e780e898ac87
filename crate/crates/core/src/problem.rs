use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::order::FractionalOrder;
use crate::psi::{PsiFunction, ScalarFn};

/// Right-hand side f(x, z, W) where W is the inner Volterra integral.
pub type RhsFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Inner Volterra kernel w(x, t, z).
#[derive(Clone)]
pub enum InnerKernel {
    /// w ≡ 0; lets the solver skip the O(N²) inner quadrature.
    Zero,
    Fn(Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>),
}

impl InnerKernel {
    pub fn new(w: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        InnerKernel::Fn(Arc::new(w))
    }

    #[inline]
    pub fn eval(&self, x: f64, t: f64, z: f64) -> f64 {
        match self {
            InnerKernel::Zero => 0.0,
            InnerKernel::Fn(w) => w(x, t, z),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, InnerKernel::Zero)
    }
}

impl fmt::Debug for InnerKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InnerKernel::Zero => f.write_str("InnerKernel::Zero"),
            InnerKernel::Fn(_) => f.write_str("InnerKernel::Fn(..)"),
        }
    }
}

/// Global Lipschitz constants: Q1 for f in (z, W), Q2 for w in z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzConstants {
    pub q1: f64,
    pub q2: f64,
}

/// Pointwise Lipschitz coefficients Q3(x), Q4(x).
#[derive(Clone)]
pub struct LipschitzFunctions {
    pub q3: ScalarFn,
    pub q4: ScalarFn,
}

impl fmt::Debug for LipschitzFunctions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("LipschitzFunctions(..)")
    }
}

/// ψ-Hilfer integrodifferential initial-value problem
///
/// ```text
/// ᴴD^{α,β;ψ} z(x) = f(x, z(x), ∫_a^x w(x, t, z(t)) dt),   I^{1−γ;ψ} z(a) = z_a
/// ```
#[derive(Clone)]
pub struct IvProblem {
    a: f64,
    b: f64,
    order: FractionalOrder,
    psi: PsiFunction,
    z_a: f64,
    f: RhsFn,
    w: InnerKernel,
    constants: Option<LipschitzConstants>,
    functions: Option<LipschitzFunctions>,
}

impl fmt::Debug for IvProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IvProblem")
            .field("interval", &(self.a, self.b))
            .field("order", &self.order)
            .field("psi", &self.psi)
            .field("z_a", &self.z_a)
            .field("w", &self.w)
            .field("constants", &self.constants)
            .field("functions", &self.functions.is_some())
            .finish()
    }
}

impl IvProblem {
    pub fn new(
        interval: (f64, f64),
        order: FractionalOrder,
        psi: PsiFunction,
        z_a: f64,
        f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let (a, b) = interval;
        psi.validate_on(a, b)?;
        if !z_a.is_finite() {
            return Err(Error::InvalidInput(format!("z_a must be finite, got {z_a}")));
        }
        Ok(Self {
            a,
            b,
            order,
            psi,
            z_a,
            f: Arc::new(f),
            w: InnerKernel::Zero,
            constants: None,
            functions: None,
        })
    }

    pub fn with_kernel(mut self, w: InnerKernel) -> Self {
        self.w = w;
        self
    }

    pub fn with_constants(mut self, q1: f64, q2: f64) -> Result<Self> {
        if !(q1 >= 0.0 && q2 >= 0.0 && q1.is_finite() && q2.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "Lipschitz constants must be finite and nonnegative, got Q1 = {q1}, Q2 = {q2}"
            )));
        }
        self.constants = Some(LipschitzConstants { q1, q2 });
        Ok(self)
    }

    /// Attaches Q3(x), Q4(x). Nonnegativity is checked where the bounds
    /// sample them.
    pub fn with_coefficients(
        mut self,
        q3: impl Fn(f64) -> f64 + Send + Sync + 'static,
        q4: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.functions = Some(LipschitzFunctions {
            q3: Arc::new(q3),
            q4: Arc::new(q4),
        });
        self
    }

    pub fn with_z_a(mut self, z_a: f64) -> Self {
        self.z_a = z_a;
        self
    }

    pub fn with_rhs(mut self, f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.f = Arc::new(f);
        self
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn order(&self) -> FractionalOrder {
        self.order
    }

    pub fn psi(&self) -> &PsiFunction {
        &self.psi
    }

    pub fn z_a(&self) -> f64 {
        self.z_a
    }

    /// ψ(b) − ψ(a).
    pub fn psi_span(&self) -> f64 {
        self.psi.eval(self.b) - self.psi.eval(self.a)
    }

    #[inline]
    pub fn rhs(&self, x: f64, z: f64, inner: f64) -> f64 {
        (self.f)(x, z, inner)
    }

    pub fn kernel(&self) -> &InnerKernel {
        &self.w
    }

    pub fn constants(&self) -> Option<LipschitzConstants> {
        self.constants
    }

    /// Q3, Q4 as functions. Constant data (Q1, Q2) also satisfies the
    /// pointwise conditions, so it is used when no functions were attached.
    pub fn coefficients(&self) -> Option<LipschitzFunctions> {
        if let Some(functions) = &self.functions {
            return Some(functions.clone());
        }
        self.constants.map(|LipschitzConstants { q1, q2 }| LipschitzFunctions {
            q3: Arc::new(move |_| q1),
            q4: Arc::new(move |_| q2),
        })
    }
}
