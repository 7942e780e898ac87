use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Order α ∈ (0, 1) and type β ∈ [0, 1] of a ψ-Hilfer derivative, together
/// with the derived singularity exponent γ = α + β(1 − α).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOrder", into = "RawOrder")]
pub struct FractionalOrder {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

#[derive(Serialize, Deserialize)]
struct RawOrder {
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawOrder> for FractionalOrder {
    type Error = Error;

    fn try_from(raw: RawOrder) -> Result<Self> {
        Self::new(raw.alpha, raw.beta)
    }
}

impl From<FractionalOrder> for RawOrder {
    fn from(order: FractionalOrder) -> Self {
        RawOrder {
            alpha: order.alpha,
            beta: order.beta,
        }
    }
}

impl FractionalOrder {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidOrder {
                order: alpha,
                expected: "(0, 1) for alpha",
            });
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidOrder {
                order: beta,
                expected: "[0, 1] for beta",
            });
        }
        // β = 1 is pinned so the Caputo case gets γ = 1 exactly, not 1 − ulp.
        let gamma = if beta == 1.0 {
            1.0
        } else {
            (alpha + beta * (1.0 - alpha)).min(1.0)
        };
        Ok(Self { alpha, beta, gamma })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Order of the outer integral in the Hilfer composition, β(1 − α).
    pub fn outer_order(&self) -> f64 {
        self.beta * (1.0 - self.alpha)
    }

    /// Order of the inner integral in the Hilfer composition, (1 − β)(1 − α).
    pub fn inner_order(&self) -> f64 {
        (1.0 - self.beta) * (1.0 - self.alpha)
    }

    /// True when γ = 1, i.e. the solution is bounded at the left endpoint.
    pub fn is_regular(&self) -> bool {
        self.gamma == 1.0
    }
}
