use serde::{Deserialize, Serialize};

use crate::analysis::zero_forcing;
use crate::error::{Error, Result};
use crate::grid::{build_grid, Grid};
use crate::problem::IvProblem;
use crate::quadrature::psi_frac_integral;
use crate::special::gamma;

/// Grid used for p when the caller does not supply one.
pub const CERTIFICATE_GRID: usize = 512;

/// Which Gamma denominator the Q1·Q2 term of q uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QVariant {
    /// Γ(α+γ+1), what the power rule yields for I^α of (ψ − ψ(a))^γ.
    Primary,
    /// Γ(α+γ), the printed form.
    Alt,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Weighted size of the image of the zero function.
    pub p: f64,
    /// Contraction constant of the Volterra map in the weighted norm.
    pub q: f64,
    pub unique: bool,
    /// q with the Γ(α+γ) denominator in the second term.
    pub q_variant_alt: f64,
}

fn contraction_constant(problem: &IvProblem, q1: f64, q2: f64, variant: QVariant) -> f64 {
    let order = problem.order();
    let (alpha, gam) = (order.alpha(), order.gamma());
    let span = problem.psi_span();
    let first = q1 * gamma(gam) / gamma(alpha + gam) * span.powf(alpha);
    let denom = match variant {
        QVariant::Primary => gamma(alpha + gam + 1.0),
        QVariant::Alt => gamma(alpha + gam),
    };
    first + q1 * q2 * gamma(gam) / denom * span.powf(alpha + 1.0)
}

/// Certificate with p maximized over a default grid of
/// [`CERTIFICATE_GRID`] intervals.
pub fn contraction_certificate(problem: &IvProblem, variant: QVariant) -> Result<Certificate> {
    let constants = problem.constants().ok_or_else(|| {
        Error::CertificateUnavailable("problem has no Lipschitz constants Q1, Q2".into())
    })?;
    let grid = build_grid(problem, CERTIFICATE_GRID)?;
    certificate_with(problem, variant, constants.q1, constants.q2, &grid)
}

/// Certificate with p maximized over the nodes of `grid`.
pub fn contraction_certificate_on(
    problem: &IvProblem,
    variant: QVariant,
    grid: &Grid,
) -> Result<Certificate> {
    let constants = problem.constants().ok_or_else(|| {
        Error::CertificateUnavailable("problem has no Lipschitz constants Q1, Q2".into())
    })?;
    certificate_with(problem, variant, constants.q1, constants.q2, grid)
}

fn certificate_with(
    problem: &IvProblem,
    variant: QVariant,
    q1: f64,
    q2: f64,
    grid: &Grid,
) -> Result<Certificate> {
    let q = contraction_constant(problem, q1, q2, variant);
    let q_variant_alt = contraction_constant(problem, q1, q2, QVariant::Alt);
    Ok(Certificate {
        p: zero_image_weighted_max(problem, grid)?,
        q,
        unique: q < 1.0,
        q_variant_alt,
    })
}

/// max_i |z_a/Γ(γ) + (ψ(x_i) − ψ(a))^{1−γ} I^α F0(x_i)|.
fn zero_image_weighted_max(problem: &IvProblem, grid: &Grid) -> Result<f64> {
    let order = problem.order();
    let gam = order.gamma();
    let forcing = zero_forcing(problem, grid)?;
    let integral = psi_frac_integral(&forcing, order.alpha(), grid)?;
    let start = problem.z_a() / gamma(gam);
    Ok(integral
        .iter()
        .enumerate()
        .map(|(i, v)| (start + grid.offset(i).powf(1.0 - gam) * v).abs())
        .fold(0.0, f64::max))
}
