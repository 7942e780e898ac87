//! Quantitative guarantees: the contraction certificate, the Pachpatte-type
//! Gronwall evaluator, the a priori bound and the continuous-dependence
//! envelope.

pub mod bounds;
pub mod certificate;
pub mod gronwall;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::problem::IvProblem;

pub use bounds::{apriori_bound, dependence_bound, measure_mismatch, BoundEnvelope, BoundKind, Containment};
pub use certificate::{contraction_certificate, contraction_certificate_on, Certificate, QVariant};
pub use gronwall::pachpatte_gronwall;

/// Samples of f(t, 0, ∫_a^t w(t, τ, 0) dτ), the forcing seen by the zero
/// function. The inner integral uses the trapezoid rule in x.
pub(crate) fn zero_forcing(problem: &IvProblem, grid: &Grid) -> Result<Vec<f64>> {
    let x = grid.nodes();
    let kernel = problem.kernel();
    let mut out = Vec::with_capacity(x.len());
    for (i, &xi) in x.iter().enumerate() {
        let mut inner = 0.0;
        if !kernel.is_zero() {
            let mut prev = kernel.eval(xi, x[0], 0.0);
            for j in 1..=i {
                let cur = kernel.eval(xi, x[j], 0.0);
                inner += 0.5 * (x[j] - x[j - 1]) * (prev + cur);
                prev = cur;
            }
        }
        let f = problem.rhs(xi, 0.0, inner);
        if !f.is_finite() {
            return Err(Error::Evaluation {
                what: "zero-state forcing",
                node: i,
                x: xi,
            });
        }
        out.push(f);
    }
    Ok(out)
}

/// Samples a nonnegative coefficient function on the grid nodes.
pub(crate) fn sample_coefficient(
    name: &'static str,
    q: &(dyn Fn(f64) -> f64 + Send + Sync),
    grid: &Grid,
) -> Result<Vec<f64>> {
    grid.nodes()
        .iter()
        .map(|&x| {
            let v = q(x);
            if v >= 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Domain(format!("{name}({x}) = {v} is not a finite nonnegative value")))
            }
        })
        .collect()
}
