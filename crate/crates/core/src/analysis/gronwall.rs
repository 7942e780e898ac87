use crate::error::{Error, Result};
use crate::grid::Grid;

/// Pachpatte-type Gronwall bound
/// `u0·(1 + ∫_a^t f(s)·exp(∫_a^s (f + g)(τ) dτ) ds)` at every node, with both
/// integrals accumulated by the trapezoid rule over the node abscissae.
pub fn pachpatte_gronwall(u0: f64, f: &[f64], g: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    if f.len() != grid.len() || g.len() != grid.len() {
        return Err(Error::InvalidInput(format!(
            "expected {} samples, got f: {}, g: {}",
            grid.len(),
            f.len(),
            g.len()
        )));
    }
    if !(u0 >= 0.0 && u0.is_finite()) {
        return Err(Error::Domain(format!("u0 must be finite and nonnegative, got {u0}")));
    }
    for (name, samples) in [("f", f), ("g", g)] {
        if let Some((i, v)) = samples
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= 0.0 && v.is_finite()))
        {
            return Err(Error::Domain(format!("{name} sample {i} is {v}, must be finite and nonnegative")));
        }
    }
    let x = grid.nodes();
    let mut exponent = 0.0;
    let mut outer = 0.0;
    let mut prev = f[0];
    let mut out = Vec::with_capacity(x.len());
    out.push(u0);
    for j in 1..x.len() {
        let dx = x[j] - x[j - 1];
        exponent += 0.5 * dx * (f[j - 1] + g[j - 1] + f[j] + g[j]);
        let cur = f[j] * exponent.exp();
        outer += 0.5 * dx * (prev + cur);
        prev = cur;
        out.push(u0 * (1.0 + outer));
    }
    Ok(out)
}
