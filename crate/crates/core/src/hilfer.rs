//! Numeric ψ-Hilfer derivative, used only to verify computed solutions.
//!
//! For z = (ψ − ψ(a))^{γ−1} r, the part r_0 (ψ − ψ(a))^{γ−1} lies in the
//! kernel of ᴴD^{α,β;ψ}, and the remainder has vanishing I^{(1−β)(1−α);ψ}
//! trace at a. On that remainder the Hilfer composition
//! I^{β(1−α)} ∘ D ∘ I^{(1−β)(1−α)} collapses to D ∘ I^{1−α}, so the
//! derivative is a central difference in ψ-space of
//! I^{1−α}[(ψ − ψ(a))^{γ−1}(r − r_0)].

use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Grid, SolutionGrid};
use crate::order::FractionalOrder;
use crate::quadrature::{psi_frac_integral, psi_frac_integral_weighted};

/// Fewest nodes the derivative accepts.
pub const MIN_DERIVATIVE_NODES: usize = 5;

/// Which interior nodes a deviation is measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeWindow {
    /// Nodes 1..N−1.
    Interior,
    /// Nodes N/4..N−1. The first few nodes carry an O(1) corner error that
    /// refinement does not reduce, because near a the grid only resolves a
    /// fixed number of steps.
    AwayFromCorner,
}

impl NodeWindow {
    pub fn range(self, intervals: usize) -> Range<usize> {
        match self {
            NodeWindow::Interior => 1..intervals,
            NodeWindow::AwayFromCorner => (intervals / 4).max(1)..intervals,
        }
    }
}

/// ᴴD^{α,β;ψ} z at the interior nodes 1..N−1; element k belongs to node k+1.
pub fn psi_hilfer_derivative(z: &SolutionGrid, order: FractionalOrder) -> Result<Vec<f64>> {
    let grid = z.grid();
    if grid.len() < MIN_DERIVATIVE_NODES {
        return Err(Error::InsufficientGrid {
            nodes: grid.len(),
            required: MIN_DERIVATIVE_NODES,
        });
    }
    if (z.gamma() - order.gamma()).abs() > 1e-15 {
        return Err(Error::InvalidInput(format!(
            "solution is regularized with gamma = {}, order has gamma = {}",
            z.gamma(),
            order.gamma()
        )));
    }
    let r = z.regular_values();
    let shifted: Vec<f64> = r.iter().map(|v| v - r[0]).collect();
    let y = psi_frac_integral_weighted(&shifted, 1.0 - order.alpha(), order.gamma(), grid)?;
    let h = grid.h();
    let n = grid.intervals();
    Ok((1..n).map(|i| (y[i + 1] - y[i - 1]) / (2.0 * h)).collect())
}

/// max over the window of |ᴴD^{α,β;ψ} I^{α;ψ} g − g|.
pub fn round_trip_check(
    g: &[f64],
    order: FractionalOrder,
    grid: &Arc<Grid>,
    window: NodeWindow,
) -> Result<f64> {
    let integral = psi_frac_integral(g, order.alpha(), grid)?;
    // r = s^{1−γ} I^α g tends to 0 at a since 1 − γ + α > 0
    let r0 = 0.0;
    let z = SolutionGrid::from_raw(grid.clone(), order.gamma(), r0, &integral)?;
    let d = psi_hilfer_derivative(&z, order)?;
    Ok(window
        .range(grid.intervals())
        .map(|i| (d[i - 1] - g[i]).abs())
        .fold(0.0, f64::max))
}
