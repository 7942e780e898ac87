use std::sync::Arc;

use crate::error::{Error, Result};
use crate::problem::IvProblem;

/// Bisection tolerance for ψ inversion when no analytic inverse exists.
pub const INVERSION_TOL: f64 = 1e-14;

/// Nodes x_0 = a < … < x_N = b placed uniformly in ψ-space.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    psi_values: Vec<f64>,
    psi_a: f64,
    h: f64,
}

impl Grid {
    /// Builds the grid from a ψ-space partition. `psi_values` are taken as the
    /// exact arithmetic progression ψ(a) + i·h; `nodes` are their preimages.
    pub fn from_parts(nodes: Vec<f64>, psi_a: f64, h: f64) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "grid needs at least 2 nodes, got {}",
                nodes.len()
            )));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Construction(format!("psi-space step must be positive, got {h}")));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Construction("grid nodes are not strictly increasing".into()));
        }
        let psi_values = (0..nodes.len()).map(|i| psi_a + i as f64 * h).collect();
        Ok(Self {
            nodes,
            psi_values,
            psi_a,
            h,
        })
    }

    /// Number of intervals N (there are N + 1 nodes).
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn psi_values(&self) -> &[f64] {
        &self.psi_values
    }

    pub fn psi_a(&self) -> f64 {
        self.psi_a
    }

    /// ψ-space step (ψ(b) − ψ(a)) / N.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// ψ(x_i) − ψ(a), computed as i·h so the origin is exactly zero.
    #[inline]
    pub fn offset(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    /// ψ(b) − ψ(a).
    pub fn span(&self) -> f64 {
        self.offset(self.intervals())
    }
}

/// Regularized samples r_i ≈ (ψ(x_i) − ψ(a))^{1−γ} z(x_i) on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionGrid {
    grid: Arc<Grid>,
    gamma: f64,
    regular_values: Vec<f64>,
}

impl SolutionGrid {
    pub fn new(grid: Arc<Grid>, gamma: f64, regular_values: Vec<f64>) -> Result<Self> {
        if regular_values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "{} regular values for a grid of {} nodes",
                regular_values.len(),
                grid.len()
            )));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidOrder {
                order: gamma,
                expected: "(0, 1] for gamma",
            });
        }
        Ok(Self {
            grid,
            gamma,
            regular_values,
        })
    }

    pub fn zeros(grid: Arc<Grid>, gamma: f64) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, gamma, vec![0.0; n])
    }

    /// Builds regularized values from raw samples z_i at nodes i ≥ 1 and the
    /// corner value r_0 supplied separately.
    pub fn from_raw(grid: Arc<Grid>, gamma: f64, r0: f64, raw: &[f64]) -> Result<Self> {
        if raw.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "{} raw values for a grid of {} nodes",
                raw.len(),
                grid.len()
            )));
        }
        let mut r: Vec<f64> = raw
            .iter()
            .enumerate()
            .map(|(i, z)| grid.offset(i).powf(1.0 - gamma) * z)
            .collect();
        r[0] = r0;
        Self::new(grid, gamma, r)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn regular_values(&self) -> &[f64] {
        &self.regular_values
    }

    pub fn into_regular_values(self) -> Vec<f64> {
        self.regular_values
    }

    /// z(x_i) = r_i (ψ(x_i) − ψ(a))^{γ−1}. At i = 0 with γ < 1 this is ±∞
    /// (or NaN when r_0 = 0); callers skip the corner in that case.
    #[inline]
    pub fn raw_value(&self, i: usize) -> f64 {
        if self.gamma == 1.0 {
            return self.regular_values[i];
        }
        self.regular_values[i] * self.grid.offset(i).powf(self.gamma - 1.0)
    }

    pub fn raw_values(&self) -> Vec<f64> {
        (0..self.regular_values.len()).map(|i| self.raw_value(i)).collect()
    }

    /// First node at which the raw solution is finite: 0 when γ = 1, else 1.
    pub fn first_finite_node(&self) -> usize {
        if self.gamma == 1.0 {
            0
        } else {
            1
        }
    }
}

/// Places N + 1 nodes uniformly in ψ-space on the problem interval.
pub fn make_grid(problem: &IvProblem, n: usize) -> Result<SolutionGrid> {
    let grid = build_grid(problem, n)?;
    SolutionGrid::zeros(Arc::new(grid), problem.order().gamma())
}

pub(crate) fn build_grid(problem: &IvProblem, n: usize) -> Result<Grid> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("grid size N must be at least 2, got {n}")));
    }
    let (a, b) = (problem.a(), problem.b());
    let psi = problem.psi();
    psi.validate_on(a, b)?;
    let psi_a = psi.eval(a);
    let h = (psi.eval(b) - psi_a) / n as f64;
    let mut nodes = Vec::with_capacity(n + 1);
    nodes.push(a);
    for i in 1..n {
        nodes.push(psi.invert(psi_a + i as f64 * h, a, b, INVERSION_TOL)?);
    }
    nodes.push(b);
    Grid::from_parts(nodes, psi_a, h)
}

/// Discrete C_{1−γ;ψ} norm: max_i |r_i|.
pub fn weighted_norm(solution: &SolutionGrid) -> Result<f64> {
    let r = solution.regular_values();
    if r.is_empty() {
        return Err(Error::InvalidInput("weighted norm of an empty grid".into()));
    }
    Ok(r.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}
