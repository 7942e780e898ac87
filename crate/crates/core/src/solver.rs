//! Picard iteration on the Volterra form
//! `z(x) = z_a/Γ(γ)·(ψ(x)−ψ(a))^{γ−1} + I^{α;ψ} f(·, z, ∫w)(x)`,
//! carried out on the regularized values r = (ψ − ψ(a))^{1−γ} z.

use std::sync::Arc;

use crate::analysis::certificate::{contraction_certificate, QVariant};
use crate::error::{Error, Result};
use crate::grid::{build_grid, weighted_norm, Grid, SolutionGrid};
use crate::hilfer::{psi_hilfer_derivative, NodeWindow};
use crate::problem::{InnerKernel, IvProblem};
use crate::quadrature::QuadratureWeights;
use crate::special::gamma;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub n: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub compute_residual: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            n: 512,
            tol: 1e-10,
            max_iter: 200,
            compute_residual: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: SolutionGrid,
    pub iterations: usize,
    pub final_delta: f64,
    /// Weighted-norm change of every sweep, in order.
    pub deltas: Vec<f64>,
    pub residual: Option<f64>,
    /// True when the contraction certificate gives q < 1.
    pub certified: bool,
    pub converged: bool,
}

impl SolveReport {
    /// Geometric-mean ratio of successive deltas over the last five sweeps.
    pub fn contraction_ratio(&self) -> Option<f64> {
        let tail: Vec<f64> = self
            .deltas
            .iter()
            .rev()
            .take(5)
            .copied()
            .filter(|d| *d > 0.0)
            .collect();
        if tail.len() < 2 {
            return None;
        }
        let (last, first) = (tail[0], tail[tail.len() - 1]);
        Some((last / first).powf(1.0 / (tail.len() - 1) as f64))
    }
}

/// W(x_i) = ∫_a^{x_i} w(x_i, t, z(t)) dt by the trapezoid rule over the
/// original x spacing. When z is singular at a, the t_0 integrand value is
/// extrapolated linearly from t_1 and t_2.
pub fn inner_integral(w: &InnerKernel, z: &SolutionGrid, node: usize) -> Result<f64> {
    let grid = z.grid();
    if node == 0 || node >= grid.len() {
        return Err(Error::InvalidInput(format!(
            "inner integral node must lie in 1..={}, got {node}",
            grid.len() - 1
        )));
    }
    if w.is_zero() {
        return Ok(0.0);
    }
    let raw = z.raw_values();
    inner_integral_raw(w, grid, &raw, z.gamma() == 1.0, node)
}

fn inner_integral_raw(
    w: &InnerKernel,
    grid: &Grid,
    raw: &[f64],
    regular: bool,
    node: usize,
) -> Result<f64> {
    let x = grid.nodes();
    let xi = x[node];
    let value = |j: usize| w.eval(xi, x[j], raw[j]);
    let first = if regular {
        value(0)
    } else {
        2.0 * value(1) - value(2)
    };
    let mut acc = 0.0;
    let mut prev = first;
    for j in 1..=node {
        let cur = value(j);
        acc += 0.5 * (x[j] - x[j - 1]) * (prev + cur);
        prev = cur;
    }
    if !acc.is_finite() {
        return Err(Error::Evaluation {
            what: "inner kernel w",
            node,
            x: xi,
        });
    }
    Ok(acc)
}

/// Grid-dependent data reused by every sweep.
struct Stepper<'p> {
    problem: &'p IvProblem,
    grid: Arc<Grid>,
    weights: Arc<QuadratureWeights>,
    scale: f64,
    /// s_i^{1−γ}
    lift: Vec<f64>,
    start: f64,
}

impl<'p> Stepper<'p> {
    fn new(problem: &'p IvProblem, grid: Arc<Grid>) -> Result<Self> {
        let order = problem.order();
        let gam = order.gamma();
        let weights = QuadratureWeights::singular(order.alpha(), gam, grid.intervals())?;
        let scale = weights.scale(grid.h());
        let lift = (0..grid.len()).map(|i| grid.offset(i).powf(1.0 - gam)).collect();
        Ok(Self {
            problem,
            grid,
            weights,
            scale,
            lift,
            start: problem.z_a() / gamma(gam),
        })
    }

    fn initial(&self) -> Result<SolutionGrid> {
        SolutionGrid::new(
            self.grid.clone(),
            self.problem.order().gamma(),
            vec![self.start; self.grid.len()],
        )
    }

    /// Regularized forcing G = s^{1−γ} f(t, z, W), G_0 by extrapolation when
    /// z is singular at a.
    fn regular_forcing(&self, z: &SolutionGrid) -> Result<Vec<f64>> {
        let grid = &self.grid;
        let x = grid.nodes();
        let regular = z.gamma() == 1.0;
        let raw = z.raw_values();
        let kernel = self.problem.kernel();
        let mut g = vec![0.0; grid.len()];
        for i in 1..grid.len() {
            let inner = if kernel.is_zero() {
                0.0
            } else {
                inner_integral_raw(kernel, grid, &raw, regular, i)?
            };
            let f = self.problem.rhs(x[i], raw[i], inner);
            g[i] = self.lift[i] * f;
            if !g[i].is_finite() {
                return Err(Error::Evaluation {
                    what: "right-hand side f",
                    node: i,
                    x: x[i],
                });
            }
        }
        g[0] = if regular {
            let f = self.problem.rhs(x[0], raw[0], 0.0);
            if !f.is_finite() {
                return Err(Error::Evaluation {
                    what: "right-hand side f",
                    node: 0,
                    x: x[0],
                });
            }
            f
        } else {
            2.0 * g[1] - g[2]
        };
        Ok(g)
    }

    fn step(&self, z: &SolutionGrid) -> Result<SolutionGrid> {
        let g = self.regular_forcing(z)?;
        let mut r = vec![self.start; self.grid.len()];
        for (i, slot) in r.iter_mut().enumerate().skip(1) {
            *slot += self.lift[i] * self.scale * self.weights.apply_row(i, &g);
        }
        SolutionGrid::new(self.grid.clone(), z.gamma(), r)
    }
}

/// One sweep of the Volterra map. r_0 is always z_a/Γ(γ).
pub fn picard_step(z: &SolutionGrid, problem: &IvProblem) -> Result<SolutionGrid> {
    if (z.gamma() - problem.order().gamma()).abs() > 1e-15 {
        return Err(Error::InvalidInput(format!(
            "iterate has gamma = {}, problem has gamma = {}",
            z.gamma(),
            problem.order().gamma()
        )));
    }
    if z.grid().len() < 3 {
        return Err(Error::InsufficientGrid {
            nodes: z.grid().len(),
            required: 3,
        });
    }
    Stepper::new(problem, z.grid().clone())?.step(z)
}

fn max_difference(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Iterates from r ≡ z_a/Γ(γ) until the weighted-norm change is at most
/// `tol`. Exhausting `max_iter` yields [`Error::NotConverged`] carrying the
/// last iterate.
pub fn solve(problem: &IvProblem, options: &SolveOptions) -> Result<SolveReport> {
    if !(options.tol > 0.0 && options.tol.is_finite()) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {}", options.tol)));
    }
    if options.max_iter == 0 {
        return Err(Error::InvalidInput("max_iter must be at least 1".into()));
    }
    let grid = Arc::new(build_grid(problem, options.n)?);
    let stepper = Stepper::new(problem, grid)?;
    let certified = contraction_certificate(problem, QVariant::Primary)
        .map(|c| c.unique)
        .unwrap_or(false);

    let mut current = stepper.initial()?;
    let mut deltas = Vec::new();
    for _ in 0..options.max_iter {
        let next = stepper.step(&current)?;
        let delta = max_difference(next.regular_values(), current.regular_values());
        deltas.push(delta);
        current = next;
        if delta <= options.tol {
            let mut report = SolveReport {
                solution: current,
                iterations: deltas.len(),
                final_delta: delta,
                deltas,
                residual: None,
                certified,
                converged: true,
            };
            if options.compute_residual {
                report.residual = Some(residual_check(&report, problem)?);
            }
            return Ok(report);
        }
    }
    let final_delta = *deltas.last().unwrap_or(&f64::INFINITY);
    let iterations = deltas.len();
    Err(Error::NotConverged {
        iterations,
        final_delta,
        report: Box::new(SolveReport {
            solution: current,
            iterations,
            final_delta,
            deltas,
            residual: None,
            certified,
            converged: false,
        }),
    })
}

/// max |ᴴD^{α,β;ψ} z − f(x, z, W)| over nodes N/4..N−1.
pub fn residual_check(report: &SolveReport, problem: &IvProblem) -> Result<f64> {
    residual_check_on(report, problem, NodeWindow::AwayFromCorner)
}

pub fn residual_check_on(
    report: &SolveReport,
    problem: &IvProblem,
    window: NodeWindow,
) -> Result<f64> {
    let z = &report.solution;
    let derivative = psi_hilfer_derivative(z, problem.order())?;
    let grid = z.grid();
    let x = grid.nodes();
    let raw = z.raw_values();
    let regular = z.gamma() == 1.0;
    let mut worst = 0.0f64;
    for i in window.range(grid.intervals()) {
        let inner = if problem.kernel().is_zero() {
            0.0
        } else {
            inner_integral_raw(problem.kernel(), grid, &raw, regular, i)?
        };
        let defect = (derivative[i - 1] - problem.rhs(x[i], raw[i], inner)).abs();
        worst = worst.max(defect);
    }
    Ok(worst)
}

/// Weighted-norm distance between two solutions on the same grid.
pub fn weighted_distance(a: &SolutionGrid, b: &SolutionGrid) -> Result<f64> {
    if a.grid().len() != b.grid().len() {
        return Err(Error::InvalidInput("solutions live on different grids".into()));
    }
    let diff: Vec<f64> = a
        .regular_values()
        .iter()
        .zip(b.regular_values())
        .map(|(x, y)| x - y)
        .collect();
    weighted_norm(&SolutionGrid::new(a.grid().clone(), a.gamma(), diff)?)
}
