//! Product-integration weights for left-sided ψ-fractional integrals on a
//! grid uniform in ψ-space.
//!
//! With u = ψ(t) − ψ(a) and nodes u_j = j·h, the integral
//! `I^α[u^{δ−1} G](u_i) = (1/Γ(α)) ∫_0^{u_i} (u_i − u)^{α−1} u^{δ−1} G(u) du`
//! is approximated by interpolating G piecewise linearly and integrating the
//! remaining factors exactly. δ = 1 gives the classical product trapezoid
//! rule. Weights are stored for unit step; the step enters only through the
//! scale factor h^{α+δ−1}/Γ(α).

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::special::{beta, gamma, gauss_legendre};

const GAUSS_POINTS: usize = 12;
const SERIES_MAX_TERMS: usize = 400;
const CACHE_CAPACITY: usize = 8;

#[derive(Debug, Clone)]
enum Table {
    /// Plain weights depend only on i − j away from the first column.
    Toeplitz {
        first: Vec<f64>,
        interior: Vec<f64>,
        diag: f64,
    },
    /// Row i occupies offsets i(i+1)/2 .. i(i+1)/2 + i + 1.
    Packed(Vec<f64>),
}

/// Unit-step product-integration weights w_{i,j}, 0 ≤ j ≤ i ≤ N.
#[derive(Debug, Clone)]
pub struct QuadratureWeights {
    alpha: f64,
    delta: f64,
    n: usize,
    table: Table,
}

type CacheKey = (u64, u64, usize);

#[derive(Default)]
struct WeightCache {
    map: HashMap<CacheKey, Arc<QuadratureWeights>>,
    order: VecDeque<CacheKey>,
}

fn cache() -> &'static Mutex<WeightCache> {
    static CACHE: OnceLock<Mutex<WeightCache>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidOrder {
            order: alpha,
            expected: "(0, 1] for an integral order",
        })
    }
}

impl QuadratureWeights {
    /// Product trapezoid weights for ∫(i − u)^{α−1} G(u) du.
    pub fn plain(alpha: f64, n: usize) -> Result<Arc<Self>> {
        Self::singular(alpha, 1.0, n)
    }

    /// Weights for ∫(i − u)^{α−1} u^{δ−1} G(u) du with G piecewise linear.
    /// Cached by (α, δ, N).
    pub fn singular(alpha: f64, delta: f64, n: usize) -> Result<Arc<Self>> {
        check_alpha(alpha)?;
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Domain(format!("singular exponent delta must be positive, got {delta}")));
        }
        if n == 0 {
            return Err(Error::InvalidInput("weights need at least one interval".into()));
        }
        let key = (alpha.to_bits(), delta.to_bits(), n);
        if let Some(w) = cache().lock().unwrap_or_else(|e| e.into_inner()).map.get(&key) {
            return Ok(w.clone());
        }
        let table = if delta == 1.0 {
            plain_table(alpha, n)
        } else {
            singular_table(alpha, delta, n)
        };
        let weights = Arc::new(Self {
            alpha,
            delta,
            n,
            table,
        });
        let mut guard = cache().lock().unwrap_or_else(|e| e.into_inner());
        if !guard.map.contains_key(&key) {
            if guard.order.len() >= CACHE_CAPACITY {
                if let Some(old) = guard.order.pop_front() {
                    guard.map.remove(&old);
                }
            }
            guard.order.push_back(key);
            guard.map.insert(key, weights.clone());
        }
        Ok(weights)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn intervals(&self) -> usize {
        self.n
    }

    /// w_{i,j} for unit step; zero for j > i and for row 0.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        if i == 0 || j > i {
            return 0.0;
        }
        match &self.table {
            Table::Toeplitz {
                first,
                interior,
                diag,
            } => {
                if j == i {
                    *diag
                } else if j == 0 {
                    first[i]
                } else {
                    interior[i - j]
                }
            }
            Table::Packed(w) => w[i * (i + 1) / 2 + j],
        }
    }

    /// Σ_j w_{i,j} g_j.
    pub fn apply_row(&self, i: usize, g: &[f64]) -> f64 {
        if i == 0 {
            return 0.0;
        }
        match &self.table {
            Table::Toeplitz {
                first,
                interior,
                diag,
            } => {
                let mut acc = first[i] * g[0] + diag * g[i];
                for j in 1..i {
                    acc += interior[i - j] * g[j];
                }
                acc
            }
            Table::Packed(w) => {
                let row = &w[i * (i + 1) / 2..i * (i + 1) / 2 + i + 1];
                row.iter().zip(&g[..=i]).map(|(a, b)| a * b).sum()
            }
        }
    }

    /// Exact value of Σ_j w_{i,j}: B(δ, α)·i^{α+δ−1}.
    pub fn exact_row_sum(&self, i: usize) -> f64 {
        beta(self.delta, self.alpha) * (i as f64).powf(self.alpha + self.delta - 1.0)
    }

    /// h^{α+δ−1}/Γ(α): converts unit-step sums into integral values.
    pub fn scale(&self, h: f64) -> f64 {
        h.powf(self.alpha + self.delta - 1.0) / gamma(self.alpha)
    }
}

fn plain_table(alpha: f64, n: usize) -> Table {
    let c = 1.0 / (alpha * (alpha + 1.0));
    let p = alpha + 1.0;
    let mut first = vec![0.0; n + 1];
    let mut interior = vec![0.0; n + 1];
    for i in 1..=n {
        let fi = i as f64;
        first[i] = c * ((fi - 1.0).powf(p) - (fi - 1.0 - alpha) * fi.powf(alpha));
    }
    for (k, slot) in interior.iter_mut().enumerate().skip(1) {
        let fk = k as f64;
        *slot = c * ((fk + 1.0).powf(p) - 2.0 * fk.powf(p) + (fk - 1.0).powf(p));
    }
    Table::Toeplitz {
        first,
        interior,
        diag: c,
    }
}

/// Σ_n c_n x^n / (n + shift) where c_n are the coefficients of (1 − x)^{e}.
fn binomial_moment(e: f64, x: f64, shift: f64) -> f64 {
    let mut coeff = 1.0;
    let mut power = 1.0;
    let mut sum = 0.0;
    for k in 0..SERIES_MAX_TERMS {
        let term = coeff * power / (k as f64 + shift);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && k > 2 {
            break;
        }
        coeff *= (k as f64 - e) / (k as f64 + 1.0);
        power *= x;
        if coeff == 0.0 {
            break;
        }
    }
    sum
}

fn singular_table(alpha: f64, delta: f64, n: usize) -> Table {
    let (gl_x, gl_w) = gauss_legendre(GAUSS_POINTS);
    let t: Vec<f64> = gl_x.iter().map(|x| 0.5 * (x + 1.0)).collect();
    let wt: Vec<f64> = gl_w.iter().map(|w| 0.5 * w).collect();

    // lower[k][m] = (k + t_m)^{δ−1}, upper[d][m] = (d − t_m)^{α−1}
    let lower: Vec<[f64; GAUSS_POINTS]> = (0..n)
        .map(|k| std::array::from_fn(|m| (k as f64 + t[m]).powf(delta - 1.0)))
        .collect();
    let upper: Vec<[f64; GAUSS_POINTS]> = (0..=n)
        .map(|d| std::array::from_fn(|m| (d as f64 - t[m]).powf(alpha - 1.0)))
        .collect();

    let mut w = vec![0.0; (n + 1) * (n + 2) / 2];
    for i in 1..=n {
        let base = i * (i + 1) / 2;
        let row = &mut w[base..base + i + 1];
        let fi = i as f64;
        if i == 1 {
            let m0 = beta(delta, alpha);
            let m1 = beta(delta + 1.0, alpha);
            row[0] += m0 - m1;
            row[1] += m1;
            continue;
        }
        // first panel [0, 1]: expand (i − u)^{α−1} in u/i
        let scale = fi.powf(alpha - 1.0);
        let m0 = scale * binomial_moment(alpha - 1.0, 1.0 / fi, delta);
        let m1 = scale * binomial_moment(alpha - 1.0, 1.0 / fi, delta + 1.0);
        row[0] += m0 - m1;
        row[1] += m1;
        // middle panels
        for k in 1..i - 1 {
            let lo = &lower[k];
            let up = &upper[i - k];
            let (mut m0, mut m1) = (0.0, 0.0);
            for m in 0..GAUSS_POINTS {
                let v = wt[m] * lo[m] * up[m];
                m0 += v;
                m1 += v * t[m];
            }
            row[k] += m0 - m1;
            row[k + 1] += m1;
        }
        // last panel [i − 1, i]: expand u^{δ−1} = (i − v)^{δ−1} in v/i
        let scale = fi.powf(delta - 1.0);
        let m0 = scale * binomial_moment(delta - 1.0, 1.0 / fi, alpha);
        let tail = scale * binomial_moment(delta - 1.0, 1.0 / fi, alpha + 1.0);
        let m1 = m0 - tail;
        row[i - 1] += m0 - m1;
        row[i] += m1;
    }
    Table::Packed(w)
}

fn check_samples(len: usize, grid: &Grid) -> Result<()> {
    if len != grid.len() {
        return Err(Error::InvalidInput(format!(
            "{len} samples for a grid of {} nodes",
            grid.len()
        )));
    }
    Ok(())
}

/// I^{α;ψ} g at every node by product trapezoid integration; the value at
/// x_0 = a is 0.
pub fn psi_frac_integral(samples: &[f64], alpha: f64, grid: &Grid) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    check_samples(samples.len(), grid)?;
    let weights = QuadratureWeights::plain(alpha, grid.intervals())?;
    let scale = weights.scale(grid.h());
    Ok((0..grid.len())
        .map(|i| scale * weights.apply_row(i, samples))
        .collect())
}

/// I^{α;ψ}[(ψ − ψ(a))^{δ−1} G] at every node, G given by its samples.
///
/// At x_0 the integral behaves like (ψ(x) − ψ(a))^{α+δ−1}: the node value
/// is 0 when that exponent is positive, Γ(δ)·G_0 when it is zero, and
/// unbounded (G_0·∞) when it is negative.
pub fn psi_frac_integral_weighted(
    regular: &[f64],
    alpha: f64,
    delta: f64,
    grid: &Grid,
) -> Result<Vec<f64>> {
    check_samples(regular.len(), grid)?;
    let weights = QuadratureWeights::singular(alpha, delta, grid.intervals())?;
    let scale = weights.scale(grid.h());
    let mut out: Vec<f64> = (0..grid.len())
        .map(|i| scale * weights.apply_row(i, regular))
        .collect();
    let exponent = alpha + delta - 1.0;
    out[0] = if exponent.abs() < 1e-14 {
        gamma(delta) * regular[0]
    } else if exponent > 0.0 {
        0.0
    } else {
        regular[0] * f64::INFINITY
    };
    Ok(out)
}

/// Closed form I^{α;ψ}[(ψ − ψ(a))^{δ−1}] = Γ(δ)/Γ(δ+α) · span^{δ+α−1}.
pub fn power_rule(delta: f64, alpha: f64, span: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("power rule needs delta > 0, got {delta}")));
    }
    if !(alpha > 0.0) {
        return Err(Error::InvalidOrder {
            order: alpha,
            expected: "(0, inf) for a power-rule order",
        });
    }
    if !(span >= 0.0) {
        return Err(Error::Domain(format!("psi span must be nonnegative, got {span}")));
    }
    Ok(gamma(delta) / gamma(delta + alpha) * span.powf(delta + alpha - 1.0))
}
