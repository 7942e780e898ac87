//! Naive reference for one Picard sweep, written without the library's
//! quadrature tables. Every panel moment
//! ∫ (s − u)^{α−1} u^{γ−1} (c0 + c1 u) du is taken from incomplete beta
//! functions evaluated by their hypergeometric series.

use statrs::function::gamma::gamma;

#[derive(Debug, Clone, Copy)]
pub enum Psi {
    Linear,
    Power(f64),
    Log,
    Exp(f64),
}

impl Psi {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Psi::Linear => x,
            Psi::Power(p) => x.powf(p),
            Psi::Log => x.ln(),
            Psi::Exp(k) => (k * x).exp(),
        }
    }

    pub fn inverse(self, u: f64) -> f64 {
        match self {
            Psi::Linear => u,
            Psi::Power(p) => u.powf(1.0 / p),
            Psi::Log => u.exp(),
            Psi::Exp(k) => u.ln() / k,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Kernel {
    Zero,
    Constant(f64),
    Linear(f64),
    /// κ, p, q for κ e^{px+qt} z
    Separable(f64, f64, f64),
}

impl Kernel {
    fn eval(self, x: f64, t: f64, z: f64) -> f64 {
        match self {
            Kernel::Zero => 0.0,
            Kernel::Constant(c) => c,
            Kernel::Linear(k) => k * z,
            Kernel::Separable(k, p, q) => k * (p * x + q * t).exp() * z,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Naive {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub z_a: f64,
    pub psi: Psi,
    /// offset, λ, μ for f = offset + λ z + μ W
    pub f: (f64, f64, f64),
    pub w: Kernel,
}

fn complete_beta(a: f64, b: f64) -> f64 {
    gamma(a) * gamma(b) / gamma(a + b)
}

/// B(x; a, b) = ∫_0^x t^{a−1}(1 − t)^{b−1} dt.
pub fn incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x > 0.5 {
        return complete_beta(a, b) - incomplete_beta(1.0 - x, b, a);
    }
    // x^a Σ (1−b)_k/k! x^k/(a+k)
    let mut coef = 1.0;
    let mut power = 1.0;
    let mut sum = 1.0 / a;
    for k in 1..400 {
        coef *= (k as f64 - b) / k as f64;
        power *= x;
        let term = coef * power / (a + k as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    x.powf(a) * sum
}

impl Naive {
    pub fn gamma_index(&self) -> f64 {
        self.alpha + self.beta * (1.0 - self.alpha)
    }

    pub fn nodes(&self, n: usize) -> Vec<f64> {
        let psi_a = self.psi.eval(self.a);
        let h = (self.psi.eval(self.b) - psi_a) / n as f64;
        (0..=n)
            .map(|i| match i {
                0 => self.a,
                i if i == n => self.b,
                i => self.psi.inverse(psi_a + i as f64 * h),
            })
            .collect()
    }

    /// Regularized values after one sweep from the regularized iterate `r`.
    pub fn step(&self, r: &[f64]) -> Vec<f64> {
        let n = r.len() - 1;
        let (alpha, gam) = (self.alpha, self.gamma_index());
        let regular = gam == 1.0;
        let x = self.nodes(n);
        let h = (self.psi.eval(self.b) - self.psi.eval(self.a)) / n as f64;
        let u: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        let z: Vec<f64> = (0..=n)
            .map(|i| if i == 0 { if regular { r[0] } else { f64::NAN } } else { u[i].powf(gam - 1.0) * r[i] })
            .collect();

        let mut g = vec![0.0; n + 1];
        for i in 1..=n {
            let mut inner = 0.0;
            for j in 1..=i {
                let left = if j == 1 && !regular {
                    2.0 * self.w.eval(x[i], x[1], z[1]) - self.w.eval(x[i], x[2], z[2])
                } else {
                    self.w.eval(x[i], x[j - 1], z[j - 1])
                };
                let right = self.w.eval(x[i], x[j], z[j]);
                inner += 0.5 * (x[j] - x[j - 1]) * (left + right);
            }
            let (offset, lambda, mu) = self.f;
            g[i] = u[i].powf(1.0 - gam) * (offset + lambda * z[i] + mu * inner);
        }
        g[0] = if regular {
            let (offset, lambda, _) = self.f;
            offset + lambda * r[0]
        } else {
            2.0 * g[1] - g[2]
        };

        let start = self.z_a / gamma(gam);
        let mut out = vec![start; n + 1];
        for i in 1..=n {
            let s = u[i];
            let mut total = 0.0;
            for j in 0..i {
                let slope = (g[j + 1] - g[j]) / h;
                let c0 = g[j] - slope * u[j];
                let (t0, t1) = (u[j] / s, u[j + 1] / s);
                let m0 = s.powf(alpha + gam - 1.0)
                    * (incomplete_beta(t1, gam, alpha) - incomplete_beta(t0, gam, alpha));
                let m1 = s.powf(alpha + gam)
                    * (incomplete_beta(t1, gam + 1.0, alpha) - incomplete_beta(t0, gam + 1.0, alpha));
                total += c0 * m0 + slope * m1;
            }
            out[i] += s.powf(1.0 - gam) * total / gamma(alpha);
        }
        out
    }
}
