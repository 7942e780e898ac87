//! Numerical toolkit for ψ-Hilfer fractional integrodifferential initial
//! value problems
//!
//! ```text
//! ᴴD^{α,β;ψ} z(x) = f(x, z(x), ∫_a^x w(x, t, z(t)) dt),   I^{1−γ;ψ} z(a) = z_a,
//! γ = α + β(1 − α)
//! ```
//!
//! Solutions are computed by Picard iteration on the equivalent Volterra
//! equation and stored in regularized form r = (ψ(x) − ψ(a))^{1−γ} z. The
//! [`analysis`] module evaluates the uniqueness certificate, the a priori
//! bound and the continuous-dependence envelope for a problem.

pub mod analysis;
pub mod error;
pub mod grid;
pub mod hilfer;
pub mod order;
pub mod problem;
pub mod problem_file;
pub mod psi;
pub mod quadrature;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
pub use grid::{make_grid, weighted_norm, Grid, SolutionGrid};
pub use hilfer::{psi_hilfer_derivative, round_trip_check, NodeWindow};
pub use order::FractionalOrder;
pub use problem::{InnerKernel, IvProblem};
pub use psi::PsiFunction;
pub use quadrature::{power_rule, psi_frac_integral, psi_frac_integral_weighted, QuadratureWeights};
pub use solver::{inner_integral, picard_step, residual_check, solve, SolveOptions, SolveReport};
pub use special::{gamma, mittag_leffler};
