use thiserror::Error;

use crate::solver::SolveReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid fractional order {order}: must lie in {expected}")]
    InvalidOrder { order: f64, expected: &'static str },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("argument z = {z} outside supported range for E_{{{a},{b}}}: {reason}")]
    UnsupportedRange {
        a: f64,
        b: f64,
        z: f64,
        reason: &'static str,
    },

    #[error("grid has {nodes} nodes, operator needs at least {required}")]
    InsufficientGrid { nodes: usize, required: usize },

    #[error("{what} evaluated to a non-finite value at node {node} (x = {x})")]
    Evaluation {
        what: &'static str,
        node: usize,
        x: f64,
    },

    #[error("Picard iteration did not converge: {iterations} sweeps, last delta {final_delta:e}")]
    NotConverged {
        iterations: usize,
        final_delta: f64,
        report: Box<SolveReport>,
    },

    #[error("contraction certificate unavailable: {0}")]
    CertificateUnavailable(String),

    #[error("bound unavailable: {0}")]
    BoundUnavailable(String),

    #[error("incompatible problems: {0}")]
    IncompatibleProblems(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
