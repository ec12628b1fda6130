use std::path::PathBuf;

use crate::precond::SolveReport;

/// Errors produced across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error in {path:?} line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("topology error: {0}")]
    Topology(String),

    #[error("limit exceeded: {0}")]
    Limit(String),

    #[error("matrix is not symmetric (relative asymmetry {0:e})")]
    Symmetry(f64),

    #[error("metric is not symmetric positive definite: {0}")]
    Metric(String),

    #[error("harmonic projector rank {found} does not match 2*genus = {expected}")]
    Rank { found: usize, expected: usize },

    #[error("singular quadrature failed on triangle pair ({0}, {1})")]
    Quadrature(usize, usize),

    #[error("matrix is singular to machine precision")]
    Singular,

    #[error("projectors are not complementary (deviation {0:e})")]
    Complementarity(f64),

    #[error("mesh has genus {0}, a genus-0 surface is required")]
    Genus(usize),

    #[error("spherical map has {0} folded triangles after smoothing")]
    Fold(usize),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("no convergence after {} iterations (residual {:e})", .0.report.iterations, .0.report.residual)]
    NoConvergence(Box<SolveFailure>),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("linear algebra backend failure: {0}")]
    Backend(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Best iterate and report of a Krylov solve that missed its tolerance.
#[derive(Debug, Clone)]
pub struct SolveFailure {
    pub solution: Vec<num_complex::Complex64>,
    pub report: SolveReport,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
