use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::{Error, Result};

/// Relative width used when comparing an eigenvalue against a band edge.
/// Eigenvalues within `EDGE_TOL * lambda_max` below an edge count as lying on
/// it, so numerically clustered eigenvalues land in the same band.
pub const EDGE_TOL: f64 = 1e-10;

/// Eigenvalues at or below `NULL_TOL * lambda_max * n` are treated as zero.
pub const NULL_TOL: f64 = 1e-12;

/// Relative spectral window `[low, high) * lambda_max`; `high = None` means
/// unbounded (the top eigenvalue is then included).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralWindow {
    pub low: f64,
    pub high: Option<f64>,
}

impl SpectralWindow {
    pub fn new(low: f64, high: Option<f64>) -> Result<Self> {
        let ok = low.is_finite()
            && (0.0..=1.0).contains(&low)
            && high.is_none_or(|h| h.is_finite() && h > low && h <= 1.0);
        if !ok {
            return Err(Error::Config(format!(
                "invalid spectral window [{low}, {high:?}): need 0 <= low < high <= 1"
            )));
        }
        Ok(Self { low, high })
    }

    /// `[0, unbounded]`: the whole nonzero spectrum.
    pub fn full() -> Self {
        Self { low: 0.0, high: None }
    }

    /// `[eps, unbounded]`.
    pub fn above(eps: f64) -> Result<Self> {
        Self::new(eps, None)
    }

    /// Whether `lambda` falls in the window for a spectrum with top
    /// eigenvalue `lambda_max`. Zero eigenvalues are never included.
    pub fn contains(&self, lambda: f64, lambda_max: f64, null_threshold: f64) -> bool {
        if lambda <= null_threshold {
            return false;
        }
        let shifted = lambda + EDGE_TOL * lambda_max;
        shifted >= self.low * lambda_max && self.high.is_none_or(|h| shifted < h * lambda_max)
    }
}

/// Which operator a spectrum belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LaplacianSource {
    Vertex,
    Cell,
    VertexMetric,
    CellMetric,
    DualVertex,
    DualCell,
    Other,
}

/// Full eigendecomposition of a symmetric positive semidefinite matrix.
#[derive(Debug, Clone)]
pub struct LaplacianEigen {
    /// Nonincreasing.
    pub values: Vec<f64>,
    /// Orthonormal columns matching `values`.
    pub vectors: Mat<f64>,
    pub source: LaplacianSource,
}

impl LaplacianEigen {
    pub fn new(l: &Mat<f64>, source: LaplacianSource) -> Result<Self> {
        if l.nrows() != l.ncols() {
            return Err(Error::Dimension(format!("Laplacian is {}x{}", l.nrows(), l.ncols())));
        }
        let asym = linalg::relative_asymmetry(l.as_ref());
        if asym > 1e-12 {
            return Err(Error::Symmetry(asym));
        }
        let (values, vectors) = linalg::sym_eigen(l.as_ref())?;
        Ok(Self { values, vectors, source })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn lambda_max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0).max(0.0)
    }

    pub fn null_threshold(&self) -> f64 {
        NULL_TOL * self.lambda_max() * self.dim() as f64
    }

    /// Number of eigenvalues treated as zero.
    pub fn nullity(&self) -> usize {
        let t = self.null_threshold();
        self.values.iter().filter(|&&v| v <= t).count()
    }

    /// Indices of the eigenpairs inside `window`, in nonincreasing order.
    pub fn indices_in(&self, window: &SpectralWindow) -> Vec<usize> {
        let (max, null) = (self.lambda_max(), self.null_threshold());
        (0..self.dim()).filter(|&i| window.contains(self.values[i], max, null)).collect()
    }

    /// Reconstruction error `||A - V diag(values) V^T||_F / ||A||_F`.
    pub fn reconstruction_error(&self, a: &Mat<f64>) -> f64 {
        let n = self.dim();
        let scaled = Mat::from_fn(n, n, |i, j| self.vectors[(i, j)] * self.values[j]);
        let back = &scaled * self.vectors.transpose();
        let norm = a.norm_l2();
        if norm == 0.0 {
            return back.norm_l2();
        }
        (&back - a).norm_l2() / norm
    }
}

/// `sum_{i in window} v_i v_i^T / lambda_i` in factored form.
#[derive(Debug, Clone)]
pub struct FilteredPinv {
    pub vectors: Mat<f64>,
    pub inverse_values: Vec<f64>,
}

impl FilteredPinv {
    pub fn rank(&self) -> usize {
        self.inverse_values.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut c = linalg::matvec_t(&self.vectors, x);
        for (ci, w) in c.iter_mut().zip(&self.inverse_values) {
            *ci *= w;
        }
        linalg::matvec(&self.vectors, &c)
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let (n, r) = (self.vectors.nrows(), self.rank());
        let scaled = Mat::from_fn(n, r, |i, j| self.vectors[(i, j)] * self.inverse_values[j]);
        &scaled * self.vectors.transpose()
    }
}

/// Filtered pseudoinverse restricted to the eigenpairs inside `window`.
///
/// An empty window yields the zero operator and logs a warning.
pub fn filtered_pinv(eig: &LaplacianEigen, window: &SpectralWindow) -> FilteredPinv {
    let idx = eig.indices_in(window);
    if idx.is_empty() {
        log::warn!("spectral window {window:?} is empty; returning the zero operator");
    }
    let n = eig.dim();
    FilteredPinv {
        vectors: Mat::from_fn(n, idx.len(), |i, j| eig.vectors[(i, idx[j])]),
        inverse_values: idx.iter().map(|&i| 1.0 / eig.values[i]).collect(),
    }
}
