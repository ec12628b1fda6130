use faer::Mat;
use num_complex::Complex64 as C64;

use crate::decomposition::ProjectorOperator;
use crate::{Error, Result};

/// Coefficients of the low-frequency rescaling
/// `M = a P^{Lambda H} + b P^Sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LfCoefficients {
    pub loop_scale: C64,
    pub star_scale: C64,
}

impl LfCoefficients {
    /// `a = 1 / sqrt(k)`, `b = i sqrt(k)`.
    pub fn standard(k: f64) -> Self {
        Self { loop_scale: C64::new(1.0 / k.sqrt(), 0.0), star_scale: C64::new(0.0, k.sqrt()) }
    }
}

/// `M` and the symmetrically rescaled operator `M T M`.
#[derive(Debug, Clone)]
pub struct LfRescaled {
    pub m: Mat<C64>,
    pub mtm: Mat<C64>,
}

/// Rescales `T` with the quasi-Helmholtz projectors `P^{Lambda H}` (loops
/// plus harmonic part) and `P^Sigma`.
pub fn lf_rescale(
    t: &Mat<C64>,
    p_lambda_h: &ProjectorOperator,
    p_sigma: &ProjectorOperator,
    k: f64,
) -> Result<LfRescaled> {
    lf_rescale_with(t, p_lambda_h, p_sigma, LfCoefficients::standard(k))
}

pub fn lf_rescale_with(
    t: &Mat<C64>,
    p_lambda_h: &ProjectorOperator,
    p_sigma: &ProjectorOperator,
    c: LfCoefficients,
) -> Result<LfRescaled> {
    let n = t.nrows();
    if t.ncols() != n || p_lambda_h.dim() != n || p_sigma.dim() != n {
        return Err(Error::Dimension(format!(
            "operator {}x{} with projectors of size {} and {}",
            n,
            t.ncols(),
            p_lambda_h.dim(),
            p_sigma.dim()
        )));
    }
    let pl = p_lambda_h.to_dense();
    let ps = p_sigma.to_dense();
    let mut dev = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let id = if i == j { 1.0 } else { 0.0 };
            let d = pl[(i, j)] + ps[(i, j)] - id;
            dev += d * d;
        }
    }
    // Frobenius norm bounds the spectral norm from above
    let dev = dev.sqrt();
    if dev > 1e-8 {
        return Err(Error::Complementarity(dev));
    }
    let m = Mat::from_fn(n, n, |i, j| c.loop_scale * pl[(i, j)] + c.star_scale * ps[(i, j)]);
    let tm = t * &m;
    let mtm = &m * &tm;
    Ok(LfRescaled { m, mtm })
}
