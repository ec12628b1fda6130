use faer::Mat;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::decomposition::{Kind, ProjectorOperator};
use crate::linalg;
use crate::Result;

/// Power-iteration stopping rule: relative change of the estimate.
pub const POWER_TOL: f64 = 1e-3;
pub const POWER_MAX_ITER: usize = 200;

/// Estimate of `||U^T T U||_2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockNorm {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Restriction `U^T T U` of `T` to the range of a factored projector.
pub fn restricted_block(w: &ProjectorOperator, t: &Mat<C64>) -> Mat<C64> {
    let u = linalg::to_complex(w.basis().as_ref());
    let tu = t * &u;
    u.transpose() * &tu
}

/// Spectral norm of `U^T T U` by power iteration on `B^H B`. A zero-rank
/// band gives 0.
pub fn estimate_block_norm(w: &ProjectorOperator, t: &Mat<C64>, seed: u64) -> BlockNorm {
    if w.rank() == 0 {
        return BlockNorm { value: 0.0, iterations: 0, converged: true };
    }
    power_norm(&restricted_block(w, t), seed)
}

pub(crate) fn power_norm(b: &Mat<C64>, seed: u64) -> BlockNorm {
    let r = b.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<C64> = (0..r).map(|_| C64::new(1.0 + 0.5 * rng.gen::<f64>(), 0.0)).collect();
    let bh = b.adjoint().to_owned();
    let mut est = 0.0;
    for it in 1..=POWER_MAX_ITER {
        let nv = linalg::norm_c(&v);
        if nv == 0.0 {
            return BlockNorm { value: 0.0, iterations: it, converged: true };
        }
        v.iter_mut().for_each(|x| *x /= nv);
        let bv = linalg::matvec_c(b, &v);
        let next = linalg::norm_c(&bv);
        v = linalg::matvec_c(&bh, &bv);
        if it > 1 && (next - est).abs() <= POWER_TOL * next {
            return BlockNorm { value: next, iterations: it, converged: true };
        }
        est = next;
    }
    log::warn!("block norm power iteration stopped after {POWER_MAX_ITER} iterations");
    BlockNorm { value: est, iterations: POWER_MAX_ITER, converged: false }
}

/// One scaled band of the preconditioner.
#[derive(Debug, Clone)]
pub struct Band {
    pub kind: Option<Kind>,
    pub index: usize,
    pub projector: ProjectorOperator,
    pub norm: BlockNorm,
    pub weight: f64,
}

impl Band {
    /// `"lambda_3"`, `"sigma_0"` or `"harmonic"`.
    pub fn id(&self) -> String {
        match self.kind {
            Some(Kind::Lambda) => format!("lambda_{}", self.index),
            Some(Kind::Sigma) => format!("sigma_{}", self.index),
            None => "harmonic".into(),
        }
    }
}

/// Additive-Schwarz preconditioner `Q = sum_j w_j W_j` over loop, star and
/// (for non-simply connected surfaces) harmonic bands.
#[derive(Debug, Clone)]
pub struct WaveletPreconditioner {
    pub bands: Vec<Band>,
    dim: usize,
}

/// Builds `Q` for the (low-frequency cured) operator `t`, with
/// `w_j = 1 / sqrt(||W_j T W_j||)`. `harmonic` carries the harmonic
/// subspace on surfaces of positive genus.
pub fn build_wavelet_preconditioner(
    t: &Mat<C64>,
    lambda_family: &[ProjectorOperator],
    sigma_family: &[ProjectorOperator],
    harmonic: Option<&ProjectorOperator>,
    seed: u64,
) -> Result<WaveletPreconditioner> {
    let mut specs: Vec<(Option<Kind>, usize, &ProjectorOperator)> = Vec::new();
    specs.extend(lambda_family.iter().enumerate().map(|(j, p)| (Some(Kind::Lambda), j, p)));
    specs.extend(sigma_family.iter().enumerate().map(|(j, p)| (Some(Kind::Sigma), j, p)));
    if let Some(h) = harmonic.filter(|h| h.rank() > 0) {
        specs.push((None, 0, h));
    }
    let dim = t.nrows();
    if let Some((_, _, p)) = specs.iter().find(|(_, _, p)| p.dim() != dim) {
        return Err(crate::Error::Dimension(format!("band of size {} for operator of size {dim}", p.dim())));
    }
    let bands = specs
        .par_iter()
        .enumerate()
        .map(|(i, &(kind, index, p))| {
            let norm = estimate_block_norm(p, t, seed.wrapping_add(i as u64));
            let weight = if norm.value > 0.0 { 1.0 / norm.value.sqrt() } else { 0.0 };
            Band { kind, index, projector: p.clone(), norm, weight }
        })
        .collect();
    Ok(WaveletPreconditioner { bands, dim })
}

impl WaveletPreconditioner {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Q x`.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let parts: Vec<Vec<C64>> = self
            .bands
            .par_iter()
            .filter(|b| b.weight > 0.0)
            .map(|b| {
                let mut y = b.projector.apply_c(x);
                y.iter_mut().for_each(|v| *v *= b.weight);
                y
            })
            .collect();
        // summed in band order for reproducibility
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for p in parts {
            for (o, v) in out.iter_mut().zip(p) {
                *o += v;
            }
        }
        out
    }

    /// Dense `Q`, for analysis only.
    pub fn to_dense(&self) -> Mat<f64> {
        let mut q = Mat::zeros(self.dim, self.dim);
        for b in self.bands.iter().filter(|b| b.weight > 0.0) {
            let u = b.projector.basis();
            let scaled = Mat::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] * b.weight);
            q += &scaled * u.transpose();
        }
        q
    }

    /// Dense `Q T Q`.
    pub fn precondition(&self, t: &Mat<C64>) -> Mat<C64> {
        let q = linalg::to_complex(self.to_dense().as_ref());
        let tq = t * &q;
        &q * &tq
    }
}
