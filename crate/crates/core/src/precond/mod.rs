//! Low-frequency quasi-Helmholtz rescaling, the wavelet additive-Schwarz
//! preconditioner, GMRES and spectrum reports.
//!
//! The pipeline for an EFIE matrix `T` is
//! `M T M` (low-frequency cure) followed by `Q (M T M) Q` with
//! `Q = sum_j W_j / sqrt(||W_j M T M W_j||)`.

mod krylov;
mod lf;
mod report;
mod schwarz;

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use krylov::{krylov_solve, KrylovOptions, SolveReport, DEFAULT_MAX_ITER, DEFAULT_RESTART};
pub use lf::{lf_rescale, lf_rescale_with, LfCoefficients, LfRescaled};
pub use report::{spectrum_report, BandMarker, SpectrumBlock, SpectrumReport};
pub use schwarz::{
    build_wavelet_preconditioner, estimate_block_norm, restricted_block, Band, BlockNorm, WaveletPreconditioner,
    POWER_MAX_ITER, POWER_TOL,
};

use crate::decomposition::{
    family_from_basis, harmonic_projector, wavelet_levels, FilterBasis, IncidencePair, Kind, ProjectorOperator,
    Provenance, SpectralWindow,
};
use crate::linalg;
use crate::{Error, Result};

/// Which preconditioner a solve or sweep uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrecondMode {
    None,
    Lf,
    LfWavelet,
}

/// Graph-Laplacian quasi-Helmholtz projectors and wavelet families of a mesh.
#[derive(Debug, Clone)]
pub struct GraphProjectors {
    /// `P_0^Lambda` extended by the harmonic subspace.
    pub loop_harmonic: ProjectorOperator,
    pub star: ProjectorOperator,
    pub harmonic: Option<ProjectorOperator>,
    pub lambda_family: Vec<ProjectorOperator>,
    pub sigma_family: Vec<ProjectorOperator>,
    pub levels: usize,
}

impl GraphProjectors {
    /// One eigendecomposition per Laplacian serves the full projectors and
    /// all bands. `levels` overrides the default band count.
    pub fn new(pair: &IncidencePair, levels: Option<usize>) -> Result<Self> {
        let lb = FilterBasis::primal(Kind::Lambda, pair, None, None)?;
        let sb = FilterBasis::primal(Kind::Sigma, pair, None, None)?;
        let full = SpectralWindow::full();
        let p_lambda = lb.projector(&full, Provenance::Filtered(Kind::Lambda));
        let star = sb.projector(&full, Provenance::Filtered(Kind::Sigma));
        let levels = levels.unwrap_or_else(|| wavelet_levels(pair));
        let (loop_harmonic, harmonic) = if pair.genus() > 0 {
            let h = harmonic_projector(&p_lambda, &star, pair.genus())?;
            (p_lambda.direct_sum(&h, Provenance::LoopHarmonic)?, Some(h))
        } else {
            (p_lambda, None)
        };
        Ok(Self {
            loop_harmonic,
            star,
            harmonic,
            lambda_family: family_from_basis(&lb, levels),
            sigma_family: family_from_basis(&sb, levels),
            levels,
        })
    }

    pub fn preconditioner(&self, t_cured: &Mat<C64>, seed: u64) -> Result<WaveletPreconditioner> {
        build_wavelet_preconditioner(t_cured, &self.lambda_family, &self.sigma_family, self.harmonic.as_ref(), seed)
    }
}

/// Solves `T j = e` directly, as `(M T M) y = M e` with `j = M y`, or as
/// `(Q M T M Q) z = Q M e` with `j = M Q z`.
pub fn solve_preconditioned(
    t: &Mat<C64>,
    e: &[C64],
    lf: Option<&LfRescaled>,
    q: Option<&WaveletPreconditioner>,
    opts: &KrylovOptions,
) -> Result<(Vec<C64>, SolveReport)> {
    if e.len() != t.nrows() {
        return Err(Error::Dimension(format!("rhs of length {} for a {}-dim system", e.len(), t.nrows())));
    }
    let Some(lf) = lf else {
        return krylov_solve(|x| linalg::matvec_c(t, x), e, opts);
    };
    let me = linalg::matvec_c(&lf.m, e);
    let result = match q {
        None => krylov_solve(|x| linalg::matvec_c(&lf.mtm, x), &me, opts),
        Some(q) => krylov_solve(|x| q.apply(&linalg::matvec_c(&lf.mtm, &q.apply(x))), &q.apply(&me), opts),
    };
    let back = |y: &[C64]| {
        let z = match q {
            Some(q) => q.apply(y),
            None => y.to_vec(),
        };
        linalg::matvec_c(&lf.m, &z)
    };
    match result {
        Ok((y, rep)) => Ok((back(&y), rep)),
        Err(Error::NoConvergence(mut f)) => {
            f.solution = back(&f.solution);
            Err(Error::NoConvergence(f))
        }
        Err(e) => Err(e),
    }
}
