//! Galerkin EFIE with flux-normalised RWG functions on flat triangles.

mod assembly;
mod excitation;
mod quadrature;
mod singular;

use faer::Mat;
use num_complex::Complex64 as C64;

pub use assembly::assemble_gram;
pub use excitation::{assemble_rhs, PlaneWave};
pub use quadrature::{gauss_legendre, QuadratureRule, SingularScheme, TriangleRule};
pub use singular::static_potentials;

use crate::linalg;
use crate::mesh::TriangleMesh;
use crate::{Error, Result};

/// Assembled EFIE matrices at wavenumber `k`. `T_s` is the vector-potential
/// part (`ik` times the single layer on currents), `T_h` the scalar-potential
/// part (`1/ik` times the single layer on charges).
#[derive(Debug, Clone)]
pub struct EfieSystem {
    pub k: f64,
    pub t_s: Mat<C64>,
    pub t_h: Mat<C64>,
}

impl EfieSystem {
    pub fn dim(&self) -> usize {
        self.t_s.nrows()
    }

    /// `T = T_s + T_h`.
    pub fn total(&self) -> Mat<C64> {
        &self.t_s + &self.t_h
    }
}

/// Assembles `T_s` and `T_h`. Rejects electrically large meshes
/// (`k h_avg >= 1`); see [`assemble_efie_unguarded`].
pub fn assemble_efie(mesh: &TriangleMesh, k: f64, quad: &QuadratureRule) -> Result<EfieSystem> {
    let kh = k * mesh.stats().h_avg;
    if kh >= 1.0 {
        return Err(Error::Config(format!("k h_avg = {kh:.3} is not below 1; mesh too coarse for k = {k}")));
    }
    assemble_efie_unguarded(mesh, k, quad)
}

pub fn assemble_efie_unguarded(mesh: &TriangleMesh, k: f64, quad: &QuadratureRule) -> Result<EfieSystem> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Config(format!("wavenumber must be positive, got {k}")));
    }
    let (t_s, phi) = assembly::assemble_blocks(mesh, k, quad)?;
    let t_h = assembly::scalar_block(mesh, &phi, k);
    Ok(EfieSystem { k, t_s, t_h })
}

/// `sigma_max / sigma_min` from a dense SVD.
pub fn condition_number(m: &Mat<C64>) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!("condition number of a {}x{} matrix", m.nrows(), m.ncols())));
    }
    if m.nrows() == 0 {
        return Ok(1.0);
    }
    if !m.col_iter().all(|c| c.iter().all(|v| v.is_finite())) {
        return Err(Error::Dimension("matrix has non-finite entries".into()));
    }
    ratio(&linalg::singular_values(m.as_ref())?, m.nrows())
}

pub fn condition_number_real(m: &Mat<f64>) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!("condition number of a {}x{} matrix", m.nrows(), m.ncols())));
    }
    if m.nrows() == 0 {
        return Ok(1.0);
    }
    ratio(&linalg::singular_values_real(m.as_ref())?, m.nrows())
}

fn ratio(s: &[f64], n: usize) -> Result<f64> {
    let (max, min) = (s[0], s[s.len() - 1]);
    if max == 0.0 || min <= f64::EPSILON * max * n as f64 {
        return Err(Error::Singular);
    }
    Ok(max / min)
}
