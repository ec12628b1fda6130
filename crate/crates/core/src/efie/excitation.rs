use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::quadrature::TriangleRule;
use crate::geom::{self, Point3};
use crate::mesh::TriangleMesh;
use crate::{Error, Result};

/// Time-harmonic plane wave `E(r) = amplitude * p exp(i k d . r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneWave {
    pub direction: Point3,
    pub polarization: Point3,
    pub amplitude: f64,
    pub k: f64,
}

impl PlaneWave {
    pub fn new(direction: Point3, polarization: Point3, amplitude: f64, k: f64) -> Result<Self> {
        let w = Self { direction, polarization, amplitude, k };
        w.validate()?;
        Ok(w)
    }

    /// x-polarised wave travelling along +z.
    pub fn z_travelling(k: f64) -> Self {
        Self { direction: [0.0, 0.0, 1.0], polarization: [1.0, 0.0, 0.0], amplitude: 1.0, k }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: Point3| (geom::norm(v) - 1.0).abs() <= 1e-12;
        if !unit(self.direction) || !unit(self.polarization) {
            return Err(Error::Config("plane wave direction and polarization must be unit vectors".into()));
        }
        if geom::dot(self.direction, self.polarization).abs() > 1e-12 {
            return Err(Error::Config("plane wave polarization must be orthogonal to its direction".into()));
        }
        if !(self.k > 0.0 && self.k.is_finite() && self.amplitude.is_finite()) {
            return Err(Error::Config(format!("invalid plane wave k = {} amplitude = {}", self.k, self.amplitude)));
        }
        Ok(())
    }

    pub fn field(&self, r: Point3) -> [C64; 3] {
        let phase = C64::from_polar(self.amplitude, self.k * geom::dot(self.direction, r));
        [phase * self.polarization[0], phase * self.polarization[1], phase * self.polarization[2]]
    }
}

/// Tested excitation `e[m] = -int f_m . E dS` (the tangential part of `E`
/// is all that survives the dot product with a tangential `f_m`).
pub fn assemble_rhs(mesh: &TriangleMesh, wave: &PlaneWave, degree: usize) -> Result<Vec<C64>> {
    wave.validate()?;
    let rule = TriangleRule::with_degree(degree);
    let mut e = vec![C64::new(0.0, 0.0); mesh.n_edges()];
    for t in 0..mesh.n_cells() {
        let c = mesh.corners(t);
        let te = mesh.triangle_edges(t);
        for (b, w) in rule.points.iter().zip(&rule.weights) {
            let r = geom::barycentric(c[0], c[1], c[2], *b);
            let field = wave.field(r);
            for i in 0..3 {
                let d = geom::sub(r, c[i]);
                let dot = field[0] * d[0] + field[1] * d[1] + field[2] * d[2];
                e[te[i].edge] -= dot * (0.5 * w * te[i].sign);
            }
        }
    }
    Ok(e)
}
