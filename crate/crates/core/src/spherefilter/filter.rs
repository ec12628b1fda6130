//! Spectral filtering of vertex fields through spherical harmonics.

use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::locate::{Location, Locator};
use super::morph::SphereMap;
use super::sht::{legendre_table, sh_analysis, sh_synthesis, ShGrid};
use crate::decomposition::{IncidencePair, LaplacianEigen, SpectralWindow, EDGE_TOL};
use crate::geom::Point3;
use crate::linalg;
use crate::precond::{krylov_solve, KrylovOptions};
use crate::C64;
use crate::{Error, Result};

/// Per-degree multiplier applied inside the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    Indicator,
    /// `1 / (l (l + 1))`, the pseudoinverse of the sphere Laplacian.
    InverseEigen,
}

/// How a relative window on the mesh spectrum selects harmonic degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Calibration {
    /// Degree `l` passes when `l (l + 1) / (B (B + 1))` lies in the window.
    Normalized,
    /// Degree `l` passes when its mode ranks `[l^2 - 1, (l + 1)^2 - 1)`,
    /// counted from the bottom of the nonzero spectrum, are centred inside
    /// the ranks the window selects from a reference eigendecomposition.
    Counted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterOptions {
    /// Defaults to `ceil(sqrt(N_v))`.
    pub bandwidth: Option<usize>,
    pub weighting: Weighting,
    pub calibration: Calibration,
    /// Divide each degree by its measured transfer gain.
    pub corrected: bool,
}

impl Default for FilterOptions {
    fn default() -> Self {
        Self { bandwidth: None, weighting: Weighting::Indicator, calibration: Calibration::Normalized, corrected: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutput {
    pub values: Vec<f64>,
    pub bandwidth: usize,
    /// Grid nodes that fell outside every candidate triangle.
    pub fallbacks: usize,
    /// Degrees that passed the window.
    pub degrees: Vec<usize>,
}

pub fn default_bandwidth(n_vertices: usize) -> usize {
    let mut b = (n_vertices as f64).sqrt().ceil() as usize;
    while b * b < n_vertices {
        b += 1;
    }
    b.max(1)
}

/// Degrees `0..=b` selected by `window`, with their multipliers.
pub fn degree_weights(
    b: usize,
    window: &SpectralWindow,
    eig_ref: Option<&LaplacianEigen>,
    opts: &FilterOptions,
) -> Result<Vec<f64>> {
    let lb = (b * (b + 1)) as f64;
    let pass: Vec<bool> = match opts.calibration {
        Calibration::Normalized => (0..=b)
            .map(|l| {
                let t = (l * (l + 1)) as f64 / lb;
                t + EDGE_TOL >= window.low && window.high.is_none_or(|h| t + EDGE_TOL < h)
            })
            .collect(),
        Calibration::Counted => {
            let eig = eig_ref.ok_or_else(|| Error::Config("counted calibration needs a reference spectrum".into()))?;
            let nonzero = eig.dim() - eig.nullity();
            // ascending rank of eigenvalue i (nonincreasing storage)
            let ranks: Vec<usize> = eig.indices_in(window).iter().map(|&i| nonzero - 1 - i).collect();
            let (lo, hi) = match (ranks.iter().min(), ranks.iter().max()) {
                (Some(&lo), Some(&hi)) => (lo, hi + 1),
                _ => (1, 0),
            };
            (0..=b)
                .map(|l| if l == 0 { window.low == 0.0 } else { (lo..hi).contains(&(l * l + l - 1)) })
                .collect()
        }
    };
    Ok(pass
        .iter()
        .enumerate()
        .map(|(l, &p)| match (p, opts.weighting) {
            (false, _) => 0.0,
            (true, Weighting::Indicator) => 1.0,
            (true, Weighting::InverseEigen) if l == 0 => 0.0,
            (true, Weighting::InverseEigen) => 1.0 / (l * (l + 1)) as f64,
        })
        .collect())
}

/// Grid, point locations and interpolation weights for one sphere map.
#[derive(Debug, Clone)]
pub struct SphereFilter {
    grid: ShGrid,
    locator: Locator,
    locations: Vec<Location>,
    positions: Vec<Point3>,
    /// Measured gain of sampling, interpolation and analysis per degree.
    transfer: Vec<f64>,
}

impl SphereFilter {
    pub fn new(map: &SphereMap, bandwidth: Option<usize>) -> Self {
        let b = bandwidth.unwrap_or_else(|| default_bandwidth(map.mesh.n_vertices()));
        let grid = ShGrid::new(b);
        let locator = Locator::new(&map.mesh);
        let locations: Vec<Location> = grid.points().par_iter().map(|&p| locator.locate(p)).collect();
        let fallbacks = locations.iter().filter(|l| l.fallback).count();
        if fallbacks > 0 {
            log::warn!("{fallbacks} grid nodes used the nearest-triangle fallback");
        }
        let mut filter =
            Self { grid, locator, locations, positions: map.positions().to_vec(), transfer: vec![1.0; b + 1] };
        filter.transfer = filter.measure_transfer();
        filter
    }

    /// Average over `m` of the degree-`l` coefficient recovered from the
    /// vertex samples of `Y_lm` (real part taken for `m > 0`).
    fn measure_transfer(&self) -> Vec<f64> {
        let b = self.grid.bandwidth;
        let tables: Vec<Vec<f64>> = self.positions.iter().map(|p| legendre_table(b, p[2].clamp(-1.0, 1.0))).collect();
        let phis: Vec<f64> = self.positions.iter().map(|p| p[1].atan2(p[0])).collect();
        (0..=b)
            .into_par_iter()
            .map(|l| {
                let gains: Vec<f64> = (0..=l)
                    .map(|m| {
                        let scale = if m == 0 { 1.0 } else { 2.0 };
                        let y: Vec<f64> = tables
                            .iter()
                            .zip(&phis)
                            .map(|(t, phi)| scale * t[l * (l + 1) / 2 + m] * (m as f64 * phi).cos())
                            .collect();
                        let samples: Vec<f64> = self.locations.iter().map(|loc| self.locator.interpolate(loc, &y)).collect();
                        let c = sh_analysis(&self.grid, &samples).expect("grid-sized samples");
                        c.get(l, m as i64).re
                    })
                    .collect();
                gains.iter().sum::<f64>() / gains.len() as f64
            })
            .collect()
    }

    pub fn transfer(&self) -> &[f64] {
        &self.transfer
    }

    pub fn bandwidth(&self) -> usize {
        self.grid.bandwidth
    }

    pub fn fallbacks(&self) -> usize {
        self.locations.iter().filter(|l| l.fallback).count()
    }

    /// Applies per-degree multipliers `w[l]` to the vertex field `y`,
    /// dividing out the measured transfer when `corrected`.
    pub fn apply(&self, y: &[f64], w: &[f64], corrected: bool) -> Result<Vec<f64>> {
        if y.len() != self.positions.len() {
            return Err(Error::Dimension(format!(
                "vertex field of length {} for {} vertices",
                y.len(),
                self.positions.len()
            )));
        }
        let samples: Vec<f64> = self.locations.iter().map(|l| self.locator.interpolate(l, y)).collect();
        let mut coeffs = sh_analysis(&self.grid, &samples)?;
        coeffs.scale_degrees(|l| if corrected { w[l] / self.transfer[l] } else { w[l] });
        sh_synthesis(&coeffs, &self.positions)
    }
}

/// Interpolates the piecewise-linear field `y` to the grid, transforms,
/// reweights each degree and synthesises back at the sphere vertices.
pub fn fast_vertex_filter(
    map: &SphereMap,
    y: &[f64],
    window: &SpectralWindow,
    eig_ref: Option<&LaplacianEigen>,
    opts: &FilterOptions,
) -> Result<FilterOutput> {
    let filter = SphereFilter::new(map, opts.bandwidth);
    let w = degree_weights(filter.bandwidth(), window, eig_ref, opts)?;
    let values = filter.apply(y, &w, opts.corrected)?;
    let degrees = (0..w.len()).filter(|&l| w[l] != 0.0).collect();
    Ok(FilterOutput { values, bandwidth: filter.bandwidth(), fallbacks: filter.fallbacks(), degrees })
}

/// Lumped P1 mass: one third of the adjacent flat triangle areas.
pub fn lumped_mass(map: &SphereMap) -> Vec<f64> {
    let mut m = vec![0.0; map.mesh.n_vertices()];
    for (t, tri) in map.mesh.triangles().iter().enumerate() {
        let a = map.mesh.area(t) / 3.0;
        for &v in tri {
            m[v] += a;
        }
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectorOptions {
    pub bandwidth: Option<usize>,
    /// Degree selection for windows other than the full spectrum.
    pub calibration: Calibration,
    pub corrected: bool,
    /// Relative residual for the stiffness solve preconditioned by the
    /// sphere filter; `None` applies the filter once.
    pub refine_tol: Option<f64>,
    pub refine_max_iter: usize,
}

impl Default for ProjectorOptions {
    fn default() -> Self {
        Self {
            bandwidth: None,
            calibration: Calibration::Normalized,
            corrected: true,
            refine_tol: Some(1e-3),
            refine_max_iter: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorOutput {
    pub values: Vec<f64>,
    pub bandwidth: usize,
    pub fallbacks: usize,
    /// Stiffness applications spent in the refinement solve.
    pub iterations: usize,
}

/// Approximates the `G`-orthogonal loop projector `Lambda K^+ Lambda^T G x`
/// restricted to `window`, with `K = Lambda^T G Lambda`.
///
/// The load `Lambda^T G x` is turned into nodal values with the lumped mass
/// and filtered with `1 / (l (l + 1))`. With `refine_tol` set, that filter
/// right-preconditions a GMRES solve with `K`. The window is then applied as
/// a degree indicator and the result mapped to RWG coefficients by `Lambda`.
pub fn fast_projector_apply(
    pair: &IncidencePair,
    map: &SphereMap,
    g: &Mat<f64>,
    x: &[f64],
    window: &SpectralWindow,
    eig_ref: Option<&LaplacianEigen>,
    opts: &ProjectorOptions,
) -> Result<ProjectorOutput> {
    if g.nrows() != pair.n_edges() || g.ncols() != pair.n_edges() || x.len() != pair.n_edges() {
        return Err(Error::Dimension(format!(
            "Gram {}x{} and vector {} for {} edges",
            g.nrows(),
            g.ncols(),
            x.len(),
            pair.n_edges()
        )));
    }
    let filter = SphereFilter::new(map, opts.bandwidth);
    let b = filter.bandwidth();
    let full = window.low == 0.0 && window.high.is_none();
    let inverse = degree_weights(
        b,
        &SpectralWindow::full(),
        None,
        &FilterOptions { bandwidth: Some(b), weighting: Weighting::InverseEigen, ..Default::default() },
    )?;
    let mass = lumped_mass(map);
    let smooth = |load: &[f64]| -> Result<Vec<f64>> {
        let nodal: Vec<f64> = load.iter().zip(&mass).map(|(b, m)| b / m).collect();
        filter.apply(&nodal, &inverse, opts.corrected)
    };

    let load = pair.apply_lambda_t(&linalg::matvec(g, x));
    let (mut u, iterations) = match opts.refine_tol {
        None => (smooth(&load)?, 0),
        Some(tol) => {
            let stiffness = |v: &[f64]| pair.apply_lambda_t(&linalg::matvec(g, &pair.apply_lambda(v)));
            let real = |z: &[C64]| z.iter().map(|c| c.re).collect::<Vec<f64>>();
            let cplx = |v: Vec<f64>| v.into_iter().map(|r| C64::new(r, 0.0)).collect::<Vec<C64>>();
            let precond = |z: &[C64]| smooth(&real(z)).expect("dimensions checked");
            let kopts = KrylovOptions { tol, max_iter: opts.refine_max_iter, restart: opts.refine_max_iter };
            let rhs = cplx(load.clone());
            let (z, report) = match krylov_solve(|z| cplx(stiffness(&precond(z))), &rhs, &kopts) {
                Ok(r) => r,
                Err(Error::NoConvergence(f)) => {
                    log::warn!("sphere-filter refinement stopped at residual {:e}", f.report.residual);
                    (f.solution, f.report)
                }
                Err(e) => return Err(e),
            };
            (precond(&z), report.iterations)
        }
    };
    if !full {
        let fo = FilterOptions {
            bandwidth: Some(b),
            weighting: Weighting::Indicator,
            calibration: opts.calibration,
            corrected: opts.corrected,
        };
        u = filter.apply(&u, &degree_weights(b, window, eig_ref, &fo)?, opts.corrected)?;
    }
    Ok(ProjectorOutput { values: pair.apply_lambda(&u), bandwidth: b, fallbacks: filter.fallbacks(), iterations })
}
