//! Spherical harmonic transforms on a Gauss-Legendre grid.
//!
//! `Y_lm(theta, phi) = N_lm P_l^m(cos theta) exp(i m phi)`, orthonormal on
//! the unit sphere, with the Condon-Shortley phase.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::efie::gauss_legendre;
use crate::geom::Point3;
use crate::{Error, Result};

/// `B + 1` Gauss-Legendre colatitudes times `2B + 2` uniform azimuths.
#[derive(Debug, Clone, Serialize)]
pub struct ShGrid {
    pub bandwidth: usize,
    /// `cos theta_j`, descending (north to south).
    pub cos_theta: Vec<f64>,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    /// Gauss-Legendre weights for the colatitude rows.
    pub weights: Vec<f64>,
}

impl ShGrid {
    pub fn new(bandwidth: usize) -> Self {
        let (x, w) = gauss_legendre(bandwidth + 1);
        let cos_theta: Vec<f64> = x.iter().rev().copied().collect();
        let weights: Vec<f64> = w.iter().rev().copied().collect();
        let theta = cos_theta.iter().map(|c| c.acos()).collect();
        let n_phi = 2 * bandwidth + 2;
        let phi = (0..n_phi).map(|k| 2.0 * PI * k as f64 / n_phi as f64).collect();
        Self { bandwidth, cos_theta, theta, phi, weights }
    }

    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phi.len()
    }

    pub fn len(&self) -> usize {
        self.n_theta() * self.n_phi()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unit vector of node `(j, k)`; samples are stored row-major in `j`.
    pub fn point(&self, j: usize, k: usize) -> Point3 {
        let s = self.theta[j].sin();
        [s * self.phi[k].cos(), s * self.phi[k].sin(), self.cos_theta[j]]
    }

    pub fn points(&self) -> Vec<Point3> {
        (0..self.n_theta()).flat_map(|j| (0..self.n_phi()).map(move |k| (j, k))).map(|(j, k)| self.point(j, k)).collect()
    }

    /// Quadrature weight of node `(j, k)` for integrals over the sphere.
    pub fn node_weight(&self, j: usize) -> f64 {
        self.weights[j] * 2.0 * PI / self.n_phi() as f64
    }
}

/// Coefficients `c_lm` for `0 <= l <= B`, `|m| <= l`, stored at `l^2 + l + m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShCoefficients {
    pub bandwidth: usize,
    pub data: Vec<C64>,
}

impl ShCoefficients {
    pub fn zeros(bandwidth: usize) -> Self {
        Self { bandwidth, data: vec![C64::new(0.0, 0.0); (bandwidth + 1) * (bandwidth + 1)] }
    }

    pub fn index(l: usize, m: i64) -> usize {
        idx(l, m)
    }

    pub fn get(&self, l: usize, m: i64) -> C64 {
        self.data[idx(l, m)]
    }

    pub fn set(&mut self, l: usize, m: i64, v: C64) {
        let i = idx(l, m);
        self.data[i] = v;
    }

    /// Multiplies every degree-`l` coefficient by `f(l)`.
    pub fn scale_degrees(&mut self, f: impl Fn(usize) -> f64) {
        for l in 0..=self.bandwidth {
            let s = f(l);
            for m in -(l as i64)..=(l as i64) {
                self.data[idx(l, m)] *= s;
            }
        }
    }
}

fn idx(l: usize, m: i64) -> usize {
    (l as i64 * l as i64 + l as i64 + m) as usize
}

/// Orthonormalised associated Legendre functions `N_lm P_l^m(x)` for
/// `0 <= m <= l <= b`, stored at `l (l + 1) / 2 + m`.
pub fn legendre_table(b: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; (b + 1) * (b + 2) / 2];
    let at = |l: usize, m: usize| l * (l + 1) / 2 + m;
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=b {
        if m > 0 {
            pmm *= -((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s;
        }
        p[at(m, m)] = pmm;
        if m < b {
            p[at(m + 1, m)] = ((2 * m + 3) as f64).sqrt() * x * pmm;
        }
        for l in (m + 2)..=b {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let c = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            p[at(l, m)] = a * (x * p[at(l - 1, m)] - c * p[at(l - 2, m)]);
        }
    }
    p
}

/// Forward transform of real samples given row-major on `grid`.
pub fn sh_analysis(grid: &ShGrid, samples: &[f64]) -> Result<ShCoefficients> {
    if samples.len() != grid.len() {
        return Err(Error::Dimension(format!("{} samples for a grid of {} nodes", samples.len(), grid.len())));
    }
    let b = grid.bandwidth;
    let nphi = grid.n_phi();
    let mut out = ShCoefficients::zeros(b);
    for j in 0..grid.n_theta() {
        let row = &samples[j * nphi..(j + 1) * nphi];
        let w = grid.node_weight(j);
        let leg = legendre_table(b, grid.cos_theta[j]);
        for m in 0..=b {
            // F_m = sum_k f_k exp(-i m phi_k)
            let fm: C64 = row
                .iter()
                .zip(&grid.phi)
                .map(|(&f, &phi)| C64::from_polar(f, -(m as f64) * phi))
                .sum();
            for l in m..=b {
                let i = idx(l, m as i64);
                out.data[i] += fm * (w * leg[l * (l + 1) / 2 + m]);
            }
        }
    }
    // real field: c_{l,-m} = (-1)^m conj(c_{lm})
    for l in 1..=b {
        for m in 1..=l {
            let v = out.get(l, m as i64).conj();
            out.set(l, -(m as i64), if m % 2 == 0 { v } else { -v });
        }
    }
    Ok(out)
}

/// Real part of the expansion at arbitrary unit vectors.
pub fn sh_synthesis(coeffs: &ShCoefficients, points: &[Point3]) -> Result<Vec<f64>> {
    let b = coeffs.bandwidth;
    points
        .iter()
        .map(|p| {
            let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            if (r - 1.0).abs() > 1e-10 {
                return Err(Error::Dimension(format!("synthesis point {p:?} is not on the unit sphere")));
            }
            let x = p[2].clamp(-1.0, 1.0);
            let phi = p[1].atan2(p[0]);
            let leg = legendre_table(b, x);
            let mut v = 0.0;
            for l in 0..=b {
                let base = l * (l + 1) / 2;
                v += (coeffs.get(l, 0) * leg[base]).re;
                for m in 1..=l {
                    let e = C64::from_polar(1.0, m as f64 * phi);
                    v += 2.0 * (coeffs.get(l, m as i64) * e).re * leg[base + m];
                }
            }
            Ok(v)
        })
        .collect()
}

/// Synthesis on the grid nodes themselves.
pub fn sh_synthesis_grid(grid: &ShGrid, coeffs: &ShCoefficients) -> Vec<f64> {
    let b = coeffs.bandwidth;
    let mut out = Vec::with_capacity(grid.len());
    for j in 0..grid.n_theta() {
        let leg = legendre_table(b, grid.cos_theta[j]);
        // G_m = sum_l c_lm P_lm for this row
        let gm: Vec<C64> = (0..=b)
            .map(|m| (m..=b).map(|l| coeffs.get(l, m as i64) * leg[l * (l + 1) / 2 + m]).sum())
            .collect();
        for &phi in &grid.phi {
            let mut v = gm[0].re;
            for (m, g) in gm.iter().enumerate().skip(1) {
                v += 2.0 * (g * C64::from_polar(1.0, m as f64 * phi)).re;
            }
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_coeffs(b: usize, seed: u64) -> ShCoefficients {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = ShCoefficients::zeros(b);
        for l in 0..=b {
            c.set(l, 0, C64::new(rng.gen_range(-1.0..1.0), 0.0));
            for m in 1..=l as i64 {
                let v = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                c.set(l, m, v);
                c.set(l, -m, if m % 2 == 0 { v.conj() } else { -v.conj() });
            }
        }
        c
    }

    fn y21(p: Point3) -> C64 {
        // -(1/2) sqrt(15 / 2 pi) sin(theta) cos(theta) exp(i phi)
        let s = (p[0] * p[0] + p[1] * p[1]).sqrt();
        let phi = p[1].atan2(p[0]);
        C64::from_polar(-0.5 * (15.0 / (2.0 * PI)).sqrt() * s * p[2], phi)
    }

    #[test]
    fn y10_samples_give_unit_coefficient() {
        let grid = ShGrid::new(6);
        let f: Vec<f64> = grid.points().iter().map(|p| (3.0 / (4.0 * PI)).sqrt() * p[2]).collect();
        let c = sh_analysis(&grid, &f).unwrap();
        for l in 0..=6 {
            for m in -(l as i64)..=(l as i64) {
                let want = if (l, m) == (1, 0) { 1.0 } else { 0.0 };
                assert!((c.get(l, m) - C64::new(want, 0.0)).norm() < 1e-10, "({l},{m})");
            }
        }
    }

    #[test]
    fn constant_field() {
        let grid = ShGrid::new(5);
        let c = sh_analysis(&grid, &vec![1.0; grid.len()]).unwrap();
        assert!((c.get(0, 0).re - (4.0 * PI).sqrt()).abs() < 1e-12);
        assert!(c.data.iter().skip(1).all(|v| v.norm() < 1e-12));
        let v = sh_synthesis(&c, &[[0.0, 0.0, 1.0], [0.6, 0.0, 0.8]]).unwrap();
        assert!(v.iter().all(|x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn grid_integrates_high_degree_products() {
        // |Y_lm|^2 has degree 2l; the grid must integrate it to 1 for l <= B
        let b = 8;
        let grid = ShGrid::new(b);
        for (l, m) in [(8usize, 3i64), (7, 7), (8, 0)] {
            let mut c = ShCoefficients::zeros(b);
            c.set(l, m, C64::new(1.0, 0.0));
            let mut acc = 0.0;
            for j in 0..grid.n_theta() {
                let leg = legendre_table(b, grid.cos_theta[j]);
                let p = leg[l * (l + 1) / 2 + m as usize];
                acc += grid.node_weight(j) * grid.n_phi() as f64 * p * p;
            }
            assert!((acc - 1.0).abs() < 1e-10, "({l},{m}) {acc}");
        }
    }

    #[test]
    fn y21_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let z: f64 = rng.gen_range(-1.0..1.0);
            let phi: f64 = rng.gen_range(0.0..2.0 * PI);
            let s = (1.0 - z * z).sqrt();
            let p = [s * phi.cos(), s * phi.sin(), z];
            let leg = legendre_table(2, z);
            let v = C64::from_polar(leg[3 + 1], phi);
            assert!((v - y21(p)).norm() < 1e-10);
        }
        // synthesis of Re(Y21 + conj) pair reproduces 2 Re Y21
        let mut c = ShCoefficients::zeros(3);
        c.set(2, 1, C64::new(1.0, 0.0));
        c.set(2, -1, C64::new(-1.0, 0.0));
        let p = [0.36, 0.48, 0.8];
        let v = sh_synthesis(&c, &[p]).unwrap()[0];
        assert!((v - 2.0 * y21(p).re).abs() < 1e-12);
    }

    #[test]
    fn round_trip_band_limited() {
        for b in [4, 13, 26] {
            let grid = ShGrid::new(b);
            let c = random_coeffs(b, b as u64);
            let f = sh_synthesis_grid(&grid, &c);
            let back = sh_analysis(&grid, &f).unwrap();
            let f2 = sh_synthesis_grid(&grid, &back);
            let err = f.iter().zip(&f2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-8, "B={b}: {err:e}");
            let cerr = c.data.iter().zip(&back.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(cerr < 1e-10, "B={b}: {cerr:e}");
        }
    }

    #[test]
    fn grid_and_point_synthesis_agree() {
        let b = 10;
        let grid = ShGrid::new(b);
        let c = random_coeffs(b, 4);
        let on_grid = sh_synthesis_grid(&grid, &c);
        let at_points = sh_synthesis(&c, &grid.points()).unwrap();
        for (a, b) in on_grid.iter().zip(&at_points) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn off_sphere_point_rejected() {
        let c = ShCoefficients::zeros(2);
        assert!(sh_synthesis(&c, &[[0.0, 0.0, 1.1]]).is_err());
    }
}
