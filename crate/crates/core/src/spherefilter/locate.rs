//! Point location on a sphere mesh through latitude/longitude bins.

use std::f64::consts::PI;

use crate::geom::{self, Point3};
use crate::mesh::TriangleMesh;

/// Barycentric position of a point on the sphere mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location {
    pub triangle: usize,
    pub weights: [f64; 3],
    /// The point was outside every candidate and snapped to the nearest
    /// triangle.
    pub fallback: bool,
}

#[derive(Debug, Clone)]
pub struct Locator {
    triangles: Vec<[usize; 3]>,
    corners: Vec<[Point3; 3]>,
    centroids: Vec<Point3>,
    n_theta: usize,
    n_phi: usize,
    bins: Vec<Vec<usize>>,
}

fn spherical(p: Point3) -> (f64, f64) {
    let theta = p[2].clamp(-1.0, 1.0).acos();
    let phi = p[1].atan2(p[0]).rem_euclid(2.0 * PI);
    (theta, phi)
}

const INSIDE_TOL: f64 = 1e-12;

fn inside(c: &[Point3; 3], p: Point3) -> bool {
    (0..3).all(|i| geom::dot(p, geom::cross(c[i], c[(i + 1) % 3])) >= -INSIDE_TOL)
}

/// Barycentric weights of the central projection of `p` onto the plane of
/// the flat triangle.
fn weights(c: &[Point3; 3], p: Point3) -> [f64; 3] {
    let n = geom::cross(geom::sub(c[1], c[0]), geom::sub(c[2], c[0]));
    let nn = geom::dot(n, n);
    let q = geom::scale(p, geom::dot(n, c[0]) / geom::dot(n, p));
    let w = |a: Point3, b: Point3| geom::dot(geom::cross(geom::sub(a, q), geom::sub(b, q)), n) / nn;
    [w(c[1], c[2]), w(c[2], c[0]), w(c[0], c[1])]
}

impl Locator {
    pub fn new(mesh: &TriangleMesh) -> Self {
        let n_cells = mesh.n_cells();
        let n_phi = ((2.0 * (n_cells as f64).sqrt()).ceil() as usize).max(4);
        let n_theta = (n_phi / 2).max(2);
        let mut bins = vec![Vec::new(); n_theta * n_phi];
        let dt = PI / n_theta as f64;
        let dp = 2.0 * PI / n_phi as f64;
        let corners: Vec<[Point3; 3]> = (0..n_cells).map(|t| mesh.corners(t)).collect();
        for (t, c) in corners.iter().enumerate() {
            // vertices and edge midpoints bound the spherical triangle up to
            // the bulge of its edges, covered by one bin of padding
            let mut samples: Vec<(f64, f64)> = c.iter().map(|&p| spherical(p)).collect();
            for i in 0..3 {
                samples.push(spherical(geom::normalize(geom::add(c[i], c[(i + 1) % 3]))));
            }
            let north = inside(c, [0.0, 0.0, 1.0]);
            let south = inside(c, [0.0, 0.0, -1.0]);
            let mut t_lo = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
            let mut t_hi = samples.iter().map(|s| s.0).fold(0.0, f64::max);
            if north {
                t_lo = 0.0;
            }
            if south {
                t_hi = PI;
            }
            let j_lo = ((t_lo / dt).floor() as usize).saturating_sub(1);
            let j_hi = (((t_hi / dt).floor() as usize) + 1).min(n_theta - 1);
            let phi_bins: Vec<usize> = if north || south {
                (0..n_phi).collect()
            } else {
                let mut phis: Vec<f64> = samples.iter().map(|s| s.1).collect();
                phis.sort_by(f64::total_cmp);
                // smallest arc containing all samples: cut at the widest gap
                let mut cut = (phis[0] + 2.0 * PI - phis[phis.len() - 1], 0);
                for i in 1..phis.len() {
                    if phis[i] - phis[i - 1] > cut.0 {
                        cut = (phis[i] - phis[i - 1], i);
                    }
                }
                let start = phis[cut.1];
                let span = 2.0 * PI - cut.0;
                let k0 = (start / dp).floor() as i64 - 1;
                let k1 = ((start + span) / dp).floor() as i64 + 1;
                if (k1 - k0 + 1) as usize >= n_phi {
                    (0..n_phi).collect()
                } else {
                    (k0..=k1).map(|k| k.rem_euclid(n_phi as i64) as usize).collect()
                }
            };
            for j in j_lo..=j_hi {
                for &k in &phi_bins {
                    bins[j * n_phi + k].push(t);
                }
            }
        }
        let centroids = corners.iter().map(|c| geom::normalize(geom::add(geom::add(c[0], c[1]), c[2]))).collect();
        Self { triangles: mesh.triangles().to_vec(), corners, centroids, n_theta, n_phi, bins }
    }

    fn bin(&self, p: Point3) -> usize {
        let (theta, phi) = spherical(p);
        let j = ((theta / PI * self.n_theta as f64) as usize).min(self.n_theta - 1);
        let k = ((phi / (2.0 * PI) * self.n_phi as f64) as usize).min(self.n_phi - 1);
        j * self.n_phi + k
    }

    pub fn locate(&self, p: Point3) -> Location {
        for &t in &self.bins[self.bin(p)] {
            if inside(&self.corners[t], p) {
                return Location { triangle: t, weights: clamp(weights(&self.corners[t], p)), fallback: false };
            }
        }
        let t = (0..self.centroids.len())
            .max_by(|&a, &b| geom::dot(self.centroids[a], p).total_cmp(&geom::dot(self.centroids[b], p)))
            .expect("mesh has triangles");
        Location { triangle: t, weights: clamp(weights(&self.corners[t], p)), fallback: true }
    }

    /// Piecewise-linear interpolation of vertex values at `p`.
    pub fn interpolate(&self, loc: &Location, values: &[f64]) -> f64 {
        let tri = self.triangles[loc.triangle];
        (0..3).map(|i| loc.weights[i] * values[tri[i]]).sum()
    }
}

fn clamp(w: [f64; 3]) -> [f64; 3] {
    let w = w.map(|x| x.max(0.0));
    let s: f64 = w.iter().sum();
    w.map(|x| x / s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::make_icosphere;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_force(mesh: &TriangleMesh, p: Point3) -> Vec<usize> {
        (0..mesh.n_cells()).filter(|&t| inside(&mesh.corners(t), p)).collect()
    }

    #[test]
    fn random_points_located_without_fallback() {
        let mesh = make_icosphere(2, 1.0).unwrap();
        let loc = Locator::new(&mesh);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let p = geom::normalize([rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
            let l = loc.locate(p);
            assert!(!l.fallback);
            assert!(brute_force(&mesh, p).contains(&l.triangle));
            assert!((l.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn poles_and_vertices() {
        let mesh = make_icosphere(1, 1.0).unwrap();
        let loc = Locator::new(&mesh);
        for p in [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0], [1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]] {
            assert!(!loc.locate(p).fallback);
        }
        for (i, &v) in mesh.vertices().iter().enumerate() {
            let l = loc.locate(v);
            assert!(!l.fallback);
            let tri = mesh.triangles()[l.triangle];
            let k = tri.iter().position(|&j| j == i).expect("vertex belongs to its triangle");
            assert!((l.weights[k] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn linear_field_is_reproduced_at_vertices_of_the_projection() {
        // interpolation is exact for a field that is linear on each flat face
        let mesh = make_icosphere(2, 1.0).unwrap();
        let loc = Locator::new(&mesh);
        let values: Vec<f64> = mesh.vertices().iter().map(|p| p[0] + 2.0 * p[2]).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let p = geom::normalize([rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
            let l = loc.locate(p);
            let c = mesh.corners(l.triangle);
            let q = geom::barycentric(c[0], c[1], c[2], l.weights);
            assert!(geom::norm(geom::cross(q, p)) < 1e-12, "projection is central");
            assert!((loc.interpolate(&l, &values) - (q[0] + 2.0 * q[2])).abs() < 1e-12);
        }
    }
}
