use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::quadrature::{QuadratureRule, TriangleRule};
use super::singular::static_potentials;
use crate::geom::{self, Point3};
use crate::mesh::TriangleMesh;
use crate::{Error, Result};

/// RWG Gram matrix `G[m][n] = int f_m . f_n dS`, exact on flat triangles.
///
/// RWG functions are normalised to unit flux across their edge,
/// `f = +-(r - p) / (2 A)`, so the loop and star combinations have integer
/// coefficients.
pub fn assemble_gram(mesh: &TriangleMesh) -> Mat<f64> {
    let n = mesh.n_edges();
    let rule = TriangleRule::with_degree(2);
    let mut g = Mat::zeros(n, n);
    for t in 0..mesh.n_cells() {
        let c = mesh.corners(t);
        let area = mesh.area(t);
        let te = mesh.triangle_edges(t);
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0.0;
                for (b, w) in rule.points.iter().zip(&rule.weights) {
                    let r = geom::barycentric(c[0], c[1], c[2], *b);
                    acc += w * geom::dot(geom::sub(r, c[i]), geom::sub(r, c[j]));
                }
                let s = te[i].sign * te[j].sign / (4.0 * area * area);
                g[(te[i].edge, te[j].edge)] += s * area * acc;
            }
        }
    }
    g
}

/// Galerkin integrals of the Helmholtz kernel over one triangle pair,
/// in coordinates relative to `origin`:
/// `i0 = int int g`, `ir = int int r g`, `irp = int int r' g`,
/// `irr = int int r . r' g`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PairIntegrals {
    pub i0: C64,
    pub ir: [C64; 3],
    pub irp: [C64; 3],
    pub irr: C64,
}

impl PairIntegrals {
    fn zero() -> Self {
        let z = C64::new(0.0, 0.0);
        Self { i0: z, ir: [z; 3], irp: [z; 3], irr: z }
    }

    fn is_finite(&self) -> bool {
        self.i0.is_finite() && self.irr.is_finite() && self.ir.iter().chain(&self.irp).all(|v| v.is_finite())
    }

    fn add(&mut self, w: C64, r: Point3, rp: Point3) {
        self.i0 += w;
        for k in 0..3 {
            self.ir[k] += w * r[k];
            self.irp[k] += w * rp[k];
        }
        self.irr += w * geom::dot(r, rp);
    }

    /// `int int (r - p) . (r' - q) g` for observation vertex `p` and source
    /// vertex `q`, both relative to the pair origin.
    fn rwg(&self, p: Point3, q: Point3) -> C64 {
        let mut v = self.irr + self.i0 * geom::dot(p, q);
        for k in 0..3 {
            v -= self.ir[k] * q[k] + self.irp[k] * p[k];
        }
        v
    }
}

/// `(e^{ikR} - 1) / (4 pi R)` without cancellation; tends to `ik / 4 pi`.
fn smooth_kernel(k: f64, r: f64) -> C64 {
    if r * k < 1e-8 {
        return C64::new(-0.5 * k * k * r, k) / (4.0 * PI);
    }
    let s = (0.5 * k * r).sin();
    C64::new(-2.0 * s * s / r, (k * r).sin() / r) / (4.0 * PI)
}

fn kernel(k: f64, r: f64) -> C64 {
    C64::from_polar(1.0 / (4.0 * PI * r), k * r)
}

struct PairContext<'a> {
    mesh: &'a TriangleMesh,
    k: f64,
    outer: TriangleRule,
    singular_outer: TriangleRule,
    inner: TriangleRule,
    near: TriangleRule,
    near_distance: f64,
}

impl PairContext<'_> {
    fn points(&self, t: usize, rule: &TriangleRule, origin: Point3) -> Vec<(Point3, f64)> {
        let c = self.mesh.corners(t);
        let area = self.mesh.area(t);
        rule.points
            .iter()
            .zip(&rule.weights)
            .map(|(b, w)| (geom::sub(geom::barycentric(c[0], c[1], c[2], *b), origin), w * area))
            .collect()
    }

    fn touching(&self, t: usize, s: usize) -> bool {
        let a = self.mesh.triangles()[t];
        let b = self.mesh.triangles()[s];
        a.iter().any(|v| b.contains(v))
    }

    fn integrate(&self, t: usize, s: usize) -> PairIntegrals {
        let origin = self.mesh.centroid(t);
        let mut out = PairIntegrals::zero();
        if self.touching(t, s) {
            let obs = self.points(t, &self.singular_outer, origin);
            let src = self.points(s, &self.inner, origin);
            let mut tri = self.mesh.corners(s);
            for v in &mut tri {
                *v = geom::sub(*v, origin);
            }
            for &(r, wr) in &obs {
                let (s0, sv) = static_potentials(tri, r);
                let c = wr / (4.0 * PI);
                // int r'/R = r S0 + Sv
                let rp = geom::add(geom::scale(r, s0), sv);
                out.i0 += c * s0;
                for k in 0..3 {
                    out.ir[k] += c * s0 * r[k];
                    out.irp[k] += c * rp[k];
                }
                out.irr += c * geom::dot(r, rp);
                for &(q, wq) in &src {
                    let g = smooth_kernel(self.k, geom::dist(r, q));
                    out.add(g * (wr * wq), r, q);
                }
            }
        } else {
            let obs = self.points(t, &self.outer, origin);
            let far = geom::dist(self.mesh.centroid(s), origin) >= self.near_distance;
            let rule = if far { &self.inner } else { &self.near };
            let src = self.points(s, rule, origin);
            for &(r, wr) in &obs {
                for &(q, wq) in &src {
                    let g = kernel(self.k, geom::dist(r, q));
                    out.add(g * (wr * wq), r, q);
                }
            }
        }
        out
    }
}

/// Vector-potential block `T_s` and the cell matrix
/// `Phi[c][c'] = int_c int_c' g / (A_c A_c')` of the scalar potential.
pub(crate) fn assemble_blocks(mesh: &TriangleMesh, k: f64, quad: &QuadratureRule) -> Result<(Mat<C64>, Mat<C64>)> {
    quad.validate()?;
    let interior = quad.interior();
    let h = mesh.stats().h_avg;
    let ctx = PairContext {
        mesh,
        k,
        outer: interior.clone(),
        singular_outer: TriangleRule::with_degree(quad.singular_degree).subdivided(quad.singular_refinement),
        near: interior.subdivided(quad.near_refinement),
        inner: interior,
        near_distance: 2.0 * h,
    };
    let nc = mesh.n_cells();
    let ne = mesh.n_edges();
    let mut ts = Mat::<C64>::zeros(ne, ne);
    let mut phi = Mat::<C64>::zeros(nc, nc);
    let ik = C64::new(0.0, k);

    // pairs (t, s) with s >= t are integrated in parallel chunks and
    // scattered sequentially, so the result does not depend on scheduling
    const CHUNK: usize = 16;
    for start in (0..nc).step_by(CHUNK) {
        let end = (start + CHUNK).min(nc);
        let rows: Vec<Vec<PairIntegrals>> = (start..end)
            .into_par_iter()
            .map(|t| (t..nc).map(|s| ctx.integrate(t, s)).collect())
            .collect();
        for (t, row) in (start..end).zip(rows) {
            let origin = mesh.centroid(t);
            let ct = mesh.corners(t);
            let (at, et) = (mesh.area(t), mesh.triangle_edges(t));
            for (s, pi) in (t..nc).zip(row) {
                if !pi.is_finite() {
                    return Err(Error::Quadrature(t, s));
                }
                let cs = mesh.corners(s);
                let (as_, es) = (mesh.area(s), mesh.triangle_edges(s));
                let f = pi.i0 / (at * as_);
                phi[(t, s)] += f;
                if s != t {
                    phi[(s, t)] += f;
                }
                for i in 0..3 {
                    let p = geom::sub(ct[i], origin);
                    for j in 0..3 {
                        let q = geom::sub(cs[j], origin);
                        let v = ik * pi.rwg(p, q) * (et[i].sign * es[j].sign / (4.0 * at * as_));
                        let (m, n) = (et[i].edge, es[j].edge);
                        ts[(m, n)] += v;
                        if s != t {
                            ts[(n, m)] += v;
                        }
                    }
                }
            }
        }
    }
    symmetrize(&mut ts);
    symmetrize(&mut phi);
    Ok((ts, phi))
}

fn symmetrize(a: &mut Mat<C64>) {
    let n = a.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let v = (a[(i, j)] + a[(j, i)]) * 0.5;
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

/// `T_h = (1 / ik) Sigma Phi Sigma^T`.
pub(crate) fn scalar_block(mesh: &TriangleMesh, phi: &Mat<C64>, k: f64) -> Mat<C64> {
    let ne = mesh.n_edges();
    let sigma = Mat::from_fn(ne, mesh.n_cells(), |_, _| C64::new(0.0, 0.0));
    let mut sigma = sigma;
    for (e, edge) in mesh.edges().iter().enumerate() {
        sigma[(e, edge.plus)] = C64::new(1.0, 0.0);
        sigma[(e, edge.minus)] = C64::new(-1.0, 0.0);
    }
    let sp = &sigma * phi;
    let mut th = &sp * sigma.transpose();
    let scale = C64::new(0.0, -1.0 / k);
    for j in 0..ne {
        for i in 0..ne {
            th[(i, j)] *= scale;
        }
    }
    symmetrize(&mut th);
    th
}
