//! Closed-form potential integrals of `1/R` over a flat triangle.

use crate::geom::{self, Point3};

/// `S0 = int_T 1/|r' - r| dS'` and `Sv = int_T (r' - r)/|r' - r| dS'` for
/// an observation point `r`.
pub fn static_potentials(tri: [Point3; 3], r: Point3) -> (f64, Point3) {
    let an = geom::cross(geom::sub(tri[1], tri[0]), geom::sub(tri[2], tri[0]));
    let n = geom::normalize(an);
    let d = geom::dot(n, geom::sub(r, tri[0]));
    let abs_d = d.abs();
    let rho = geom::sub(r, geom::scale(n, d));
    let scale = geom::norm(an).sqrt();
    let tiny = 1e-13 * scale;

    let mut s0 = 0.0;
    let mut sv_plane = [0.0; 3];
    for i in 0..3 {
        let (pm, pp) = (tri[i], tri[(i + 1) % 3]);
        let edge = geom::sub(pp, pm);
        let l_hat = geom::normalize(edge);
        let u_hat = geom::cross(l_hat, n);
        let l_plus = geom::dot(geom::sub(pp, rho), l_hat);
        let l_minus = geom::dot(geom::sub(pm, rho), l_hat);
        let p0 = geom::dot(geom::sub(pm, rho), u_hat);
        let r0_sq = p0 * p0 + d * d;
        let r_plus = geom::dist(pp, r);
        let r_minus = geom::dist(pm, r);
        let log_term = if r0_sq.sqrt() > tiny {
            edge_log(l_plus, r_plus, l_minus, r_minus, r0_sq)
        } else {
            0.0
        };
        if p0.abs() > tiny {
            s0 += p0 * log_term;
            if abs_d > tiny {
                s0 -= abs_d
                    * ((p0 * l_plus / (r0_sq + abs_d * r_plus)).atan()
                        - (p0 * l_minus / (r0_sq + abs_d * r_minus)).atan());
            }
        }
        let vc = 0.5 * (r0_sq * log_term + l_plus * r_plus - l_minus * r_minus);
        sv_plane = geom::add(sv_plane, geom::scale(u_hat, vc));
    }
    // r' - r = (rho' - rho) - d n
    let sv = geom::sub(sv_plane, geom::scale(n, d * s0));
    (s0, sv)
}

/// `ln((R+ + l+)/(R- + l-))`, evaluated through the conjugate form when the
/// observation point lies behind the edge to avoid cancellation.
fn edge_log(l_plus: f64, r_plus: f64, l_minus: f64, r_minus: f64, r0_sq: f64) -> f64 {
    if l_minus >= 0.0 {
        ((r_plus + l_plus) / (r_minus + l_minus)).ln()
    } else if l_plus <= 0.0 {
        // R + l = R0^2 / (R - l)
        ((r_minus - l_minus) / (r_plus - l_plus)).ln()
    } else {
        ((r_plus + l_plus) * (r_minus - l_minus) / r0_sq).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efie::quadrature::TriangleRule;

    fn tri() -> [Point3; 3] {
        [[0.1, -0.2, 0.05], [1.3, 0.1, -0.1], [0.4, 0.9, 0.2]]
    }

    /// Brute-force reference by heavily subdivided Gaussian quadrature; only
    /// used for points off the triangle.
    fn numeric(t: [Point3; 3], r: Point3, depth: usize) -> (f64, Point3) {
        let rule = TriangleRule::with_degree(8).subdivided(depth);
        let area = 0.5 * geom::norm(geom::cross(geom::sub(t[1], t[0]), geom::sub(t[2], t[0])));
        let mut s0 = 0.0;
        let mut sv = [0.0; 3];
        for (b, w) in rule.points.iter().zip(&rule.weights) {
            let p = geom::barycentric(t[0], t[1], t[2], *b);
            let diff = geom::sub(p, r);
            let rr = geom::norm(diff);
            s0 += w * area / rr;
            sv = geom::add(sv, geom::scale(diff, w * area / rr));
        }
        (s0, sv)
    }

    fn check(r: Point3, tol: f64) {
        let (a0, av) = static_potentials(tri(), r);
        let (n0, nv) = numeric(tri(), r, 3);
        assert!((a0 - n0).abs() < tol * n0.abs(), "S0 {a0} vs {n0} at {r:?}");
        let err = geom::dist(av, nv);
        assert!(err < tol * geom::norm(nv).max(n0), "Sv {av:?} vs {nv:?} at {r:?}");
    }

    #[test]
    fn far_points_match_quadrature() {
        for r in [[3.0, 2.0, 1.0], [-2.0, 0.5, -1.5], [0.5, 0.3, 4.0]] {
            check(r, 1e-10);
        }
    }

    #[test]
    fn nearby_points_match_quadrature() {
        for r in [[0.6, 0.3, 0.6], [1.6, 0.2, 0.3], [-0.3, -0.4, -0.2]] {
            check(r, 1e-7);
        }
    }

    #[test]
    fn in_plane_point_outside() {
        // a point in the plane of the triangle, beyond one edge
        let t = tri();
        let mid = geom::scale(geom::add(t[0], t[1]), 0.5);
        let c = geom::scale(geom::add(geom::add(t[0], t[1]), t[2]), 1.0 / 3.0);
        let r = geom::add(mid, geom::scale(geom::sub(mid, c), 1.5));
        check(r, 1e-7);
    }

    #[test]
    fn centroid_of_equilateral_triangle() {
        // closed form for the centroid of an equilateral triangle of side a:
        // int 1/R = sqrt(3) a ln(2 + sqrt(3))
        let a = 1.0;
        let t = [[0.0, 0.0, 0.0], [a, 0.0, 0.0], [0.5 * a, 0.5 * 3f64.sqrt() * a, 0.0]];
        let c = [0.5 * a, 3f64.sqrt() * a / 6.0, 0.0];
        let (s0, sv) = static_potentials(t, c);
        let exact = 3f64.sqrt() * a * (2.0 + 3f64.sqrt()).ln();
        assert!((s0 - exact).abs() < 1e-13, "{s0} vs {exact}");
        assert!(geom::norm(sv) < 1e-13);
    }

    #[test]
    fn vertex_observation_point() {
        // observation at a vertex: compare against a point just above it
        let t = tri();
        let (a0, _) = static_potentials(t, t[0]);
        let n = geom::normalize(geom::cross(geom::sub(t[1], t[0]), geom::sub(t[2], t[0])));
        let (b0, _) = static_potentials(t, geom::add(t[0], geom::scale(n, 1e-9)));
        assert!(a0.is_finite() && (a0 - b0).abs() < 1e-6);
    }
}
