//! Triangle quadrature in barycentric coordinates.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Rule on the reference triangle: barycentric points with weights that sum
/// to one (multiply by the triangle area).
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl TriangleRule {
    /// Cheapest available rule exact for polynomials of total degree `degree`.
    pub fn with_degree(degree: usize) -> Self {
        match degree {
            0 | 1 => Self::symmetric(&[], &[], 1.0, degree.max(1)),
            2 => Self::symmetric(&[(2.0 / 3.0, 1.0 / 3.0)], &[], 0.0, 2),
            3 | 4 => Self::symmetric(
                &[(0.816847572980459, 0.109951743655322), (0.108103018168070, 0.223381589678011)],
                &[],
                0.0,
                4,
            ),
            5 => Self::symmetric(
                &[(0.797426985353087, 0.125939180544827), (0.059715871789770, 0.132394152788506)],
                &[],
                0.225,
                5,
            ),
            6 => Self::symmetric(
                &[(0.873821971016996, 0.050844906370207), (0.501426509658179, 0.116786275726379)],
                &[([0.053145049844817, 0.310352451033784], 0.082851075618374)],
                0.0,
                6,
            ),
            d => Self::collapsed_gauss(d),
        }
    }

    /// Builds a fully symmetric rule from orbits. `orbit3` entries are
    /// `(a, w)` for the three points `(a, b, b)` with `b = (1 - a) / 2`;
    /// `orbit6` entries `([a, b], w)` for the six permutations of
    /// `(a, b, 1 - a - b)`.
    fn symmetric(orbit3: &[(f64, f64)], orbit6: &[([f64; 2], f64)], centroid: f64, exact: usize) -> Self {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        if centroid > 0.0 {
            points.push([1.0 / 3.0; 3]);
            weights.push(centroid);
        }
        for &(a, w) in orbit3 {
            let b = (1.0 - a) / 2.0;
            for p in [[a, b, b], [b, a, b], [b, b, a]] {
                points.push(p);
                weights.push(w);
            }
        }
        for &([a, b], w) in orbit6 {
            let c = 1.0 - a - b;
            for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                points.push(p);
                weights.push(w);
            }
        }
        Self { points, weights, degree: exact }
    }

    /// Conical product rule from a Gauss-Legendre tensor grid mapped through
    /// the collapsed (Duffy) coordinates `x = s`, `y = t (1 - s)`.
    pub fn collapsed_gauss(degree: usize) -> Self {
        let n = (degree + 2).div_ceil(2);
        let (x, w) = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for i in 0..n {
            let s = 0.5 * (x[i] + 1.0);
            for j in 0..n {
                let t = 0.5 * (x[j] + 1.0);
                let (a, b) = (s, t * (1.0 - s));
                points.push([1.0 - a - b, a, b]);
                // reference area 1/2, Jacobian (1 - s), two 1/2 factors
                weights.push(0.25 * w[i] * w[j] * (1.0 - s) * 2.0);
            }
        }
        Self { points, weights, degree }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Rule applied to the four congruent children of the midpoint
    /// subdivision, repeated `depth` times.
    pub fn subdivided(&self, depth: usize) -> Self {
        let mut rule = self.clone();
        for _ in 0..depth {
            let children: [[[f64; 3]; 3]; 4] = [
                [[1.0, 0.0, 0.0], [0.5, 0.5, 0.0], [0.5, 0.0, 0.5]],
                [[0.5, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.5, 0.5]],
                [[0.5, 0.0, 0.5], [0.0, 0.5, 0.5], [0.0, 0.0, 1.0]],
                [[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]],
            ];
            let mut points = Vec::with_capacity(4 * rule.len());
            let mut weights = Vec::with_capacity(4 * rule.len());
            for c in &children {
                for (p, &w) in rule.points.iter().zip(&rule.weights) {
                    let mut q = [0.0; 3];
                    for (k, qk) in q.iter_mut().enumerate() {
                        *qk = p[0] * c[0][k] + p[1] * c[1][k] + p[2] * c[2][k];
                    }
                    points.push(q);
                    weights.push(0.25 * w);
                }
            }
            rule = Self { points, weights, degree: rule.degree };
        }
        rule
    }
}

/// Singular-integral treatment for touching triangle pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SingularScheme {
    /// Analytic inner integral of the static `1/R` part, numerical remainder.
    Extraction,
}

/// Quadrature settings for EFIE assembly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureRule {
    /// Polynomial degree of the interior triangle rule (degree 4 is the
    /// 6-point rule).
    pub interior_degree: usize,
    /// Midpoint-subdivision depth of the source rule for near pairs.
    pub near_refinement: usize,
    /// Degree of the observation rule for touching pairs, where the
    /// analytic inner integral has logarithmic edge terms.
    pub singular_degree: usize,
    /// Midpoint-subdivision depth of that observation rule.
    pub singular_refinement: usize,
    /// Degree of the excitation rule.
    pub rhs_degree: usize,
    pub scheme: SingularScheme,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self {
            interior_degree: 4,
            near_refinement: 1,
            singular_degree: 20,
            singular_refinement: 0,
            rhs_degree: 7,
            scheme: SingularScheme::Extraction,
        }
    }
}

impl QuadratureRule {
    pub fn validate(&self) -> Result<()> {
        for (name, d) in [
            ("interior", self.interior_degree),
            ("singular", self.singular_degree),
            ("rhs", self.rhs_degree),
        ] {
            if d == 0 || d > 30 {
                return Err(Error::Config(format!("{name} quadrature degree must lie in 1..=30, got {d}")));
            }
        }
        if self.near_refinement > 4 || self.singular_refinement > 4 {
            return Err(Error::Config(format!(
                "refinement depths must not exceed 4, got near {} and singular {}",
                self.near_refinement, self.singular_refinement
            )));
        }
        Ok(())
    }

    pub fn interior(&self) -> TriangleRule {
        TriangleRule::with_degree(self.interior_degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// Integral of x^a y^b over the reference triangle (area 1/2).
    fn monomial(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    fn apply(rule: &TriangleRule, a: u32, b: u32) -> f64 {
        // barycentric (l0, l1, l2) -> (x, y) = (l1, l2); reference area 1/2
        rule.points
            .iter()
            .zip(&rule.weights)
            .map(|(p, w)| 0.5 * w * p[1].powi(a as i32) * p[2].powi(b as i32))
            .sum()
    }

    #[test]
    fn gauss_legendre_exactness() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for d in 0..(2 * n) as i32 {
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(d)).sum();
                let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-14, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn rules_integrate_constants() {
        for d in 1..=14 {
            let r = TriangleRule::with_degree(d);
            let s: f64 = r.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-14, "degree {d}: {s}");
            for p in &r.points {
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rules_exact_to_their_degree() {
        for d in 1..=14 {
            let r = TriangleRule::with_degree(d);
            for a in 0..=d as u32 {
                for b in 0..=(d as u32 - a) {
                    let err = (apply(&r, a, b) - monomial(a, b)).abs();
                    assert!(err < 1e-14, "degree {d}: x^{a} y^{b} error {err:e}");
                }
            }
        }
    }

    #[test]
    fn default_interior_has_six_points() {
        assert_eq!(QuadratureRule::default().interior().len(), 6);
    }

    #[test]
    fn subdivision_keeps_exactness() {
        let r = TriangleRule::with_degree(2).subdivided(2);
        assert_eq!(r.len(), 48);
        for (a, b) in [(0, 0), (1, 1), (2, 0)] {
            assert!((apply(&r, a, b) - monomial(a, b)).abs() < 1e-15);
        }
    }
}
