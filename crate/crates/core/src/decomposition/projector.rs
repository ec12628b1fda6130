use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::incidence::IncidencePair;
use super::spectrum::{LaplacianEigen, LaplacianSource, SpectralWindow};
use crate::linalg;
use crate::{Error, Result};

/// Loop (solenoidal) or star (non-solenoidal) family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    Lambda,
    Sigma,
}

/// Coefficient space a projector acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    Primal,
    Dual,
}

/// What a projector was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Filtered(Kind),
    Harmonic,
    /// Loop projector extended by the harmonic subspace.
    LoopHarmonic,
    /// Wavelet band `j` of a family; `j = L + 1` is the terminal band.
    Band { kind: Kind, j: usize },
}

/// Symmetric positive definite metric with cached square roots.
#[derive(Debug, Clone)]
pub struct Metric {
    g: Mat<f64>,
    sqrt: Mat<f64>,
    inv_sqrt: Mat<f64>,
}

impl Metric {
    pub fn new(g: Mat<f64>) -> Result<Self> {
        if g.nrows() != g.ncols() {
            return Err(Error::Metric(format!("metric is {}x{}", g.nrows(), g.ncols())));
        }
        let asym = linalg::relative_asymmetry(g.as_ref());
        if asym > 1e-10 {
            return Err(Error::Metric(format!("relative asymmetry {asym:e}")));
        }
        let (values, vectors) = linalg::sym_eigen(g.as_ref())?;
        let (max, min) = (values[0], values[values.len() - 1]);
        if !(min > 1e-14 * max) {
            return Err(Error::Metric(format!("eigenvalue range [{min:e}, {max:e}] is not positive")));
        }
        let n = g.nrows();
        let scaled = |f: fn(f64) -> f64| {
            let vs = Mat::from_fn(n, n, |i, j| vectors[(i, j)] * f(values[j]));
            &vs * vectors.transpose()
        };
        Ok(Self {
            sqrt: scaled(f64::sqrt),
            inv_sqrt: scaled(|v| 1.0 / v.sqrt()),
            g,
        })
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.g
    }

    pub fn sqrt(&self) -> &Mat<f64> {
        &self.sqrt
    }

    pub fn inv_sqrt(&self) -> &Mat<f64> {
        &self.inv_sqrt
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }
}

/// Orthogonal projector `U U^T` stored by its orthonormal basis `U`.
#[derive(Debug, Clone)]
pub struct ProjectorOperator {
    basis: Mat<f64>,
    pub space: Space,
    pub provenance: Provenance,
    pub window: Option<SpectralWindow>,
}

impl ProjectorOperator {
    pub fn new(basis: Mat<f64>, space: Space, provenance: Provenance, window: Option<SpectralWindow>) -> Self {
        Self { basis, space, provenance, window }
    }

    pub fn basis(&self) -> &Mat<f64> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    /// Coordinates `U^T x` in the projector's range.
    pub fn restrict(&self, x: &[f64]) -> Vec<f64> {
        linalg::matvec_t(&self.basis, x)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        if self.rank() == 0 {
            return vec![0.0; self.dim()];
        }
        linalg::matvec(&self.basis, &self.restrict(x))
    }

    pub fn apply_c(&self, x: &[C64]) -> Vec<C64> {
        if self.rank() == 0 {
            return vec![C64::new(0.0, 0.0); self.dim()];
        }
        linalg::matvec_rc(&self.basis, &linalg::matvec_t_rc(&self.basis, x))
    }

    pub fn to_dense(&self) -> Mat<f64> {
        &self.basis * self.basis.transpose()
    }

    /// `||U^T U - I||_max`.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.basis.transpose() * &self.basis;
        let mut err: f64 = 0.0;
        for j in 0..g.ncols() {
            for i in 0..g.nrows() {
                let want = if i == j { 1.0 } else { 0.0 };
                err = err.max((g[(i, j)] - want).abs());
            }
        }
        err
    }

    /// Projector onto the sum of two mutually orthogonal ranges.
    pub fn direct_sum(&self, other: &ProjectorOperator, provenance: Provenance) -> Result<Self> {
        if self.dim() != other.dim() || self.space != other.space {
            return Err(Error::Dimension("projectors act on different spaces".into()));
        }
        let (n, r1, r2) = (self.dim(), self.rank(), other.rank());
        let basis = Mat::from_fn(n, r1 + r2, |i, j| {
            if j < r1 {
                self.basis[(i, j)]
            } else {
                other.basis[(i, j - r1)]
            }
        });
        Ok(Self::new(basis, self.space, provenance, None))
    }
}

/// Range map `B` of one projector family together with the spectrum of the
/// Laplacian `B^T B`. Windowed projectors are read off without
/// refactorisation: the range of `P_window` is spanned by `B v_i / sqrt(l_i)`.
#[derive(Debug, Clone)]
pub struct FilterBasis {
    range_map: Mat<f64>,
    eigen: LaplacianEigen,
    pub kind: Kind,
    pub space: Space,
}

impl FilterBasis {
    /// Primal family: `B = sqrt(G) Lambda A` or `B = sqrt(G^-1) Sigma B_r`.
    pub fn primal(
        kind: Kind,
        pair: &IncidencePair,
        metric: Option<&Metric>,
        reduction: Option<&Mat<f64>>,
    ) -> Result<Self> {
        let left = metric.map(|m| match kind {
            Kind::Lambda => m.sqrt(),
            Kind::Sigma => m.inv_sqrt(),
        });
        let source = match (kind, metric.is_some()) {
            (Kind::Lambda, false) => LaplacianSource::Vertex,
            (Kind::Lambda, true) => LaplacianSource::VertexMetric,
            (Kind::Sigma, false) => LaplacianSource::Cell,
            (Kind::Sigma, true) => LaplacianSource::CellMetric,
        };
        Self::build(kind, Space::Primal, pair, left, reduction, source)
    }

    /// Dual family: `B = sqrt(G_d^-1) Lambda C` or `B = sqrt(G_d) Sigma D`.
    pub fn dual(
        kind: Kind,
        pair: &IncidencePair,
        metric: Option<&Metric>,
        reduction: Option<&Mat<f64>>,
    ) -> Result<Self> {
        let left = metric.map(|m| match kind {
            Kind::Lambda => m.inv_sqrt(),
            Kind::Sigma => m.sqrt(),
        });
        let source = match kind {
            Kind::Lambda => LaplacianSource::DualVertex,
            Kind::Sigma => LaplacianSource::DualCell,
        };
        Self::build(kind, Space::Dual, pair, left, reduction, source)
    }

    fn build(
        kind: Kind,
        space: Space,
        pair: &IncidencePair,
        left: Option<&Mat<f64>>,
        reduction: Option<&Mat<f64>>,
        source: LaplacianSource,
    ) -> Result<Self> {
        let incidence = match kind {
            Kind::Lambda => pair.lambda_dense(),
            Kind::Sigma => pair.sigma_dense(),
        };
        if let Some(l) = left {
            if l.ncols() != pair.n_edges() {
                return Err(Error::Metric(format!(
                    "metric dimension {} does not match {} edges",
                    l.ncols(),
                    pair.n_edges()
                )));
            }
        }
        let mut b = match left {
            Some(l) => l * &incidence,
            None => incidence,
        };
        if let Some(r) = reduction {
            if r.nrows() != b.ncols() {
                return Err(Error::Dimension(format!(
                    "reduction has {} rows, expected {}",
                    r.nrows(),
                    b.ncols()
                )));
            }
            b = &b * r;
        }
        let mut laplacian = b.transpose() * &b;
        symmetrize(&mut laplacian);
        let eigen = LaplacianEigen::new(&laplacian, source)?;
        Ok(Self { range_map: b, eigen, kind, space })
    }

    pub fn eigen(&self) -> &LaplacianEigen {
        &self.eigen
    }

    pub fn range_map(&self) -> &Mat<f64> {
        &self.range_map
    }

    /// Orthogonal projector onto `span{B v_i : lambda_i in window}`.
    pub fn projector(&self, window: &SpectralWindow, provenance: Provenance) -> ProjectorOperator {
        let idx = self.eigen.indices_in(window);
        let m = self.range_map.ncols();
        let selected = Mat::from_fn(m, idx.len(), |i, j| {
            self.eigen.vectors[(i, idx[j])] / self.eigen.values[idx[j]].sqrt()
        });
        let basis = if idx.is_empty() {
            Mat::zeros(self.range_map.nrows(), 0)
        } else {
            &self.range_map * &selected
        };
        ProjectorOperator::new(basis, self.space, provenance, Some(*window))
    }
}

fn symmetrize(a: &mut Mat<f64>) {
    let n = a.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

/// Filtered primal projector `P_eps^Lambda` or `P_eps^Sigma`.
///
/// `metric` defaults to the identity and `reduction` to the identity.
pub fn build_filtered_projector(
    kind: Kind,
    pair: &IncidencePair,
    window: &SpectralWindow,
    metric: Option<&Metric>,
    reduction: Option<&Mat<f64>>,
) -> Result<ProjectorOperator> {
    Ok(FilterBasis::primal(kind, pair, metric, reduction)?.projector(window, Provenance::Filtered(kind)))
}

/// Filtered dual projector, parameterised by the dual Gram matrix `G_d`.
pub fn build_dual_filtered_projector(
    kind: Kind,
    pair: &IncidencePair,
    window: &SpectralWindow,
    dual_metric: Option<&Metric>,
    reduction: Option<&Mat<f64>>,
) -> Result<ProjectorOperator> {
    Ok(FilterBasis::dual(kind, pair, dual_metric, reduction)?.projector(window, Provenance::Filtered(kind)))
}

/// `P^H = I - P_0^Sigma - P_0^Lambda`, re-expressed by an orthonormal basis.
///
/// Fails with [`Error::Rank`] when the numerical rank is not `2 * genus`.
pub fn harmonic_projector(
    p_lambda: &ProjectorOperator,
    p_sigma: &ProjectorOperator,
    genus: usize,
) -> Result<ProjectorOperator> {
    if p_lambda.dim() != p_sigma.dim() || p_lambda.space != p_sigma.space {
        return Err(Error::Dimension("loop and star projectors act on different spaces".into()));
    }
    let n = p_lambda.dim();
    let mut h = Mat::<f64>::identity(n, n);
    h -= p_lambda.to_dense();
    h -= p_sigma.to_dense();
    symmetrize(&mut h);
    let (values, vectors) = linalg::sym_eigen(h.as_ref())?;
    let rank = values.iter().filter(|&&v| v > 0.5).count();
    if rank != 2 * genus {
        return Err(Error::Rank { found: rank, expected: 2 * genus });
    }
    let basis = Mat::from_fn(n, rank, |i, j| vectors[(i, j)]);
    Ok(ProjectorOperator::new(basis, p_lambda.space, Provenance::Harmonic, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::IncidencePair;
    use crate::mesh::{make_holed_plate, make_icosphere, make_torus, TriangleMesh};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tetrahedron() -> TriangleMesh {
        let v = vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
        let t = vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]];
        TriangleMesh::new(v, t).unwrap()
    }

    fn dist(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
        linalg::spectral_norm_real((a - b).as_ref()).unwrap()
    }

    fn random_spd(n: usize, seed: u64) -> Mat<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Mat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let mut g = a.transpose() * &a;
        for i in 0..n {
            g[(i, i)] += n as f64 * 0.1;
        }
        g
    }

    #[test]
    fn tetrahedron_star_rank() {
        let pair = IncidencePair::new(&tetrahedron());
        let p = build_filtered_projector(Kind::Sigma, &pair, &SpectralWindow::full(), None, None).unwrap();
        assert_eq!(p.rank(), 3);
    }

    #[test]
    fn tetrahedron_complementarity() {
        let pair = IncidencePair::new(&tetrahedron());
        let w = SpectralWindow::full();
        let pl = build_filtered_projector(Kind::Lambda, &pair, &w, None, None).unwrap();
        let ps = build_filtered_projector(Kind::Sigma, &pair, &w, None, None).unwrap();
        assert_eq!(pl.rank(), 3);
        let sum = &pl.to_dense() + &ps.to_dense();
        assert!(dist(&sum, &Mat::identity(6, 6)) < 1e-12);
    }

    #[test]
    fn windowed_rank_matches_eigen_count() {
        let pair = IncidencePair::new(&make_icosphere(1, 1.0).unwrap());
        let w = SpectralWindow::above(0.5).unwrap();
        let p = build_filtered_projector(Kind::Lambda, &pair, &w, None, None).unwrap();
        let eig = LaplacianEigen::new(&pair.vertex_laplacian(), LaplacianSource::Vertex).unwrap();
        let count = eig.values.iter().filter(|&&v| v >= 0.5 * eig.values[0]).count();
        assert_eq!(p.rank(), count);
        assert!(p.rank() > 0 && p.rank() < 41);
        assert!(p.orthonormality_error() < 1e-12);
    }

    #[test]
    fn metric_primal_complementarity_and_scale_invariance() {
        let pair = IncidencePair::new(&make_icosphere(0, 1.0).unwrap());
        let g = random_spd(pair.n_edges(), 3);
        let g2 = Mat::from_fn(g.nrows(), g.ncols(), |i, j| 7.5 * g[(i, j)]);
        let m = Metric::new(g).unwrap();
        let m2 = Metric::new(g2).unwrap();
        let w = SpectralWindow::full();
        let pl = build_filtered_projector(Kind::Lambda, &pair, &w, Some(&m), None).unwrap();
        let ps = build_filtered_projector(Kind::Sigma, &pair, &w, Some(&m), None).unwrap();
        let sum = &pl.to_dense() + &ps.to_dense();
        assert!(dist(&sum, &Mat::identity(30, 30)) < 1e-10);

        let w = SpectralWindow::above(0.3).unwrap();
        let a = build_filtered_projector(Kind::Lambda, &pair, &w, Some(&m), None).unwrap();
        let b = build_filtered_projector(Kind::Lambda, &pair, &w, Some(&m2), None).unwrap();
        assert!(dist(&a.to_dense(), &b.to_dense()) < 1e-10);
    }

    #[test]
    fn dual_identity_metric_matches_primal() {
        let pair = IncidencePair::new(&make_icosphere(1, 1.0).unwrap());
        let w = SpectralWindow::above(0.2).unwrap();
        for kind in [Kind::Lambda, Kind::Sigma] {
            let p = build_filtered_projector(kind, &pair, &w, None, None).unwrap();
            let d = build_dual_filtered_projector(kind, &pair, &w, None, None).unwrap();
            assert!(dist(&p.to_dense(), &d.to_dense()) < 1e-12);
        }
    }

    #[test]
    fn dual_scalar_metric_cancels() {
        let pair = IncidencePair::new(&tetrahedron());
        let w = SpectralWindow::full();
        let two = Metric::new(Mat::from_fn(6, 6, |i, j| if i == j { 2.0 } else { 0.0 })).unwrap();
        for kind in [Kind::Lambda, Kind::Sigma] {
            let a = build_dual_filtered_projector(kind, &pair, &w, Some(&two), None).unwrap();
            let b = build_dual_filtered_projector(kind, &pair, &w, None, None).unwrap();
            assert!(dist(&a.to_dense(), &b.to_dense()) < 1e-12);
        }
    }

    #[test]
    fn dual_complementarity_with_random_metric() {
        let pair = IncidencePair::new(&make_icosphere(1, 1.0).unwrap());
        let gd = Metric::new(random_spd(pair.n_edges(), 11)).unwrap();
        let w = SpectralWindow::full();
        let pl = build_dual_filtered_projector(Kind::Lambda, &pair, &w, Some(&gd), None).unwrap();
        let ps = build_dual_filtered_projector(Kind::Sigma, &pair, &w, Some(&gd), None).unwrap();
        let sum = &pl.to_dense() + &ps.to_dense();
        assert!(dist(&sum, &Mat::identity(120, 120)) < 1e-10);
    }

    #[test]
    fn harmonic_ranks() {
        let cases = [
            (make_icosphere(1, 1.0).unwrap(), 0),
            (make_torus(8, 6, 2.0, 0.5).unwrap(), 2),
            (make_holed_plate(2).unwrap(), 4),
        ];
        for (mesh, want) in cases {
            let pair = IncidencePair::new(&mesh);
            let w = SpectralWindow::full();
            let pl = build_filtered_projector(Kind::Lambda, &pair, &w, None, None).unwrap();
            let ps = build_filtered_projector(Kind::Sigma, &pair, &w, None, None).unwrap();
            let ph = harmonic_projector(&pl, &ps, mesh.genus()).unwrap();
            assert_eq!(ph.rank(), want);
            let total = &(&pl.to_dense() + &ps.to_dense()) + &ph.to_dense();
            let n = pair.n_edges();
            assert!(dist(&total, &Mat::identity(n, n)) < 1e-10);
        }
    }

    #[test]
    fn harmonic_rank_mismatch_is_error() {
        let mesh = make_torus(8, 6, 2.0, 0.5).unwrap();
        let pair = IncidencePair::new(&mesh);
        let w = SpectralWindow::full();
        let pl = build_filtered_projector(Kind::Lambda, &pair, &w, None, None).unwrap();
        let ps = build_filtered_projector(Kind::Sigma, &pair, &w, None, None).unwrap();
        assert!(matches!(harmonic_projector(&pl, &ps, 0), Err(Error::Rank { found: 2, expected: 0 })));
    }

    #[test]
    fn non_spd_metric_rejected() {
        let g = Mat::from_fn(3, 3, |i, j| if i == j { [1.0, -1.0, 2.0][i] } else { 0.0 });
        assert!(matches!(Metric::new(g), Err(Error::Metric(_))));
    }

    #[test]
    fn reduction_restricts_range() {
        // dropping one vertex from the loop basis still spans the loop space
        let pair = IncidencePair::new(&make_icosphere(0, 1.0).unwrap());
        let a = Mat::from_fn(12, 11, |i, j| if i == j { 1.0 } else { 0.0 });
        let w = SpectralWindow::full();
        let reduced = build_filtered_projector(Kind::Lambda, &pair, &w, None, Some(&a)).unwrap();
        let full = build_filtered_projector(Kind::Lambda, &pair, &w, None, None).unwrap();
        assert_eq!(reduced.rank(), 11);
        assert!(dist(&reduced.to_dense(), &full.to_dense()) < 1e-12);
    }
}
