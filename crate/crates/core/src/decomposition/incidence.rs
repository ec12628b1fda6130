use std::collections::HashMap;
use std::fmt::Write as _;

use faer::Mat;

use crate::mesh::TriangleMesh;

/// Loop-to-RWG (`Lambda`, edges x vertices) and star-to-RWG (`Sigma`,
/// edges x cells) incidence matrices.
///
/// Row `e` of `Lambda` is +1 at the head `v_b` and -1 at the tail `v_a` of
/// edge `e`; row `e` of `Sigma` is +1 at the plus cell and -1 at the minus
/// cell. With this convention `Lambda^T Lambda` and `Sigma^T Sigma` are the
/// vertex and cell graph Laplacians and `Sigma^T Lambda = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidencePair {
    n_vertices: usize,
    n_cells: usize,
    genus: usize,
    /// (head, tail) per edge
    lambda: Vec<(usize, usize)>,
    /// (plus, minus) per edge
    sigma: Vec<(usize, usize)>,
}

impl IncidencePair {
    pub fn new(mesh: &TriangleMesh) -> Self {
        let lambda = mesh.edges().iter().map(|e| (e.v_b, e.v_a)).collect();
        let sigma = mesh.edges().iter().map(|e| (e.plus, e.minus)).collect();
        Self {
            n_vertices: mesh.n_vertices(),
            n_cells: mesh.n_cells(),
            genus: mesh.genus(),
            lambda,
            sigma,
        }
    }

    pub fn n_edges(&self) -> usize {
        self.lambda.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// `(head, tail)` vertex pair of each edge.
    pub fn lambda_rows(&self) -> &[(usize, usize)] {
        &self.lambda
    }

    /// `(plus, minus)` cell pair of each edge.
    pub fn sigma_rows(&self) -> &[(usize, usize)] {
        &self.sigma
    }

    pub fn lambda_dense(&self) -> Mat<f64> {
        incidence_dense(&self.lambda, self.n_vertices)
    }

    pub fn sigma_dense(&self) -> Mat<f64> {
        incidence_dense(&self.sigma, self.n_cells)
    }

    /// `Lambda x` for a vertex vector.
    pub fn apply_lambda(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_vertices);
        self.lambda.iter().map(|&(h, t)| x[h] - x[t]).collect()
    }

    /// `Lambda^T y` for an edge vector.
    pub fn apply_lambda_t(&self, y: &[f64]) -> Vec<f64> {
        transpose_apply(&self.lambda, self.n_vertices, y)
    }

    pub fn apply_sigma(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cells);
        self.sigma.iter().map(|&(p, m)| x[p] - x[m]).collect()
    }

    pub fn apply_sigma_t(&self, y: &[f64]) -> Vec<f64> {
        transpose_apply(&self.sigma, self.n_cells, y)
    }

    /// Vertex graph Laplacian `Lambda^T Lambda`.
    pub fn vertex_laplacian(&self) -> Mat<f64> {
        graph_laplacian(&self.lambda, self.n_vertices)
    }

    /// Cell graph Laplacian `Sigma^T Sigma`.
    pub fn cell_laplacian(&self) -> Mat<f64> {
        graph_laplacian(&self.sigma, self.n_cells)
    }

    /// Nonzero entries of `Sigma^T Lambda`, computed in integer arithmetic.
    pub fn sigma_t_lambda_nonzeros(&self) -> Vec<((usize, usize), i64)> {
        let mut acc: HashMap<(usize, usize), i64> = HashMap::new();
        for (&(h, t), &(p, m)) in self.lambda.iter().zip(&self.sigma) {
            *acc.entry((p, h)).or_default() += 1;
            *acc.entry((p, t)).or_default() -= 1;
            *acc.entry((m, h)).or_default() -= 1;
            *acc.entry((m, t)).or_default() += 1;
        }
        let mut nz: Vec<_> = acc.into_iter().filter(|&(_, v)| v != 0).collect();
        nz.sort_unstable();
        nz
    }

    pub fn sigma_t_lambda_is_zero(&self) -> bool {
        self.sigma_t_lambda_nonzeros().is_empty()
    }

    /// MatrixMarket coordinate text for `Lambda`.
    pub fn lambda_matrix_market(&self) -> String {
        matrix_market(&self.lambda, self.n_vertices)
    }

    /// MatrixMarket coordinate text for `Sigma`.
    pub fn sigma_matrix_market(&self) -> String {
        matrix_market(&self.sigma, self.n_cells)
    }
}

fn incidence_dense(rows: &[(usize, usize)], ncols: usize) -> Mat<f64> {
    let mut m = Mat::zeros(rows.len(), ncols);
    for (e, &(p, q)) in rows.iter().enumerate() {
        m[(e, p)] = 1.0;
        m[(e, q)] = -1.0;
    }
    m
}

fn transpose_apply(rows: &[(usize, usize)], ncols: usize, y: &[f64]) -> Vec<f64> {
    assert_eq!(y.len(), rows.len());
    let mut x = vec![0.0; ncols];
    for (&(p, q), &v) in rows.iter().zip(y) {
        x[p] += v;
        x[q] -= v;
    }
    x
}

fn graph_laplacian(rows: &[(usize, usize)], n: usize) -> Mat<f64> {
    let mut l = Mat::zeros(n, n);
    for &(p, q) in rows {
        l[(p, p)] += 1.0;
        l[(q, q)] += 1.0;
        l[(p, q)] -= 1.0;
        l[(q, p)] -= 1.0;
    }
    l
}

fn matrix_market(rows: &[(usize, usize)], ncols: usize) -> String {
    let mut s = String::from("%%MatrixMarket matrix coordinate integer general\n");
    let _ = writeln!(s, "{} {} {}", rows.len(), ncols, 2 * rows.len());
    for (e, &(p, q)) in rows.iter().enumerate() {
        let _ = writeln!(s, "{} {} 1", e + 1, p + 1);
        let _ = writeln!(s, "{} {} -1", e + 1, q + 1);
    }
    s
}
