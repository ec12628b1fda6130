//! Dense linear algebra helpers on top of `faer`.

use faer::{Mat, MatRef, Side};
use num_complex::Complex64 as C64;

use crate::{Error, Result};

/// Symmetric eigendecomposition with eigenvalues in nonincreasing order.
pub fn sym_eigen(a: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Backend(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    // faer returns nondecreasing order
    let values = (0..n).rev().map(|i| s[i]).collect();
    let vectors = Mat::from_fn(n, n, |i, j| u[(i, n - 1 - j)]);
    Ok((values, vectors))
}

/// Eigenvalues of a symmetric matrix in nonincreasing order.
pub fn sym_eigenvalues(a: MatRef<'_, f64>) -> Result<Vec<f64>> {
    let mut v = a
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Backend(format!("{e:?}")))?;
    v.reverse();
    Ok(v)
}

/// Singular values, nonincreasing.
pub fn singular_values(a: MatRef<'_, C64>) -> Result<Vec<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    a.singular_values().map_err(|e| Error::Backend(format!("{e:?}")))
}

/// Singular values of a real matrix, nonincreasing.
pub fn singular_values_real(a: MatRef<'_, f64>) -> Result<Vec<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    a.singular_values().map_err(|e| Error::Backend(format!("{e:?}")))
}

pub fn spectral_norm(a: MatRef<'_, C64>) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

pub fn spectral_norm_real(a: MatRef<'_, f64>) -> Result<f64> {
    Ok(singular_values_real(a)?.first().copied().unwrap_or(0.0))
}

/// `||A - A^T||_F / ||A||_F` (0 for the zero matrix).
pub fn relative_asymmetry(a: MatRef<'_, f64>) -> f64 {
    let n = a.nrows();
    let mut diff = 0.0;
    for j in 0..n {
        for i in 0..n {
            let d = a[(i, j)] - a[(j, i)];
            diff += d * d;
        }
    }
    let norm = a.norm_l2();
    if norm == 0.0 {
        0.0
    } else {
        diff.sqrt() / norm
    }
}

pub fn to_complex(a: MatRef<'_, f64>) -> Mat<C64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| C64::new(a[(i, j)], 0.0))
}

pub fn transpose(a: MatRef<'_, f64>) -> Mat<f64> {
    a.transpose().to_owned()
}

/// `y = A x` for a column-major dense matrix.
pub fn matvec(a: &Mat<f64>, x: &[f64]) -> Vec<f64> {
    assert_eq!(a.ncols(), x.len());
    let mut y = vec![0.0; a.nrows()];
    for (j, &xj) in x.iter().enumerate() {
        if xj == 0.0 {
            continue;
        }
        for (yi, &aij) in y.iter_mut().zip(a.col_as_slice(j)) {
            *yi += aij * xj;
        }
    }
    y
}

/// `y = A^T x`.
pub fn matvec_t(a: &Mat<f64>, x: &[f64]) -> Vec<f64> {
    assert_eq!(a.nrows(), x.len());
    (0..a.ncols())
        .map(|j| a.col_as_slice(j).iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

/// `y = A x` for a complex matrix.
pub fn matvec_c(a: &Mat<C64>, x: &[C64]) -> Vec<C64> {
    assert_eq!(a.ncols(), x.len());
    let mut y = vec![C64::new(0.0, 0.0); a.nrows()];
    for (j, &xj) in x.iter().enumerate() {
        for (yi, &aij) in y.iter_mut().zip(a.col_as_slice(j)) {
            *yi += aij * xj;
        }
    }
    y
}

/// Real matrix applied to a complex vector.
pub fn matvec_rc(a: &Mat<f64>, x: &[C64]) -> Vec<C64> {
    assert_eq!(a.ncols(), x.len());
    let mut y = vec![C64::new(0.0, 0.0); a.nrows()];
    for (j, &xj) in x.iter().enumerate() {
        for (yi, &aij) in y.iter_mut().zip(a.col_as_slice(j)) {
            *yi += xj * aij;
        }
    }
    y
}

/// Transposed real matrix applied to a complex vector.
pub fn matvec_t_rc(a: &Mat<f64>, x: &[C64]) -> Vec<C64> {
    assert_eq!(a.nrows(), x.len());
    (0..a.ncols())
        .map(|j| a.col_as_slice(j).iter().zip(x).map(|(&p, &q)| q * p).sum())
        .collect()
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn norm_c(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Thin orthonormal basis of the column span of `a` (modified Gram-Schmidt
/// with one reorthogonalisation pass). Columns whose residual falls below
/// `tol` times their original norm are dropped.
pub fn orthonormal_columns(a: MatRef<'_, f64>, tol: f64) -> Mat<f64> {
    let n = a.nrows();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for j in 0..a.ncols() {
        let mut v: Vec<f64> = (0..n).map(|i| a[(i, j)]).collect();
        let original = norm(&v);
        if original == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for q in &basis {
                let c: f64 = q.iter().zip(&v).map(|(p, r)| p * r).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let r = norm(&v);
        if r > tol * original {
            v.iter_mut().for_each(|x| *x /= r);
            basis.push(v);
        }
    }
    Mat::from_fn(n, basis.len(), |i, j| basis[j][i])
}

/// Cosines of the principal angles between the column spans of `a` and `b`,
/// nonincreasing.
pub fn principal_cosines(a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> Result<Vec<f64>> {
    let qa = orthonormal_columns(a, 1e-10);
    let qb = orthonormal_columns(b, 1e-10);
    let m = qa.transpose() * &qb;
    singular_values_real(m.as_ref())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_nonincreasing() {
        let a = Mat::from_fn(3, 3, |i, j| if i == j { [1.0, 3.0, 2.0][i] } else { 0.0 });
        let (vals, vecs) = sym_eigen(a.as_ref()).unwrap();
        assert_eq!(vals.len(), 3);
        assert!((vals[0] - 3.0).abs() < 1e-14 && (vals[2] - 1.0).abs() < 1e-14);
        assert!((vecs[(1, 0)].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn orthonormalisation_drops_dependent_columns() {
        let a = Mat::from_fn(4, 3, |i, j| match j {
            0 => i as f64,
            1 => 2.0 * i as f64,
            _ => 1.0,
        });
        let q = orthonormal_columns(a.as_ref(), 1e-12);
        assert_eq!(q.ncols(), 2);
        let g = q.transpose() * &q;
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g[(i, j)] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn principal_cosines_of_rotated_plane() {
        let t: f64 = 0.3;
        let a = Mat::from_fn(3, 1, |i, _| [1.0, 0.0, 0.0][i]);
        let b = Mat::from_fn(3, 1, |i, _| [t.cos(), t.sin(), 0.0][i]);
        let c = principal_cosines(a.as_ref(), b.as_ref()).unwrap();
        assert!((c[0] - t.cos()).abs() < 1e-14);
    }
}
