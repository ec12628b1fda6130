use std::time::Instant;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::SolveFailure;
use crate::linalg::norm_c;
use crate::{Error, Result};

pub const DEFAULT_RESTART: usize = 50;
pub const DEFAULT_MAX_ITER: usize = 2000;

/// Outcome of an iterative solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// Final relative residual `||A x - b|| / ||b||`.
    pub residual: f64,
    pub seconds: f64,
    pub cond_before: Option<f64>,
    pub cond_after: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub restart: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_iter: DEFAULT_MAX_ITER, restart: DEFAULT_RESTART }
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Complex Givens rotation `(c, s)` with `c` real that zeroes `b` in `(a, b)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let (na, nb) = (a.norm(), b.norm());
    if nb == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    let c = na / r;
    let s = (a / na) * b.conj() / r;
    (c, s)
}

/// Restarted GMRES from a zero initial guess. Counts one iteration per
/// operator application inside the Arnoldi process.
pub fn krylov_solve(
    apply: impl Fn(&[C64]) -> Vec<C64>,
    b: &[C64],
    opts: &KrylovOptions,
) -> Result<(Vec<C64>, SolveReport)> {
    let start = Instant::now();
    let n = b.len();
    let bnorm = norm_c(b);
    let mut x = vec![C64::new(0.0, 0.0); n];
    let report = |iterations, residual| SolveReport {
        iterations,
        residual,
        seconds: start.elapsed().as_secs_f64(),
        cond_before: None,
        cond_after: None,
    };
    if bnorm == 0.0 {
        return Ok((x, report(0, 0.0)));
    }
    let m = opts.restart.max(1);
    let mut iterations = 0;
    while iterations < opts.max_iter {
        let ax = apply(&x);
        let r: Vec<C64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm_c(&r);
        let residual = beta / bnorm;
        if residual <= opts.tol {
            return Ok((x, report(iterations, residual)));
        }
        let mut v: Vec<Vec<C64>> = vec![r.iter().map(|ri| ri / beta).collect()];
        let mut h: Vec<Vec<C64>> = Vec::new();
        let mut cs: Vec<(f64, C64)> = Vec::new();
        let mut g = vec![C64::new(beta, 0.0)];
        let mut steps = 0;
        while steps < m && iterations < opts.max_iter {
            let mut w = apply(&v[steps]);
            iterations += 1;
            let mut col = vec![C64::new(0.0, 0.0); steps + 2];
            // modified Gram-Schmidt, two passes
            for _ in 0..2 {
                for (i, vi) in v.iter().enumerate() {
                    let hij = dot(vi, &w);
                    col[i] += hij;
                    axpy(&mut w, -hij, vi);
                }
            }
            let wn = norm_c(&w);
            col[steps + 1] = C64::new(wn, 0.0);
            for (i, &(c, s)) in cs.iter().enumerate() {
                let (a, bb) = (col[i], col[i + 1]);
                col[i] = a * c + s * bb;
                col[i + 1] = -s.conj() * a + bb * c;
            }
            let (c, s) = givens(col[steps], col[steps + 1]);
            let a = col[steps];
            col[steps] = a * c + s * col[steps + 1];
            col[steps + 1] = C64::new(0.0, 0.0);
            let gk = g[steps];
            g[steps] = gk * c;
            g.push(-s.conj() * gk);
            cs.push((c, s));
            h.push(col);
            steps += 1;
            let estimate = g[steps].norm() / bnorm;
            if estimate <= opts.tol || wn <= 1e-14 * beta {
                break;
            }
            v.push(w.iter().map(|wi| wi / wn).collect());
        }
        // back substitution for the least-squares coefficients
        let mut y = vec![C64::new(0.0, 0.0); steps];
        for i in (0..steps).rev() {
            let mut s = g[i];
            for (j, yj) in y.iter().enumerate().skip(i + 1) {
                s -= h[j][i] * yj;
            }
            y[i] = if h[i][i] == C64::new(0.0, 0.0) { C64::new(0.0, 0.0) } else { s / h[i][i] };
        }
        for (yi, vi) in y.iter().zip(&v) {
            axpy(&mut x, *yi, vi);
        }
    }
    let ax = apply(&x);
    let r: Vec<C64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let final_residual = norm_c(&r) / bnorm;
    if final_residual <= opts.tol {
        return Ok((x, report(iterations, final_residual)));
    }
    Err(Error::NoConvergence(Box::new(SolveFailure { solution: x, report: report(iterations, final_residual) })))
}
