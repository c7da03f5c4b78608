//! Jacobi-preconditioned BiCGSTAB for the nonsymmetric 2-D systems.

use nalgebra_sparse::CsrMatrix;

use super::sparse::{diagonal, matvec};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct BiCgStab {
    matrix: CsrMatrix<f64>,
    inv_diag: Vec<f64>,
    tol: f64,
    max_iter: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

impl BiCgStab {
    pub fn new(matrix: CsrMatrix<f64>, tol: f64, max_iter: usize) -> Result<Self> {
        let inv_diag = diagonal(&matrix)
            .into_iter()
            .enumerate()
            .map(|(row, d)| {
                if d == 0.0 || !d.is_finite() {
                    Err(Error::SingularPivot { row, pivot: d })
                } else {
                    Ok(1.0 / d)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BiCgStab {
            matrix,
            inv_diag,
            tol,
            max_iter,
        })
    }

    fn precondition(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.inv_diag).map(|(a, d)| a * d).collect()
    }

    /// Solve to `‖b − Ax‖₂ ≤ tol·‖b‖₂`, starting from `x0`.
    pub fn solve_from(&self, rhs: &[f64], x0: &[f64]) -> Result<Vec<f64>> {
        let n = rhs.len();
        let b_norm = norm2(rhs);
        if b_norm == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let target = self.tol * b_norm;
        let mut x = x0.to_vec();
        let ax = matvec(&self.matrix, &x);
        let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let r_hat = r.clone();
        let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
        let mut v = vec![0.0; n];
        let mut p = vec![0.0; n];
        let mut res = norm2(&r);
        for it in 0..self.max_iter {
            if res <= target {
                return Ok(x);
            }
            let rho_new = dot(&r_hat, &r);
            if rho_new == 0.0 || omega == 0.0 {
                return Err(Error::Solver {
                    residual: res / b_norm,
                    iterations: it,
                });
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for k in 0..n {
                p[k] = r[k] + beta * (p[k] - omega * v[k]);
            }
            let p_hat = self.precondition(&p);
            v = matvec(&self.matrix, &p_hat);
            alpha = rho / dot(&r_hat, &v);
            let s: Vec<f64> = r.iter().zip(&v).map(|(r, v)| r - alpha * v).collect();
            if norm2(&s) <= target {
                for k in 0..n {
                    x[k] += alpha * p_hat[k];
                }
                return Ok(x);
            }
            let s_hat = self.precondition(&s);
            let t = matvec(&self.matrix, &s_hat);
            let tt = dot(&t, &t);
            omega = if tt == 0.0 { 0.0 } else { dot(&t, &s) / tt };
            for k in 0..n {
                x[k] += alpha * p_hat[k] + omega * s_hat[k];
                r[k] = s[k] - omega * t[k];
            }
            res = norm2(&r);
            if !res.is_finite() {
                break;
            }
        }
        // Recompute the true residual before giving up.
        let ax = matvec(&self.matrix, &x);
        let true_res = norm2(&rhs.iter().zip(&ax).map(|(b, a)| b - a).collect::<Vec<_>>());
        if true_res <= target {
            Ok(x)
        } else {
            Err(Error::Solver {
                residual: true_res / b_norm,
                iterations: self.max_iter,
            })
        }
    }
}
