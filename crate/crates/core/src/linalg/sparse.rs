//! Small helpers over `nalgebra_sparse::CsrMatrix<f64>`.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use nalgebra_sparse::{CooMatrix, CsrMatrix};

/// Square CSR matrix from `(row, col, value)` triplets; duplicates are summed.
pub fn csr_from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> CsrMatrix<f64> {
    let mut coo = CooMatrix::new(n, n);
    for &(i, j, v) in triplets {
        coo.push(i, j, v);
    }
    CsrMatrix::from(&coo)
}

pub fn matvec(a: &CsrMatrix<f64>, x: &[f64]) -> Vec<f64> {
    assert_eq!(a.ncols(), x.len());
    a.row_iter()
        .map(|row| {
            row.col_indices()
                .iter()
                .zip(row.values())
                .map(|(&j, &v)| v * x[j])
                .sum()
        })
        .collect()
}

/// Row vector times matrix, `yᵀ = wᵀA`.
pub fn left_apply(a: &CsrMatrix<f64>, w: &[f64]) -> Vec<f64> {
    assert_eq!(a.nrows(), w.len());
    let mut out = vec![0.0; a.ncols()];
    for (i, row) in a.row_iter().enumerate() {
        for (&j, &v) in row.col_indices().iter().zip(row.values()) {
            out[j] += w[i] * v;
        }
    }
    out
}

pub fn max_abs(a: &CsrMatrix<f64>) -> f64 {
    a.values().iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Induced ∞-norm: largest absolute row sum.
pub fn norm_inf(a: &CsrMatrix<f64>) -> f64 {
    a.row_iter()
        .map(|r| r.values().iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Smallest off-diagonal entry (`+∞` when there are none).
pub fn min_off_diagonal(a: &CsrMatrix<f64>) -> f64 {
    let mut m = f64::INFINITY;
    for (i, row) in a.row_iter().enumerate() {
        for (&j, &v) in row.col_indices().iter().zip(row.values()) {
            if i != j {
                m = m.min(v);
            }
        }
    }
    m
}

pub fn diagonal(a: &CsrMatrix<f64>) -> Vec<f64> {
    a.row_iter()
        .enumerate()
        .map(|(i, row)| row.get_entry(i).map_or(0.0, |e| e.into_value()))
        .collect()
}

/// `c·I + s·A`
pub fn shifted(a: &CsrMatrix<f64>, c: f64, s: f64) -> CsrMatrix<f64> {
    let mut triplets: Vec<(usize, usize, f64)> = a
        .triplet_iter()
        .map(|(i, j, &v)| (i, j, s * v))
        .collect();
    triplets.extend((0..a.nrows()).map(|i| (i, i, c)));
    csr_from_triplets(a.nrows(), &triplets)
}

pub fn to_dense(a: &CsrMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from(a)
}

/// Matrix Market coordinate text, 1-based indices.
pub fn to_matrix_market(a: &CsrMatrix<f64>) -> String {
    let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{} {} {}", a.nrows(), a.ncols(), a.nnz());
    for (i, j, v) in a.triplet_iter() {
        let _ = writeln!(out, "{} {} {:?}", i + 1, j + 1, v);
    }
    out
}
