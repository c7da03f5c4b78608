use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column sums must vanish to this absolute tolerance.
pub const COLUMN_SUM_TOL: f64 = 1e-14;

/// The n×n reaction coupling λ, stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct CouplingMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl CouplingMatrix {
    /// Builds from rows; only shape and finiteness are checked here, the sign
    /// pattern and column sums are the validator's business.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Invalid("coupling matrix is empty".into()));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Dimension(format!(
                "coupling row {} has {} entries, expected {n}",
                i + 1,
                r.len()
            )));
        }
        let entries: Vec<f64> = rows.into_iter().flatten().collect();
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("coupling matrix has non-finite entries".into()));
        }
        Ok(CouplingMatrix { n, entries })
    }

    /// `rate · [[-1, 1], [1, -1]]`, the reversible two-species exchange.
    pub fn exchange(rate: f64) -> Self {
        CouplingMatrix::from_rows(vec![vec![-rate, rate], vec![rate, -rate]])
            .expect("2x2 finite matrix")
    }

    pub fn zeros(n: usize) -> Self {
        CouplingMatrix {
            n,
            entries: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j)).sum())
            .collect()
    }

    /// Off-diagonal entries that are negative, as `(i, j, value)`.
    pub fn metzler_violations(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.get(i, j);
                if (i == j && v > 0.0) || (i != j && v < 0.0) {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    /// Whether the directed graph with an edge j → i for each λᵢⱼ > 0 is
    /// strongly connected.
    pub fn is_irreducible(&self) -> bool {
        let n = self.n;
        if n == 1 {
            return true;
        }
        let reach = |forward: bool| {
            let mut seen = vec![false; n];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(k) = stack.pop() {
                for m in 0..n {
                    let w = if forward { self.get(m, k) } else { self.get(k, m) };
                    if m != k && w > 0.0 && !seen[m] {
                        seen[m] = true;
                        stack.push(m);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(true) && reach(false)
    }
}

impl TryFrom<Vec<Vec<f64>>> for CouplingMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        CouplingMatrix::from_rows(rows)
    }
}

impl From<CouplingMatrix> for Vec<Vec<f64>> {
    fn from(m: CouplingMatrix) -> Self {
        m.rows()
    }
}
