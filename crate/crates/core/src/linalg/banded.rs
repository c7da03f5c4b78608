//! Banded LU without pivoting.
//!
//! The matrices factored here are nonsingular M-matrices (`I − dt·A` and
//! `εI − A` with `A` Metzler and weighted-column-sum-free), whose leading
//! principal minors are all positive, so elimination without row exchanges
//! exists and every pivot is positive.

use nalgebra_sparse::CsrMatrix;

use crate::error::{Error, Result};

/// An LU factorisation stored in band form. `perm[old] = new` reorders the
/// unknowns before factorisation to shrink the bandwidth.
#[derive(Clone, Debug)]
pub struct BandedLu {
    n: usize,
    lower: usize,
    upper: usize,
    band: Vec<f64>,
    perm: Vec<usize>,
}

impl BandedLu {
    pub fn factor(a: &CsrMatrix<f64>, perm: Vec<usize>) -> Result<Self> {
        let n = a.nrows();
        assert_eq!(n, a.ncols());
        assert_eq!(n, perm.len());
        let (mut lower, mut upper) = (0usize, 0usize);
        for (i, j, _) in a.triplet_iter() {
            let (pi, pj) = (perm[i], perm[j]);
            if pi > pj {
                lower = lower.max(pi - pj);
            } else {
                upper = upper.max(pj - pi);
            }
        }
        let width = lower + upper + 1;
        let mut lu = BandedLu {
            n,
            lower,
            upper,
            band: vec![0.0; n * width],
            perm,
        };
        for (i, j, &v) in a.triplet_iter() {
            let (pi, pj) = (lu.perm[i], lu.perm[j]);
            *lu.at_mut(pi, pj) += v;
        }
        lu.eliminate()?;
        Ok(lu)
    }

    pub fn bandwidth(&self) -> (usize, usize) {
        (self.lower, self.upper)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.lower + self.upper + 1) + (j + self.lower - i)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.band[self.idx(i, j)]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        let k = self.idx(i, j);
        &mut self.band[k]
    }

    fn eliminate(&mut self) -> Result<()> {
        let scale = self.band.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 0..self.n {
            let pivot = self.at(k, k);
            if !(pivot.abs() > 1e-300 && pivot.abs() > scale * 1e-15) || !pivot.is_finite() {
                return Err(Error::SingularPivot { row: k, pivot });
            }
            let row_end = (k + self.lower + 1).min(self.n);
            let col_end = (k + self.upper + 1).min(self.n);
            for i in k + 1..row_end {
                let l = self.at(i, k) / pivot;
                if l == 0.0 {
                    continue;
                }
                *self.at_mut(i, k) = l;
                for j in k + 1..col_end {
                    let u = self.at(k, j);
                    *self.at_mut(i, j) -= l * u;
                }
            }
        }
        Ok(())
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        assert_eq!(rhs.len(), self.n);
        let mut y = vec![0.0; self.n];
        for (old, &new) in self.perm.iter().enumerate() {
            y[new] = rhs[old];
        }
        for i in 0..self.n {
            let start = i.saturating_sub(self.lower);
            let mut acc = y[i];
            for j in start..i {
                acc -= self.at(i, j) * y[j];
            }
            y[i] = acc;
        }
        for i in (0..self.n).rev() {
            let end = (i + self.upper + 1).min(self.n);
            let mut acc = y[i];
            for j in i + 1..end {
                acc -= self.at(i, j) * y[j];
            }
            y[i] = acc / self.at(i, i);
        }
        self.perm.iter().map(|&new| y[new]).collect()
    }
}
