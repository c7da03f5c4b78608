//! Sparse helpers and the linear-solver strategies used by implicit steps and
//! inverse iteration.

mod banded;
mod bicgstab;
pub mod sparse;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use nalgebra_sparse::CsrMatrix;
use serde::{Deserialize, Serialize};

pub use banded::BandedLu;
pub use bicgstab::BiCgStab;

use crate::error::{Error, Result};

/// Shape of a species-major block vector on a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub n_species: usize,
    pub n_cells: usize,
    pub dim: usize,
}

impl Layout {
    /// `perm[i * n_cells + c] = c * n_species + i`: interleave species per
    /// cell so coupling stays within the band.
    pub fn interleave(&self) -> Vec<usize> {
        let mut perm = vec![0; self.n_species * self.n_cells];
        for i in 0..self.n_species {
            for c in 0..self.n_cells {
                perm[i * self.n_cells + c] = c * self.n_species + i;
            }
        }
        perm
    }
}

/// A matrix prepared for repeated solves.
pub trait Factorized: Send + Sync {
    fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>>;
}

pub trait LinearSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn prepare(&self, a: &CsrMatrix<f64>, layout: &Layout) -> Result<Box<dyn Factorized>>;
}

struct Banded;

impl Factorized for BandedLu {
    fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        Ok(BandedLu::solve(self, rhs))
    }
}

impl LinearSolver for Banded {
    fn name(&self) -> &'static str {
        "banded"
    }
    fn prepare(&self, a: &CsrMatrix<f64>, layout: &Layout) -> Result<Box<dyn Factorized>> {
        Ok(Box::new(BandedLu::factor(a, layout.interleave())?))
    }
}

struct Krylov {
    tol: f64,
    max_iter: usize,
}

impl Factorized for BiCgStab {
    fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.solve_from(rhs, rhs)
    }
}

impl LinearSolver for Krylov {
    fn name(&self) -> &'static str {
        "bicgstab"
    }
    fn prepare(&self, a: &CsrMatrix<f64>, _layout: &Layout) -> Result<Box<dyn Factorized>> {
        Ok(Box::new(BiCgStab::new(a.clone(), self.tol, self.max_iter)?))
    }
}

/// Which solver to use and its iterative settings. `auto` picks the banded
/// direct solver in 1-D and BiCGSTAB in 2-D.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSettings {
    pub kind: String,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            kind: "auto".into(),
            tol: 1e-12,
            max_iter: 10_000,
        }
    }
}

type Builder = fn(&SolverSettings) -> Box<dyn LinearSolver>;

fn registry() -> &'static BTreeMap<&'static str, Builder> {
    static REGISTRY: OnceLock<BTreeMap<&'static str, Builder>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut m: BTreeMap<&'static str, Builder> = BTreeMap::new();
        m.insert("banded", |_| Box::new(Banded));
        m.insert("bicgstab", |s| {
            Box::new(Krylov {
                tol: s.tol,
                max_iter: s.max_iter,
            })
        });
        m
    })
}

pub fn solver_names() -> Vec<&'static str> {
    std::iter::once("auto")
        .chain(registry().keys().copied())
        .collect()
}

impl SolverSettings {
    pub fn named(kind: &str) -> Self {
        SolverSettings {
            kind: kind.into(),
            ..Default::default()
        }
    }

    pub fn resolve(&self, layout: &Layout) -> Result<Box<dyn LinearSolver>> {
        let name = match self.kind.as_str() {
            "auto" if layout.dim >= 2 => "bicgstab",
            "auto" => "banded",
            other => other,
        };
        let build = registry().get(name).ok_or_else(|| Error::UnknownStrategy {
            kind: "linear solver",
            name: self.kind.clone(),
            known: solver_names().join(", "),
        })?;
        Ok(build(self))
    }

    pub fn prepare(&self, a: &CsrMatrix<f64>, layout: &Layout) -> Result<Box<dyn Factorized>> {
        self.resolve(layout)?.prepare(a, layout)
    }
}
