use nalgebra_sparse::CsrMatrix;
use rayon::prelude::*;

use super::bernoulli;
use crate::error::{Error, Result};
use crate::linalg::sparse::{csr_from_triplets, left_apply, matvec};
use crate::linalg::Layout;
use crate::model::{Grid, PotentialSpec, ProblemSpec};

/// Anything that acts as a sparse generator on species-major block vectors.
pub trait BlockOperator {
    fn matrix(&self) -> &CsrMatrix<f64>;
    fn grid(&self) -> &Grid;
    fn n_species(&self) -> usize;

    fn layout(&self) -> Layout {
        Layout {
            n_species: self.n_species(),
            n_cells: self.grid().n_cells(),
            dim: self.grid().dim(),
        }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        matvec(self.matrix(), x)
    }
}

/// Exponentially fitted finite-volume discretisation of
/// `div(σ∇u + u∇ψ)` with zero normal flux on the boundary, for one species.
#[derive(Clone, Debug)]
pub struct TransportOperator {
    pub species: usize,
    grid: Grid,
    sigma: f64,
    matrix: CsrMatrix<f64>,
}

impl TransportOperator {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

impl BlockOperator for TransportOperator {
    fn matrix(&self) -> &CsrMatrix<f64> {
        &self.matrix
    }
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn n_species(&self) -> usize {
        1
    }
}

/// Row/column triplets of the transport operator for potential samples `psi`
/// at cell centres, offset by `base` in both indices.
fn transport_triplets(grid: &Grid, sigma: f64, psi: &[f64], base: usize) -> Vec<(usize, usize, f64)> {
    let mut t = Vec::with_capacity(5 * grid.n_cells());
    for axis in 0..grid.dim() {
        let h = grid.axis(axis).width();
        let coef = sigma / (h * h);
        let stride = grid.stride(axis);
        for cell in 0..grid.n_cells() {
            let idx = grid.multi_index(cell);
            if idx[axis] + 1 == grid.axis(axis).n_cells {
                continue;
            }
            // Face between `left` and `right`. Flux in the +axis direction is
            // (σ/h)[B(s)·u_left − B(−s)·u_right], s = Δψ/σ, which vanishes on
            // u ∝ exp(−ψ/σ) since B(−s) = eˢB(s).
            let (left, right) = (cell, cell + stride);
            let s = (psi[right] - psi[left]) / sigma;
            let out_left = coef * bernoulli(s);
            let out_right = coef * bernoulli(-s);
            let (l, r) = (base + left, base + right);
            t.push((l, l, -out_left));
            t.push((r, l, out_left));
            t.push((r, r, -out_right));
            t.push((l, r, out_right));
        }
    }
    t
}

pub fn assemble_transport(grid: &Grid, sigma: f64, psi: &PotentialSpec) -> Result<TransportOperator> {
    let samples = psi.build()?.sample(grid)?;
    transport_from_samples(grid, sigma, &samples, 0)
}

pub(crate) fn transport_from_samples(
    grid: &Grid,
    sigma: f64,
    psi: &[f64],
    species: usize,
) -> Result<TransportOperator> {
    if !(sigma > 0.0) {
        return Err(Error::Invalid(format!("sigma must be positive, got {sigma}")));
    }
    if let Some(v) = psi.iter().find(|v| !v.is_finite()) {
        return Err(Error::Invalid(format!("potential sample {v} is not finite")));
    }
    let matrix = csr_from_triplets(grid.n_cells(), &transport_triplets(grid, sigma, psi, 0));
    Ok(TransportOperator {
        species,
        grid: grid.clone(),
        sigma,
        matrix,
    })
}

/// Per-species transport operators of a problem, assembled concurrently.
pub fn assemble_transports(spec: &ProblemSpec) -> Result<Vec<TransportOperator>> {
    transports_from_samples(spec, &spec.sampled_potentials()?)
}

fn transports_from_samples(spec: &ProblemSpec, psi: &[Vec<f64>]) -> Result<Vec<TransportOperator>> {
    spec.species
        .par_iter()
        .zip(psi.par_iter())
        .enumerate()
        .map(|(i, (s, p))| transport_from_samples(&spec.grid, s.sigma, p, i))
        .collect()
}

/// Transport plus linear coupling, `L + C` with `C` holding `αᵢλᵢⱼ·I` blocks.
#[derive(Clone, Debug)]
pub struct SystemOperator {
    grid: Grid,
    alphas: Vec<f64>,
    transports: Vec<TransportOperator>,
    matrix: CsrMatrix<f64>,
}

impl SystemOperator {
    pub fn transports(&self) -> &[TransportOperator] {
        &self.transports
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// The row vector with `volume/αᵢ` in block `i`, annihilating the matrix.
    pub fn left_weights(&self) -> Vec<f64> {
        let nc = self.grid.n_cells();
        let vol = self.grid.cell_volume();
        self.alphas
            .iter()
            .flat_map(|a| std::iter::repeat(vol / a).take(nc))
            .collect()
    }

    /// `max |wᵀA|` for the conservation weights `w`.
    pub fn left_residual(&self) -> f64 {
        left_residual(&self.matrix, &self.left_weights())
    }
}

pub fn left_residual(matrix: &CsrMatrix<f64>, weights: &[f64]) -> f64 {
    left_apply(matrix, weights)
        .into_iter()
        .fold(0.0, |m, v| m.max(v.abs()))
}

impl BlockOperator for SystemOperator {
    fn matrix(&self) -> &CsrMatrix<f64> {
        &self.matrix
    }
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn n_species(&self) -> usize {
        self.alphas.len()
    }
}

pub fn assemble_system(spec: &ProblemSpec) -> Result<SystemOperator> {
    if !spec.is_linear()? {
        return Err(Error::Unsupported(
            "the assembled system needs linear reactions; nonlinear problems are stepped with IMEX"
                .into(),
        ));
    }
    let n = spec.n_species();
    if spec.coupling.n() != n {
        return Err(Error::Dimension(format!(
            "coupling is {0}x{0} for {n} species",
            spec.coupling.n()
        )));
    }
    let psi = spec.sampled_potentials()?;
    let transports = transports_from_samples(spec, &psi)?;
    let nc = spec.grid.n_cells();
    let mut triplets = Vec::new();
    for (i, s) in spec.species.iter().enumerate() {
        triplets.extend(transport_triplets(&spec.grid, s.sigma, &psi[i], i * nc));
        for j in 0..n {
            let w = s.alpha * spec.coupling.get(i, j);
            if w != 0.0 {
                triplets.extend((0..nc).map(|c| (i * nc + c, j * nc + c, w)));
            }
        }
    }
    Ok(SystemOperator {
        grid: spec.grid.clone(),
        alphas: spec.alphas(),
        transports,
        matrix: csr_from_triplets(n * nc, &triplets),
    })
}
