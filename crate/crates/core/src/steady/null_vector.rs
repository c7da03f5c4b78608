use serde::{Deserialize, Serialize};

use crate::discretize::{left_residual, BlockOperator, SystemOperator};
use crate::error::{Error, Result};
use crate::linalg::sparse::{norm_inf, shifted};
use crate::linalg::SolverSettings;
use crate::model::{Gauge, State};

/// Which integral constraint fixes the scale of a stationary state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `Σᵢ ∫vᵢ = 1`.
    #[default]
    Total,
    /// `Σᵢ (1/αᵢ) ∫vᵢ = 1`.
    Weighted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NullVectorOptions {
    /// Stop when successive iterates differ by at most this in L¹.
    pub tol: f64,
    /// Shift `ε = shift_factor · ‖A‖∞`.
    pub shift_factor: f64,
    pub max_iter: usize,
    pub normalization: Normalization,
    pub solver: SolverSettings,
}

impl Default for NullVectorOptions {
    fn default() -> Self {
        NullVectorOptions {
            tol: 1e-14,
            shift_factor: 1e-3,
            max_iter: 10_000,
            normalization: Normalization::Total,
            solver: SolverSettings::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalizationRecord {
    pub kind: Normalization,
    pub value: f64,
}

#[derive(Clone, Debug)]
pub struct StationaryState {
    pub state: State,
    /// `‖A·v‖∞`, or the nonlinear stationary residual for constant pairs.
    pub residual: f64,
    pub normalization: NormalizationRecord,
    pub iterations: usize,
}

/// Volume-weighted `Σ |x|` with per-species weights.
fn weighted_l1(x: &[f64], n_cells: usize, volume: f64, weights: &[f64]) -> f64 {
    x.chunks(n_cells)
        .zip(weights)
        .map(|(block, w)| w * volume * block.iter().map(|v| v.abs()).sum::<f64>())
        .sum()
}

/// Perron null vector of a Metzler generator by shifted inverse iteration:
/// `x ← normalize((εI − A)⁻¹x)` from the all-ones vector.
///
/// `(εI − A)⁻¹` is nonnegative and irreducible for an irreducible
/// configuration, and its dominant eigenvalue `1/ε` belongs to the zero
/// eigenvalue of `A`, so the iteration converges to the positive null vector.
pub fn inverse_iteration<O: BlockOperator>(
    op: &O,
    alphas: &[f64],
    opts: &NullVectorOptions,
) -> Result<StationaryState> {
    inverse_iteration_from(op, alphas, opts, None)
}

/// As [`inverse_iteration`], from a given positive start vector.
pub fn inverse_iteration_from<O: BlockOperator>(
    op: &O,
    alphas: &[f64],
    opts: &NullVectorOptions,
    start: Option<&[f64]>,
) -> Result<StationaryState> {
    let layout = op.layout();
    let (nc, n) = (layout.n_cells, layout.n_species);
    if alphas.len() != n {
        return Err(Error::Dimension(format!("{} alphas for {n} species", alphas.len())));
    }
    let volume = op.grid().cell_volume();
    let a = op.matrix();
    let eps = opts.shift_factor * norm_inf(a);
    if !(eps > 0.0) {
        return Err(Error::Degenerate("operator is zero; every vector is stationary".into()));
    }
    let factor = opts.solver.prepare(&shifted(a, eps, -1.0), &layout)?;
    let ones = vec![1.0; n];
    let mut x = match start {
        Some(s) if s.len() == n * nc => s.to_vec(),
        Some(s) => {
            return Err(Error::Dimension(format!(
                "start vector has {} entries, expected {}",
                s.len(),
                n * nc
            )))
        }
        None => vec![1.0; n * nc],
    };
    if x.iter().any(|v| !(*v >= 0.0)) || x.iter().all(|v| *v == 0.0) {
        return Err(Error::Degenerate("start vector must be nonnegative and nonzero".into()));
    }
    let total = weighted_l1(&x, nc, volume, &ones);
    x.iter_mut().for_each(|v| *v /= total);

    let mut change = f64::INFINITY;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut y = factor.solve(&x)?;
        let s = weighted_l1(&y, nc, volume, &ones);
        y.iter_mut().for_each(|v| *v /= s);
        if let Some((index, &value)) = y.iter().enumerate().find(|(_, v)| **v < -1e-13) {
            return Err(Error::Irreducible { index, value });
        }
        change = y
            .iter()
            .zip(&x)
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>()
            * volume;
        x = y;
        if change <= opts.tol {
            break;
        }
    }
    if change > opts.tol {
        let r = op.apply(&x).into_iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        return Err(Error::NonConvergence {
            iterations,
            last_change: change,
            residual: r,
        });
    }
    if let Some((index, &value)) = x.iter().enumerate().find(|(_, v)| **v <= 0.0) {
        return Err(Error::Irreducible { index, value });
    }

    let weights: Vec<f64> = match opts.normalization {
        Normalization::Total => ones,
        Normalization::Weighted => alphas.iter().map(|a| 1.0 / a).collect(),
    };
    let s = weighted_l1(&x, nc, volume, &weights);
    x.iter_mut().for_each(|v| *v /= s);
    let residual = op.apply(&x).into_iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let mut state = State::new(n, nc, x, 0.0)?;
    state.gauge = Gauge::Physical;
    Ok(StationaryState {
        state,
        residual,
        normalization: NormalizationRecord {
            kind: opts.normalization,
            value: 1.0,
        },
        iterations,
    })
}

pub fn solve_null_vector(op: &SystemOperator, opts: &NullVectorOptions) -> Result<StationaryState> {
    inverse_iteration(op, op.alphas(), opts)
}

/// `max |wᵀA|` for `w = (volume/αᵢ)` blockwise, the discrete counterpart of
/// the constant adjoint solution.
pub fn adjoint_null_check(op: &SystemOperator) -> f64 {
    left_residual(op.matrix(), &op.left_weights())
}
