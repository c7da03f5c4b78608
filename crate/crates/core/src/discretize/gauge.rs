//! The change of variables `wᵢ = uᵢ·exp(ψᵢ/σᵢ)` as an exact diagonal
//! similarity of the discrete generator.

use nalgebra_sparse::CsrMatrix;

use super::operator::BlockOperator;
use crate::error::{Error, Result};
use crate::linalg::sparse::csr_from_triplets;
use crate::model::{Gauge, Grid, ProblemSpec, State};

/// Largest admissible `|ψ/σ|` before `exp` over/underflows.
pub const GAUGE_EXPONENT_LIMIT: f64 = 700.0;

/// The diagonal of `D`, species-major: `exp(ψᵢ(x_c)/σᵢ)`.
pub fn gauge_factors(spec: &ProblemSpec) -> Result<Vec<f64>> {
    let psi = spec.sampled_potentials()?;
    let mut out = Vec::with_capacity(spec.n_species() * spec.grid.n_cells());
    for (s, samples) in spec.species.iter().zip(&psi) {
        for &p in samples {
            let e = p / s.sigma;
            if !(e.abs() <= GAUGE_EXPONENT_LIMIT) {
                return Err(Error::Scaling {
                    value: e.abs(),
                    limit: GAUGE_EXPONENT_LIMIT,
                });
            }
            out.push(e.exp());
        }
    }
    Ok(out)
}

/// `D·A·D⁻¹`, the generator acting on the Neumann-gauge variables.
#[derive(Clone, Debug)]
pub struct NeumannOperator {
    grid: Grid,
    n_species: usize,
    matrix: CsrMatrix<f64>,
}

impl BlockOperator for NeumannOperator {
    fn matrix(&self) -> &CsrMatrix<f64> {
        &self.matrix
    }
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn n_species(&self) -> usize {
        self.n_species
    }
}

/// Conjugate a system operator (all species) or a single species' transport
/// operator (`species = Some(i)`) into the Neumann gauge.
pub fn conjugate_to_neumann<O: BlockOperator>(
    op: &O,
    spec: &ProblemSpec,
    species: Option<usize>,
) -> Result<NeumannOperator> {
    let all = gauge_factors(spec)?;
    let nc = spec.grid.n_cells();
    let d: &[f64] = match species {
        Some(i) => &all[i * nc..(i + 1) * nc],
        None => &all,
    };
    if d.len() != op.matrix().nrows() {
        return Err(Error::Dimension(format!(
            "operator has {} rows, gauge has {} factors",
            op.matrix().nrows(),
            d.len()
        )));
    }
    let triplets: Vec<_> = op
        .matrix()
        .triplet_iter()
        .map(|(i, j, &v)| (i, j, d[i] * v / d[j]))
        .collect();
    Ok(NeumannOperator {
        grid: op.grid().clone(),
        n_species: op.n_species(),
        matrix: csr_from_triplets(d.len(), &triplets),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaugeDirection {
    ToNeumann,
    ToPhysical,
}

pub fn gauge_transform(state: &State, spec: &ProblemSpec, direction: GaugeDirection) -> Result<State> {
    let (from, to) = match direction {
        GaugeDirection::ToNeumann => (Gauge::Physical, Gauge::Neumann),
        GaugeDirection::ToPhysical => (Gauge::Neumann, Gauge::Physical),
    };
    if state.gauge != from {
        return Err(Error::Gauge {
            expected: from.name(),
            found: state.gauge.name(),
        });
    }
    let d = gauge_factors(spec)?;
    if d.len() != state.values().len() {
        return Err(Error::Dimension("state does not match the problem".into()));
    }
    let values = state
        .values()
        .iter()
        .zip(&d)
        .map(|(v, f)| match direction {
            GaugeDirection::ToNeumann => v * f,
            GaugeDirection::ToPhysical => v / f,
        })
        .collect();
    let mut out = state.with_values(values);
    out.gauge = to;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{assemble_system, assemble_transport};
    use crate::linalg::sparse::{matvec, to_dense};
    use crate::model::{CouplingMatrix, InitialSpec, ProfileSpec, SpeciesSpec};

    fn spec(potential: ProfileSpec, sigma: f64) -> ProblemSpec {
        ProblemSpec {
            grid: Grid::interval(0.0, 1.0, 8).unwrap(),
            species: vec![SpeciesSpec::new(sigma, 1.0, potential)],
            coupling: CouplingMatrix::zeros(1),
            initial: vec![InitialSpec::constant(1.0)],
        }
    }

    #[test]
    fn zero_potential_leaves_operator_unchanged() {
        let s = spec(ProfileSpec::zero(), 1.0);
        let a = assemble_system(&s).unwrap();
        let w = conjugate_to_neumann(&a, &s, None).unwrap();
        assert_eq!(to_dense(a.matrix()), to_dense(w.matrix()));
    }

    #[test]
    fn constants_are_neumann_null_vectors() {
        let s = spec(ProfileSpec::sawtooth(1.5, 0.5, 0.1), 0.8);
        let tr = assemble_transport(&s.grid, 0.8, &s.species[0].potential).unwrap();
        let w = conjugate_to_neumann(&tr, &s, Some(0)).unwrap();
        let r = matvec(w.matrix(), &vec![1.0; 8]);
        let scale = crate::linalg::sparse::max_abs(w.matrix());
        assert!(r.iter().all(|v| v.abs() <= 1e-11 * scale), "{r:?}");
    }

    #[test]
    fn state_transform_and_guard() {
        let s = spec(ProfileSpec::linear(1.0), 1.0);
        let u = s.initial_state().unwrap();
        let w = gauge_transform(&u, &s, GaugeDirection::ToNeumann).unwrap();
        for (c, v) in w.values().iter().enumerate() {
            let x = s.grid.axis(0).center(c);
            assert!((v - x.exp()).abs() <= 1e-15 * x.exp());
        }
        assert!(gauge_transform(&u, &s, GaugeDirection::ToPhysical).is_err());
        let back = gauge_transform(&w, &s, GaugeDirection::ToPhysical).unwrap();
        for (a, b) in back.values().iter().zip(u.values()) {
            assert!((a - b).abs() <= 1e-14 * b.abs());
        }
        let steep = spec(ProfileSpec::linear(2000.0), 1.0);
        assert!(matches!(gauge_factors(&steep), Err(Error::Scaling { .. })));
    }
}
