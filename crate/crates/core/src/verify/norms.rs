use crate::error::{Error, Result};
use crate::model::{Gauge, ProblemSpec, State};

fn check(state: &State, spec: &ProblemSpec) -> Result<()> {
    if state.gauge != Gauge::Physical {
        return Err(Error::Gauge {
            expected: Gauge::Physical.name(),
            found: state.gauge.name(),
        });
    }
    if state.n_species() != spec.n_species() || state.n_cells() != spec.grid.n_cells() {
        return Err(Error::Dimension(format!(
            "state is {}x{}, problem is {}x{}",
            state.n_species(),
            state.n_cells(),
            spec.n_species(),
            spec.grid.n_cells()
        )));
    }
    Ok(())
}

/// `Σᵢ (1/αᵢ) ∫ uᵢ`, the conserved quantity.
pub fn weighted_mass(state: &State, spec: &ProblemSpec) -> Result<f64> {
    check(state, spec)?;
    Ok((0..spec.n_species())
        .map(|i| spec.grid.integrate(state.species(i)) / spec.species[i].alpha)
        .sum())
}

/// `Σᵢ (1/αᵢ) ‖aᵢ − bᵢ‖_{L¹}`, the norm the flow contracts.
pub fn weighted_l1_distance(a: &State, b: &State, spec: &ProblemSpec) -> Result<f64> {
    a.same_shape(b)?;
    check(a, spec)?;
    check(b, spec)?;
    let nc = spec.grid.n_cells();
    let vol = spec.grid.cell_volume();
    Ok((0..spec.n_species())
        .map(|i| {
            let s: f64 = a.values()[i * nc..(i + 1) * nc]
                .iter()
                .zip(&b.values()[i * nc..(i + 1) * nc])
                .map(|(x, y)| (x - y).abs())
                .sum();
            vol * s / spec.species[i].alpha
        })
        .sum())
}

/// Unweighted `∫ |uᵢ|` per species.
pub fn species_l1(state: &State, spec: &ProblemSpec) -> Vec<f64> {
    (0..state.n_species())
        .map(|i| spec.grid.cell_volume() * state.species(i).iter().map(|v| v.abs()).sum::<f64>())
        .collect()
}

pub fn species_min(state: &State) -> Vec<f64> {
    (0..state.n_species())
        .map(|i| state.species(i).iter().copied().fold(f64::INFINITY, f64::min))
        .collect()
}
