#![allow(dead_code)]

use motorflux::model::{
    CouplingMatrix, Grid, InitialSpec, ProblemSpec, ProfileSpec, ReactionSpec, SpeciesSpec, State,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_potential(rng: &mut ChaCha8Rng) -> ProfileSpec {
    match rng.gen_range(0..4) {
        0 => ProfileSpec::zero(),
        1 => ProfileSpec::linear(rng.gen_range(-1.0..1.0)),
        2 => ProfileSpec::cosine(rng.gen_range(0.1..1.0), 1.0),
        _ => ProfileSpec::sawtooth(rng.gen_range(0.2..1.5), 1.0, rng.gen_range(0.0..1.0)),
    }
}

/// Metzler matrix with zero column sums and every off-diagonal rate positive.
pub fn random_coupling(rng: &mut ChaCha8Rng, n: usize) -> CouplingMatrix {
    let mut rows = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut total = 0.0;
        for (i, row) in rows.iter_mut().enumerate() {
            if i != j {
                row[j] = rng.gen_range(0.1..2.0);
                total += row[j];
            }
        }
        rows[j][j] = -total;
    }
    CouplingMatrix::from_rows(rows).unwrap()
}

/// Linear problem with mixed potentials and random nonnegative initial data.
pub fn random_linear(seed: u64, n: usize, cells: usize) -> ProblemSpec {
    let mut r = rng(seed);
    let species = (0..n)
        .map(|_| {
            SpeciesSpec::new(
                r.gen_range(0.2..1.5),
                r.gen_range(0.5..2.0),
                random_potential(&mut r),
            )
        })
        .collect();
    let coupling = if n == 1 {
        CouplingMatrix::zeros(1)
    } else {
        random_coupling(&mut r, n)
    };
    let initial = (0..n)
        .map(|i| InitialSpec::random(0.0, 2.0, seed.wrapping_mul(31).wrapping_add(i as u64)))
        .collect();
    ProblemSpec {
        grid: Grid::interval(0.0, 1.0, cells).unwrap(),
        species,
        coupling,
        initial,
    }
}

/// Two-state motor: shifted sawtooth potentials and exchange rate 1.
pub fn motor(cells: usize) -> ProblemSpec {
    ProblemSpec {
        grid: Grid::interval(0.0, 1.0, cells).unwrap(),
        species: vec![
            SpeciesSpec::new(0.1, 1.0, ProfileSpec::sawtooth(1.0, 1.0, 0.0)),
            SpeciesSpec::new(0.1, 1.0, ProfileSpec::sawtooth(1.0, 1.0, 0.5)),
        ],
        coupling: CouplingMatrix::exchange(1.0),
        initial: vec![InitialSpec::random(0.5, 1.5, 1), InitialSpec::random(0.5, 1.5, 2)],
    }
}

/// `u_t = u_xx − (u² − v)`, `v_t = 0.5 v_xx + (u² − v)` with data of mass 2.
pub fn reversible(cells: usize) -> ProblemSpec {
    ProblemSpec {
        grid: Grid::interval(0.0, 1.0, cells).unwrap(),
        species: vec![
            SpeciesSpec::new(1.0, 1.0, ProfileSpec::zero()).with_reaction(ReactionSpec::power(2.0)),
            SpeciesSpec::new(0.5, 1.0, ProfileSpec::zero()),
        ],
        coupling: CouplingMatrix::exchange(1.0),
        initial: vec![
            InitialSpec::profile(ProfileSpec::cosine(0.5, 1.0).with_param("offset", 1.0)),
            InitialSpec::profile(ProfileSpec::cosine(-0.5, 1.0).with_param("offset", 1.0)),
        ],
    }
}

pub fn random_state(spec: &ProblemSpec, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> State {
    let len = spec.n_species() * spec.grid.n_cells();
    let values = (0..len).map(|_| rng.gen_range(lo..hi)).collect();
    State::new(spec.n_species(), spec.grid.n_cells(), values, 0.0).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
