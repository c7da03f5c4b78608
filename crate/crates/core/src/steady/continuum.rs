//! The two explicit families of stationary states: constant pairs of the
//! reversible reaction and the ray through a linear null vector.

use std::sync::Arc;

use super::null_vector::{NormalizationRecord, StationaryState};
use crate::error::{Error, Result};
use crate::model::{ProblemSpec, Reaction, State};
use crate::verify::weighted_mass;

/// `u_t = d₁Δu − αk(r_A(u) − r_B(v))`, `v_t = d₂Δv + βk(r_A(u) − r_B(v))`.
#[derive(Clone, Debug)]
pub struct ReversiblePair {
    pub r_a: Arc<dyn Reaction>,
    pub r_b: Arc<dyn Reaction>,
    pub alpha: f64,
    pub beta: f64,
}

impl ReversiblePair {
    /// Read the pair off a two-species problem with exchange coupling
    /// `k·[[−1, 1], [1, −1]]`.
    pub fn from_problem(spec: &ProblemSpec) -> Result<Self> {
        if spec.n_species() != 2 {
            return Err(Error::Unsupported(format!(
                "reversible pair needs 2 species, got {}",
                spec.n_species()
            )));
        }
        let c = &spec.coupling;
        let k = c.get(0, 1);
        let exchange = k > 0.0 && c.get(1, 0) == k && c.get(0, 0) == -k && c.get(1, 1) == -k;
        if !exchange {
            return Err(Error::Unsupported(
                "reversible pair needs coupling k·[[-1, 1], [1, -1]] with k > 0".into(),
            ));
        }
        let r = spec.reactions()?;
        Ok(ReversiblePair {
            r_a: r[0].clone(),
            r_b: r[1].clone(),
            alpha: spec.species[0].alpha,
            beta: spec.species[1].alpha,
        })
    }

    fn partner(&self, a: f64) -> Result<f64> {
        self.r_b.inverse(self.r_a.eval(a)?)
    }

    /// `(1/|Ω|) ∫ (u/α + v/β)` of a state.
    pub fn mass_density(&self, state: &State, spec: &ProblemSpec) -> Result<f64> {
        Ok(weighted_mass(state, spec)? / spec.grid.total_volume())
    }
}

/// The constant stationary pair `(a, b)` with `r_A(a) = r_B(b)` and
/// `a/α + b/β = mass`.
///
/// `g(a) = a/α + r_B⁻¹(r_A(a))/β − mass` is strictly increasing, so bisection
/// on a doubling bracket finds the unique root.
pub fn reversible_pair(mass: f64, pair: &ReversiblePair) -> Result<(f64, f64)> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::Degenerate(format!("mass must be positive, got {mass}")));
    }
    let g = |a: f64| -> Result<f64> { Ok(a / pair.alpha + pair.partner(a)? / pair.beta - mass) };
    let mut lo = 0.0;
    let mut hi = 1.0;
    while g(hi)? <= 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Degenerate("could not bracket the constant pair".into()));
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = g(mid)?;
        if v == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Of the two bracket ends, take the one with the smaller residual.
    let a = if g(lo)?.abs() <= g(hi)?.abs() { lo } else { hi };
    Ok((a, pair.partner(a)?))
}

/// Uniform state holding the constant pair, as a stationary state whose
/// residual is `|r_A(a) − r_B(b)|`.
pub fn constant_pair_state(a: f64, b: f64, pair: &ReversiblePair, spec: &ProblemSpec) -> Result<StationaryState> {
    let nc = spec.grid.n_cells();
    let state = State::from_species(vec![vec![a; nc], vec![b; nc]], 0.0)?;
    let residual = (pair.r_a.eval(a)? - pair.r_b.eval(b)?).abs();
    let mass = weighted_mass(&state, spec)?;
    Ok(StationaryState {
        state,
        residual,
        normalization: NormalizationRecord {
            kind: super::Normalization::Weighted,
            value: mass,
        },
        iterations: 0,
    })
}

/// `{c·v : c > 0}` for a linear stationary state `v`.
#[derive(Clone, Debug)]
pub struct StationaryRay {
    pub base: StationaryState,
}

impl StationaryRay {
    pub fn new(base: StationaryState) -> Self {
        StationaryRay { base }
    }

    pub fn member(&self, c: f64) -> StationaryState {
        StationaryState {
            state: self.base.state.scaled(c),
            residual: self.base.residual * c.abs(),
            normalization: NormalizationRecord {
                kind: self.base.normalization.kind,
                value: self.base.normalization.value * c,
            },
            iterations: self.base.iterations,
        }
    }
}

/// The member of the ray with the same weighted mass as `u0`, returned with
/// its scale factor.
pub fn project_onto_ray(u0: &State, ray: &StationaryRay, spec: &ProblemSpec) -> Result<(f64, StationaryState)> {
    let m0 = weighted_mass(u0, spec)?;
    if !(m0 > 0.0) {
        return Err(Error::Degenerate(format!(
            "initial data has weighted mass {m0}; nothing to project"
        )));
    }
    let mv = weighted_mass(&ray.base.state, spec)?;
    if !(mv > 0.0) {
        return Err(Error::Degenerate("ray base has no mass".into()));
    }
    let c = m0 / mv;
    Ok((c, ray.member(c)))
}
