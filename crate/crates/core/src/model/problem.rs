use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::params::Params;
use super::{CouplingMatrix, Grid, PotentialSpec, ProfileSpec, Reaction, ReactionSpec, State};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SpeciesSpec {
    pub sigma: f64,
    pub alpha: f64,
    pub potential: PotentialSpec,
    pub reaction: ReactionSpec,
}

impl SpeciesSpec {
    pub fn new(sigma: f64, alpha: f64, potential: PotentialSpec) -> Self {
        SpeciesSpec {
            sigma,
            alpha,
            potential,
            reaction: ReactionSpec::linear(),
        }
    }

    pub fn with_reaction(mut self, reaction: ReactionSpec) -> Self {
        self.reaction = reaction;
        self
    }
}

/// Initial datum of one species.
///
/// Besides every registered profile kind, two cell-level kinds exist:
/// `random` (uniform on `[lo, hi]` per cell, seeded) and `cells` (explicit
/// per-cell `values`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub kind: String,
    #[serde(default)]
    pub params: Params,
}

impl InitialSpec {
    pub fn profile(p: ProfileSpec) -> Self {
        InitialSpec {
            kind: p.kind,
            params: p.params,
        }
    }

    pub fn constant(value: f64) -> Self {
        InitialSpec::profile(ProfileSpec::constant(value))
    }

    pub fn random(lo: f64, hi: f64, seed: u64) -> Self {
        InitialSpec {
            kind: "random".into(),
            params: Params::new()
                .with("lo", lo)
                .with("hi", hi)
                .with("seed", seed as f64),
        }
    }

    pub fn cells(values: Vec<f64>) -> Self {
        InitialSpec {
            kind: "cells".into(),
            params: Params::new().with("values", values),
        }
    }

    /// Offset the seed of a `random` datum; other kinds are unchanged.
    pub fn reseeded(&self, seed: u64) -> Self {
        let mut out = self.clone();
        if out.kind == "random" {
            let base = match out.params.0.get("seed") {
                Some(super::ParamValue::Number(s)) => *s as u64,
                _ => 0,
            };
            out.params = out.params.with("seed", base.wrapping_add(seed) as f64);
        }
        out
    }

    pub fn sample(&self, grid: &Grid) -> Result<Vec<f64>> {
        match self.kind.as_str() {
            "random" => {
                let mut p = self.params.reader("random");
                let lo = p.number("lo", Some(0.0))?;
                let hi = p.number("hi", Some(1.0))?;
                let seed = p.index("seed", 0)? as u64;
                p.finish()?;
                if hi < lo {
                    return Err(Error::param("random", "`hi` must be >= `lo`"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok((0..grid.n_cells())
                    .map(|_| lo + (hi - lo) * rng.gen::<f64>())
                    .collect())
            }
            "cells" => {
                let mut p = self.params.reader("cells");
                let values = p.list("values")?;
                p.finish()?;
                if values.len() != grid.n_cells() {
                    return Err(Error::param(
                        "cells",
                        format!("{} values for {} cells", values.len(), grid.n_cells()),
                    ));
                }
                Ok(values)
            }
            _ => ProfileSpec::new(&self.kind, self.params.clone())
                .build()?
                .sample(grid),
        }
    }
}

/// The full drift-diffusion-reaction problem.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub grid: Grid,
    pub species: Vec<SpeciesSpec>,
    pub coupling: CouplingMatrix,
    pub initial: Vec<InitialSpec>,
}

impl ProblemSpec {
    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.species.iter().map(|s| s.alpha).collect()
    }

    /// Potential of every species sampled at cell centres.
    pub fn sampled_potentials(&self) -> Result<Vec<Vec<f64>>> {
        self.species
            .iter()
            .map(|s| s.potential.build()?.sample(&self.grid))
            .collect()
    }

    pub fn reactions(&self) -> Result<Vec<Arc<dyn Reaction>>> {
        self.species.iter().map(|s| s.reaction.build()).collect()
    }

    /// Whether every reaction is `r(s) = s`.
    pub fn is_linear(&self) -> Result<bool> {
        Ok(self.reactions()?.iter().all(|r| r.is_linear()))
    }

    pub fn initial_state(&self) -> Result<State> {
        self.state_from(&self.initial)
    }

    /// Sample a list of per-species initial data on this grid.
    pub fn state_from(&self, data: &[InitialSpec]) -> Result<State> {
        if data.len() != self.n_species() {
            return Err(Error::Dimension(format!(
                "{} initial data for {} species",
                data.len(),
                self.n_species()
            )));
        }
        let fields = data
            .iter()
            .map(|d| d.sample(&self.grid))
            .collect::<Result<Vec<_>>>()?;
        State::from_species(fields, 0.0)
    }

    pub fn empty_state(&self) -> State {
        State::zeros(self.n_species(), self.grid.n_cells())
    }
}
