use std::sync::Arc;

use rayon::prelude::*;

use crate::discretize::{BlockOperator, SystemOperator, TransportOperator};
use crate::error::{Error, Result};
use crate::linalg::sparse::shifted;
use crate::linalg::{Factorized, SolverSettings};
use crate::model::{CouplingMatrix, ProblemSpec, Reaction, State};

/// Values down to this are round-off, not sign changes.
pub const NEGATIVE_TRAP: f64 = -1e-13;

/// One time step of a fixed size.
pub trait TimeStepper: Send + Sync {
    fn name(&self) -> &'static str;
    fn dt(&self) -> f64;
    fn step(&self, state: &State) -> Result<State>;
}

/// Backward Euler for the assembled linear system: `(I − dt·A)u⁺ = u`.
///
/// `I − dt·A` is a nonsingular M-matrix for every `dt > 0`, so the step maps
/// nonnegative states to nonnegative states and keeps `wᵀu` fixed for the
/// left null vector `w` of `A`.
pub struct ImplicitStepper {
    dt: f64,
    factor: Box<dyn Factorized>,
}

impl ImplicitStepper {
    pub fn new(op: &SystemOperator, dt: f64, solver: &SolverSettings) -> Result<Self> {
        check_dt(dt)?;
        let m = shifted(op.matrix(), 1.0, -dt);
        Ok(ImplicitStepper {
            dt,
            factor: solver.prepare(&m, &op.layout())?,
        })
    }
}

impl TimeStepper for ImplicitStepper {
    fn name(&self) -> &'static str {
        "implicit"
    }
    fn dt(&self) -> f64 {
        self.dt
    }
    fn step(&self, state: &State) -> Result<State> {
        let mut next = state.with_values(self.factor.solve(state.values())?);
        next.time = state.time + self.dt;
        Ok(next)
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::Invalid(format!("time step must be positive, got {dt}")))
    }
}

pub fn step_linear_implicit(state: &State, op: &SystemOperator, dt: f64) -> Result<State> {
    ImplicitStepper::new(op, dt, &SolverSettings::default())?.step(state)
}

/// Largest step keeping the explicit reaction stage nonnegative:
/// `min over i of 1/(αᵢ·|λᵢᵢ|·Lᵢ)` with `Lᵢ` the Lipschitz bound of `rᵢ` on
/// `[0, max u]`.
pub fn imex_dt_max(
    state: &State,
    alphas: &[f64],
    coupling: &CouplingMatrix,
    reactions: &[Arc<dyn Reaction>],
) -> f64 {
    let upper = state.values().iter().copied().fold(0.0, f64::max);
    (0..alphas.len())
        .map(|i| {
            let rate = alphas[i] * coupling.get(i, i).abs() * reactions[i].lipschitz(upper);
            if rate > 0.0 {
                1.0 / rate
            } else {
                f64::INFINITY
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Explicit reactions followed by implicit transport, species by species.
pub struct ImexStepper {
    dt: f64,
    alphas: Vec<f64>,
    coupling: CouplingMatrix,
    reactions: Vec<Arc<dyn Reaction>>,
    factors: Vec<Box<dyn Factorized>>,
}

impl ImexStepper {
    pub fn new(
        spec: &ProblemSpec,
        operators: &[TransportOperator],
        dt: f64,
        solver: &SolverSettings,
    ) -> Result<Self> {
        check_dt(dt)?;
        if operators.len() != spec.n_species() {
            return Err(Error::Dimension(format!(
                "{} transport operators for {} species",
                operators.len(),
                spec.n_species()
            )));
        }
        let factors = operators
            .par_iter()
            .map(|op| solver.prepare(&shifted(op.matrix(), 1.0, -dt), &op.layout()))
            .collect::<Result<Vec<_>>>()?;
        Ok(ImexStepper {
            dt,
            alphas: spec.alphas(),
            coupling: spec.coupling.clone(),
            reactions: spec.reactions()?,
            factors,
        })
    }

    pub fn dt_max(&self, state: &State) -> f64 {
        imex_dt_max(state, &self.alphas, &self.coupling, &self.reactions)
    }

    /// Stage 1: `ũᵢ = uᵢ + dt·αᵢ Σⱼ λᵢⱼ rⱼ(uⱼ)`.
    pub fn react(&self, state: &State) -> Result<State> {
        let n = self.alphas.len();
        let nc = state.n_cells();
        let mut rates = Vec::with_capacity(n);
        for j in 0..n {
            let r = state
                .species(j)
                .iter()
                .map(|&u| {
                    if u < NEGATIVE_TRAP {
                        Err(Error::Invariant(format!(
                            "species {} has negative value {u:e}",
                            j + 1
                        )))
                    } else {
                        self.reactions[j].eval(u.max(0.0))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rates.push(r);
        }
        let mut out = state.clone();
        for i in 0..n {
            let scale = self.dt * self.alphas[i];
            let target = out.species_mut(i);
            for c in 0..nc {
                let mut acc = 0.0;
                for (j, r) in rates.iter().enumerate() {
                    let l = self.coupling.get(i, j);
                    if l != 0.0 {
                        acc += l * r[c];
                    }
                }
                target[c] += scale * acc;
            }
        }
        if let Some((k, v)) = out
            .values()
            .iter()
            .enumerate()
            .find(|(_, v)| **v < NEGATIVE_TRAP)
        {
            return Err(Error::Invariant(format!(
                "reaction stage produced {v:e} at index {k}"
            )));
        }
        Ok(out)
    }
}

impl TimeStepper for ImexStepper {
    fn name(&self) -> &'static str {
        "imex"
    }
    fn dt(&self) -> f64 {
        self.dt
    }
    fn step(&self, state: &State) -> Result<State> {
        let dt_max = self.dt_max(state);
        if self.dt > dt_max {
            return Err(Error::StepSize {
                dt: self.dt,
                dt_max,
            });
        }
        let reacted = self.react(state)?;
        let n = self.alphas.len();
        let fields = (0..n)
            .into_par_iter()
            .map(|i| self.factors[i].solve(reacted.species(i)))
            .collect::<Result<Vec<_>>>()?;
        let mut next = State::from_species(fields, state.time + self.dt)?;
        next.gauge = state.gauge;
        Ok(next)
    }
}

pub fn step_imex(
    state: &State,
    spec: &ProblemSpec,
    operators: &[TransportOperator],
    dt: f64,
) -> Result<State> {
    ImexStepper::new(spec, operators, dt, &SolverSettings::default())?.step(state)
}
