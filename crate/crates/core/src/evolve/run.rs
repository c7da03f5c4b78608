use serde::{Deserialize, Serialize};

use super::step::{ImexStepper, ImplicitStepper, TimeStepper};
use crate::discretize::{assemble_system, assemble_transports};
use crate::error::{Error, Result};
use crate::linalg::SolverSettings;
use crate::model::{validate, ProblemSpec, State};
use crate::verify::{species_l1, species_min, weighted_mass};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Keep every `stride`-th step (the final step is always kept).
    pub stride: usize,
    pub solver: SolverSettings,
}

impl StepConfig {
    pub fn new(dt: f64, t_end: f64, stride: usize) -> Self {
        StepConfig {
            dt,
            t_end,
            stride,
            solver: SolverSettings::default(),
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Invalid(format!(
                "t_end must be nonnegative, got {}",
                self.t_end
            )));
        }
        if self.stride == 0 {
            return Err(Error::Invalid("snapshot stride must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of steps and the length of the last one. A `t_end` within
    /// round-off of a multiple of `dt` is taken as that multiple.
    pub fn schedule(&self) -> (usize, f64) {
        if self.t_end == 0.0 {
            return (0, self.dt);
        }
        let ratio = self.t_end / self.dt;
        let nearest = ratio.round();
        if nearest >= 1.0 && (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) {
            (nearest as usize, self.dt)
        } else {
            let n = ratio.ceil() as usize;
            (n, self.t_end - (n - 1) as f64 * self.dt)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub weighted_mass: f64,
    pub min: Vec<f64>,
    pub l1: Vec<f64>,
}

impl Diagnostics {
    pub fn of(state: &State, spec: &ProblemSpec) -> Result<Self> {
        Ok(Diagnostics {
            weighted_mass: weighted_mass(state, spec)?,
            min: species_min(state),
            l1: species_l1(state, spec),
        })
    }
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub step: usize,
    pub state: State,
    pub diagnostics: Diagnostics,
}

impl Snapshot {
    pub fn time(&self) -> f64 {
        self.state.time
    }
}

#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(Snapshot::time).collect()
    }

    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("a trajectory holds at least the initial state")
    }

    pub fn masses(&self) -> Vec<f64> {
        self.snapshots
            .iter()
            .map(|s| s.diagnostics.weighted_mass)
            .collect()
    }

    /// Largest `|m(t) − m(0)| / |m(0)|` (absolute when `m(0) = 0`).
    pub fn mass_drift(&self) -> f64 {
        let m = self.masses();
        let m0 = m[0];
        let scale = if m0 == 0.0 { 1.0 } else { m0.abs() };
        m.iter().map(|x| (x - m0).abs() / scale).fold(0.0, f64::max)
    }
}

/// Pick the stepper for a problem: backward Euler on the assembled system
/// when every reaction is linear, IMEX otherwise.
pub fn build_stepper(
    spec: &ProblemSpec,
    dt: f64,
    solver: &SolverSettings,
) -> Result<Box<dyn TimeStepper>> {
    if spec.is_linear()? {
        let op = assemble_system(spec)?;
        Ok(Box::new(ImplicitStepper::new(&op, dt, solver)?))
    } else {
        let ops = assemble_transports(spec)?;
        Ok(Box::new(ImexStepper::new(spec, &ops, dt, solver)?))
    }
}

pub fn run(spec: &ProblemSpec, cfg: &StepConfig) -> Result<Trajectory> {
    run_from(spec, spec.initial_state()?, cfg)
}

/// Evolve `initial` (instead of the problem's own initial data).
pub fn run_from(spec: &ProblemSpec, initial: State, cfg: &StepConfig) -> Result<Trajectory> {
    validate(spec).into_result()?;
    cfg.check()?;
    if initial.n_species() != spec.n_species() || initial.n_cells() != spec.grid.n_cells() {
        return Err(Error::Dimension("initial state does not match the problem".into()));
    }
    let (n_steps, last_dt) = cfg.schedule();
    let mut state = initial;
    state.time = 0.0;
    let mut traj = Trajectory {
        snapshots: vec![Snapshot {
            step: 0,
            diagnostics: Diagnostics::of(&state, spec)?,
            state: state.clone(),
        }],
    };
    if n_steps == 0 {
        return Ok(traj);
    }
    let stepper = build_stepper(spec, cfg.dt, &cfg.solver)?;
    let last = if last_dt != cfg.dt {
        Some(build_stepper(spec, last_dt, &cfg.solver)?)
    } else {
        None
    };
    for k in 1..=n_steps {
        let s = match (&last, k == n_steps) {
            (Some(l), true) => l.as_ref(),
            _ => stepper.as_ref(),
        };
        state = s.step(&state).map_err(|e| Error::AtTime {
            time: state.time,
            source: Box::new(e),
        })?;
        // Recompute rather than accumulate to keep times exact multiples.
        state.time = if k == n_steps { cfg.t_end } else { k as f64 * cfg.dt };
        if k % cfg.stride == 0 || k == n_steps {
            traj.snapshots.push(Snapshot {
                step: k,
                diagnostics: Diagnostics::of(&state, spec)?,
                state: state.clone(),
            });
        }
    }
    Ok(traj)
}
