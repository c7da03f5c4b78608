//! Time stepping: backward Euler for linear systems, explicit-reaction /
//! implicit-transport splitting for nonlinear ones.

mod run;
mod step;

pub use run::{build_stepper, run, run_from, Diagnostics, Snapshot, StepConfig, Trajectory};
pub use step::{
    imex_dt_max, step_imex, step_linear_implicit, ImexStepper, ImplicitStepper, TimeStepper,
    NEGATIVE_TRAP,
};
