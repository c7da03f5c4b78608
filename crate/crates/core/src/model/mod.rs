//! Domain types, the profile and reaction registries, and validation of the
//! standing hypotheses.

mod coupling;
mod grid;
mod params;
mod problem;
mod profile;
mod reaction;
mod state;
mod validate;

pub use coupling::{CouplingMatrix, COLUMN_SUM_TOL};
pub use grid::{Axis, Grid};
pub use params::{ParamReader, ParamValue, Params};
pub use problem::{InitialSpec, ProblemSpec, SpeciesSpec};
pub use profile::{eval_potential, PotentialSpec, Profile, ProfileRegistry, ProfileSpec, SmoothSawtooth};
pub use reaction::{eval_reaction, Reaction, ReactionRegistry, ReactionSpec};
pub use state::{Gauge, State};
pub use validate::{validate, Hypothesis, ValidationReport, Violation};
