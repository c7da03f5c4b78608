//! Run configuration: a single TOML file with strict keys.
//!
//! ```toml
//! [domain]
//! x = [0.0, 1.0]
//! n = 64
//! # y = [0.0, 1.0]   # optional second axis
//! # ny = 32
//!
//! [species.1]
//! sigma = 1.0
//! alpha = 1.0
//! potential = { kind = "sawtooth_smoothed", params = { amplitude = 1.0 } }
//! reaction = { kind = "linear" }
//! initial = { kind = "random", params = { lo = 0.5, hi = 1.5, seed = 7 } }
//!
//! [coupling]
//! rows = [[0.0]]
//!
//! [time]
//! dt = 0.01
//! t_end = 1.0
//! stride = 10
//!
//! [output]
//! dir = "out"
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::StepConfig;
use crate::linalg::SolverSettings;
use crate::model::{
    validate, CouplingMatrix, Grid, InitialSpec, ProblemSpec, ProfileSpec, ReactionSpec,
    SpeciesSpec,
};
use crate::steady::{Normalization, NullVectorOptions};
use crate::verify::{CheckContext, CONVERGENCE_TOL, STRICT_WINDOW};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub x: [f64; 2],
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
}

fn default_initial() -> InitialSpec {
    InitialSpec::constant(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesSection {
    pub sigma: f64,
    pub alpha: f64,
    #[serde(default = "ProfileSpec::zero")]
    pub potential: ProfileSpec,
    #[serde(default)]
    pub reaction: ReactionSpec,
    #[serde(default = "default_initial")]
    pub initial: InitialSpec,
    /// Second initial datum, used by the two-trajectory checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_alt: Option<InitialSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    pub rows: CouplingMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeSection {
    pub dt: f64,
    pub t_end: f64,
    pub stride: usize,
    pub solver: SolverSettings,
}

impl Default for TimeSection {
    fn default() -> Self {
        TimeSection {
            dt: 0.01,
            t_end: 1.0,
            stride: 1,
            solver: SolverSettings::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: "out".into() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteadyMode {
    /// Linear null vector for linear problems, constant pair otherwise.
    #[default]
    Auto,
    Linear,
    Reversible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SteadySection {
    pub mode: SteadyMode,
    pub tol: f64,
    pub shift_factor: f64,
    pub max_iter: usize,
    pub normalization: Normalization,
    /// Mass density for the constant pair; taken from the initial data when
    /// absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
}

impl Default for SteadySection {
    fn default() -> Self {
        let o = NullVectorOptions::default();
        SteadySection {
            mode: SteadyMode::Auto,
            tol: o.tol,
            shift_factor: o.shift_factor,
            max_iter: o.max_iter,
            normalization: o.normalization,
            mass: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    /// Strict contraction is demanded by this time.
    pub strict_window: f64,
    /// Final distance bound for the convergence check.
    pub threshold: f64,
    /// Step sizes for the oracle comparison; `dt`, `dt/2`, `dt/4` when empty.
    pub oracle_dts: Vec<f64>,
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection {
            strict_window: STRICT_WINDOW,
            threshold: CONVERGENCE_TOL,
            oracle_dts: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainSection,
    pub species: BTreeMap<String, SpeciesSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingSection>,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub steady: SteadySection,
    #[serde(default)]
    pub verify: VerifySection,
}

/// Read, parse and validate a config file.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg = parse_config_str(&text)?;
    cfg.problem()?;
    Ok(cfg)
}

/// Parse without validating the problem.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))
}

impl RunConfig {
    /// Species sections in index order; keys must be `1..=n`.
    fn ordered_species(&self) -> Result<Vec<&SpeciesSection>> {
        if self.species.is_empty() {
            return Err(Error::Config("at least one [species.i] section is required".into()));
        }
        let mut indexed = Vec::with_capacity(self.species.len());
        for (key, s) in &self.species {
            let i: usize = key
                .parse()
                .map_err(|_| Error::Config(format!("species key `{key}` is not a positive integer")))?;
            indexed.push((i, s));
        }
        indexed.sort_by_key(|(i, _)| *i);
        for (k, (i, _)) in indexed.iter().enumerate() {
            if *i != k + 1 {
                return Err(Error::Config(format!(
                    "species must be numbered 1..={}; found [species.{i}]",
                    indexed.len()
                )));
            }
        }
        Ok(indexed.into_iter().map(|(_, s)| s).collect())
    }

    pub fn grid(&self) -> Result<Grid> {
        let d = &self.domain;
        match (d.y, d.ny) {
            (None, None) => Grid::interval(d.x[0], d.x[1], d.n),
            (Some(y), Some(ny)) => Grid::rectangle((d.x[0], d.x[1], d.n), (y[0], y[1], ny)),
            _ => Err(Error::Config("[domain] needs both `y` and `ny` for a second axis".into())),
        }
    }

    /// The validated problem.
    pub fn problem(&self) -> Result<ProblemSpec> {
        let spec = self.problem_unchecked()?;
        validate(&spec).into_result()?;
        Ok(spec)
    }

    fn problem_unchecked(&self) -> Result<ProblemSpec> {
        let species = self.ordered_species()?;
        let coupling = match &self.coupling {
            Some(c) => c.rows.clone(),
            None if species.len() == 1 => CouplingMatrix::zeros(1),
            None => {
                return Err(Error::Config(format!(
                    "[coupling] rows are required for {} species",
                    species.len()
                )))
            }
        };
        Ok(ProblemSpec {
            grid: self.grid()?,
            species: species
                .iter()
                .map(|s| SpeciesSpec {
                    sigma: s.sigma,
                    alpha: s.alpha,
                    potential: s.potential.clone(),
                    reaction: s.reaction.clone(),
                })
                .collect(),
            coupling,
            initial: species.iter().map(|s| s.initial.clone()).collect(),
        })
    }

    /// Per-species second initial data, if every species has one.
    pub fn alternate_initial(&self) -> Result<Option<Vec<InitialSpec>>> {
        let species = self.ordered_species()?;
        let alts: Vec<_> = species.iter().filter_map(|s| s.initial_alt.clone()).collect();
        match alts.len() {
            0 => Ok(None),
            n if n == species.len() => Ok(Some(alts)),
            _ => Err(Error::Config(
                "`initial_alt` must be given for every species or none".into(),
            )),
        }
    }

    pub fn step_config(&self) -> StepConfig {
        StepConfig {
            dt: self.time.dt,
            t_end: self.time.t_end,
            stride: self.time.stride,
            solver: self.time.solver.clone(),
        }
    }

    pub fn null_vector_options(&self) -> NullVectorOptions {
        NullVectorOptions {
            tol: self.steady.tol,
            shift_factor: self.steady.shift_factor,
            max_iter: self.steady.max_iter,
            normalization: self.steady.normalization,
            solver: self.time.solver.clone(),
        }
    }

    pub fn check_context(&self, tol: Option<f64>, seed: u64) -> Result<CheckContext> {
        let mut ctx = CheckContext::new(self.problem()?, self.step_config());
        ctx.alt = self.alternate_initial()?;
        ctx.steady = self.null_vector_options();
        ctx.tol = tol.or(Some(self.verify.threshold));
        ctx.seed = seed;
        ctx.strict_window = self.verify.strict_window;
        Ok(ctx)
    }

    /// Replace the seed of every `random` initial datum, offset by species.
    pub fn with_seed(mut self, seed: u64) -> Self {
        for (k, s) in self.species.values_mut().enumerate() {
            for data in std::iter::once(&mut s.initial).chain(s.initial_alt.as_mut()) {
                if data.kind == "random" {
                    data.params = data
                        .params
                        .clone()
                        .with("seed", seed.wrapping_add(k as u64) as f64);
                }
            }
        }
        self
    }

    /// The configuration with every default written out.
    pub fn effective(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[domain]
x = [0.0, 1.0]
n = 16

[species.1]
sigma = 1.0
alpha = 1.0
"#;

    #[test]
    fn minimal_defaults() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        let spec = cfg.problem().unwrap();
        assert_eq!(spec.n_species(), 1);
        assert_eq!(spec.species[0].potential, ProfileSpec::zero());
        assert_eq!(cfg.time, TimeSection::default());
        assert_eq!(cfg.output.dir, PathBuf::from("out"));
        let echo = cfg.effective();
        assert!(echo.contains("dt = 0.01"), "{echo}");
        assert_eq!(parse_config_str(&echo).unwrap(), cfg);
    }

    #[test]
    fn unknown_key_is_cited() {
        let text = MINIMAL.replace("sigma", "sigmma");
        let err = parse_config_str(&text).unwrap_err().to_string();
        assert!(err.contains("sigmma"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn column_sum_names_hypothesis() {
        let text = format!(
            "{MINIMAL}\n[species.2]\nsigma = 1.0\nalpha = 1.0\n\n[coupling]\nrows = [[-1.0, 1.0], [1.1, -1.0]]\n"
        );
        let cfg = parse_config_str(&text).unwrap();
        let err = cfg.problem().unwrap_err();
        assert!(err.to_string().contains("Hypothesis 2"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn species_numbering() {
        let text = MINIMAL.replace("species.1", "species.2");
        assert!(parse_config_str(&text).unwrap().problem().is_err());
    }

    #[test]
    fn coupling_required_for_several_species() {
        let text = format!("{MINIMAL}\n[species.2]\nsigma = 1.0\nalpha = 1.0\n");
        let err = parse_config_str(&text).unwrap().problem().unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn seed_override() {
        let text = MINIMAL.to_string()
            + "initial = { kind = \"random\", params = { lo = 0.0, hi = 1.0, seed = 3 } }\n";
        let a = parse_config_str(&text).unwrap().with_seed(11).problem().unwrap();
        let b = parse_config_str(&text).unwrap().with_seed(12).problem().unwrap();
        assert_ne!(a.initial_state().unwrap(), b.initial_state().unwrap());
    }
}
