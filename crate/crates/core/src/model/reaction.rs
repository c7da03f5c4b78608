//! Monotone reaction laws `r(s)` with `r(0) = 0`.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::params::{ParamReader, Params};
use crate::error::{Error, Result};

pub trait Reaction: Debug + Send + Sync {
    fn kind(&self) -> &'static str;

    /// `r(s)` for `s >= 0`.
    fn eval(&self, s: f64) -> Result<f64>;

    /// Lipschitz constant of `r` on `[0, upper]`.
    fn lipschitz(&self, upper: f64) -> f64;

    /// `r⁻¹(y)` for `y >= 0`.
    fn inverse(&self, y: f64) -> Result<f64>;

    /// True when `r(s) = s`, the case handled by the assembled linear system.
    fn is_linear(&self) -> bool {
        false
    }
}

type Builder = Box<dyn Fn(&mut ParamReader<'_>) -> Result<Arc<dyn Reaction>> + Send + Sync>;

pub struct ReactionRegistry {
    builders: BTreeMap<&'static str, Builder>,
}

impl ReactionRegistry {
    pub fn with_builtins() -> Self {
        let mut r = ReactionRegistry {
            builders: BTreeMap::new(),
        };
        r.register("linear", |_| Ok(Arc::new(LinearReaction)));
        r.register("power", |p| {
            Ok(Arc::new(PowerLaw {
                exponent: p.number("exponent", None)?,
            }))
        });
        r
    }

    pub fn builtin() -> &'static ReactionRegistry {
        static REGISTRY: OnceLock<ReactionRegistry> = OnceLock::new();
        REGISTRY.get_or_init(ReactionRegistry::with_builtins)
    }

    pub fn register<F>(&mut self, name: &'static str, builder: F)
    where
        F: Fn(&mut ParamReader<'_>) -> Result<Arc<dyn Reaction>> + Send + Sync + 'static,
    {
        self.builders.insert(name, Box::new(builder));
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.builders.keys().copied().collect()
    }

    pub fn build(&self, spec: &ReactionSpec) -> Result<Arc<dyn Reaction>> {
        let builder = self
            .builders
            .get(spec.kind.as_str())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "reaction",
                name: spec.kind.clone(),
                known: self.names().join(", "),
            })?;
        let mut reader = spec.params.reader(&spec.kind);
        let reaction = builder(&mut reader)?;
        reader.finish()?;
        Ok(reaction)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReactionSpec {
    pub kind: String,
    #[serde(default)]
    pub params: Params,
}

impl Default for ReactionSpec {
    fn default() -> Self {
        ReactionSpec::linear()
    }
}

impl ReactionSpec {
    pub fn linear() -> Self {
        ReactionSpec {
            kind: "linear".into(),
            params: Params::new(),
        }
    }

    pub fn power(exponent: f64) -> Self {
        ReactionSpec {
            kind: "power".into(),
            params: Params::new().with("exponent", exponent),
        }
    }

    pub fn build(&self) -> Result<Arc<dyn Reaction>> {
        ReactionRegistry::builtin().build(self)
    }

    /// Exponent of a power law, if this is one.
    pub fn exponent(&self) -> Option<f64> {
        match (self.kind.as_str(), self.params.0.get("exponent")) {
            ("power", Some(super::ParamValue::Number(p))) => Some(*p),
            _ => None,
        }
    }
}

pub fn eval_reaction(spec: &ReactionSpec, s: f64) -> Result<f64> {
    spec.build()?.eval(s)
}

fn check_arg(s: f64) -> Result<f64> {
    if s < 0.0 || s.is_nan() {
        Err(Error::ReactionDomain(s))
    } else {
        Ok(s)
    }
}

#[derive(Debug)]
struct LinearReaction;

impl Reaction for LinearReaction {
    fn kind(&self) -> &'static str {
        "linear"
    }
    fn eval(&self, s: f64) -> Result<f64> {
        check_arg(s)
    }
    fn lipschitz(&self, _upper: f64) -> f64 {
        1.0
    }
    fn inverse(&self, y: f64) -> Result<f64> {
        check_arg(y)
    }
    fn is_linear(&self) -> bool {
        true
    }
}

/// `r(s) = s^p`. Exponents below 1 are built (so the validator can report
/// them) but are not admissible.
#[derive(Debug)]
struct PowerLaw {
    exponent: f64,
}

impl Reaction for PowerLaw {
    fn kind(&self) -> &'static str {
        "power"
    }
    fn eval(&self, s: f64) -> Result<f64> {
        let s = check_arg(s)?;
        if s == 0.0 {
            return Ok(0.0);
        }
        Ok(s.powf(self.exponent))
    }
    fn lipschitz(&self, upper: f64) -> f64 {
        if self.exponent <= 1.0 {
            // Only p = 1 is admissible here; the bound is exact for it.
            1.0
        } else {
            self.exponent * upper.max(0.0).powf(self.exponent - 1.0)
        }
    }
    fn inverse(&self, y: f64) -> Result<f64> {
        let y = check_arg(y)?;
        if y == 0.0 {
            return Ok(0.0);
        }
        Ok(y.powf(1.0 / self.exponent))
    }
    fn is_linear(&self) -> bool {
        self.exponent == 1.0
    }
}
