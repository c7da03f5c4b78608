//! Scalar fields over the domain: potentials ψᵢ and initial data.
//!
//! Every kind implements [`Profile`] and is registered by name in a
//! [`ProfileRegistry`]; configs refer to kinds by that name.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::params::{ParamReader, ParamValue, Params};
use crate::error::{Error, Result};
use crate::model::Grid;

pub trait Profile: Debug + Send + Sync {
    fn kind(&self) -> &'static str;

    /// Value at a point given in full domain coordinates.
    fn value(&self, x: &[f64]) -> Result<f64>;

    fn sample(&self, grid: &Grid) -> Result<Vec<f64>> {
        (0..grid.n_cells())
            .map(|c| self.value(&grid.center(c)))
            .collect()
    }
}

type Builder = Box<dyn Fn(&mut ParamReader<'_>) -> Result<Arc<dyn Profile>> + Send + Sync>;

/// Name → constructor table for [`Profile`] kinds.
pub struct ProfileRegistry {
    builders: BTreeMap<&'static str, Builder>,
}

impl ProfileRegistry {
    pub fn empty() -> Self {
        ProfileRegistry {
            builders: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = ProfileRegistry::empty();
        r.register("zero", |_| Ok(Arc::new(Zero)));
        r.register("constant", |p| {
            Ok(Arc::new(Constant {
                value: p.number("value", None)?,
            }))
        });
        r.register("linear", |p| {
            Ok(Arc::new(Linear {
                axis: p.index("axis", 0)?,
                slope: p.number("slope", None)?,
                offset: p.number("offset", Some(0.0))?,
            }))
        });
        r.register("cosine", |p| {
            let period = p.number("period", Some(1.0))?;
            if period <= 0.0 {
                return Err(p.fail("`period` must be positive"));
            }
            Ok(Arc::new(Cosine {
                axis: p.index("axis", 0)?,
                amplitude: p.number("amplitude", Some(1.0))?,
                period,
                shift: p.number("shift", Some(0.0))?,
                offset: p.number("offset", Some(0.0))?,
            }))
        });
        r.register("sawtooth_smoothed", |p| {
            Ok(Arc::new(SmoothSawtooth::new(
                p.index("axis", 0)?,
                p.number("amplitude", Some(1.0))?,
                p.number("period", Some(1.0))?,
                p.number("peak", Some(0.75))?,
                p.number("width", Some(0.02))?,
                p.number("shift", Some(0.0))?,
                p.number("offset", Some(0.0))?,
            )
            .map_err(|m| p.fail(m))?))
        });
        r.register("tabulated", |p| {
            Ok(Arc::new(
                Tabulated::new(p.index("axis", 0)?, p.list("x")?, p.list("values")?)
                    .map_err(|m| p.fail(m))?,
            ))
        });
        r
    }

    /// The process-wide registry of built-in kinds.
    pub fn builtin() -> &'static ProfileRegistry {
        static REGISTRY: OnceLock<ProfileRegistry> = OnceLock::new();
        REGISTRY.get_or_init(ProfileRegistry::with_builtins)
    }

    pub fn register<F>(&mut self, name: &'static str, builder: F)
    where
        F: Fn(&mut ParamReader<'_>) -> Result<Arc<dyn Profile>> + Send + Sync + 'static,
    {
        self.builders.insert(name, Box::new(builder));
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.builders.keys().copied().collect()
    }

    pub fn build(&self, spec: &ProfileSpec) -> Result<Arc<dyn Profile>> {
        let builder = self
            .builders
            .get(spec.kind.as_str())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "profile",
                name: spec.kind.clone(),
                known: self.names().join(", "),
            })?;
        let mut reader = spec.params.reader(&spec.kind);
        let profile = builder(&mut reader)?;
        reader.finish()?;
        Ok(profile)
    }
}

/// Serializable description of a profile: registered kind plus parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub kind: String,
    #[serde(default)]
    pub params: Params,
}

impl ProfileSpec {
    pub fn new(kind: &str, params: Params) -> Self {
        ProfileSpec {
            kind: kind.to_string(),
            params,
        }
    }

    pub fn zero() -> Self {
        ProfileSpec::new("zero", Params::new())
    }

    pub fn constant(value: f64) -> Self {
        ProfileSpec::new("constant", Params::new().with("value", value))
    }

    pub fn linear(slope: f64) -> Self {
        ProfileSpec::new("linear", Params::new().with("slope", slope))
    }

    pub fn cosine(amplitude: f64, period: f64) -> Self {
        ProfileSpec::new(
            "cosine",
            Params::new()
                .with("amplitude", amplitude)
                .with("period", period),
        )
    }

    pub fn sawtooth(amplitude: f64, period: f64, shift: f64) -> Self {
        ProfileSpec::new(
            "sawtooth_smoothed",
            Params::new()
                .with("amplitude", amplitude)
                .with("period", period)
                .with("shift", shift),
        )
    }

    /// Set (or replace) one parameter.
    pub fn with_param(mut self, key: &str, value: impl Into<ParamValue>) -> Self {
        self.params = self.params.with(key, value);
        self
    }

    pub fn build(&self) -> Result<Arc<dyn Profile>> {
        ProfileRegistry::builtin().build(self)
    }
}

/// Potential specs share the profile registry.
pub type PotentialSpec = ProfileSpec;

/// Evaluate a potential at `x`, which must lie in the closure of the grid's domain.
pub fn eval_potential(spec: &PotentialSpec, grid: &Grid, x: &[f64]) -> Result<f64> {
    grid.contains(x)?;
    let v = spec.build()?.value(x)?;
    if !v.is_finite() {
        return Err(Error::Invariant(format!(
            "potential `{}` is not finite at {x:?}",
            spec.kind
        )));
    }
    Ok(v)
}

fn coord(x: &[f64], axis: usize) -> Result<f64> {
    x.get(axis).copied().ok_or_else(|| {
        Error::Dimension(format!(
            "profile reads axis {axis} but the point has {} coordinates",
            x.len()
        ))
    })
}

#[derive(Debug)]
struct Zero;

impl Profile for Zero {
    fn kind(&self) -> &'static str {
        "zero"
    }
    fn value(&self, _x: &[f64]) -> Result<f64> {
        Ok(0.0)
    }
}

#[derive(Debug)]
struct Constant {
    value: f64,
}

impl Profile for Constant {
    fn kind(&self) -> &'static str {
        "constant"
    }
    fn value(&self, _x: &[f64]) -> Result<f64> {
        Ok(self.value)
    }
}

#[derive(Debug)]
struct Linear {
    axis: usize,
    slope: f64,
    offset: f64,
}

impl Profile for Linear {
    fn kind(&self) -> &'static str {
        "linear"
    }
    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.offset + self.slope * coord(x, self.axis)?)
    }
}

/// `offset + amplitude · cos(2π (x − shift) / period)`
#[derive(Debug)]
struct Cosine {
    axis: usize,
    amplitude: f64,
    period: f64,
    shift: f64,
    offset: f64,
}

impl Profile for Cosine {
    fn kind(&self) -> &'static str {
        "cosine"
    }
    fn value(&self, x: &[f64]) -> Result<f64> {
        let phase = 2.0 * PI * (coord(x, self.axis)? - self.shift) / self.period;
        Ok(self.offset + self.amplitude * phase.cos())
    }
}

/// Asymmetric ratchet: a periodic triangle wave rising from 0 to 1 over the
/// fraction `peak` of each period and falling back over the rest, convolved
/// with a Gaussian of standard deviation `width` (in units of the period).
///
/// The convolution is evaluated through the Fourier series of the triangle
/// wave, where it is an exact multiplication by `exp(-2π²k²width²)`.
#[derive(Debug)]
pub struct SmoothSawtooth {
    axis: usize,
    amplitude: f64,
    period: f64,
    peak: f64,
    shift: f64,
    offset: f64,
    /// `(k, weight_k)` with the kink-jump and smoothing factors folded in.
    modes: Vec<(f64, f64)>,
}

impl SmoothSawtooth {
    fn new(
        axis: usize,
        amplitude: f64,
        period: f64,
        peak: f64,
        width: f64,
        shift: f64,
        offset: f64,
    ) -> Result<Self, String> {
        if period <= 0.0 {
            return Err("`period` must be positive".into());
        }
        if !(peak > 0.0 && peak < 1.0) {
            return Err(format!("`peak` must lie in (0, 1), got {peak}"));
        }
        if !(width > 0.0 && width < 0.5) {
            return Err(format!("`width` must lie in (0, 0.5), got {width}"));
        }
        // f'' = jump · (δ_0 − δ_peak), so the k-th cosine pair has weight
        // −2·jump/(2πk)² · exp(−2π²k²w²).
        let jump = 1.0 / (peak * (1.0 - peak));
        let mut modes = Vec::new();
        for k in 1..=4096u32 {
            let kf = f64::from(k);
            let damping = (-2.0 * PI * PI * kf * kf * width * width).exp();
            let weight = -2.0 * jump / (2.0 * PI * kf).powi(2) * damping;
            if weight.abs() < 1e-18 {
                break;
            }
            modes.push((kf, weight));
        }
        Ok(SmoothSawtooth {
            axis,
            amplitude,
            period,
            peak,
            shift,
            offset,
            modes,
        })
    }

    fn shape(&self, theta: f64) -> f64 {
        // Σ_k w_k [cos(2πkθ) − cos(2πk(θ − peak))], plus the mean 1/2.
        let mut acc = 0.5;
        for &(k, w) in &self.modes {
            acc += w * ((2.0 * PI * k * theta).cos() - (2.0 * PI * k * (theta - self.peak)).cos());
        }
        acc
    }
}

impl Profile for SmoothSawtooth {
    fn kind(&self) -> &'static str {
        "sawtooth_smoothed"
    }
    fn value(&self, x: &[f64]) -> Result<f64> {
        let theta = ((coord(x, self.axis)? - self.shift) / self.period).rem_euclid(1.0);
        Ok(self.offset + self.amplitude * self.shape(theta))
    }
}

/// Piecewise-linear interpolation of a sample table.
#[derive(Debug)]
struct Tabulated {
    axis: usize,
    xs: Vec<f64>,
    values: Vec<f64>,
}

impl Tabulated {
    fn new(axis: usize, xs: Vec<f64>, values: Vec<f64>) -> Result<Self, String> {
        if xs.len() != values.len() {
            return Err(format!(
                "`x` has {} entries but `values` has {}",
                xs.len(),
                values.len()
            ));
        }
        if xs.len() < 2 {
            return Err("a table needs at least two samples".into());
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err("table abscissae must be strictly increasing".into());
        }
        Ok(Tabulated { axis, xs, values })
    }
}

impl Profile for Tabulated {
    fn kind(&self) -> &'static str {
        "tabulated"
    }
    fn value(&self, x: &[f64]) -> Result<f64> {
        let t = coord(x, self.axis)?;
        let (first, last) = (self.xs[0], self.xs[self.xs.len() - 1]);
        if !(t >= first && t <= last) {
            return Err(Error::OutOfDomain {
                x: t,
                axis: self.axis,
                lo: first,
                hi: last,
            });
        }
        let j = self.xs.partition_point(|&s| s <= t).clamp(1, self.xs.len() - 1);
        let (x0, x1) = (self.xs[j - 1], self.xs[j]);
        let (y0, y1) = (self.values[j - 1], self.values[j]);
        Ok(y0 + (y1 - y0) * (t - x0) / (x1 - x0))
    }
}
