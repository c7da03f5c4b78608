use std::collections::BTreeMap;

use serde::Serialize;

/// One pass/fail condition inside a check: `value <= tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Criterion {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Time at which `value` was attained, when meaningful.
    pub time: Option<f64>,
}

impl Criterion {
    pub fn new(name: &str, value: f64, tolerance: f64, time: Option<f64>) -> Self {
        Criterion {
            name: name.to_string(),
            value,
            tolerance,
            pass: value <= tolerance,
            time,
        }
    }
}

/// Outcome of one executable check, serialised as one NDJSON record.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub pass: bool,
    /// Value of the deciding criterion: the first failing one, otherwise the
    /// one closest to its tolerance.
    pub worst: f64,
    pub tolerance: f64,
    pub argmax_time: Option<f64>,
    pub criteria: Vec<Criterion>,
    pub times: Vec<f64>,
    pub series: Vec<f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, serde_json::Value>,
}

impl CheckReport {
    pub fn new(name: &str, criteria: Vec<Criterion>, times: Vec<f64>, series: Vec<f64>) -> Self {
        let deciding = criteria.iter().find(|c| !c.pass).or_else(|| {
            criteria.iter().max_by(|a, b| {
                ratio(a)
                    .partial_cmp(&ratio(b))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        });
        let (worst, tolerance, argmax_time) = deciding
            .map(|c| (c.value, c.tolerance, c.time))
            .unwrap_or((0.0, 0.0, None));
        CheckReport {
            name: name.to_string(),
            pass: criteria.iter().all(|c| c.pass),
            worst,
            tolerance,
            argmax_time,
            criteria,
            times,
            series,
            extra: BTreeMap::new(),
        }
    }

    pub fn with_extra(mut self, key: &str, value: impl Serialize) -> Self {
        self.extra.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(serde_json::Value::Null),
        );
        self
    }

    pub fn criterion(&self, name: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.name == name)
    }

    pub fn to_ndjson(&self) -> String {
        serde_json::to_string(self).expect("report serialises")
    }
}

fn ratio(c: &Criterion) -> f64 {
    if c.tolerance > 0.0 {
        c.value / c.tolerance
    } else if c.value > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Weighted L¹ norm of the difference of two trajectories over time, with a
/// flag per time for whether the difference takes both signs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DifferenceSeries {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub sign_changes: Vec<bool>,
}

impl DifferenceSeries {
    pub fn initial(&self) -> f64 {
        self.norms[0]
    }

    /// Norm at the first recorded time `>= t`.
    pub fn at(&self, t: f64) -> Option<f64> {
        self.times
            .iter()
            .position(|&s| s >= t - 1e-12)
            .map(|k| self.norms[k])
    }

    pub fn ratio_at(&self, t: f64) -> Option<f64> {
        let d0 = self.initial();
        self.at(t).map(|d| if d0 == 0.0 { 0.0 } else { d / d0 })
    }

    /// Largest increase between consecutive entries.
    pub fn max_increase(&self) -> (f64, Option<f64>) {
        max_increase(&self.times, &self.norms)
    }

    pub fn changes_sign_initially(&self) -> bool {
        self.sign_changes.first().copied().unwrap_or(false)
    }
}

pub(crate) fn max_increase(times: &[f64], series: &[f64]) -> (f64, Option<f64>) {
    let mut worst = 0.0;
    let mut at = None;
    for k in 1..series.len() {
        let inc = series[k] - series[k - 1];
        if inc > worst {
            worst = inc;
            at = Some(times[k]);
        }
    }
    (worst, at)
}
