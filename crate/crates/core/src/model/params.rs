use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A scalar or a list of scalars, as written in a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    List(Vec<f64>),
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Number(v)
    }
}

impl From<Vec<f64>> for ParamValue {
    fn from(v: Vec<f64>) -> Self {
        ParamValue::List(v)
    }
}

/// Named parameters of a registered strategy (profile, reaction, ...).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Params(pub BTreeMap<String, ParamValue>);

impl Params {
    pub fn new() -> Self {
        Params::default()
    }

    pub fn with(mut self, key: &str, value: impl Into<ParamValue>) -> Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    /// Read parameters for `owner`, rejecting any key it did not consume.
    pub fn reader(&self, owner: &str) -> ParamReader<'_> {
        ParamReader {
            owner: owner.to_string(),
            params: self,
            seen: Vec::new(),
        }
    }
}

pub struct ParamReader<'a> {
    owner: String,
    params: &'a Params,
    seen: Vec<&'static str>,
}

impl ParamReader<'_> {
    pub fn number(&mut self, key: &'static str, default: Option<f64>) -> Result<f64> {
        self.seen.push(key);
        match self.params.0.get(key) {
            Some(ParamValue::Number(v)) if v.is_finite() => Ok(*v),
            Some(ParamValue::Number(v)) => Err(Error::param(
                &self.owner,
                format!("`{key}` must be finite, got {v}"),
            )),
            Some(ParamValue::List(_)) => Err(Error::param(
                &self.owner,
                format!("`{key}` must be a number, got a list"),
            )),
            None => default.ok_or_else(|| Error::param(&self.owner, format!("missing `{key}`"))),
        }
    }

    pub fn list(&mut self, key: &'static str) -> Result<Vec<f64>> {
        self.seen.push(key);
        match self.params.0.get(key) {
            Some(ParamValue::List(v)) => {
                if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
                    return Err(Error::param(
                        &self.owner,
                        format!("`{key}` contains non-finite value {bad}"),
                    ));
                }
                Ok(v.clone())
            }
            Some(ParamValue::Number(_)) => Err(Error::param(
                &self.owner,
                format!("`{key}` must be a list"),
            )),
            None => Err(Error::param(&self.owner, format!("missing `{key}`"))),
        }
    }

    pub fn index(&mut self, key: &'static str, default: usize) -> Result<usize> {
        let v = self.number(key, Some(default as f64))?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(Error::param(
                &self.owner,
                format!("`{key}` must be a nonnegative integer, got {v}"),
            ));
        }
        Ok(v as usize)
    }

    pub fn finish(self) -> Result<()> {
        let unknown: Vec<&str> = self
            .params
            .0
            .keys()
            .map(String::as_str)
            .filter(|k| !self.seen.contains(k))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(Error::param(
                &self.owner,
                format!("unknown parameter(s) {}", unknown.join(", ")),
            ))
        }
    }

    pub fn fail(&self, message: impl Into<String>) -> Error {
        Error::param(&self.owner, message)
    }
}
