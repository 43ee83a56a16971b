//! Config-file support: a JSON object whose keys are the long flag names.
//! Flags given on the command line override the file. A previously written
//! run manifest is also accepted; its `params` block is the config.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{Map, Value};

use pinlab_core::DisorderSpec;

/// A command-line usage problem (missing or malformed parameter); exits 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

#[derive(Debug, Clone, Default)]
pub struct ConfigMap(Map<String, Value>);

impl ConfigMap {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let value: Value =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let obj = match value {
            // a manifest: replay its recorded parameters
            Value::Object(ref m) if m.contains_key("command") && m.contains_key("params") => {
                match &m["params"] {
                    Value::Object(p) => p.clone(),
                    _ => bail!("manifest params must be an object"),
                }
            }
            Value::Object(m) => m,
            _ => bail!("config must be a JSON object of flag-name: value pairs"),
        };
        Ok(Self(obj))
    }

    fn raw(&self, key: &str) -> Option<&Value> {
        self.0.get(key)
    }

    pub fn get_f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::Array(xs)) => xs
                .iter()
                .map(|v| {
                    v.as_f64()
                        .with_context(|| format!("config `{key}`: non-numeric entry"))
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(v) => Ok(Some(vec![v
                .as_f64()
                .with_context(|| format!("config `{key}`: expected number(s)"))?])),
        }
    }

    pub fn get_i64_list(&self, key: &str) -> Result<Option<Vec<i64>>> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::Array(xs)) => xs
                .iter()
                .map(|v| {
                    v.as_i64()
                        .with_context(|| format!("config `{key}`: non-integer entry"))
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(v) => Ok(Some(vec![v
                .as_i64()
                .with_context(|| format!("config `{key}`: expected integer(s)"))?])),
        }
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => {
                Ok(Some(v.as_f64().with_context(|| {
                    format!("config `{key}`: expected a number")
                })?))
            }
        }
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => Ok(Some(v.as_u64().with_context(|| {
                format!("config `{key}`: expected a nonnegative integer")
            })?)),
        }
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        Ok(self.get_u64(key)?.map(|v| v as usize))
    }

    pub fn get_i64(&self, key: &str) -> Result<Option<i64>> {
        match self.raw(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => {
                Ok(Some(v.as_i64().with_context(|| {
                    format!("config `{key}`: expected an integer")
                })?))
            }
        }
    }

    pub fn get_string(&self, key: &str) -> Result<Option<String>> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            // objects (e.g. a disorder spec) pass through as compact JSON
            Some(v) => Ok(Some(v.to_string())),
        }
    }
}

/// Parse a disorder spec given as shorthand or inline JSON.
pub fn parse_spec(text: &str) -> Result<DisorderSpec> {
    match text.trim() {
        "rademacher" | "scaled_rademacher" => Ok(DisorderSpec::ScaledRademacher),
        "gaussian" | "gaussian_unit" => Ok(DisorderSpec::GaussianUnit),
        t if t.starts_with('{') => serde_json::from_str(t).context("parsing disorder spec JSON"),
        other => Err(UsageError(format!(
            "unknown disorder spec `{other}`; use rademacher, gaussian, or a JSON object"
        ))
        .into()),
    }
}

/// CLI value takes precedence, then the config file, then the default.
pub fn pick<T>(cli: Option<T>, cfg: Option<T>, default: Option<T>, name: &str) -> Result<T> {
    cli.or(cfg).or(default).ok_or_else(|| {
        UsageError(format!(
            "missing required parameter `{name}` (flag or config)"
        ))
        .into()
    })
}
