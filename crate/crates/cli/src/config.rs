use std::path::{Path, PathBuf};

use clap::ValueEnum;
use hypmass::MetricSpec;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Mass,
    Curvature,
    VerifyAh,
    DualityCheck,
    Eigenfunction,
    Deform,
    FirstVariation,
    OdeVerify,
    Dichotomy,
    RigidityCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Mass => "mass",
            Command::Curvature => "curvature",
            Command::VerifyAh => "verify-ah",
            Command::DualityCheck => "duality-check",
            Command::Eigenfunction => "eigenfunction",
            Command::Deform => "deform",
            Command::FirstVariation => "first-variation",
            Command::OdeVerify => "ode-verify",
            Command::Dichotomy => "dichotomy",
            Command::RigidityCheck => "rigidity-check",
        }
    }
}

/// Numeric overrides; unset fields take the command's defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numeric {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    /// Polar nodes of the sphere rule; the azimuthal count is twice this.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_order: Option<usize>,
    /// Gauss nodes in `r`, or Chebyshev nodes for the radial solvers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radial_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// ODE horizon, or ray length for the classifier.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// The configuration file as written.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub command: Option<Command>,
    /// A path to a metric JSON file (relative to the config), or the metric inline.
    #[serde(default)]
    pub metric: Option<Value>,
    #[serde(default)]
    pub numeric: Numeric,
    #[serde(default)]
    pub params: Value,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// Command-line overrides.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub command: Option<Command>,
    pub out: Option<PathBuf>,
    pub quad_order: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

/// A validated configuration with the metric loaded.
#[derive(Clone, Debug)]
pub struct Validated {
    pub command: Command,
    pub metric: Option<MetricSpec>,
    pub numeric: Numeric,
    pub params: Value,
    pub output: PathBuf,
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

fn load_metric(v: Value, base: &Path) -> Result<MetricSpec, CliError> {
    let v = match v {
        Value::String(p) => {
            let path = base.join(p);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| schema(format!("cannot read metric {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| schema(format!("metric {}: {e}", path.display())))?
        }
        v => v,
    };
    serde_json::from_value(v).map_err(|e| schema(format!("metric: {e}")))
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| schema(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| schema(format!("{}: {e}", path.display())))
    }

    /// Applies the overrides, loads the metric and checks the numeric fields.
    /// `base` resolves relative metric paths.
    pub fn validate(self, ov: &Overrides, base: &Path) -> Result<Validated, CliError> {
        let command = match (self.command, ov.command) {
            (Some(a), Some(b)) if a != b => {
                return Err(schema(format!("config command {} conflicts with {}", a.name(), b.name())))
            }
            (a, b) => a.or(b).ok_or_else(|| schema("no command given"))?,
        };
        let mut numeric = self.numeric;
        if ov.quad_order.is_some() {
            numeric.quad_order = ov.quad_order;
        }
        if ov.tol.is_some() {
            numeric.tol = ov.tol;
        }
        if ov.seed.is_some() {
            numeric.seed = ov.seed;
        }
        if let Some(t) = numeric.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(schema(format!("tolerance {t} must be positive")));
            }
        }
        if let Some(h) = numeric.horizon {
            if !(h > 0.0 && h.is_finite()) {
                return Err(schema(format!("horizon {h} must be positive")));
            }
        }
        if let Some(r) = &numeric.radii {
            if r.is_empty() || r.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(schema("radii must be positive"));
            }
        }
        if numeric.quad_order == Some(0) || numeric.radial_order == Some(0) {
            return Err(schema("quadrature orders must be positive"));
        }
        let metric = match self.metric {
            Some(v) => Some(load_metric(v, base)?),
            None if command == Command::OdeVerify => None,
            None => return Err(schema(format!("command {} needs a metric", command.name()))),
        };
        let output = ov
            .out
            .clone()
            .or(self.output)
            .ok_or_else(|| schema("no output directory (use --out or \"output\")"))?;
        Ok(Validated {
            command,
            metric,
            numeric,
            params: self.params,
            output,
        })
    }
}

/// Parses the command parameters strictly; `null` means all defaults.
pub fn parse_params<T: serde::de::DeserializeOwned + Default>(v: &Value) -> Result<T, CliError> {
    if v.is_null() {
        return Ok(T::default());
    }
    serde_json::from_value(v.clone()).map_err(|e| schema(format!("params: {e}")))
}
