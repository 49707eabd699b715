use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Deserialize;

/// Largest accepted horizon.
pub const MAX_HORIZON: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Orbit,
    CertifyNoncyclic,
    CertifyNonsupercyclic,
    Liyorke,
    Lemmas,
    EigenSearch,
    DemoGap,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Orbit => "orbit",
            Command::CertifyNoncyclic => "certify-noncyclic",
            Command::CertifyNonsupercyclic => "certify-nonsupercyclic",
            Command::Liyorke => "liyorke",
            Command::Lemmas => "lemmas",
            Command::EigenSearch => "eigen-search",
            Command::DemoGap => "demo-gap",
        }
    }

    pub fn default_horizon(self) -> usize {
        match self {
            Command::Orbit => 10,
            Command::CertifyNoncyclic | Command::CertifyNonsupercyclic => 50,
            _ => 128,
        }
    }
}

/// An operator or function given either as preset text or inline JSON.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Spec {
    Text(String),
    Inline(serde_json::Value),
}

impl Spec {
    pub fn as_text(&self) -> String {
        match self {
            Spec::Text(s) => s.clone(),
            Spec::Inline(v) => v.to_string(),
        }
    }
}

/// One experiment. Every field is optional here; commands check what they
/// need when they run.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: Option<String>,
    pub command: Option<Command>,
    pub operator: Option<Spec>,
    pub function: Option<Spec>,
    pub generators: Option<Vec<Spec>>,
    pub horizon: Option<usize>,
    pub radii: Option<Vec<f64>>,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub seed: Option<u64>,
    pub cases: Option<usize>,
    pub members: Option<usize>,
    pub samples: Option<usize>,
    pub out: Option<PathBuf>,
    pub strict: Option<bool>,
}

#[derive(Debug, thiserror::Error)]
#[error("config error in `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: &str, message: impl Into<String>) -> Self {
        Self {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

impl ExperimentConfig {
    /// Fields set in `over` replace those in `self`.
    pub fn overlay(mut self, over: &ExperimentConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => {$(if over.$f.is_some() { self.$f = over.$f.clone(); })*};
        }
        take!(
            name, command, operator, function, generators, horizon, radii, eps, delta, seed, cases, members, samples,
            out, strict
        );
        self
    }

    pub fn command(&self) -> Result<Command, ConfigError> {
        self.command
            .ok_or_else(|| ConfigError::new("command", "no command given"))
    }

    pub fn horizon(&self, command: Command) -> Result<usize, ConfigError> {
        let k = self.horizon.unwrap_or(command.default_horizon());
        if k > MAX_HORIZON {
            return Err(ConfigError::new("horizon", format!("{k} exceeds {MAX_HORIZON}")));
        }
        Ok(k)
    }

    pub fn radii(&self) -> Result<Vec<convdyn::Radius>, ConfigError> {
        let radii = self.radii.clone().unwrap_or_else(|| vec![1.0]);
        if radii.is_empty() {
            return Err(ConfigError::new("radii", "at least one radius is required"));
        }
        radii
            .into_iter()
            .map(|r| {
                convdyn::Radius::new(r)
                    .map_err(|_| ConfigError::new("radii", format!("radius {r} is not positive and finite")))
            })
            .collect()
    }

    pub fn thresholds(&self) -> Result<(f64, f64), ConfigError> {
        let eps = self.eps.unwrap_or(1e-6);
        let delta = self.delta.unwrap_or(0.9);
        if !(eps.is_finite() && eps > 0.0) {
            return Err(ConfigError::new("eps", format!("{eps} is not positive")));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(ConfigError::new("delta", format!("{delta} is not positive")));
        }
        Ok((eps, delta))
    }

    pub fn strict(&self) -> bool {
        self.strict.unwrap_or(false)
    }
}

/// Reads a config file holding either one experiment object or an array of
/// them.
pub fn load(path: &Path) -> Result<Vec<ExperimentConfig>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| ConfigError::new("config", format!("invalid JSON: {e}")))?;
    let parse = |v: serde_json::Value| {
        serde_json::from_value::<ExperimentConfig>(v).map_err(|e| ConfigError::new("config", e.to_string()))
    };
    match value {
        serde_json::Value::Array(items) => {
            if items.is_empty() {
                return Err(ConfigError::new("config", "empty batch"));
            }
            items.into_iter().map(parse).collect()
        }
        v => Ok(vec![parse(v)?]),
    }
}
