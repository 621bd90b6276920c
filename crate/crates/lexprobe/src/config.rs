//! Run configuration files (TOML or JSON). Command-line flags override
//! file values; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::{Map, Value};

use lexprobe_core::baselines::ChoiceOnlyConfig;
use lexprobe_core::probe::{BuildConfig, ProbeType};

use crate::error::{Error, Result};
use crate::formats::read_text;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    /// Overrides of the probe type's default build configuration.
    #[serde(default)]
    pub build: Map<String, Value>,
    #[serde(default)]
    pub bias: BiasSection,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiasSection {
    pub threshold: Option<f64>,
    pub epochs: Option<usize>,
    pub lr: Option<f64>,
    pub l2: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = read_text(path)?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))
        } else {
            toml::from_str(&text).map_err(|e| {
                let line = e.span().map_or(0, |s| text[..s.start].lines().count().max(1));
                Error::parse(path, line, e.message().to_string())
            })
        }
    }

    /// The probe's default configuration with the file's `[build]` keys
    /// applied on top.
    pub fn build_config(&self, probe: ProbeType, seed: u64) -> Result<BuildConfig> {
        let base = BuildConfig::for_probe(probe, seed);
        if self.build.is_empty() {
            return Ok(base);
        }
        let mut merged = match serde_json::to_value(&base).expect("serializable") {
            Value::Object(m) => m,
            _ => unreachable!("config serializes to an object"),
        };
        for (k, v) in &self.build {
            if k == "seed" {
                return Err(Error::Config("set seed at the top level, not under [build]".into()));
            }
            merged.insert(k.clone(), v.clone());
        }
        serde_json::from_value(Value::Object(merged)).map_err(|e| Error::Config(format!("[build]: {e}")))
    }

    pub fn choice_only(&self, seed: u64) -> ChoiceOnlyConfig {
        let d = ChoiceOnlyConfig::default();
        ChoiceOnlyConfig {
            epochs: self.bias.epochs.unwrap_or(d.epochs),
            lr: self.bias.lr.unwrap_or(d.lr),
            l2: self.bias.l2.unwrap_or(d.l2),
            seed,
        }
    }
}
