use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use hlc_core::backtest::{FeatureConfig, ModelSpec, SplitSpec};
use hlc_core::synthetic::ScenarioConfig;
use hlc_core::{LtiParams, QuarterIndex, Unit};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Problem with the configuration file or command-line overrides.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// Unit of a raw input file; values are normalized on ingestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputUnit {
    Euros,
    ThousandEuros,
    Fraction,
    Percent,
    Share,
    Ratio,
}

impl InputUnit {
    /// Multiplier to the stored unit and the stored unit itself.
    pub fn normalization(self) -> (f64, Unit) {
        match self {
            InputUnit::Euros => (1.0, Unit::Euros),
            InputUnit::ThousandEuros => (1000.0, Unit::Euros),
            InputUnit::Fraction => (1.0, Unit::Fraction),
            InputUnit::Percent => (0.01, Unit::Fraction),
            InputUnit::Share => (1.0, Unit::Share),
            InputUnit::Ratio => (1.0, Unit::Ratio),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frequency {
    /// `quarter,value` rows.
    #[default]
    Quarterly,
    /// `year,value` rows, interpolated to quarters.
    Yearly,
}

fn default_anchor() -> u8 {
    4
}

fn is_default_anchor(q: &u8) -> bool {
    *q == default_anchor()
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSource {
    /// Relative paths are resolved against the config file's directory.
    pub path: PathBuf,
    pub unit: InputUnit,
    #[serde(default, skip_serializing_if = "is_default")]
    pub frequency: Frequency,
    /// Quarter that carries each yearly value.
    #[serde(default = "default_anchor", skip_serializing_if = "is_default_anchor")]
    pub anchor_quarter: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LagScanConfig {
    pub response: String,
    pub candidate: String,
    pub min_lag: i64,
    pub max_lag: i64,
}

impl Default for LagScanConfig {
    fn default() -> Self {
        Self {
            response: "HP".into(),
            candidate: "HLC".into(),
            min_lag: 0,
            max_lag: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Built-in variants by name, e.g. `hlc_ecm`.
    pub specs: Vec<String>,
    /// Additional user-defined variants.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub custom: Vec<ModelSpec>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            specs: ModelSpec::default_grid().into_iter().map(|s| s.name).collect(),
            custom: Vec::new(),
        }
    }
}

impl GridConfig {
    pub fn resolve(&self) -> anyhow::Result<Vec<ModelSpec>> {
        let mut out = self
            .specs
            .iter()
            .map(|name| ModelSpec::preset(name).ok_or_else(|| config_error(format!("unknown model spec `{name}`"))))
            .collect::<anyhow::Result<Vec<_>>>()?;
        out.extend(self.custom.iter().cloned());
        Ok(out)
    }
}

/// Every knob of a run. Command-line flags override the file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub lti: LtiParams,
    pub features: FeatureConfig,
    pub split: SplitSpec,
    pub lagscan: LagScanConfig,
    pub grid: GridConfig,
    pub synth: ScenarioConfig,
    pub data: BTreeMap<String, DataSource>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        toml::from_str(text).map_err(|e| config_error(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Reads a config file and resolves its data paths.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for source in cfg.data.values_mut() {
            if source.path.is_relative() {
                source.path = base.join(&source.path);
            }
        }
        cfg.absolutize();
        Ok(cfg)
    }

    fn absolutize(&mut self) {
        for source in self.data.values_mut() {
            if let Ok(abs) = std::path::absolute(&source.path) {
                source.path = abs;
            }
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.lti.validate().map_err(|e| config_error(format!("[lti] {e}")))?;
        self.synth.validate().map_err(|e| config_error(format!("[synth] {e}")))?;
        if self.features.smoothing_window == 0 {
            return Err(config_error("[features] smoothing_window must be >= 1"));
        }
        if self.lagscan.min_lag < 0 || self.lagscan.min_lag > self.lagscan.max_lag {
            return Err(config_error(format!(
                "[lagscan] need 0 <= min_lag <= max_lag, got {}..{}",
                self.lagscan.min_lag, self.lagscan.max_lag
            )));
        }
        for (name, source) in &self.data {
            if !source.path.exists() {
                return Err(config_error(format!(
                    "[data.{name}] file {} does not exist",
                    source.path.display()
                )));
            }
            if !(1..=4).contains(&source.anchor_quarter) {
                return Err(config_error(format!("[data.{name}] anchor_quarter must be in 1..=4")));
            }
        }
        self.grid.resolve()?;
        Ok(())
    }

    /// Twelve hex digits of the SHA-256 of the config without its output
    /// directory.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = None;
        let digest = Sha256::digest(canonical.to_toml().as_bytes());
        hex::encode(digest)[..12].to_string()
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from("runs"))
    }

    pub fn run_dir(&self) -> PathBuf {
        self.output_dir().join(format!("run-{}", self.hash()))
    }
}

/// Parses `a..b` or `a..=b`, both inclusive.
pub fn parse_lag_range(text: &str) -> Result<(i64, i64), String> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| format!("expected a..b, got `{text}`"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: i64 = a.trim().parse().map_err(|_| format!("invalid lag `{a}`"))?;
    let b: i64 = b.trim().parse().map_err(|_| format!("invalid lag `{b}`"))?;
    if a < 0 || a > b {
        return Err(format!("need 0 <= a <= b, got {a}..{b}"));
    }
    Ok((a, b))
}

pub fn parse_cutoff(text: &str) -> Result<QuarterIndex, String> {
    hlc_core::timeseries::parse_quarter(text).map_err(|e| e.to_string())
}
