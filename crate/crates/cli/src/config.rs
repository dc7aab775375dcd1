// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

//! Strict JSON experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::ExpError;
use kerrsim::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Fig2Sweep,
    CatGeneration,
    ChainValidation,
    OracleCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Fig2Sweep => "fig2_sweep",
            ExperimentKind::CatGeneration => "cat_generation",
            ExperimentKind::ChainValidation => "chain_validation",
            ExperimentKind::OracleCheck => "oracle_check",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A real number or a `[re, im]` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn to_c64(self) -> C64 {
        match self {
            ComplexValue::Real(x) => C64::new(x, 0.0),
            ComplexValue::Pair([re, im]) => C64::new(re, im),
        }
    }
}

/// `"auto"` or a fixed Fock dimension per mode.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum Truncation {
    #[default]
    Auto,
    Fixed(usize),
}

impl Serialize for Truncation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Truncation::Auto => s.serialize_str("auto"),
            Truncation::Fixed(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Truncation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) if s == "auto" => Ok(Truncation::Auto),
            Value::Number(n) => n
                .as_u64()
                .map(|n| Truncation::Fixed(n as usize))
                .ok_or_else(|| serde::de::Error::custom("truncation must be a positive integer")),
            other => Err(serde::de::Error::custom(format!("truncation must be \"auto\" or an integer, got {other}"))),
        }
    }
}

impl Truncation {
    /// Fock dimension for the largest amplitude `alpha_max`.
    pub fn resolve(self, alpha_max: f64) -> usize {
        match self {
            Truncation::Auto => kerrsim::fock::auto_truncation(alpha_max),
            Truncation::Fixed(n) => n,
        }
    }
}

fn default_mu() -> f64 {
    1.0
}

fn default_time_points() -> usize {
    10
}

/// Experiment configuration. Every field has a default; unknown keys are
/// rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: Option<ExperimentKind>,
    /// Physical-mode amplitude α; the normal-mode amplitude is √2·α.
    #[serde(default)]
    pub alpha: Option<ComplexValue>,
    /// Γ = κ/μ values.
    #[serde(default)]
    pub gamma_grid: Option<Vec<f64>>,
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default)]
    pub truncation: Truncation,
    #[serde(default = "default_time_points")]
    pub time_points: usize,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    /// δ/λ values for the approximation-chain ladder.
    #[serde(default)]
    pub ratio_ladder: Option<Vec<f64>>,
    #[serde(default)]
    pub state_dump_path: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config deserializes")
    }
}

/// Number of points of the default Γ grid.
pub const DEFAULT_GRID_POINTS: usize = 40;
pub const DEFAULT_LADDER: [f64; 4] = [10.0, 30.0, 50.0, 100.0];
pub const DEFAULT_ORACLE_GAMMAS: [f64; 2] = [1e-3, 1e-2];

/// 40 log-spaced values from 10⁻⁴ to 10⁻¹; decades land exactly on their
/// decimal values.
pub fn default_gamma_grid() -> Vec<f64> {
    let n = DEFAULT_GRID_POINTS - 1;
    (0..=n)
        .map(|k| {
            let num = 3 * k;
            if num % n == 0 {
                10f64.powi(-4 + (num / n) as i32)
            } else {
                10f64.powf(-4.0 + num as f64 / n as f64)
            }
        })
        .collect()
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ExpError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ExpError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ExpError> {
        let text = std::fs::read_to_string(path).map_err(|source| ExpError::Io { path: path.to_path_buf(), source })?;
        let value: Value = serde_json::from_str(&text).map_err(|e| ExpError::Config(format!("{}: {e}", path.display())))?;
        Self::from_value(value, overrides)
    }

    /// Apply `key=value` overrides to a JSON document and parse it.
    pub fn from_value(mut value: Value, overrides: &[String]) -> Result<Self, ExpError> {
        let obj = value.as_object_mut().ok_or_else(|| ExpError::Config("config must be a JSON object".into()))?;
        apply_overrides(obj, overrides)?;
        let cfg: Self = serde_json::from_value(value).map_err(|e| ExpError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ExpError> {
        let bad = |msg: String| Err(ExpError::Config(msg));
        if let Some(a) = self.alpha {
            let a = a.to_c64();
            if !(a.re.is_finite() && a.im.is_finite()) {
                return bad(format!("alpha {a} is not finite"));
            }
        }
        if let Some(g) = &self.gamma_grid {
            if g.is_empty() || g.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return bad("gamma_grid values must be finite and non-negative".into());
            }
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return bad(format!("mu must be positive, got {}", self.mu));
        }
        if self.time_points < 2 {
            return bad(format!("time_points must be at least 2, got {}", self.time_points));
        }
        if let Truncation::Fixed(n) = self.truncation {
            if n < 2 {
                return bad(format!("truncation {n} is below 2"));
            }
        }
        if let Some(l) = &self.ratio_ladder {
            if l.is_empty() || l.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return bad("ratio_ladder values must be positive".into());
            }
        }
        Ok(())
    }

    /// α, defaulting to 0.5 for the chain validation and 2 otherwise.
    pub fn alpha_for(&self, kind: ExperimentKind) -> C64 {
        match (self.alpha, kind) {
            (Some(a), _) => a.to_c64(),
            (None, ExperimentKind::ChainValidation) => C64::new(0.5, 0.0),
            (None, _) => C64::new(2.0, 0.0),
        }
    }

    pub fn gammas_for(&self, kind: ExperimentKind) -> Vec<f64> {
        match (&self.gamma_grid, kind) {
            (Some(g), _) => g.clone(),
            (None, ExperimentKind::OracleCheck) => DEFAULT_ORACLE_GAMMAS.to_vec(),
            (None, _) => default_gamma_grid(),
        }
    }

    pub fn ladder(&self) -> Vec<f64> {
        self.ratio_ladder.clone().unwrap_or_else(|| DEFAULT_LADDER.to_vec())
    }

    pub fn check_kind(&self, kind: ExperimentKind) -> Result<(), ExpError> {
        match self.experiment {
            Some(k) if k != kind => Err(ExpError::Config(format!("config is for {k}, not {kind}"))),
            _ => Ok(()),
        }
    }
}

fn apply_overrides(obj: &mut Map<String, Value>, overrides: &[String]) -> Result<(), ExpError> {
    for o in overrides {
        let (key, raw) = o
            .split_once('=')
            .ok_or_else(|| ExpError::Config(format!("override {o:?} is not key=value")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ExpError::Config(format!("override {o:?} has an empty key")));
        }
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        obj.insert(key.to_string(), value);
    }
    Ok(())
}
