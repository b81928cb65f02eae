//! Run configuration, read from TOML over embedded defaults.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use finsler_liouville::{ChartTransition, MetricSpec};

use crate::registry;

pub const DEFAULT_TOML: &str = include_str!("../default.toml");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Samples {
    pub points: usize,
    pub oracle_points: usize,
    pub polynomials: usize,
    pub primitives: usize,
    pub targets: usize,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub dims: Vec<usize>,
    pub metrics: Vec<String>,
    pub transitions: Vec<String>,
    pub samples: Samples,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub out: Option<String>,
}

/// Same shape as [`RunConfig`] with every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Partial {
    seed: Option<u64>,
    dims: Option<Vec<usize>>,
    metrics: Option<Vec<String>>,
    transitions: Option<Vec<String>>,
    samples: Option<PartialSamples>,
    tolerances: Option<BTreeMap<String, f64>>,
    out: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialSamples {
    points: Option<usize>,
    oracle_points: Option<usize>,
    polynomials: Option<usize>,
    primitives: Option<usize>,
    targets: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        toml::from_str(DEFAULT_TOML).expect("embedded defaults parse")
    }
}

impl RunConfig {
    /// Defaults overlaid with a TOML document.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let p: Partial = toml::from_str(text)?;
        let mut c = Self::default();
        if let Some(v) = p.seed {
            c.seed = v;
        }
        if let Some(v) = p.dims {
            c.dims = v;
        }
        if let Some(v) = p.metrics {
            c.metrics = v;
        }
        if let Some(v) = p.transitions {
            c.transitions = v;
        }
        if let Some(s) = p.samples {
            let d = &mut c.samples;
            d.points = s.points.unwrap_or(d.points);
            d.oracle_points = s.oracle_points.unwrap_or(d.oracle_points);
            d.polynomials = s.polynomials.unwrap_or(d.polynomials);
            d.primitives = s.primitives.unwrap_or(d.primitives);
            d.targets = s.targets.unwrap_or(d.targets);
        }
        if let Some(t) = p.tolerances {
            c.tolerances.extend(t);
        }
        if p.out.is_some() {
            c.out = p.out;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.dims.is_empty() {
            return bad("at least one dimension is required".into());
        }
        if let Some(n) = self.dims.iter().find(|n| !(2..=6).contains(*n)) {
            return bad(format!("dimension {n} outside 2..=6"));
        }
        if self.metrics.is_empty() {
            return bad("at least one metric is required".into());
        }
        for m in &self.metrics {
            MetricSpec::<f64>::by_name(m, 2).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        for t in &self.transitions {
            ChartTransition::<f64>::by_name(t, 2).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        if self.samples.points == 0 || self.samples.primitives == 0 || self.samples.targets == 0 {
            return bad("sample counts must be positive".into());
        }
        for (anchor, tol) in &self.tolerances {
            if registry::lookup(anchor).is_none() {
                return bad(format!("tolerance override for unknown anchor {anchor:?}"));
            }
            if !(*tol > 0.0) || !tol.is_finite() {
                return bad(format!("tolerance for {anchor:?} must be positive, got {tol}"));
            }
        }
        Ok(())
    }

    pub fn tolerance(&self, anchor: &str) -> f64 {
        self.tolerances
            .get(anchor)
            .copied()
            .or_else(|| registry::lookup(anchor).map(|d| d.tolerance))
            .expect("registered anchor")
    }
}
