//! Residual tallies and the rendered report.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::registry::{self, Suite};

/// Worst residual and sample count per anchor.
#[derive(Clone, Debug, Default)]
pub struct Tally {
    entries: BTreeMap<&'static str, Entry>,
}

#[derive(Clone, Debug, Default)]
struct Entry {
    max: f64,
    samples: usize,
    poisoned: bool,
}

impl Tally {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one sample. Non-finite residuals poison the row.
    pub fn add(&mut self, anchor: &'static str, residual: f64) {
        debug_assert!(registry::lookup(anchor).is_some(), "unregistered anchor {anchor}");
        let e = self.entries.entry(anchor).or_default();
        e.samples += 1;
        if residual.is_finite() {
            e.max = e.max.max(residual.abs());
        } else {
            e.poisoned = true;
        }
    }

    /// Records an evaluation error as a failed sample.
    pub fn fail(&mut self, anchor: &'static str) {
        self.add(anchor, f64::INFINITY);
    }

    pub fn add_result(&mut self, anchor: &'static str, r: finsler_liouville::Result<f64>) {
        match r {
            Ok(v) => self.add(anchor, v),
            Err(_) => self.fail(anchor),
        }
    }

    /// Registers the anchor without a sample (identity vacuous in this case).
    pub fn touch(&mut self, anchor: &'static str) {
        self.entries.entry(anchor).or_default();
    }

    pub fn merge(&mut self, other: Tally) {
        for (k, v) in other.entries {
            let e = self.entries.entry(k).or_default();
            e.samples += v.samples;
            e.max = e.max.max(v.max);
            e.poisoned |= v.poisoned;
        }
    }

    pub fn into_rows(self, suite: Suite, cfg: &RunConfig, seconds: Option<f64>) -> Vec<Row> {
        registry::for_suite(suite)
            .map(|d| {
                let seen = self.entries.get(d.anchor);
                let e = seen.cloned().unwrap_or_default();
                let tolerance = cfg.tolerance(d.anchor);
                let max_residual = (!e.poisoned).then_some(e.max);
                // touched with no samples: vacuous everywhere, so it holds
                let passed = seen.is_some() && max_residual.is_some_and(|r| r <= tolerance);
                Row {
                    suite,
                    identity: d.identity.to_string(),
                    anchor: d.anchor.to_string(),
                    passed,
                    max_residual,
                    tolerance,
                    samples: e.samples,
                    seconds,
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub suite: Suite,
    pub identity: String,
    pub anchor: String,
    /// `None` when some sample produced a non-finite residual or an error.
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub samples: usize,
    /// Wall time of the suite; only filled when timings are requested.
    pub seconds: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub metrics: Vec<String>,
    pub passed: bool,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn new(suite: &str, cfg: &RunConfig, mut rows: Vec<Row>) -> Self {
        rows.sort_by(|a, b| a.anchor.cmp(&b.anchor));
        Self {
            suite: suite.to_string(),
            seed: cfg.seed,
            dims: cfg.dims.clone(),
            metrics: cfg.metrics.clone(),
            passed: rows.iter().all(|r| r.passed),
            rows,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let res = r
                .max_residual
                .map_or_else(|| "non-finite".to_string(), |v| format!("{v:.3e}"));
            let _ = write!(
                out,
                "{} {:<30} {:>10} <= {:<8.1e} n={:<6}",
                if r.passed { "PASS" } else { "FAIL" },
                r.anchor,
                res,
                r.tolerance,
                r.samples
            );
            if let Some(s) = r.seconds {
                let _ = write!(out, " {s:>7.3}s");
            }
            let _ = writeln!(out, "  {}", r.identity);
        }
        let failed = self.rows.iter().filter(|r| !r.passed).count();
        let _ = writeln!(
            out,
            "{}: {} identities, {} failed (suite {}, seed {})",
            if self.passed { "PASS" } else { "FAIL" },
            self.rows.len(),
            failed,
            self.suite,
            self.seed
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_tracks_worst_and_poison() {
        let cfg = RunConfig::default();
        let mut t = Tally::new();
        t.add("brackets/xx", 1e-12);
        t.add("brackets/xx", -3e-12);
        t.add("brackets/xz", f64::NAN);
        let rows = t.into_rows(Suite::Brackets, &cfg, None);
        assert_eq!(rows[0].max_residual, Some(3e-12));
        assert!(rows[0].passed);
        assert_eq!(rows[1].max_residual, None);
        assert!(!rows[1].passed);
    }

    #[test]
    fn missing_rows_fail() {
        let cfg = RunConfig::default();
        let rows = Tally::new().into_rows(Suite::Brackets, &cfg, None);
        assert!(rows.iter().all(|r| !r.passed && r.samples == 0));
    }

    #[test]
    fn json_round_trips() {
        let cfg = RunConfig::default();
        let mut t = Tally::new();
        t.add("brackets/xx", 0.0);
        t.add("brackets/xz", 0.0);
        let rep = Report::new("brackets", &cfg, t.into_rows(Suite::Brackets, &cfg, Some(0.5)));
        let back: Report = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
        assert!(rep.to_text().lines().count() == 3);
    }
}
