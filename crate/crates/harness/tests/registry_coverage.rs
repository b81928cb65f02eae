use std::collections::BTreeMap;

use liouville_harness::{run, RunConfig, Suite, REGISTRY};

const SMALL: &str = "dims = [2, 3]
[samples]
points = 6
oracle_points = 3
polynomials = 20
primitives = 4
targets = 1
";

#[test]
fn every_identity_has_exactly_one_row() {
    let cfg = RunConfig::from_toml(SMALL).unwrap();
    let report = run(&cfg, "all", false).unwrap();
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for row in &report.rows {
        *seen.entry(row.anchor.as_str()).or_default() += 1;
    }
    for def in REGISTRY {
        assert_eq!(seen.get(def.anchor), Some(&1), "{}", def.anchor);
    }
    assert_eq!(report.rows.len(), REGISTRY.len());
    for row in &report.rows {
        assert!(row.samples > 0, "{} was never sampled", row.anchor);
        assert!(row.passed, "{} failed: {:?}", row.anchor, row.max_residual);
        assert!(row.seconds.is_none());
    }
}

#[test]
fn rows_are_sorted_by_anchor() {
    let cfg = RunConfig::from_toml(SMALL).unwrap();
    let report = run(&cfg, "forms", false).unwrap();
    let anchors: Vec<&str> = report.rows.iter().map(|r| r.anchor.as_str()).collect();
    let mut sorted = anchors.clone();
    sorted.sort_unstable();
    assert_eq!(anchors, sorted);
}

#[test]
fn each_suite_reports_only_its_own_rows() {
    let cfg = RunConfig::from_toml(SMALL).unwrap();
    for suite in Suite::ALL {
        let report = run(&cfg, suite.name(), false).unwrap();
        assert!(!report.rows.is_empty());
        assert!(report.rows.iter().all(|r| r.suite == suite));
    }
}

#[test]
fn json_rows_carry_the_report_keys() {
    let cfg = RunConfig::from_toml(SMALL).unwrap();
    let report = run(&cfg, "brackets", true).unwrap();
    let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    let row = &v["rows"][0];
    for key in [
        "suite",
        "identity",
        "anchor",
        "max_residual",
        "tolerance",
        "passed",
        "samples",
        "seconds",
    ] {
        assert!(row.get(key).is_some(), "missing {key}");
    }
    assert!(row["seconds"].is_f64());
}

#[test]
fn unknown_suite_is_an_error() {
    let cfg = RunConfig::from_toml(SMALL).unwrap();
    assert!(run(&cfg, "curvature", false).is_err());
}
