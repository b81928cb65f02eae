//! Identity suites. Each suite samples points per (dimension, metric) case
//! from its own RNG stream and folds residuals into a [`Tally`].

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use finsler_liouville::sampling::sample_points;
use finsler_liouville::{Form, Metric, Point};

use crate::config::RunConfig;
use crate::registry::Suite;
use crate::report::{Report, Row, Tally};

mod brackets;
mod euler;
mod forms;
mod frame;
mod operators;
mod poincare;
mod transitions;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("unknown suite {0:?} (expected euler, frame, brackets, forms, operators, transitions, poincare or all)")]
    UnknownSuite(String),
    #[error("sampling failed for {metric} in dimension {n}: {source}")]
    Sampling {
        metric: String,
        n: usize,
        source: finsler_liouville::GeomError,
    },
}

/// Portable generator for one named stream: ChaCha8 keyed by the seed, with
/// the stream number taken from an FNV-1a hash of the label.
pub fn stream_rng(seed: u64, label: &str) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(h);
    rng
}

pub struct Case {
    pub n: usize,
    pub metric: Metric,
    pub points: Vec<Point>,
    pub rng: ChaCha8Rng,
}

pub fn cases(cfg: &RunConfig, suite: Suite, count: usize) -> Result<Vec<Case>, RunError> {
    let mut out = Vec::new();
    for &n in &cfg.dims {
        for name in &cfg.metrics {
            let metric = Metric::by_name(name, n).expect("validated metric name");
            let mut rng = stream_rng(cfg.seed, &format!("{suite}/{name}/{n}"));
            let points = sample_points(&metric, count, &mut rng).map_err(|source| RunError::Sampling {
                metric: name.clone(),
                n,
                source,
            })?;
            out.push(Case {
                n,
                metric,
                points,
                rng,
            });
        }
    }
    Ok(out)
}

/// Runs `f` on every case, in parallel, and merges in case order.
pub fn over_cases(cases: Vec<Case>, f: impl Fn(Case) -> Tally + Send + Sync) -> Tally {
    use rayon::prelude::*;
    let parts: Vec<Tally> = cases.into_par_iter().map(f).collect();
    let mut t = Tally::new();
    for p in parts {
        t.merge(p);
    }
    t
}

pub fn run_suite(cfg: &RunConfig, suite: Suite, timings: bool) -> Result<Vec<Row>, RunError> {
    let start = Instant::now();
    let tally = match suite {
        Suite::Euler => euler::run(cfg)?,
        Suite::Frame => frame::run(cfg)?,
        Suite::Brackets => brackets::run(cfg)?,
        Suite::Forms => forms::run(cfg)?,
        Suite::Operators => operators::run(cfg)?,
        Suite::Transitions => transitions::run(cfg)?,
        Suite::Poincare => poincare::run(cfg)?,
    };
    let seconds = timings.then(|| start.elapsed().as_secs_f64());
    Ok(tally.into_rows(suite, cfg, seconds))
}

/// Runs one suite by name, or every suite for `"all"`.
pub fn run(cfg: &RunConfig, name: &str, timings: bool) -> Result<Report, RunError> {
    let suites: Vec<Suite> = if name == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::parse(name).ok_or_else(|| RunError::UnknownSuite(name.to_string()))?]
    };
    let mut rows = Vec::new();
    for s in suites {
        rows.extend(run_suite(cfg, s, timings)?);
    }
    Ok(Report::new(name, cfg, rows))
}

// residual helpers

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `|a − b| / max(1, |a|, |b|)`.
pub(crate) fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

/// Max-abs difference scaled by `max(1, ‖a‖∞, ‖b‖∞)`.
pub(crate) fn rel_vec(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let d = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    d / 1f64.max(max_abs(a)).max(max_abs(b))
}

/// Relative to the size of the reference array (floored at 1e-3), for
/// oracle comparisons.
pub(crate) fn rel_to(reference: &[f64], estimate: &[f64]) -> f64 {
    let d = reference
        .iter()
        .zip(estimate)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    d / max_abs(reference).max(1e-3)
}

pub(crate) fn rel_form(a: &Form, b: &Form) -> f64 {
    if a.degree() != b.degree() || a.n() != b.n() {
        return f64::INFINITY;
    }
    rel_vec(a.coeffs(), b.coeffs())
}

/// Norm of `a`, scaled by `max(1, scale)`.
pub(crate) fn small(a: &Form, scale: f64) -> f64 {
    a.norm() / scale.max(1.0)
}

pub(crate) fn flat(m: &[Vec<f64>]) -> Vec<f64> {
    m.concat()
}
