//! One line per acceptance criterion, on the default configuration
//! (n = 2, 3, 4; 200 points; seed 42).

use std::process::ExitCode;
use std::time::{Duration, Instant};

use liouville_harness::cli::main_with;
use liouville_harness::{run, Report, Row, RunConfig};

fn rows<'a>(r: &'a Report, prefix: &str) -> Vec<&'a Row> {
    r.rows
        .iter()
        .filter(|row| row.anchor.starts_with(prefix))
        .collect()
}

fn worst(rows: &[&Row]) -> f64 {
    rows.iter()
        .map(|r| r.max_residual.unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max)
}

/// All rows sampled and below `bound`, except those listed in `skip`.
fn below(r: &Report, prefix: &str, bound: f64, skip: &[&str]) -> (bool, String) {
    let sel: Vec<&Row> = rows(r, prefix)
        .into_iter()
        .filter(|row| !skip.contains(&row.anchor.as_str()))
        .collect();
    let ok = !sel.is_empty() && sel.iter().all(|row| row.passed && row.samples > 0) && worst(&sel) < bound;
    (
        ok,
        format!("{} rows, worst {:.2e} < {bound:.0e}", sel.len(), worst(&sel)),
    )
}

fn row<'a>(r: &'a Report, anchor: &str) -> &'a Row {
    r.rows.iter().find(|row| row.anchor == anchor).expect(anchor)
}

fn line(n: usize, title: &str, (ok, detail): (bool, String)) -> bool {
    println!(
        "criterion {n}: {} {title} ({detail})",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

fn main() -> ExitCode {
    let cfg = RunConfig::default();
    assert_eq!((cfg.seed, cfg.samples.points), (42, 200));
    assert_eq!(cfg.dims, vec![2, 3, 4]);

    let start = Instant::now();
    let r = run(&cfg, "all", false).unwrap();
    let elapsed = start.elapsed();

    let mut all = true;
    all &= line(1, "Euler identities", below(&r, "euler/", 1e-9, &[]));

    let (frame_ok, frame_detail) = below(&r, "frame/", 1e-9, &["frame/basis-certificate"]);
    let t2 = row(&r, "frame/t-two-formulas")
        .max_residual
        .unwrap_or(f64::INFINITY);
    let cert = row(&r, "frame/basis-certificate").passed;
    all &= line(
        2,
        "frame identities",
        (
            frame_ok && t2 < 1e-10 && cert,
            format!("{frame_detail}; t formulas agree to {t2:.2e} < 1e-10; basis certified: {cert}"),
        ),
    );
    all &= line(3, "brackets", below(&r, "brackets/", 1e-8, &[]));
    all &= line(4, "form splitting", below(&r, "forms/", 1e-10, &[]));
    all &= line(5, "operators", below(&r, "ops/", 1e-8, &[]));
    all &= line(6, "chart transitions", below(&r, "trans/", 1e-7, &[]));

    let rec = row(&r, "leaf/reconstruction");
    let path = row(&r, "leaf/path-independence");
    let rejected = row(&r, "leaf/non-closed-rejected");
    let semi = row(&r, "leaf/semiexact");
    let closed = row(&r, "leaf/exact-closed");
    let per_dim = cfg.samples.primitives * cfg.samples.targets * cfg.dims.len();
    let poincare_ok = rec.passed
        && rec.max_residual.is_some_and(|v| v < 1e-6)
        && path.passed
        && path.max_residual.is_some_and(|v| v < 1e-7)
        && rec.samples >= per_dim / cfg.samples.targets
        && rejected.passed
        && rejected.max_residual == Some(0.0)
        && semi.passed
        && closed.passed
        && rows(&r, "leaf/").iter().all(|row| row.passed);
    all &= line(
        7,
        "leafwise primitives",
        (
            poincare_ok,
            format!(
                "{} forms, reconstruction {:.2e}, two-path {:.2e}, {} non-closed refused",
                rec.samples,
                rec.max_residual.unwrap_or(f64::NAN),
                path.max_residual.unwrap_or(f64::NAN),
                rejected.samples
            ),
        ),
    );
    all &= line(8, "finite-difference oracle", below(&r, "oracle/", 1e-5, &[]));

    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = |p: &std::path::Path| {
        vec![
            "liouville".into(),
            "check".into(),
            "all".into(),
            "--seed".into(),
            "42".into(),
            "--format".into(),
            "json".into(),
            "--out".into(),
            p.as_os_str().to_owned(),
        ]
    };
    let ca = main_with::<_, std::ffi::OsString>(args(&a));
    let cb = main_with::<_, std::ffi::OsString>(args(&b));
    let same = std::fs::read(&a).unwrap() == std::fs::read(&b).unwrap();
    all &= line(
        9,
        "reproducible report",
        (
            ca == 0 && cb == 0 && same,
            format!("exit codes {ca}, {cb}; byte-identical: {same}"),
        ),
    );

    let fast = elapsed < Duration::from_secs(60);
    println!(
        "timing: {} full run in {:.1} s (limit 60 s)",
        if fast { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    if all && fast {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
