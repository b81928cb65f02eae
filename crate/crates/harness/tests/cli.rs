use std::io::Write;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_liouville"))
}

fn config(body: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(body.as_bytes()).unwrap();
    f
}

const SMALL: &str = "dims = [2]
metrics = [\"randers\"]
[samples]
points = 4
oracle_points = 2
polynomials = 10
primitives = 2
targets = 1
";

fn code(cmd: &mut Command) -> i32 {
    cmd.output().unwrap().status.code().unwrap()
}

#[test]
fn passing_suite_exits_zero() {
    let cfg = config(SMALL);
    assert_eq!(
        code(bin().args(["check", "brackets", "--config"]).arg(cfg.path())),
        0
    );
}

#[test]
fn tightened_tolerance_exits_one() {
    let cfg = config(&format!("{SMALL}[tolerances]\n\"brackets/xz\" = 1e-30\n"));
    let out = bin()
        .args(["check", "brackets", "--format", "text", "--config"])
        .arg(cfg.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL brackets/xz"));
}

#[test]
fn usage_and_config_errors_exit_two() {
    assert_eq!(code(bin().args(["check", "curvature"])), 2);
    assert_eq!(code(bin().args(["check", "euler", "--format", "yaml"])), 2);
    assert_eq!(
        code(bin().args(["check", "euler", "--config", "/nonexistent/liouville.toml"])),
        2
    );
    assert_eq!(code(bin().args(["check", "euler", "--metric", "flat"])), 2);
    assert_eq!(code(bin().args(["check", "euler", "--n", "9"])), 2);
    let bad = config("seed = \"x\"\n");
    assert_eq!(
        code(bin().args(["check", "euler", "--config"]).arg(bad.path())),
        2
    );
    assert_eq!(code(bin().arg("frobnicate")), 2);
    assert_eq!(code(&mut bin()), 2);
}

#[test]
fn out_writes_json_report() {
    let cfg = config(SMALL);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let status = bin()
        .args(["check", "forms", "--format", "json", "--seed", "9", "--config"])
        .arg(cfg.path())
        .arg("--out")
        .arg(&path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["seed"], 9);
    assert_eq!(v["suite"], "forms");
    assert!(v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["seconds"].is_null()));
}

#[test]
fn eval_prints_the_frame() {
    let out = bin()
        .args(["eval", "--metric", "euclidean", "--x", "0,0", "--y", "3,4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    for key in [
        "g:",
        "G = ",
        "t = [0.120000000000, 0.160000000000]",
        "X1 = ",
        "X2 = ",
        "omega0 = ",
    ] {
        assert!(s.contains(key), "missing {key} in\n{s}");
    }
}

#[test]
fn eval_rejects_bad_points() {
    let mismatched = bin()
        .args(["eval", "--metric", "euclidean", "--x", "0,0", "--y", "1,2,3"])
        .output()
        .unwrap();
    assert_eq!(mismatched.status.code(), Some(2));
    let zero = bin()
        .args(["eval", "--metric", "euclidean", "--x", "0,0", "--y", "0,0"])
        .output()
        .unwrap();
    assert_eq!(zero.status.code(), Some(2));
}

#[test]
fn primitive_demo_runs() {
    let out = bin()
        .args(["primitive", "--metric", "randers", "--demo"])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("path dependence"));
    assert_eq!(code(bin().args(["primitive", "--metric", "randers"])), 2);
}
