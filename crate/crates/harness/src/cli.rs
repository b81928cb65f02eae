//! `liouville check | eval | primitive`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

use finsler_liouville::geometry::{fiber_jets, fundamental_tensor, spray};
use finsler_liouville::leafprim::{primitive_1form, project_to_leaf};
use finsler_liouville::vforms::omega0;
use finsler_liouville::{Metric, Point, Scalar};

use crate::config::RunConfig;
use crate::suites;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "liouville",
    version,
    about = "Vertical calculus on the Liouville foliation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run an identity suite and report residuals.
    Check {
        /// euler, frame, brackets, forms, operators, transitions, poincare or all
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Restrict to one metric from the catalog.
        #[arg(long)]
        metric: Option<String>,
        /// Restrict to one dimension.
        #[arg(long = "n")]
        n: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fill in per-suite wall times (the report is then not reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Print g, the spray, t, the frame and ω₀ at one point.
    Eval {
        #[arg(long)]
        metric: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Build a primitive of an exact 1-form along a leaf.
    Primitive {
        #[arg(long)]
        metric: String,
        #[arg(long)]
        demo: bool,
        #[arg(long = "n", default_value_t = 3)]
        n: usize,
    },
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn main_with<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match cli.command {
        Command::Check {
            suite,
            config,
            seed,
            metric,
            n,
            format,
            out,
            timings,
        } => check(&suite, config, seed, metric, n, format, out, timings),
        Command::Eval { metric, x, y } => finish(eval(&metric, &x, &y), EXIT_USAGE),
        Command::Primitive { metric, demo, n } => {
            if !demo {
                eprintln!("error: only `--demo` is available");
                return EXIT_USAGE;
            }
            finish(primitive_demo(&metric, n), EXIT_FAIL)
        }
    }
}

fn finish(r: anyhow::Result<String>, code_on_err: u8) -> u8 {
    match r {
        Ok(s) => {
            print!("{s}");
            EXIT_PASS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            code_on_err
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn check(
    suite: &str,
    config: Option<PathBuf>,
    seed: Option<u64>,
    metric: Option<String>,
    n: Option<usize>,
    format: Format,
    out: Option<PathBuf>,
    timings: bool,
) -> u8 {
    let cfg = match build_config(config, seed, metric, n) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_USAGE;
        }
    };
    let report = match suites::run(&cfg, suite, timings) {
        Ok(r) => r,
        Err(e @ suites::RunError::UnknownSuite(_)) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAIL;
        }
    };
    let body = match format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    let dest = out.or_else(|| cfg.out.as_ref().map(PathBuf::from));
    match dest {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
        None => print!("{body}"),
    }
    if report.passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn build_config(
    path: Option<PathBuf>,
    seed: Option<u64>,
    metric: Option<String>,
    n: Option<usize>,
) -> anyhow::Result<RunConfig> {
    let mut cfg = match path {
        Some(p) => RunConfig::load(&p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(m) = metric {
        cfg.metrics = vec![m];
    }
    if let Some(n) = n {
        cfg.dims = vec![n];
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_vec(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().with_context(|| format!("bad number {t:?}")))
        .collect()
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.12}")).collect();
    format!("[{}]", parts.join(", "))
}

fn eval(metric: &str, x: &str, y: &str) -> anyhow::Result<String> {
    let x = parse_vec(x)?;
    let y = parse_vec(y)?;
    if x.len() != y.len() {
        return Err(anyhow!("x has {} components but y has {}", x.len(), y.len()));
    }
    let spec = Metric::by_name(metric, x.len())?;
    let p = Point::new(x, y)?;
    let ft = fundamental_tensor(&spec, &p)?;
    let sp = spray(&spec, &p)?;
    let fj = fiber_jets(&spec, &p)?;
    let fr = fj.frame.values();
    let mut out = String::new();
    writeln!(out, "metric {} (n = {})", spec.name, p.n())?;
    writeln!(out, "F = {:.12}", fj.f.value())?;
    writeln!(out, "g:")?;
    for row in &ft.g {
        writeln!(out, "  {}", fmt_vec(row))?;
    }
    writeln!(out, "G = {}", fmt_vec(&sp.coeffs))?;
    writeln!(out, "t = {}", fmt_vec(&fr.t))?;
    for (k, xk) in fr.x.iter().enumerate() {
        writeln!(out, "X{} = {}", k + 1, fmt_vec(xk))?;
    }
    writeln!(out, "Z = {}", fmt_vec(&fr.z))?;
    writeln!(out, "omega0 = {}", fmt_vec(omega0(&fr).coeffs()))?;
    Ok(out)
}

/// Primitive of `d′(y¹y²)` on the leaf through a fixed point, compared with
/// the known answer.
fn primitive_demo(metric: &str, n: usize) -> anyhow::Result<String> {
    if n < 2 {
        return Err(anyhow!("the demo needs n ≥ 2"));
    }
    let spec = Metric::by_name(metric, n)?;
    let g = Scalar::new(|fj| Ok(&fj.y()[0] * &fj.y()[1]));
    let omega = g.clone().into_form().d_prime();
    let x0 = vec![0.1; n];
    let mut y0 = vec![0.0; n];
    y0[0] = 1.0;
    let c = spec.eval_value(&x0, &y0)?;
    let base = project_to_leaf(&spec, &x0, &y0, c)?;
    let mut ends = Vec::new();
    for k in 1..n {
        let mut y = vec![0.3; n];
        y[k] = 1.0;
        ends.push(project_to_leaf(&spec, &x0, &y, c)?);
    }
    let prim = primitive_1form(&spec, &omega, &base, &ends, 32)?;
    let g_at = |y: &[f64]| y[0] * y[1];
    let mut out = String::new();
    writeln!(
        out,
        "metric {} (n = {n}), leaf F = {c:.12} over x0 = {}",
        spec.name,
        fmt_vec(&x0)
    )?;
    writeln!(out, "omega = d'(y1 y2), base y = {}", fmt_vec(&base.y))?;
    for (v, e) in prim.values.iter().zip(&ends) {
        let exact = g_at(&e.y) - g_at(&base.y);
        writeln!(
            out,
            "target {}  integral {v:.12}  exact {exact:.12}  diff {:.3e}",
            fmt_vec(&e.y),
            (v - exact).abs()
        )?;
    }
    let r = &prim.record;
    writeln!(out, "closedness      {:.3e}", r.closedness)?;
    writeln!(out, "reconstruction  {:.3e}", r.reconstruction)?;
    writeln!(out, "path dependence {:.3e}", r.path_dependence)?;
    writeln!(out, "containment     {:.3e}", r.containment)?;
    Ok(out)
}
