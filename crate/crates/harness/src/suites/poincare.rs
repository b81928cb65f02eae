//! Primitives of `d′`-closed 1-forms along the leaves, built by path
//! integration, and the companion closedness checks.

use rand::Rng;

use finsler_liouville::geometry::fiber_jets;
use finsler_liouville::leafprim::{is_basic, primitive_1form, project_to_leaf};
use finsler_liouville::sampling::{random_form_field, random_poly, random_vector, FIBER_MAX, FIBER_MIN};
use finsler_liouville::scalar::norm2;
use finsler_liouville::{Field, GeomError, Metric, Point, Result, Scalar};

use super::{cases, over_cases, rel, Case, RunError};
use crate::config::RunConfig;
use crate::registry::Suite;
use crate::report::Tally;

const PATH_SAMPLES: usize = 32;

const PRIMITIVE_ANCHORS: [&str; 5] = [
    "leaf/reconstruction",
    "leaf/path-independence",
    "leaf/primitive-values",
    "leaf/containment",
    "leaf/exact-closed",
];

pub fn run(cfg: &RunConfig) -> std::result::Result<Tally, RunError> {
    let m = cfg.metrics.len();
    let per_metric = cfg.samples.primitives.div_ceil(m);
    let targets = cfg.samples.targets;
    let metrics = cfg.metrics.clone();
    let total = cfg.samples.primitives;
    Ok(over_cases(
        cases(cfg, Suite::Poincare, per_metric)?,
        |mut case| {
            let slot = metrics
                .iter()
                .position(|name| *name == case.metric.name)
                .unwrap_or(0);
            // round-robin share of the exact forms for this dimension
            let share = (0..total).filter(|i| i % m == slot).count();
            one_case(&mut case, share, targets)
        },
    ))
}

fn one_case(case: &mut Case, share: usize, targets: usize) -> Tally {
    let mut t = Tally::new();
    let spec = case.metric.clone();
    let points = case.points.clone();
    for p in points.iter().take(share) {
        if exact_form(&spec, p, targets, &mut case.rng, &mut t).is_err() {
            PRIMITIVE_ANCHORS.iter().for_each(|a| t.fail(a));
        }
        t.add_result("leaf/semiexact", semiexact(&spec, p, &mut case.rng));
        if case.n >= 3 {
            match rejects_non_closed(&spec, p, &mut case.rng) {
                Ok(rejected) => t.add("leaf/non-closed-rejected", if rejected { 0.0 } else { 1.0 }),
                Err(_) => t.fail("leaf/non-closed-rejected"),
            }
        } else {
            // every tangential 1-form is closed on a one-dimensional leaf
            t.touch("leaf/non-closed-rejected");
        }
    }
    t.add_result("leaf/basic", basic(&spec, &points));
    t
}

/// Random `g`, polynomial in `y`, optionally divided by `F`.
fn random_potential(rng: &mut impl Rng, n: usize) -> Scalar {
    let poly = random_poly(rng, n);
    let over_f = rng.gen_bool(0.5);
    Scalar::new(move |fj| {
        let v = poly.eval_jet(fj.y());
        if over_f {
            v.try_div(&fj.f)
        } else {
            Ok(v)
        }
    })
}

fn random_direction(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let y: Vec<f64> = random_vector(rng, n, FIBER_MAX);
        let r = norm2(&y);
        if (FIBER_MIN..=FIBER_MAX).contains(&r) {
            return y;
        }
    }
}

fn exact_form(spec: &Metric, p: &Point, targets: usize, rng: &mut impl Rng, t: &mut Tally) -> Result<()> {
    let n = p.n();
    let g = random_potential(rng, n);
    let omega = g.clone().into_form().d_prime();
    let c = spec.eval_value(&p.x, &p.y)?;
    let base = project_to_leaf(spec, &p.x, &p.y, c)?;
    let ends = (0..targets)
        .map(|_| project_to_leaf(spec, &p.x, &random_direction(rng, n), c))
        .collect::<Result<Vec<_>>>()?;

    let prim = primitive_1form(spec, &omega, &base, &ends, PATH_SAMPLES)?;
    let g_at = |y: &[f64]| -> Result<f64> {
        let fj = fiber_jets(spec, &Point::new(p.x.clone(), y.to_vec())?)?;
        Ok(g.at(&fj)?.value())
    };
    let scale = omega.value_at(&fiber_jets(spec, p)?)?.norm().max(1.0);
    let g0 = g_at(&base.y)?;
    let mut value_scale = 1.0f64;
    for (v, e) in prim.values.iter().zip(&ends) {
        t.add("leaf/primitive-values", rel(*v, g_at(&e.y)? - g0));
        value_scale = value_scale.max(v.abs());
    }
    let r = &prim.record;
    t.add("leaf/reconstruction", r.reconstruction / scale);
    t.add("leaf/path-independence", r.path_dependence / value_scale);
    t.add("leaf/containment", r.containment / c.max(1.0));
    t.add("leaf/exact-closed", r.closedness / scale);

    if n >= 3 {
        let a = random_form_field(rng, n, 1).xi1();
        let two = a.d_prime();
        let fj = fiber_jets(spec, p)?;
        let s = two.value_at(&fj)?.norm().max(1.0);
        t.add("leaf/exact-closed", two.d_prime().value_at(&fj)?.norm() / s);
    }
    Ok(())
}

/// `‖d′d′ω‖` for a function and a tangential 1-form.
fn semiexact(spec: &Metric, p: &Point, rng: &mut impl Rng) -> Result<f64> {
    let n = p.n();
    let fj = fiber_jets(spec, p)?;
    let f = random_potential(rng, n).into_form();
    let mut worst = f.d_prime().d_prime().value_at(&fj)?.norm() / f.value_at(&fj)?.norm().max(1.0);
    if n >= 3 {
        let w: Field = random_form_field(rng, n, 1).xi1();
        let s = w.value_at(&fj)?.norm().max(1.0);
        worst = worst.max(w.d_prime().d_prime().value_at(&fj)?.norm() / s);
    }
    Ok(worst)
}

/// Whether a generic tangential 1-form is refused.
fn rejects_non_closed(spec: &Metric, p: &Point, rng: &mut impl Rng) -> Result<bool> {
    let n = p.n();
    let omega = random_form_field(rng, n, 1).xi1();
    let c = spec.eval_value(&p.x, &p.y)?;
    let base = project_to_leaf(spec, &p.x, &p.y, c)?;
    let end = project_to_leaf(spec, &p.x, &random_direction(rng, n), c)?;
    match primitive_1form(spec, &omega, &base, &[end], PATH_SAMPLES) {
        Ok(_) => Ok(false),
        Err(GeomError::NotClosed { .. }) => Ok(true),
        Err(e) => Err(e),
    }
}

/// `d′(F²)` and `d′(const)` at the case points.
fn basic(spec: &Metric, points: &[Point]) -> Result<f64> {
    let f2 = Scalar::finsler().map(|f| Ok(&f * &f));
    let (_, a) = is_basic(spec, &f2, points)?;
    let (_, b) = is_basic(spec, &Scalar::constant(2.5), points)?;
    Ok(a.max(b))
}
