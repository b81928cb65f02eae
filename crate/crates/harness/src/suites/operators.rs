//! `d₀₁`, `d′` and `d″` applied to polynomial form fields.

use rand::Rng;

use finsler_liouville::geometry::{fiber_jets, FiberJets};
use finsler_liouville::sampling::{random_form_field, random_scalar_field};
use finsler_liouville::vcalc::{frame_vector, liouville_vector};
use finsler_liouville::{Field, Form, Metric, Point, Result, Scalar};

use super::{cases, over_cases, rel_form, small, RunError};
use crate::config::RunConfig;
use crate::registry::Suite;
use crate::report::Tally;

const ANCHORS: [&str; 12] = [
    "ops/d01-stability",
    "ops/xi1-commutation",
    "ops/d01-split",
    "ops/dprime-function",
    "ops/dprime-coordinate",
    "ops/dsecond-function",
    "ops/leibniz",
    "ops/dprime-squared",
    "ops/anticommutation",
    "ops/one-form-representation",
    "ops/dy-wedge-closed",
    "ops/d01-squared",
];

pub fn run(cfg: &RunConfig) -> std::result::Result<Tally, RunError> {
    Ok(over_cases(
        cases(cfg, Suite::Operators, cfg.samples.points)?,
        |mut case| {
            let mut t = Tally::new();
            for p in &case.points {
                if point_identities(&case.metric, p, &mut case.rng, &mut t).is_err() {
                    ANCHORS.iter().for_each(|a| t.fail(a));
                }
            }
            t
        },
    ))
}

fn val(field: &Field, fj: &FiberJets<f64>) -> Result<Form> {
    field.value_at(fj)
}

/// `rel_form` after bringing both sides to values.
fn gap(a: &Field, b: &Field, fj: &FiberJets<f64>) -> Result<f64> {
    Ok(rel_form(&val(a, fj)?, &val(b, fj)?))
}

fn zero_gap(a: &Field, fj: &FiberJets<f64>, scale: f64) -> Result<f64> {
    Ok(small(&val(a, fj)?, scale))
}

fn point_identities(spec: &Metric, p: &Point, rng: &mut impl Rng, t: &mut Tally) -> Result<()> {
    let n = p.n();
    let fj = fiber_jets(spec, p)?;
    let thetas: Vec<Field> = (0..n).map(Field::theta).collect();

    for q in 0..n {
        let w = random_form_field(rng, n, q);
        let scale = val(&w, &fj)?.norm();
        let w1 = w.xi1();

        if q >= 1 {
            let r = w.xi2().d01();
            t.add(
                "ops/d01-stability",
                zero_gap(&r.xi1(), &fj, val(&r, &fj)?.norm())?,
            );
        }
        t.add("ops/xi1-commutation", gap(&w.d01().xi1(), &w1.d01().xi1(), &fj)?);
        t.add(
            "ops/d01-split",
            gap(&w1.d_prime().add(&w1.d_second()), &w1.d01(), &fj)?,
        );
        t.add("ops/d01-squared", zero_gap(&w.d01().d01(), &fj, scale)?);

        if q + 2 <= n {
            let dd = w1.d_prime().d_prime();
            t.add("ops/dprime-squared", zero_gap(&dd, &fj, scale)?);
            let anti = w1.d_second().d01().add(&w1.d_prime().d_second());
            t.add("ops/anticommutation", zero_gap(&anti, &fj, scale)?);
        }

        for s in 1..n.saturating_sub(q) {
            let th = random_form_field(rng, n, s).xi1();
            let lhs = w1.wedge(&th).d_prime();
            let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
            let rhs = w1.d_prime().wedge(&th).add(&w1.wedge(&th.d_prime()).scale(sign));
            t.add("ops/leibniz", gap(&lhs, &rhs, &fj)?);
        }
    }

    // functions
    let f: Scalar = random_scalar_field(rng, n);
    let fv = f.at(&fj)?;
    let ff = f.clone().into_form();
    let mut expected = Form::zero(n, 1, &0.0);
    for (i, th) in thetas.iter().enumerate() {
        let xf = fv.directional(&frame_vector(&fj, i), 0).value();
        expected = expected.try_add(&val(th, &fj)?.scale(xf))?;
    }
    t.add(
        "ops/dprime-function",
        rel_form(&val(&ff.d_prime(), &fj)?, &expected),
    );
    let zf = fv.directional(&liouville_vector(&fj), 0).value();
    let w0 = val(&Field::omega0(), &fj)?;
    t.add(
        "ops/dsecond-function",
        rel_form(&val(&ff.d_second(), &fj)?, &w0.scale(zf)),
    );

    for (j, th) in thetas.iter().enumerate() {
        let dy = Scalar::coordinate(j).into_form().d_prime();
        t.add("ops/dprime-coordinate", gap(&dy, th, &fj)?);
    }

    let a = random_form_field(rng, n, 1).xi1();
    let av = val(&a, &fj)?;
    let mut rebuilt = Form::zero(n, 1, &0.0);
    for (i, th) in thetas.iter().enumerate() {
        rebuilt = rebuilt.try_add(&val(th, &fj)?.scale(av.coeffs()[i]))?;
    }
    t.add("ops/one-form-representation", rel_form(&rebuilt, &av));

    for i in 0..n {
        for j in (i + 1)..n {
            let d = thetas[i].wedge(&thetas[j]).d_prime();
            t.add("ops/dy-wedge-closed", zero_gap(&d, &fj, 1.0)?);
        }
    }
    Ok(())
}
