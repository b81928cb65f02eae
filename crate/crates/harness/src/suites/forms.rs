//! Pointwise algebra of vertical forms against the Liouville splitting.

use rand::Rng;

use finsler_liouville::geometry::{fiber_jets, frame_basis};
use finsler_liouville::sampling::random_form;
use finsler_liouville::vforms::{omega0, theta};
use finsler_liouville::{Form, Frame, Metric, Point, Result, ScalarField};

use super::{cases, over_cases, rel, rel_form, small, RunError};
use crate::config::RunConfig;
use crate::registry::Suite;
use crate::report::Tally;

const ANCHORS: [&str; 20] = [
    "forms/omega0-z",
    "forms/omega0-leaf",
    "forms/omega0-dlnf",
    "forms/dy-z",
    "forms/pure-iff-iz",
    "forms/iz-iz",
    "forms/mixed-iz-nonzero",
    "forms/mixed-wedge-omega0",
    "forms/eval-criterion",
    "forms/split-reconstruct",
    "forms/split-unique",
    "forms/projector-laws",
    "forms/mixed-equivalence",
    "forms/wedge-tangential",
    "forms/wedge-mixed",
    "forms/wedge-mixed-mixed",
    "forms/omega0-type",
    "forms/theta-z",
    "forms/theta-dependence",
    "forms/theta-wedge",
];

pub fn run(cfg: &RunConfig) -> std::result::Result<Tally, RunError> {
    Ok(over_cases(
        cases(cfg, Suite::Forms, cfg.samples.points)?,
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

/// Increasing `k`-subsets of `0..m`.
fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            go(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// Max of `|ω(args)|` over increasing tuples of `vecs`, optionally led by `lead`.
fn max_eval(w: &Form, vecs: &[Vec<f64>], lead: Option<&[f64]>) -> Result<f64> {
    let k = w.degree() - usize::from(lead.is_some());
    let mut worst = 0.0f64;
    for s in subsets(vecs.len(), k) {
        let mut args: Vec<Vec<f64>> = lead.map(|l| vec![l.to_vec()]).unwrap_or_default();
        args.extend(s.iter().map(|&i| vecs[i].clone()));
        worst = worst.max(w.evaluate(&args)?.abs());
    }
    Ok(worst)
}

/// `max |a(args) − b(args)|` over increasing tuples.
fn eval_gap(a: &Form, b: &Form, vecs: &[Vec<f64>]) -> Result<f64> {
    let mut worst = 0.0f64;
    for s in subsets(vecs.len(), a.degree()) {
        let args: Vec<Vec<f64>> = s.iter().map(|&i| vecs[i].clone()).collect();
        worst = worst.max((a.evaluate(&args)? - b.evaluate(&args)?).abs());
    }
    Ok(worst)
}

fn point_identities(spec: &Metric, p: &Point, rng: &mut impl Rng, t: &mut Tally) -> Result<()> {
    let n = p.n();
    let fj = fiber_jets(spec, p)?;
    let fr: Frame = fj.frame.values();
    let z = fr.z.clone();
    let w0 = omega0(&fr);
    let leaf: Vec<Vec<f64>> = {
        let b = frame_basis(&fr)?;
        b.kept().iter().map(|&k| fr.x[k].clone()).collect()
    };

    t.add("forms/omega0-z", rel(w0.evaluate(std::slice::from_ref(&z))?, 1.0));
    let mut leaf_max = 0.0f64;
    for xk in &fr.x {
        leaf_max = leaf_max.max(w0.evaluate(std::slice::from_ref(xk))?.abs());
    }
    t.add("forms/omega0-leaf", leaf_max);
    let dln = ScalarField::ln_finsler().into_form().d01().value_at(&fj)?;
    t.add("forms/omega0-dlnf", rel_form(&dln, &w0));

    let mut dyz = 0.0f64;
    for i in 0..n {
        let dy = Form::one_form((0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect());
        dyz = dyz.max(rel(dy.evaluate(std::slice::from_ref(&z))?, z[i]));
    }
    t.add("forms/dy-z", dyz);

    for q in 1..=n {
        let r = random_form(rng, n, q);
        let scale = r.norm();
        let w1 = r.xi1(&fr)?;
        let w2 = r.xi2(&fr)?;

        // tangential part: no Z slot; and i_Z agrees with a leading Z slot
        let iz_r = r.interior_z(&fr)?;
        let mut gap = small(&w1.interior_z(&fr)?, scale).max(max_eval(&w1, &leaf, Some(&z))?);
        if q >= 2 {
            for s in subsets(leaf.len(), q - 1) {
                let tail: Vec<Vec<f64>> = s.iter().map(|&i| leaf[i].clone()).collect();
                let mut with_z = vec![z.clone()];
                with_z.extend(tail.iter().cloned());
                gap = gap.max((iz_r.evaluate(&tail)? - r.evaluate(&with_z)?).abs());
            }
        } else {
            gap = gap.max((iz_r.evaluate(&[])? - r.evaluate(std::slice::from_ref(&z))?).abs());
        }
        t.add("forms/pure-iff-iz", gap / scale.max(1.0));

        if q >= 2 {
            t.add("forms/iz-iz", small(&iz_r.interior_z(&fr)?, scale));
        }

        let w2_norm = w2.norm();
        let bound = q as f64 * w0.norm() * w2.interior_z(&fr)?.norm();
        t.add(
            "forms/mixed-iz-nonzero",
            (w2_norm - bound).max(0.0) / w2_norm.max(1.0),
        );

        let alpha = if q == 1 {
            Form::scalar(n, rng.gen_range(-1.0..1.0))
        } else {
            random_form(rng, n, q - 1).xi1(&fr)?
        };
        let w0a = w0.wedge(&alpha)?;
        let on_leaf = if q <= leaf.len() {
            max_eval(&w0a, &leaf, None)?
        } else {
            0.0
        };
        t.add(
            "forms/mixed-wedge-omega0",
            small(&w0a.xi1(&fr)?, w0a.norm()).max(on_leaf / w0a.norm().max(1.0)),
        );

        if q <= leaf.len() {
            let crit = max_eval(&w2, &leaf, None)?.max(eval_gap(&w1, &r, &leaf)?);
            t.add("forms/eval-criterion", crit / scale.max(1.0));
        }

        t.add("forms/split-reconstruct", rel_form(&w1.try_add(&w2)?, &r));

        let b = random_form(rng, n, q).xi2(&fr)?;
        let sum = w1.try_add(&b)?;
        t.add(
            "forms/split-unique",
            rel_form(&sum.xi1(&fr)?, &w1).max(rel_form(&sum.xi2(&fr)?, &b)),
        );

        let laws = rel_form(&w1.xi1(&fr)?, &w1)
            .max(rel_form(&w2.xi2(&fr)?, &w2))
            .max(small(&w2.xi1(&fr)?, scale))
            .max(small(&w1.xi2(&fr)?, scale));
        t.add("forms/projector-laws", laws);

        let rebuilt = w0.wedge(&w2.interior_z(&fr)?)?;
        t.add(
            "forms/mixed-equivalence",
            rel_form(&w2, &rebuilt).max(rel_form(&w0a.xi2(&fr)?, &w0a)),
        );

        for s in 1..=(n - q) {
            let a1 = random_form(rng, n, s).xi1(&fr)?;
            let a2 = random_form(rng, n, s).xi2(&fr)?;
            let tt = w1.wedge(&a1)?;
            t.add("forms/wedge-tangential", small(&tt.interior_z(&fr)?, tt.norm()));
            let mt = w2.wedge(&a1)?;
            t.add("forms/wedge-mixed", small(&mt.xi1(&fr)?, mt.norm()));
            let mm = w2.wedge(&a2)?;
            t.add("forms/wedge-mixed-mixed", small(&mm, w2.norm() * a2.norm()));
        }
    }

    let one = Form::scalar(n, 1.0);
    t.add(
        "forms/omega0-type",
        small(&w0.xi1(&fr)?, 1.0).max(rel_form(&w0.wedge(&one)?, &w0)),
    );

    let thetas: Vec<Form> = (0..n).map(|i| theta(&fr, i)).collect::<Result<_>>()?;
    let mut tz = 0.0f64;
    let mut dep = Form::zero(n, 1, &0.0);
    for (i, th) in thetas.iter().enumerate() {
        tz = tz.max(th.evaluate(std::slice::from_ref(&z))?.abs());
        dep = dep.try_add(&th.scale(fr.t[i]))?;
    }
    t.add("forms/theta-z", tz);
    t.add("forms/theta-dependence", small(&dep, 1.0));

    let mut tw = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            tw = tw.max(thetas[i].wedge(&thetas[j])?.interior_z(&fr)?.norm());
        }
    }
    t.add("forms/theta-wedge", tw);
    Ok(())
}
