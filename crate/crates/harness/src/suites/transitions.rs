//! Chart covariance of the frame and of `d′` under coordinate changes.

use rand::Rng;

use finsler_liouville::linalg;
use finsler_liouville::sampling::random_poly;
use finsler_liouville::{ChartPair, GeomError, Metric, Point, Result, Transition};

use super::{cases, flat, max_abs, over_cases, rel, rel_vec, RunError};
use crate::config::RunConfig;
use crate::registry::Suite;
use crate::report::Tally;

const ANCHORS: [&str; 6] = [
    "trans/round-trip",
    "trans/t-covariance",
    "trans/x-covariance",
    "trans/omega0-invariance",
    "trans/one-form-law",
    "trans/determinant",
];

pub fn run(cfg: &RunConfig) -> std::result::Result<Tally, RunError> {
    let names = cfg.transitions.clone();
    Ok(over_cases(
        cases(cfg, Suite::Transitions, cfg.samples.points)?,
        |mut case| {
            let mut t = Tally::new();
            let charts: Vec<Transition> = names
                .iter()
                .map(|name| Transition::by_name(name, case.n).expect("validated transition name"))
                .collect();
            for p in &case.points {
                for tr in &charts {
                    if point_identities(&case.metric, tr, p, &mut case.rng, &mut t).is_err() {
                        ANCHORS.iter().for_each(|a| t.fail(a));
                    }
                }
            }
            t
        },
    ))
}

fn point_identities(
    spec: &Metric,
    tr: &Transition,
    p: &Point,
    rng: &mut impl Rng,
    t: &mut Tally,
) -> Result<()> {
    let n = p.n();
    let xt = tr.forward(&p.x)?;
    let back = tr.inverse(&xt)?;
    let j = tr.jacobian(&p.x)?;
    let k = linalg::inverse(&j)?;
    let id: Vec<Vec<f64>> = linalg::identity(n);
    t.add(
        "trans/round-trip",
        rel_vec(&back, &p.x).max(rel_vec(&flat(&linalg::matmul(&j, &k)), &flat(&id))),
    );

    let pair = ChartPair::new(spec, tr, p)?;
    let fr = pair.source.frame.values();
    let t_scale = max_abs(&fr.t).max(1.0);
    let x_scale = max_abs(&flat(&fr.x)).max(1.0);
    t.add("trans/t-covariance", pair.t_covariance() / t_scale);
    t.add("trans/x-covariance", pair.x_covariance() / x_scale);
    t.add("trans/omega0-invariance", pair.omega0_invariance() / t_scale);

    let poly = random_poly(rng, n);
    let law = pair.one_form_law(&|y| poly.eval_jet(y))?;
    t.add("trans/one-form-law", law / x_scale);

    for kk in 0..n {
        match pair.frame_change_determinant(kk) {
            Ok((computed, formula)) => t.add("trans/determinant", rel(computed, formula)),
            Err(GeomError::Precondition(_)) => {}
            Err(e) => return Err(e),
        }
    }
    t.touch("trans/determinant");
    Ok(())
}
