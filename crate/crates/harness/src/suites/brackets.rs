//! Brackets of the frame fields, computed from their jets.

use finsler_liouville::geometry::fiber_jets;
use finsler_liouville::vcalc::lie_bracket;
use finsler_liouville::{Jet, Metric, Point};

use super::{cases, over_cases, rel_vec, RunError};
use crate::config::RunConfig;
use crate::registry::Suite;
use crate::report::Tally;

pub fn run(cfg: &RunConfig) -> Result<Tally, RunError> {
    Ok(over_cases(
        cases(cfg, Suite::Brackets, cfg.samples.points)?,
        |case| {
            let mut t = Tally::new();
            for p in &case.points {
                if point_identities(&case.metric, p, &mut t).is_err() {
                    t.fail("brackets/xx");
                    t.fail("brackets/xz");
                }
            }
            t
        },
    ))
}

fn values(v: &[Jet]) -> Vec<f64> {
    v.iter().map(Jet::value).collect()
}

fn point_identities(spec: &Metric, p: &Point, t: &mut Tally) -> finsler_liouville::Result<()> {
    let n = p.n();
    let fj = fiber_jets(spec, p)?;
    let fr = &fj.frame;
    let tv = values(&fr.t);
    let xv: Vec<Vec<f64>> = fr.x.iter().map(|v| values(v)).collect();
    let mut xx = 0.0f64;
    let mut xz = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let b = values(&lie_bracket(&fr.x[i], &fr.x[j]));
            let expected: Vec<f64> = (0..n).map(|c| tv[i] * xv[j][c] - tv[j] * xv[i][c]).collect();
            xx = xx.max(rel_vec(&b, &expected));
        }
        let b = values(&lie_bracket(&fr.x[i], &fr.z));
        xz = xz.max(rel_vec(&b, &xv[i]));
    }
    t.add("brackets/xx", xx);
    t.add("brackets/xz", xz);
    Ok(())
}
