//! Identities of the functions `t_k` and the frame `X_k`, `Z`.

use finsler_liouville::geometry::{
    dependent_frame_vector, fiber_jets, frame_basis, fundamental_tensor, liouville_frame, t_from_tensor,
    BASIS_CERTIFICATE,
};
use finsler_liouville::linalg;
use finsler_liouville::{Jet, Metric, Point};

use super::{cases, flat, max_abs, over_cases, rel, rel_to, rel_vec, RunError};
use crate::config::RunConfig;
use crate::registry::Suite;
use crate::report::Tally;

const ANCHORS: [&str; 11] = [
    "frame/g-orthogonal",
    "frame/t-two-formulas",
    "frame/y-dot-t",
    "frame/y-sum-x",
    "frame/dt-formula",
    "frame/z-t",
    "frame/y-contract-dt",
    "frame/y-z-t",
    "frame/y-z-x",
    "frame/dependent-vector",
    "frame/basis-certificate",
];

pub fn run(cfg: &RunConfig) -> Result<Tally, RunError> {
    let oracle = cfg.samples.oracle_points;
    Ok(over_cases(
        cases(cfg, Suite::Frame, cfg.samples.points)?,
        |case| {
            let mut t = Tally::new();
            for (idx, p) in case.points.iter().enumerate() {
                if point_identities(&case.metric, p, &mut t).is_err() {
                    ANCHORS.iter().for_each(|a| t.fail(a));
                }
                if idx < oracle {
                    t.add_result("oracle/dt-dy", dt_oracle(&case.metric, p));
                }
            }
            t
        },
    ))
}

/// `Σ_j yʲ ∂_j c` for a vertical jet.
fn along_z(c: &Jet, y: &[f64]) -> f64 {
    y.iter().enumerate().map(|(j, yj)| yj * c.grad(j)).sum()
}

fn point_identities(spec: &Metric, p: &Point, t: &mut Tally) -> finsler_liouville::Result<()> {
    let n = p.n();
    let y = &p.y;
    let fj = fiber_jets(spec, p)?;
    let ft = fundamental_tensor(spec, p)?;
    let frame = fj.frame.values();
    let f = fj.f.value();
    let f2 = f * f;
    let tv = &frame.t;

    let gy = linalg::matvec(&ft.g, y);
    let orth = frame
        .x
        .iter()
        .map(|xk| xk.iter().zip(&gy).map(|(a, b)| a * b).sum::<f64>().abs())
        .fold(0.0, f64::max);
    t.add("frame/g-orthogonal", orth / f2.max(1.0));

    t.add("frame/t-two-formulas", rel_vec(&t_from_tensor(&ft, y, f), tv));

    let yt: f64 = y.iter().zip(tv).map(|(a, b)| a * b).sum();
    t.add("frame/y-dot-t", rel(yt, 1.0));

    let sum_x: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| y[i] * frame.x[i][j]).sum())
        .collect();
    let x_scale = max_abs(y) * max_abs(&flat(&frame.x));
    t.add("frame/y-sum-x", max_abs(&sum_x) / x_scale.max(1.0));

    let mut dt = Vec::new();
    let mut formula = Vec::new();
    for k in 0..n {
        for l in 0..n {
            dt.push(fj.frame.t[l].grad(k));
            formula.push(-2.0 * tv[k] * tv[l] + ft.g[k][l] / f2);
        }
    }
    t.add("frame/dt-formula", rel_vec(&dt, &formula));

    let zt: Vec<f64> = fj.frame.t.iter().map(|c| along_z(c, y)).collect();
    let minus_t: Vec<f64> = tv.iter().map(|v| -v).collect();
    t.add("frame/z-t", rel_vec(&zt, &minus_t));

    let contract: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| y[j] * fj.frame.t[j].grad(i)).sum())
        .collect();
    t.add("frame/y-contract-dt", rel_vec(&contract, &minus_t));

    let yzt: f64 = y.iter().zip(&zt).map(|(a, b)| a * b).sum();
    t.add("frame/y-z-t", rel(yzt, -1.0));

    let yzx: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| y[i] * along_z(&fj.frame.x[i][j], y)).sum())
        .collect();
    t.add("frame/y-z-x", max_abs(&yzx) / x_scale.max(1.0));

    let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    for k in 0..n {
        if y[k].abs() > 0.05 * norm {
            let dep = dependent_frame_vector(&frame, k)?;
            t.add("frame/dependent-vector", rel_vec(&dep, &frame.x[k]));
        }
    }

    let basis = frame_basis(&frame)?;
    t.add("frame/basis-certificate", BASIS_CERTIFICATE / basis.sigma_min);
    Ok(())
}

/// Jet `∂t_k/∂yʲ` against central differences of the frame values.
fn dt_oracle(spec: &Metric, p: &Point) -> finsler_liouville::Result<f64> {
    let n = p.n();
    let fj = fiber_jets(spec, p)?;
    let h = 1e-5 * max_abs(&p.y).max(1.0);
    let mut est = Vec::new();
    let mut jet = Vec::new();
    for j in 0..n {
        let mut yp = p.y.clone();
        let mut ym = p.y.clone();
        yp[j] += h;
        ym[j] -= h;
        let tp = liouville_frame(spec, &p.with_y(yp)?)?.t;
        let tm = liouville_frame(spec, &p.with_y(ym)?)?.t;
        for k in 0..n {
            est.push((tp[k] - tm[k]) / (2.0 * h));
            jet.push(fj.frame.t[k].grad(j));
        }
    }
    Ok(rel_to(&jet, &est))
}
