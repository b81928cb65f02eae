//! Homogeneity identities of the fundamental tensor, the spray, and the
//! jet/finite-difference cross-checks.

use rand::Rng;

use finsler_liouville::geometry::{fiber_jets, fundamental_tensor, sasaki_pair_with, spray, vertical};
use finsler_liouville::jets::{fd_oracle, FdOrder};
use finsler_liouville::linalg;
use finsler_liouville::metrics::{eval_f, validate_at};
use finsler_liouville::{Jet, Metric, MetricKind, Point};

use super::{cases, flat, max_abs, over_cases, rel, rel_to, rel_vec, stream_rng, RunError};
use crate::config::RunConfig;
use crate::registry::Suite;
use crate::report::Tally;

pub fn run(cfg: &RunConfig) -> Result<Tally, RunError> {
    let oracle = cfg.samples.oracle_points;
    let mut tally = over_cases(cases(cfg, Suite::Euler, cfg.samples.points)?, |mut case| {
        let mut t = Tally::new();
        for (idx, p) in case.points.iter().enumerate() {
            let lambda = case.rng.gen_range(0.1..10.0);
            point_identities(&case.metric, p, lambda, &mut t);
            if idx < oracle {
                oracle_identities(&case.metric, p, &mut t);
            }
        }
        t
    });
    tally.merge(jet_identities(cfg));
    Ok(tally)
}

fn point_identities(spec: &Metric, p: &Point, lambda: f64, t: &mut Tally) {
    let n = p.n();
    let (ft, fj) = match (fundamental_tensor(spec, p), fiber_jets(spec, p)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => {
            for a in [
                "euler/f2-quadratic",
                "euler/df-from-g",
                "euler/dg-contract-y",
                "euler/sasaki-zz",
            ] {
                t.fail(a);
            }
            return;
        }
    };
    let y = &p.y;
    let f = fj.f.value();
    let f2 = f * f;
    let gy = linalg::matvec(&ft.g, y);
    let ygy: f64 = gy.iter().zip(y).map(|(a, b)| a * b).sum();
    t.add("euler/f2-quadratic", rel(f2, ygy));

    let from_g: Vec<f64> = gy.iter().map(|v| v / f).collect();
    t.add("euler/df-from-g", rel_vec(fj.f.gradient(), &from_g));

    let dg_scale = 1f64.max(max_abs(&flat(&ft.dg_dy.concat())) * max_abs(y) * n as f64);
    let mut contract = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            let s: f64 = (0..n).map(|i| y[i] * ft.dg_dy[i][j][k]).sum();
            contract = contract.max(s.abs());
        }
    }
    t.add("euler/dg-contract-y", contract / dg_scale);

    let z = vertical(y);
    t.add_result(
        "euler/sasaki-zz",
        sasaki_pair_with(&ft, &z, &z).map(|v| rel(v, f2)),
    );

    let scaled = spec.eval_value(&p.x, &y.iter().map(|v| v * lambda).collect::<Vec<_>>());
    t.add_result("euler/homogeneity", scaled.map(|v| rel(v, lambda * f)));

    let v = validate_at(spec, p);
    t.add(
        "euler/g-positive",
        (-v.min_eigenvalue).max(0.0) / v.max_eigenvalue.abs().max(1e-300),
    );

    if matches!(spec.kind, MetricKind::Euclidean) {
        let id = linalg::identity::<f64>(n);
        t.add("euler/euclidean-g", rel_vec(&flat(&ft.g), &flat(&id)));
    } else {
        t.touch("euler/euclidean-g");
    }

    let prod = linalg::matmul(&ft.g_inv, &ft.g);
    t.add(
        "euler/g-inverse",
        rel_vec(&flat(&prod), &flat(&linalg::identity(n))),
    );

    let mut asym = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = ft.dg_dy[i][j][k];
                for w in [ft.dg_dy[j][i][k], ft.dg_dy[k][j][i], ft.dg_dy[i][k][j]] {
                    asym = asym.max((v - w).abs());
                }
            }
        }
    }
    t.add("euler/dg-symmetric", asym / dg_scale);

    let twice = p.scaled(2.0).and_then(|q| spray(spec, &q));
    match (spray(spec, p), twice) {
        (Ok(s1), Ok(s2)) => {
            let g4: Vec<f64> = s1.coeffs.iter().map(|v| 4.0 * v).collect();
            let c2: Vec<f64> = flat(&s1.conn).iter().map(|v| 2.0 * v).collect();
            let r = rel_vec(&s2.coeffs, &g4).max(rel_vec(&flat(&s2.conn), &c2));
            t.add("euler/spray-homogeneity", r);
        }
        _ => t.fail("euler/spray-homogeneity"),
    }
}

fn oracle_identities(spec: &Metric, p: &Point, t: &mut Tally) {
    let n = p.n();
    let z: Vec<f64> = p.x.iter().chain(&p.y).copied().collect();
    let value = |w: &[f64]| spec.eval_value(&w[..n], &w[n..]).unwrap_or(f64::NAN);

    match eval_f(spec, p) {
        Ok(jet) => {
            let fd = fd_oracle(value, &z, FdOrder::Gradient, 1e-6)
                .gradient()
                .unwrap_or_default();
            t.add("oracle/grad-f", rel_to(jet.gradient(), &fd));
            let f2 = &jet * &jet;
            let fd2 = fd_oracle(|w| value(w).powi(2), &z, FdOrder::Hessian, 1e-4)
                .hessian()
                .unwrap_or_default();
            t.add("oracle/hess-f2", rel_to(&flat(&f2.hessian_matrix()), &flat(&fd2)));
        }
        Err(_) => {
            t.fail("oracle/grad-f");
            t.fail("oracle/hess-f2");
        }
    }

    let h = 1e-5 * max_abs(&p.y).max(1.0);
    let shifted = |k: usize, s: f64| {
        let mut y = p.y.clone();
        y[k] += s;
        Point::new(p.x.clone(), y)
    };

    let dg = (|| {
        let ft = fundamental_tensor(spec, p)?;
        let mut est = Vec::new();
        let mut jet = Vec::new();
        for k in 0..n {
            let gp = fundamental_tensor(spec, &shifted(k, h)?)?.g;
            let gm = fundamental_tensor(spec, &shifted(k, -h)?)?.g;
            for i in 0..n {
                for j in 0..n {
                    est.push((gp[i][j] - gm[i][j]) / (2.0 * h));
                    jet.push(ft.dg_dy[i][j][k]);
                }
            }
        }
        Ok::<f64, finsler_liouville::GeomError>(rel_to(&jet, &est))
    })();
    t.add_result("oracle/dg-dy", dg);

    let conn = (|| {
        let sp = spray(spec, p)?;
        let mut est = Vec::new();
        let mut jet = Vec::new();
        for j in 0..n {
            let gp = spray(spec, &shifted(j, h)?)?.coeffs;
            let gm = spray(spec, &shifted(j, -h)?)?.coeffs;
            for i in 0..n {
                est.push((gp[i] - gm[i]) / (2.0 * h));
                jet.push(sp.conn[i][j]);
            }
        }
        Ok::<f64, finsler_liouville::GeomError>(rel_to(&jet, &est))
    })();
    t.add_result("oracle/spray-conn", conn);

    if let MetricKind::Riemannian { family } = &spec.kind {
        t.add_result("oracle/christoffel", christoffel_check(spec, family, p));
    } else {
        t.touch("oracle/christoffel");
    }
}

/// `Gⁱ` against `½Γⁱ_jk yʲyᵏ` with `∂a_ij` by central differences.
fn christoffel_check(
    spec: &Metric,
    family: &finsler_liouville::QuadraticFamily<f64>,
    p: &Point,
) -> finsler_liouville::Result<f64> {
    let n = p.n();
    let sp = spray(spec, p)?;
    let a = family.a_matrix(&p.x);
    let a_inv = linalg::inverse(&a)?;
    // da[l][k][j] = ∂_j a_lk
    let mut da = vec![vec![vec![0.0; n]; n]; n];
    for l in 0..n {
        for k in 0..n {
            let g = fd_oracle(|x| family.a_matrix(x)[l][k], &p.x, FdOrder::Gradient, 1e-5)
                .gradient()
                .unwrap_or_default();
            da[l][k] = g;
        }
    }
    let y = &p.y;
    let mut expected = vec![0.0; n];
    for (i, e) in expected.iter_mut().enumerate() {
        let mut s = 0.0;
        for j in 0..n {
            for k in 0..n {
                let mut gamma = 0.0;
                for l in 0..n {
                    gamma += 0.5 * a_inv[i][l] * (da[l][k][j] + da[l][j][k] - da[j][k][l]);
                }
                s += 0.5 * gamma * y[j] * y[k];
            }
        }
        *e = s;
    }
    Ok(rel_to(&expected, &sp.coeffs))
}

/// Monomial `c Π xᵢ^eᵢ`.
struct Monomial {
    c: f64,
    e: Vec<u32>,
}

fn falling(e: u32, d: u32) -> f64 {
    (0..d).map(|s| f64::from(e - s)).product()
}

/// Analytic mixed derivative of a polynomial; `idx` lists the variables.
fn poly_derivative(poly: &[Monomial], x: &[f64], idx: &[usize]) -> f64 {
    let mut d = vec![0u32; x.len()];
    for &i in idx {
        d[i] += 1;
    }
    poly.iter()
        .map(|m| {
            let mut v = m.c;
            for (i, (&e, &di)) in m.e.iter().zip(&d).enumerate() {
                if di > e {
                    return 0.0;
                }
                v *= falling(e, di) * x[i].powi((e - di) as i32);
            }
            v
        })
        .sum()
}

fn poly_jet(poly: &[Monomial], x: &[f64]) -> Jet {
    let m = x.len();
    let vars = Jet::seed_all(x, 0, m).expect("in range");
    let mut acc = Jet::constant(0.0, m);
    for mono in poly {
        let mut term = Jet::constant(mono.c, m);
        for (v, &e) in vars.iter().zip(&mono.e) {
            for _ in 0..e {
                term = &term * v;
            }
        }
        acc = acc + term;
    }
    acc
}

fn random_poly(rng: &mut impl Rng, m: usize) -> Vec<Monomial> {
    let terms = rng.gen_range(1..=6);
    (0..terms)
        .map(|_| {
            let mut e = vec![0u32; m];
            let deg = rng.gen_range(0..=3);
            for _ in 0..deg {
                e[rng.gen_range(0..m)] += 1;
            }
            Monomial {
                c: rng.gen_range(-1.0..1.0),
                e,
            }
        })
        .collect()
}

fn jet_identities(cfg: &RunConfig) -> Tally {
    let mut t = Tally::new();
    let mut rng = stream_rng(cfg.seed, "euler/jets");
    for _ in 0..cfg.samples.polynomials {
        let m = rng.gen_range(1..=6);
        let poly = random_poly(&mut rng, m);
        let x: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let jet = poly_jet(&poly, &x);
        let mut worst = rel(jet.value(), poly_derivative(&poly, &x, &[]));
        for i in 0..m {
            worst = worst.max(rel(jet.grad(i), poly_derivative(&poly, &x, &[i])));
            for j in 0..m {
                worst = worst.max(rel(jet.hess(i, j), poly_derivative(&poly, &x, &[i, j])));
                for k in 0..m {
                    worst = worst.max(rel(jet.third(i, j, k), poly_derivative(&poly, &x, &[i, j, k])));
                }
            }
        }
        t.add("jets/polynomial-exact", worst);

        // u = f² + 1 > 0, then φ(u) for a few φ with known derivatives
        let u = &jet * &jet + 1.0;
        let uv = u.value();
        let choice = rng.gen_range(0..4);
        let (out, d) = match choice {
            0 => (u.try_ln(), [1.0 / uv, -1.0 / (uv * uv), 2.0 / (uv * uv * uv)]),
            1 => {
                let s = uv.sqrt();
                (u.try_sqrt(), [0.5 / s, -0.25 / (s * uv), 0.375 / (s * uv * uv)])
            }
            2 => (
                u.try_recip(),
                [-1.0 / (uv * uv), 2.0 / uv.powi(3), -6.0 / uv.powi(4)],
            ),
            _ => {
                let e = (-uv).exp();
                (Ok((-&u).exp()), [-e, e, -e])
            }
        };
        let Ok(out) = out else {
            t.fail("jets/chain-rule");
            continue;
        };
        let mut w = 0.0f64;
        for i in 0..m {
            w = w.max(rel(out.grad(i), d[0] * u.grad(i)));
            for j in 0..m {
                let e2 = d[1] * u.grad(i) * u.grad(j) + d[0] * u.hess(i, j);
                w = w.max(rel(out.hess(i, j), e2));
                for k in 0..m {
                    let e3 = d[2] * u.grad(i) * u.grad(j) * u.grad(k)
                        + d[1]
                            * (u.hess(i, j) * u.grad(k)
                                + u.hess(i, k) * u.grad(j)
                                + u.hess(j, k) * u.grad(i))
                        + d[0] * u.third(i, j, k);
                    w = w.max(rel(out.third(i, j, k), e3));
                }
            }
        }
        t.add("jets/chain-rule", w);
    }
    t
}
