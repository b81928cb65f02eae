//! Indicatrix leaves `F(x₀, ·) = c`, paths on them, and primitives of
//! `d′`-closed 1-form fields by path integration.

use crate::error::{GeomError, Result};
use crate::geometry::{fiber_jets, frame_basis};
use crate::linalg;
use crate::metrics::{eval_f_seeded, MetricSpec, PointTM, Seeding};
use crate::scalar::{norm2, Real};
use crate::vcalc::{FormField, ScalarField};
use crate::vforms::VerticalForm;

/// Chords whose interpolant gets shorter than this fraction of `|a|` are
/// rejected.
pub const CHORD_FLOOR: f64 = 0.3;
pub const QUADRATURE_TOL: f64 = 1e-9;
pub const MAX_INTERVALS: usize = 1 << 16;
/// Bound on `‖d′ω‖` accepted as closed.
pub const CLOSEDNESS_TOL: f64 = 1e-7;
pub const BASIC_TOL: f64 = 1e-9;
/// Stencil step for differencing the primitive, relative to `|y|`.
pub const RECONSTRUCTION_STEP: f64 = 4e-3;

fn quad_tol<T: Real>() -> T {
    T::lit(QUADRATURE_TOL).max(T::epsilon() * T::lit(1e3))
}

/// A point on the `c`-indicatrix over `x₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafPoint<T> {
    pub x0: Vec<T>,
    pub y: Vec<T>,
    pub c: T,
}

impl<T: Real> LeafPoint<T> {
    pub fn point(&self) -> Result<PointTM<T>> {
        PointTM::new(self.x0.clone(), self.y.clone())
    }
}

/// Radial projection `(c / F(x₀, y)) y`.
pub fn project_to_leaf<T: Real>(spec: &MetricSpec<T>, x0: &[T], y: &[T], c: T) -> Result<LeafPoint<T>> {
    if !(c > T::zero()) {
        return Err(GeomError::Argument(format!(
            "leaf level must be positive, got {c}"
        )));
    }
    let f = spec.eval_value(x0, y)?;
    if !(f > T::zero()) {
        return Err(GeomError::Domain {
            op: "project_to_leaf",
            value: f.as_f64(),
        });
    }
    Ok(LeafPoint {
        x0: x0.to_vec(),
        y: y.iter().map(|v| *v * c / f).collect(),
        c,
    })
}

/// Projected chord from `a` to `b`, with `n_samples + 1` stored samples.
#[derive(Clone, Debug)]
pub struct LeafPath<T> {
    pub x0: Vec<T>,
    pub c: T,
    pub a: Vec<T>,
    pub b: Vec<T>,
    pub samples: Vec<Vec<T>>,
}

fn lerp<T: Real>(a: &[T], b: &[T], t: T) -> Vec<T> {
    a.iter().zip(b).map(|(u, v)| *u + (*v - *u) * t).collect()
}

impl<T: Real> LeafPath<T> {
    /// Point and tangent at parameter `t`.
    pub fn eval(&self, spec: &MetricSpec<T>, t: T) -> Result<(Vec<T>, Vec<T>)> {
        let g = lerp(&self.a, &self.b, t);
        let dg: Vec<T> = self.a.iter().zip(&self.b).map(|(u, v)| *v - *u).collect();
        let fj = eval_f_seeded(
            spec,
            &PointTM::new(self.x0.clone(), g.clone())?,
            Seeding::Vertical,
        )?;
        let f = fj.value();
        let df: T = dg.iter().enumerate().map(|(i, v)| fj.grad(i) * *v).sum();
        let y = g.iter().map(|v| *v * self.c / f).collect();
        let dy = g
            .iter()
            .zip(&dg)
            .map(|(gi, dgi)| self.c * (*dgi / f - *gi * df / (f * f)))
            .collect();
        Ok((y, dy))
    }

    /// Worst `|F − c|` over the stored samples.
    pub fn containment(&self, spec: &MetricSpec<T>) -> Result<T> {
        self.samples.iter().try_fold(T::zero(), |m, y| {
            Ok(m.max((spec.eval_value(&self.x0, y)? - self.c).abs()))
        })
    }
}

pub fn leaf_path<T: Real>(
    spec: &MetricSpec<T>,
    a: &LeafPoint<T>,
    b: &LeafPoint<T>,
    n_samples: usize,
) -> Result<LeafPath<T>> {
    if a.x0 != b.x0 || a.c != b.c {
        return Err(GeomError::Path("endpoints lie on different leaves".into()));
    }
    let d: Vec<T> = a.y.iter().zip(&b.y).map(|(u, v)| *v - *u).collect();
    let dd: T = d.iter().map(|v| *v * *v).sum();
    let t_star = if dd > T::zero() {
        let ad: T = a.y.iter().zip(&d).map(|(u, v)| *u * *v).sum();
        (-ad / dd).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    let closest = norm2(&lerp(&a.y, &b.y, t_star));
    if !(closest >= T::lit(CHORD_FLOOR) * norm2(&a.y)) {
        return Err(GeomError::Path(format!(
            "chord passes within {closest} of the zero section"
        )));
    }
    let mut path = LeafPath {
        x0: a.x0.clone(),
        c: a.c,
        a: a.y.clone(),
        b: b.y.clone(),
        samples: Vec::new(),
    };
    let n = n_samples.max(1);
    path.samples = (0..=n)
        .map(|i| {
            let t = T::from_usize_lossy(i) / T::from_usize_lossy(n);
            path.eval(spec, t).map(|(y, _)| y)
        })
        .collect::<Result<_>>()?;
    Ok(path)
}

/// A leaf point away from the chord `a → b`, used to route around
/// degenerate chords and as the second path of the verification.
pub fn waypoint<T: Real>(spec: &MetricSpec<T>, a: &LeafPoint<T>, b: &LeafPoint<T>) -> Result<LeafPoint<T>> {
    let frame = fiber_jets(spec, &a.point()?)?.frame.values();
    let side = frame
        .x
        .iter()
        .max_by(|u, v| {
            norm2(u)
                .partial_cmp(&norm2(v))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .cloned()
        .ok_or_else(|| GeomError::Path("empty frame".into()))?;
    let mid = lerp(&a.y, &b.y, T::lit(0.5));
    let scale = T::lit(0.6) * norm2(&a.y) / norm2(&side);
    let y: Vec<T> = mid.iter().zip(&side).map(|(m, s)| *m + *s * scale).collect();
    project_to_leaf(spec, &a.x0, &y, a.c)
}

/// Leaf point over the middle of the chord `a → b`, pushed away from the
/// zero section so that each half-chord spans at most half the angle.
pub fn split_point<T: Real>(
    spec: &MetricSpec<T>,
    a: &LeafPoint<T>,
    b: &LeafPoint<T>,
) -> Result<LeafPoint<T>> {
    let d: Vec<T> = a.y.iter().zip(&b.y).map(|(u, v)| *v - *u).collect();
    let dn = norm2(&d);
    let mid = lerp(&a.y, &b.y, T::lit(0.5));
    let along = if dn > T::zero() {
        mid.iter().zip(&d).map(|(m, v)| *m * *v).sum::<T>() / (dn * dn)
    } else {
        T::zero()
    };
    let mut perp: Vec<T> = mid.iter().zip(&d).map(|(m, v)| *m - *v * along).collect();
    if !(norm2(&perp) > T::lit(1e-3) * norm2(&a.y)) {
        // nearly antipodal: any direction off the chord will do
        let frame = fiber_jets(spec, &a.point()?)?.frame.values();
        perp = frame
            .x
            .iter()
            .map(|x| {
                let dot = if dn > T::zero() {
                    x.iter().zip(&d).map(|(u, v)| *u * *v).sum::<T>() / (dn * dn)
                } else {
                    T::zero()
                };
                x.iter().zip(&d).map(|(u, v)| *u - *v * dot).collect::<Vec<T>>()
            })
            .max_by(|u, v| {
                norm2(u)
                    .partial_cmp(&norm2(v))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .ok_or_else(|| GeomError::Path("empty frame".into()))?;
    }
    let pn = norm2(&perp);
    if !(pn > T::zero()) {
        return Err(GeomError::Path("no direction off the chord".into()));
    }
    let r = norm2(&a.y).max(norm2(&b.y));
    let y: Vec<T> = perp
        .iter()
        .zip(&d)
        .map(|(p, v)| *p * r / pn + *v * along)
        .collect();
    project_to_leaf(spec, &a.x0, &y, a.c)
}

const MAX_SPLITS: usize = 6;

/// Chord path, or chords through split points when the chord degenerates.
pub fn leaf_route<T: Real>(
    spec: &MetricSpec<T>,
    a: &LeafPoint<T>,
    b: &LeafPoint<T>,
    n_samples: usize,
) -> Result<Vec<LeafPath<T>>> {
    route_depth(spec, a, b, n_samples, 0)
}

fn route_depth<T: Real>(
    spec: &MetricSpec<T>,
    a: &LeafPoint<T>,
    b: &LeafPoint<T>,
    n_samples: usize,
    depth: usize,
) -> Result<Vec<LeafPath<T>>> {
    match leaf_path(spec, a, b, n_samples) {
        Ok(p) => Ok(vec![p]),
        Err(GeomError::Path(msg)) if depth >= MAX_SPLITS => Err(GeomError::Path(msg)),
        Err(GeomError::Path(_)) => {
            let w = split_point(spec, a, b)?;
            let mut out = route_depth(spec, a, &w, n_samples, depth + 1)?;
            out.extend(route_depth(spec, &w, b, n_samples, depth + 1)?);
            Ok(out)
        }
        Err(e) => Err(e),
    }
}

fn integrand<T: Real>(spec: &MetricSpec<T>, omega: &FormField<T>, path: &LeafPath<T>, t: T) -> Result<T> {
    let (y, dy) = path.eval(spec, t)?;
    let fj = fiber_jets(spec, &PointTM::new(path.x0.clone(), y)?)?;
    let w = omega.value_at(&fj)?;
    Ok(w.coeffs().iter().zip(&dy).map(|(a, v)| *a * *v).sum())
}

/// `∫ ω(y′(t)) dt` by composite Simpson with interval doubling.
pub fn path_integral<T: Real>(spec: &MetricSpec<T>, omega: &FormField<T>, path: &LeafPath<T>) -> Result<T> {
    if omega.degree() != 1 {
        return Err(GeomError::Argument(format!(
            "path integral needs a 1-form, got degree {}",
            omega.degree()
        )));
    }
    if path.a == path.b {
        return Ok(T::zero());
    }
    let mut n = 8usize;
    let mut vals: Vec<T> = (0..=n)
        .map(|i| integrand(spec, omega, path, T::from_usize_lossy(i) / T::from_usize_lossy(n)))
        .collect::<Result<_>>()?;
    let simpson = |v: &[T]| {
        let m = v.len() - 1;
        let h = T::one() / T::from_usize_lossy(m);
        let mut s = v[0] + v[m];
        for (i, x) in v.iter().enumerate().take(m).skip(1) {
            s = s + *x * if i % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
        }
        s * h / T::lit(3.0)
    };
    let mut prev = simpson(&vals);
    loop {
        let n2 = 2 * n;
        let mut next = Vec::with_capacity(n2 + 1);
        for i in 0..n {
            next.push(vals[i]);
            let t = T::from_usize_lossy(2 * i + 1) / T::from_usize_lossy(n2);
            next.push(integrand(spec, omega, path, t)?);
        }
        next.push(vals[n]);
        let cur = simpson(&next);
        if (cur - prev).abs() <= quad_tol::<T>() * cur.abs().max(T::one()) {
            return Ok(cur);
        }
        if n2 >= MAX_INTERVALS {
            return Err(GeomError::Quadrature {
                intervals: n2,
                previous: prev.as_f64(),
                last: cur.as_f64(),
            });
        }
        vals = next;
        n = n2;
        prev = cur;
    }
}

pub fn route_integral<T: Real>(
    spec: &MetricSpec<T>,
    omega: &FormField<T>,
    route: &[LeafPath<T>],
) -> Result<T> {
    route
        .iter()
        .try_fold(T::zero(), |acc, p| Ok(acc + path_integral(spec, omega, p)?))
}

/// Checks of one primitive reconstruction.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimitiveRecord<T> {
    /// Worst `‖d′ω‖` over base point and targets.
    pub closedness: T,
    /// Worst coefficient difference between `d′f` (by differencing `f` along
    /// the leaf) and `ω`.
    pub reconstruction: T,
    /// Worst difference between the direct and the waypoint path.
    pub path_dependence: T,
    /// Worst `|F − c|` over all path samples.
    pub containment: T,
}

#[derive(Clone, Debug)]
pub struct Primitive<T> {
    /// `f(target) − f(base)` per target.
    pub values: Vec<T>,
    pub record: PrimitiveRecord<T>,
}

fn closedness_at<T: Real>(spec: &MetricSpec<T>, d_omega: &FormField<T>, p: &LeafPoint<T>) -> Result<T> {
    Ok(d_omega.value_at(&fiber_jets(spec, &p.point()?)?)?.norm())
}

/// Differences `f` along leaf directions at `p` and returns the worst
/// coefficient mismatch with `ω` there.
fn reconstruction_at<T: Real>(
    spec: &MetricSpec<T>,
    omega: &FormField<T>,
    p: &LeafPoint<T>,
    n_samples: usize,
) -> Result<T> {
    let fj = fiber_jets(spec, &p.point()?)?;
    let frame = fj.frame.values();
    let basis = frame_basis(&frame)?;
    let n = p.y.len();
    let h = T::lit(RECONSTRUCTION_STEP) * norm2(&p.y);
    let mut rows = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for k in basis.kept() {
        let dir = &frame.x[k];
        let scale = h / norm2(dir);
        let f_at = |s: T| -> Result<T> {
            let y: Vec<T> = p.y.iter().zip(dir).map(|(a, d)| *a + *d * scale * s).collect();
            let q = project_to_leaf(spec, &p.x0, &y, p.c)?;
            route_integral(spec, omega, &leaf_route(spec, p, &q, n_samples)?)
        };
        // fourth-order central stencil, derivative per unit of `dir`
        let d = (f_at(-T::lit(2.0))? - T::lit(8.0) * f_at(-T::one())? + T::lit(8.0) * f_at(T::one())?
            - f_at(T::lit(2.0))?)
            / (T::lit(12.0) * scale);
        rows.push(dir.clone());
        rhs.push(d);
    }
    rows.push(frame.z.clone());
    rhs.push(T::zero());
    let coeffs = linalg::solve(&rows, &rhs)?;
    let w = omega.value_at(&fj)?;
    Ok(coeffs
        .iter()
        .zip(w.coeffs())
        .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs())))
}

/// Primitive of a `d′`-closed 1-form field, relative to `base`.
pub fn primitive_1form<T: Real>(
    spec: &MetricSpec<T>,
    omega: &FormField<T>,
    base: &LeafPoint<T>,
    targets: &[LeafPoint<T>],
    n_samples: usize,
) -> Result<Primitive<T>> {
    if omega.degree() != 1 {
        return Err(GeomError::Argument(
            "primitives are built for 1-forms only".into(),
        ));
    }
    let d_omega = omega.d_prime();
    let mut closedness = closedness_at(spec, &d_omega, base)?;
    for t in targets {
        closedness = closedness.max(closedness_at(spec, &d_omega, t)?);
    }
    if !(closedness <= T::lit(CLOSEDNESS_TOL)) {
        return Err(GeomError::NotClosed {
            residual: closedness.as_f64(),
            location: format!("{:?}", base.y),
        });
    }
    let mut values = Vec::with_capacity(targets.len());
    let mut reconstruction = T::zero();
    let mut path_dependence = T::zero();
    let mut containment = T::zero();
    for t in targets {
        let direct = leaf_route(spec, base, t, n_samples)?;
        let w = waypoint(spec, base, t)?;
        let mut detour = leaf_route(spec, base, &w, n_samples)?;
        detour.extend(leaf_route(spec, &w, t, n_samples)?);
        for p in direct.iter().chain(&detour) {
            containment = containment.max(p.containment(spec)?);
        }
        let v1 = route_integral(spec, omega, &direct)?;
        let v2 = route_integral(spec, omega, &detour)?;
        path_dependence = path_dependence.max((v1 - v2).abs());
        reconstruction = reconstruction.max(reconstruction_at(spec, omega, t, n_samples)?);
        values.push(v1);
    }
    Ok(Primitive {
        values,
        record: PrimitiveRecord {
            closedness,
            reconstruction,
            path_dependence,
            containment,
        },
    })
}

/// Whether `d′f` vanishes at every sample, with the worst `‖d′f‖`.
pub fn is_basic<T: Real>(
    spec: &MetricSpec<T>,
    f: &ScalarField<T>,
    samples: &[PointTM<T>],
) -> Result<(bool, T)> {
    let df = f.clone().into_form().d_prime();
    let mut worst = T::zero();
    for p in samples {
        let v: VerticalForm<T> = df.value_at(&fiber_jets(spec, p)?)?;
        worst = worst.max(v.norm());
    }
    Ok((worst < T::lit(BASIC_TOL), worst))
}

/// Leaf points over `x₀` at level `c`, from arbitrary fiber directions.
pub fn leaf_points<T: Real>(
    spec: &MetricSpec<T>,
    x0: &[T],
    ys: &[Vec<T>],
    c: T,
) -> Result<Vec<LeafPoint<T>>> {
    ys.iter().map(|y| project_to_leaf(spec, x0, y, c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn euclid() -> MetricSpec<f64> {
        MetricSpec::euclidean(2)
    }

    fn y1y2() -> ScalarField<f64> {
        ScalarField::new(|fj| Ok(&fj.y()[0] * &fj.y()[1]))
    }

    #[test]
    fn projection_examples() {
        let p = project_to_leaf(&euclid(), &[0.0, 0.0], &[3.0, 4.0], 1.0).unwrap();
        assert_relative_eq!(p.y[0], 0.6, epsilon = 1e-15);
        assert_relative_eq!(p.y[1], 0.8, epsilon = 1e-15);
        let q = project_to_leaf(&euclid(), &[0.0, 0.0], &p.y, 1.0).unwrap();
        assert!((p.y[0] - q.y[0]).abs() < 1e-15 && (p.y[1] - q.y[1]).abs() < 1e-15);
        let quartic = MetricSpec::<f64>::minkowski_quartic(3);
        let r = project_to_leaf(&quartic, &[0.0; 3], &[0.4, -1.2, 0.9], 2.0).unwrap();
        assert!((quartic.eval_value(&r.x0, &r.y).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn quarter_arc_stays_on_circle() {
        let s = euclid();
        let a = project_to_leaf(&s, &[0.0, 0.0], &[1.0, 0.0], 1.0).unwrap();
        let b = project_to_leaf(&s, &[0.0, 0.0], &[0.0, 1.0], 1.0).unwrap();
        let path = leaf_path(&s, &a, &b, 16).unwrap();
        assert_eq!(path.samples.len(), 17);
        assert!(path.containment(&s).unwrap() < 1e-12);
        assert_eq!(path.samples[0], a.y);
    }

    #[test]
    fn antipodal_chord_is_rejected_then_routed() {
        let s = euclid();
        let a = project_to_leaf(&s, &[0.0, 0.0], &[1.0, 0.0], 1.0).unwrap();
        let b = project_to_leaf(&s, &[0.0, 0.0], &[-1.0, 0.0], 1.0).unwrap();
        assert!(matches!(leaf_path(&s, &a, &b, 8), Err(GeomError::Path(_))));
        assert_eq!(leaf_route(&s, &a, &b, 8).unwrap().len(), 2);
    }

    #[test]
    fn gradient_theorem_along_leaf() {
        let s = euclid();
        let a = project_to_leaf(&s, &[0.0, 0.0], &[3.0, 4.0], 5.0).unwrap();
        let b = project_to_leaf(&s, &[0.0, 0.0], &[-1.0, 2.0], 5.0).unwrap();
        let omega = y1y2().into_form().d_prime();
        let path = leaf_path(&s, &a, &b, 8).unwrap();
        let v = path_integral(&s, &omega, &path).unwrap();
        assert!((v - (b.y[0] * b.y[1] - a.y[0] * a.y[1])).abs() < 1e-8);
        let still = leaf_path(&s, &a, &a, 8).unwrap();
        assert_eq!(path_integral(&s, &omega, &still).unwrap(), 0.0);
    }

    #[test]
    fn primitive_of_exact_form() {
        let s = MetricSpec::randers(3);
        let x0 = [0.2, -0.1, 0.3];
        let g = ScalarField::new(|fj| {
            let y = fj.y();
            (&y[0] * &y[0] * &y[0]).try_div(&fj.f)
        });
        let omega = g.clone().into_form().d_prime();
        let ys = vec![vec![1.0, 0.5, 0.2], vec![0.3, 1.0, -0.4], vec![-0.8, 0.2, 0.9]];
        let pts = leaf_points(&s, &x0, &ys, 1.3).unwrap();
        let prim = primitive_1form(&s, &omega, &pts[0], &pts[1..], 8).unwrap();
        assert!(prim.record.reconstruction < 1e-6, "{:?}", prim.record);
        assert!(prim.record.path_dependence < 1e-7, "{:?}", prim.record);
        assert!(prim.record.containment < 1e-9);
        let gv = |p: &LeafPoint<f64>| {
            let fj = fiber_jets(&s, &p.point().unwrap()).unwrap();
            g.at(&fj).unwrap().value()
        };
        for (t, v) in pts[1..].iter().zip(&prim.values) {
            assert!((gv(t) - gv(&pts[0]) - v).abs() < 1e-8);
        }
    }

    #[test]
    fn non_closed_form_is_rejected() {
        let s = MetricSpec::euclidean(3);
        let omega = FormField::new(1, |fj: &crate::geometry::FiberJets<f64>| {
            let y = fj.y();
            let z = fj.constant(0.0);
            Ok(VerticalForm::one_form(vec![y[1].clone(), z.clone(), z]))
        })
        .xi1();
        let pts = leaf_points(&s, &[0.0; 3], &[vec![1.0, 0.2, 0.3], vec![0.2, 1.0, 0.1]], 1.0).unwrap();
        assert!(matches!(
            primitive_1form(&s, &omega, &pts[0], &pts[1..], 8),
            Err(GeomError::NotClosed { .. })
        ));
    }

    #[test]
    fn basic_functions() {
        let s = MetricSpec::riemannian(2);
        let pts = vec![PointTM::new(vec![0.1, 0.2], vec![1.0, -0.5]).unwrap()];
        let f2 = ScalarField::new(|fj: &crate::geometry::FiberJets<f64>| Ok(&fj.f * &fj.f));
        assert!(is_basic(&s, &f2, &pts).unwrap().0);
        assert!(!is_basic(&s, &ScalarField::coordinate(0), &pts).unwrap().0);
        assert!(is_basic(&s, &ScalarField::constant(2.0), &pts).unwrap().0);
    }
}
