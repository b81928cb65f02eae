//! Catalog of Finsler fundamental functions.
//!
//! Every metric is evaluated twice: through jets (exact derivatives for the
//! geometry) and through plain scalar arithmetic (`eval_value`), the latter
//! being what the finite-difference oracles differentiate.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::jets::Jet3;
use crate::linalg;
use crate::scalar::{norm2, Real};

/// Smallest admissible fiber norm (points closer to the zero section are
/// not in the slit bundle).
pub const SLIT_EPS: f64 = 1e-6;

/// Polynomial of degree at most two in `x`: `c + l·x + xᵀ Q x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly2<T> {
    pub constant: T,
    pub linear: Vec<T>,
    pub quadratic: Vec<Vec<T>>,
}

impl<T: Real> Poly2<T> {
    pub fn constant_only(c: T, n: usize) -> Self {
        Self {
            constant: c,
            linear: vec![T::zero(); n],
            quadratic: vec![vec![T::zero(); n]; n],
        }
    }

    pub fn eval(&self, x: &[T]) -> T {
        let mut v = self.constant;
        for (h, xh) in x.iter().enumerate() {
            v = v + self.linear[h] * *xh;
            for (k, xk) in x.iter().enumerate() {
                v = v + self.quadratic[h][k] * *xh * *xk;
            }
        }
        v
    }

    pub fn eval_jet(&self, x: &[Jet3<T>]) -> Jet3<T> {
        let m = x[0].m();
        let mut v = Jet3::constant(self.constant, m);
        for (h, xh) in x.iter().enumerate() {
            if self.linear[h] != T::zero() {
                v = v + xh * self.linear[h];
            }
            for (k, xk) in x.iter().enumerate() {
                if self.quadratic[h][k] != T::zero() {
                    v = v + (xh * xk) * self.quadratic[h][k];
                }
            }
        }
        v
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if self.linear.len() != n || self.quadratic.len() != n || self.quadratic.iter().any(|r| r.len() != n)
        {
            return Err(GeomError::Argument(format!(
                "polynomial coefficients do not match dimension {n}"
            )));
        }
        Ok(())
    }
}

/// Riemannian coefficients `a_ij(x) = δ_ij + ε s_i(x) s_j(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFamily<T> {
    pub epsilon: T,
    pub s: Vec<Poly2<T>>,
}

impl<T: Real> QuadraticFamily<T> {
    /// Built-in family used when no coefficients are configured.
    pub fn default_for(n: usize) -> Self {
        let s = (0..n)
            .map(|i| {
                let mut p = Poly2::constant_only(T::lit(0.3 + 0.1 * i as f64), n);
                for h in 0..n {
                    p.linear[h] = T::lit(0.4 * (((i + h) % 3) as f64 - 1.0));
                }
                let nxt = (i + 1) % n;
                p.quadratic[nxt][nxt] = T::lit(0.2);
                p.quadratic[i][nxt] = p.quadratic[i][nxt] + T::lit(0.15);
                p
            })
            .collect();
        Self {
            epsilon: T::lit(0.5),
            s,
        }
    }

    pub fn a_matrix(&self, x: &[T]) -> Vec<Vec<T>> {
        let s: Vec<T> = self.s.iter().map(|p| p.eval(x)).collect();
        let n = s.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let d = if i == j { T::one() } else { T::zero() };
                        d + self.epsilon * s[i] * s[j]
                    })
                    .collect()
            })
            .collect()
    }

    /// `a_ij yⁱ yʲ = |y|² + ε (s·y)²`.
    fn quadratic_form_jet(&self, x: &[Jet3<T>], y: &[Jet3<T>]) -> Jet3<T> {
        let m = y[0].m();
        let mut yy = Jet3::constant(T::zero(), m);
        let mut sy = Jet3::constant(T::zero(), m);
        for (i, yi) in y.iter().enumerate() {
            yy = yy + yi * yi;
            sy = sy + self.s[i].eval_jet(x) * yi;
        }
        yy + (&sy * &sy) * self.epsilon
    }

    fn quadratic_form(&self, x: &[T], y: &[T]) -> T {
        let a = self.a_matrix(x);
        let mut q = T::zero();
        for i in 0..y.len() {
            for j in 0..y.len() {
                q = q + a[i][j] * y[i] * y[j];
            }
        }
        q
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if self.s.len() != n {
            return Err(GeomError::Argument(format!(
                "family has {} generators, dimension is {n}",
                self.s.len()
            )));
        }
        self.s.iter().try_for_each(|p| p.check_dim(n))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MetricKind<T> {
    /// `F = |y|`.
    Euclidean,
    /// `F = √(a_ij(x) yⁱ yʲ)`.
    Riemannian { family: QuadraticFamily<T> },
    /// `F = √(a_ij(x) yⁱ yʲ) + b_i(x) yⁱ`.
    Randers {
        family: QuadraticFamily<T>,
        b: Vec<Poly2<T>>,
    },
    /// `F = (Σ c_i (yⁱ)⁴)^{1/4}`.
    MinkowskiQuartic { c: Vec<T> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec<T> {
    pub name: String,
    pub n: usize,
    #[serde(flatten)]
    pub kind: MetricKind<T>,
}

impl<T: Real> MetricSpec<T> {
    pub fn euclidean(n: usize) -> Self {
        Self {
            name: "euclidean".into(),
            n,
            kind: MetricKind::Euclidean,
        }
    }

    pub fn riemannian(n: usize) -> Self {
        Self {
            name: "riemannian".into(),
            n,
            kind: MetricKind::Riemannian {
                family: QuadraticFamily::default_for(n),
            },
        }
    }

    /// Randers metric whose drift covector stays below 0.4 in Euclidean
    /// norm on the sample box; since `a ≥ I` its `a`-norm is smaller still.
    pub fn randers(n: usize) -> Self {
        let scale = 1.0 / (n as f64).sqrt();
        let b = (0..n)
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                let mut p = Poly2::constant_only(T::lit(0.25 * scale * sign), n);
                p.linear[i] = T::lit(0.1 * scale);
                p.quadratic[i][i] = T::lit(0.05 * scale);
                p
            })
            .collect();
        Self {
            name: "randers".into(),
            n,
            kind: MetricKind::Randers {
                family: QuadraticFamily::default_for(n),
                b,
            },
        }
    }

    pub fn minkowski_quartic(n: usize) -> Self {
        Self::quartic_with((0..n).map(|i| T::lit(1.0 + 0.5 * i as f64)).collect())
    }

    pub fn quartic_with(c: Vec<T>) -> Self {
        Self {
            name: "minkowski-quartic".into(),
            n: c.len(),
            kind: MetricKind::MinkowskiQuartic { c },
        }
    }

    /// Built-in metric by catalog name.
    pub fn by_name(name: &str, n: usize) -> Result<Self> {
        match name {
            "euclidean" => Ok(Self::euclidean(n)),
            "riemannian" => Ok(Self::riemannian(n)),
            "randers" => Ok(Self::randers(n)),
            "minkowski-quartic" | "quartic" => Ok(Self::minkowski_quartic(n)),
            other => Err(GeomError::Argument(format!("unknown metric {other:?}"))),
        }
    }

    pub fn catalog(n: usize) -> Vec<Self> {
        vec![
            Self::euclidean(n),
            Self::riemannian(n),
            Self::randers(n),
            Self::minkowski_quartic(n),
        ]
    }

    pub fn check(&self) -> Result<()> {
        if !(2..=6).contains(&self.n) {
            return Err(GeomError::Argument(format!("dimension {} outside 2..=6", self.n)));
        }
        match &self.kind {
            MetricKind::Euclidean => Ok(()),
            MetricKind::Riemannian { family } => family.check_dim(self.n),
            MetricKind::Randers { family, b } => {
                family.check_dim(self.n)?;
                if b.len() != self.n {
                    return Err(GeomError::Argument("randers covector length".into()));
                }
                b.iter().try_for_each(|p| p.check_dim(self.n))
            }
            MetricKind::MinkowskiQuartic { c } => {
                if c.len() != self.n {
                    return Err(GeomError::Argument("quartic coefficient count".into()));
                }
                if c.iter().any(|v| *v <= T::zero()) {
                    return Err(GeomError::Argument(
                        "quartic coefficients must be positive".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Jet of `F` from jet-valued coordinates.
    pub fn eval_jet(&self, x: &[Jet3<T>], y: &[Jet3<T>]) -> Result<Jet3<T>> {
        let m = y[0].m();
        match &self.kind {
            MetricKind::Euclidean => {
                let mut s = Jet3::constant(T::zero(), m);
                for yi in y {
                    s = s + yi * yi;
                }
                s.try_sqrt()
            }
            MetricKind::Riemannian { family } => family.quadratic_form_jet(x, y).try_sqrt(),
            MetricKind::Randers { family, b } => {
                let alpha = family.quadratic_form_jet(x, y).try_sqrt()?;
                let mut beta = Jet3::constant(T::zero(), m);
                for (i, yi) in y.iter().enumerate() {
                    beta = beta + b[i].eval_jet(x) * yi;
                }
                let f = alpha + beta;
                if f.value() <= T::zero() {
                    return Err(GeomError::Domain {
                        op: "randers",
                        value: f.value().as_f64(),
                    });
                }
                Ok(f)
            }
            MetricKind::MinkowskiQuartic { c } => {
                let mut s = Jet3::constant(T::zero(), m);
                for (i, yi) in y.iter().enumerate() {
                    s = s + yi.powi(4) * c[i];
                }
                s.try_powf(T::lit(0.25))
            }
        }
    }

    /// `F(x, y)` by plain scalar arithmetic.
    pub fn eval_value(&self, x: &[T], y: &[T]) -> Result<T> {
        let dom = |op, v: T| GeomError::Domain {
            op,
            value: v.as_f64(),
        };
        let f = match &self.kind {
            MetricKind::Euclidean => norm2(y),
            MetricKind::Riemannian { family } => {
                let q = family.quadratic_form(x, y);
                if q <= T::zero() {
                    return Err(dom("sqrt", q));
                }
                q.sqrt()
            }
            MetricKind::Randers { family, b } => {
                let q = family.quadratic_form(x, y);
                if q <= T::zero() {
                    return Err(dom("sqrt", q));
                }
                let beta: T = b.iter().zip(y).map(|(bi, yi)| bi.eval(x) * *yi).sum();
                q.sqrt() + beta
            }
            MetricKind::MinkowskiQuartic { c } => {
                let s: T = c.iter().zip(y).map(|(ci, yi)| *ci * yi.powi(4)).sum();
                if s <= T::zero() {
                    return Err(dom("pow", s));
                }
                s.powf(T::lit(0.25))
            }
        };
        if !(f > T::zero()) {
            return Err(dom("F", f));
        }
        Ok(f)
    }

    /// `a`-norm of the Randers covector at `x`, if this is a Randers metric.
    pub fn drift_norm(&self, x: &[T]) -> Option<T> {
        match &self.kind {
            MetricKind::Randers { family, b } => {
                let a_inv = linalg::inverse(&family.a_matrix(x)).ok()?;
                let bv: Vec<T> = b.iter().map(|p| p.eval(x)).collect();
                let v = linalg::matvec(&a_inv, &bv);
                Some(v.iter().zip(&bv).map(|(p, q)| *p * *q).sum::<T>().sqrt())
            }
            _ => None,
        }
    }

    pub fn is_x_independent(&self) -> bool {
        matches!(
            self.kind,
            MetricKind::Euclidean | MetricKind::MinkowskiQuartic { .. }
        )
    }
}

/// A point `(x, y)` of the slit tangent bundle in one chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointTM<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
}

impl<T: Real> PointTM<T> {
    pub fn new(x: Vec<T>, y: Vec<T>) -> Result<Self> {
        if x.len() != y.len() || x.is_empty() {
            return Err(GeomError::Argument(format!(
                "x has {} components, y has {}",
                x.len(),
                y.len()
            )));
        }
        if !(norm2(&y) >= T::lit(SLIT_EPS)) {
            return Err(GeomError::Argument(
                "fiber coordinate too close to the zero section".into(),
            ));
        }
        Ok(Self { x, y })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn with_y(&self, y: Vec<T>) -> Result<Self> {
        Self::new(self.x.clone(), y)
    }

    pub fn scaled(&self, lambda: T) -> Result<Self> {
        self.with_y(self.y.iter().map(|v| *v * lambda).collect())
    }
}

/// Which coordinates carry derivative slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Seeding {
    /// `2n` variables: `x` at slots `0..n`, `y` at `n..2n`.
    Full,
    /// `n` variables for `y`; `x` frozen.
    Vertical,
}

impl Seeding {
    pub fn y_offset(self, n: usize) -> usize {
        match self {
            Seeding::Full => n,
            Seeding::Vertical => 0,
        }
    }

    pub fn vars(self, n: usize) -> usize {
        match self {
            Seeding::Full => 2 * n,
            Seeding::Vertical => n,
        }
    }
}

/// Seeds the coordinates of `p` as jets.
pub fn seed_point<T: Real>(p: &PointTM<T>, seeding: Seeding) -> (Vec<Jet3<T>>, Vec<Jet3<T>>) {
    let n = p.n();
    let m = seeding.vars(n);
    let x = match seeding {
        Seeding::Full => Jet3::seed_all(&p.x, 0, m).expect("in range"),
        Seeding::Vertical => p.x.iter().map(|v| Jet3::constant(*v, m)).collect(),
    };
    let y = Jet3::seed_all(&p.y, seeding.y_offset(n), m).expect("in range");
    (x, y)
}

fn check_point<T: Real>(spec: &MetricSpec<T>, p: &PointTM<T>) -> Result<()> {
    if p.n() != spec.n {
        return Err(GeomError::Argument(format!(
            "point dimension {} does not match metric dimension {}",
            p.n(),
            spec.n
        )));
    }
    Ok(())
}

/// Jet of `F` at `p` in all `2n` chart coordinates.
pub fn eval_f<T: Real>(spec: &MetricSpec<T>, p: &PointTM<T>) -> Result<Jet3<T>> {
    eval_f_seeded(spec, p, Seeding::Full)
}

pub fn eval_f_seeded<T: Real>(spec: &MetricSpec<T>, p: &PointTM<T>, seeding: Seeding) -> Result<Jet3<T>> {
    check_point(spec, p)?;
    let (x, y) = seed_point(p, seeding);
    spec.eval_jet(&x, &y)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidityReport<T> {
    /// Max over `λ ∈ {0.5, 2}` of `|F(x,λy) − λF(x,y)|`.
    pub homogeneity_residual: T,
    pub min_eigenvalue: T,
    pub max_eigenvalue: T,
    pub drift_norm: Option<T>,
    pub passed: bool,
}

/// Eigenvalue floor below which the fundamental tensor counts as singular.
pub const DEGENERACY_FLOOR: f64 = 1e-10;

pub fn validate_at<T: Real>(spec: &MetricSpec<T>, p: &PointTM<T>) -> ValidityReport<T> {
    let failed = ValidityReport {
        homogeneity_residual: T::nan(),
        min_eigenvalue: T::nan(),
        max_eigenvalue: T::nan(),
        drift_norm: spec.drift_norm(&p.x),
        passed: false,
    };
    if spec.check().is_err() || check_point(spec, p).is_err() {
        return failed;
    }
    let Ok(f) = spec.eval_value(&p.x, &p.y) else {
        return failed;
    };
    let mut homog = T::zero();
    for lambda in [T::lit(0.5), T::lit(2.0)] {
        let ly: Vec<T> = p.y.iter().map(|v| *v * lambda).collect();
        match spec.eval_value(&p.x, &ly) {
            Ok(fl) => homog = homog.max((fl - lambda * f).abs()),
            Err(_) => return failed,
        }
    }
    let g = match eval_f_seeded(spec, p, Seeding::Vertical) {
        Ok(fj) => {
            let half_f2 = (&fj * &fj) * T::lit(0.5);
            half_f2.hessian_matrix()
        }
        Err(_) => return failed,
    };
    let ev = linalg::symmetric_eigenvalues(&g);
    let min_eigenvalue = ev[0];
    let max_eigenvalue = ev[ev.len() - 1];
    let drift_norm = spec.drift_norm(&p.x);
    let passed = homog <= T::lit(1e-10) * f.max(T::one())
        && min_eigenvalue > T::lit(DEGENERACY_FLOOR)
        && drift_norm.is_none_or(|b| b < T::one());
    ValidityReport {
        homogeneity_residual: homog,
        min_eigenvalue,
        max_eigenvalue,
        drift_norm,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pt(x: &[f64], y: &[f64]) -> PointTM<f64> {
        PointTM::new(x.to_vec(), y.to_vec()).unwrap()
    }

    #[test]
    fn euclidean_value() {
        let f = eval_f(&MetricSpec::euclidean(2), &pt(&[0.0, 0.0], &[3.0, 4.0])).unwrap();
        assert_relative_eq!(f.value(), 5.0, epsilon = 1e-15);
    }

    #[test]
    fn quartic_value() {
        let spec = MetricSpec::quartic_with(vec![1.0, 1.0]);
        let f = eval_f(&spec, &pt(&[0.0, 0.0], &[1.0, 1.0])).unwrap();
        assert_relative_eq!(f.value(), 2f64.powf(0.25), epsilon = 1e-15);
    }

    #[test]
    fn scaling_the_fiber_scales_f() {
        let p = pt(&[0.2, -0.4, 0.7], &[0.9, -0.3, 1.1]);
        for spec in MetricSpec::<f64>::catalog(3) {
            let f1 = eval_f(&spec, &p).unwrap().value();
            let f2 = eval_f(&spec, &p.scaled(2.0).unwrap()).unwrap().value();
            assert_relative_eq!(f2, 2.0 * f1, max_relative = 1e-14);
        }
    }

    #[test]
    fn jet_and_plain_values_agree() {
        let p = pt(&[0.3, -0.8, 0.1, 0.5], &[0.6, 0.4, -1.0, 0.2]);
        for spec in MetricSpec::<f64>::catalog(4) {
            let a = eval_f(&spec, &p).unwrap().value();
            let b = spec.eval_value(&p.x, &p.y).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-14);
        }
    }

    #[test]
    fn euclidean_validates_with_unit_eigenvalue() {
        let r = validate_at(&MetricSpec::euclidean(3), &pt(&[0.0; 3], &[0.3, 1.0, -0.2]));
        assert!(r.passed);
        assert_relative_eq!(r.min_eigenvalue, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn riemannian_is_homogeneous() {
        let r = validate_at(
            &MetricSpec::riemannian(3),
            &pt(&[0.5, -0.5, 0.9], &[1.2, 0.1, -0.7]),
        );
        assert!(r.passed);
        assert!(r.homogeneity_residual < 1e-10);
    }

    #[test]
    fn near_unit_drift_fails_validation() {
        let n = 2;
        let mut b = vec![Poly2::constant_only(0.0, n), Poly2::constant_only(0.0, n)];
        b[0].constant = 0.999_999;
        let spec = MetricSpec {
            name: "randers-degenerate".into(),
            n,
            kind: MetricKind::Randers {
                family: QuadraticFamily {
                    epsilon: 0.0,
                    s: vec![Poly2::constant_only(0.0, n); n],
                },
                b,
            },
        };
        let r = validate_at(&spec, &pt(&[0.0, 0.0], &[-1.0, 0.0]));
        assert!(!r.passed);
        assert!(r.min_eigenvalue < 1e-3);
    }

    #[test]
    fn slit_condition_enforced() {
        assert!(PointTM::new(vec![0.0, 0.0], vec![0.0, 1e-9]).is_err());
        assert!(PointTM::new(vec![0.0], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(MetricSpec::quartic_with(vec![1.0, -1.0]).check().is_err());
        assert!(MetricSpec::<f64>::euclidean(7).check().is_err());
        assert!(MetricSpec::<f64>::by_name("kropina", 2).is_err());
    }
}
