//! Chart changes `x̃ = φ(x)` with the induced fiber map `ỹ = (∂x̃/∂x) y`.
//!
//! The metric in the new chart is defined by pullback,
//! `F̃(x̃, ỹ) = F(φ⁻¹(x̃), (∂x/∂x̃) ỹ)`, and the checks below compare the
//! frame objects computed independently in both charts.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::geometry::{fiber_jets, FiberJets};
use crate::jets::Jet3;
use crate::linalg::{self, Matrix};
use crate::metrics::{MetricSpec, PointTM, Poly2};
use crate::scalar::{max_abs, norm2, Real};
use crate::vcalc::d01;
use crate::vforms::VerticalForm;

/// Largest admissible perturbation size for the polynomial family.
pub const MAX_EPSILON: f64 = 0.1;
const INVERSE_TOL: f64 = 1e-12;
const INVERSE_MAX_ITER: usize = 200;
/// Relative floor for `|yⁿ|` and `|ỹᵏ|` in the determinant formula.
pub const DENOMINATOR_FLOOR: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TransitionKind<T> {
    Identity,
    /// `x̃ = A x`.
    Linear {
        a: Matrix<T>,
    },
    /// `x̃ⁱ = xⁱ + ε pᵢ(x)`.
    Polynomial {
        epsilon: T,
        p: Vec<Poly2<T>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartTransition<T> {
    pub name: String,
    pub n: usize,
    /// Half-width of the box `[-b, b]ⁿ` on which the map is used.
    pub domain: T,
    #[serde(flatten)]
    pub kind: TransitionKind<T>,
}

impl<T: Real> ChartTransition<T> {
    pub fn identity(n: usize) -> Self {
        Self {
            name: "identity".into(),
            n,
            domain: T::lit(2.0),
            kind: TransitionKind::Identity,
        }
    }

    /// An upper-triangular-plus-corner matrix with determinant bounded
    /// away from zero.
    pub fn linear(n: usize) -> Self {
        let a = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            T::lit(1.0 + 0.2 * i as f64)
                        } else if j == (i + 1) % n {
                            T::lit(0.25)
                        } else {
                            T::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Self::linear_with(a)
    }

    pub fn linear_with(a: Matrix<T>) -> Self {
        Self {
            name: "linear".into(),
            n: a.len(),
            domain: T::lit(2.0),
            kind: TransitionKind::Linear { a },
        }
    }

    pub fn polynomial(n: usize) -> Self {
        let p = (0..n)
            .map(|i| {
                let nxt = (i + 1) % n;
                let mut q = Poly2::constant_only(T::zero(), n);
                q.linear[i] = T::lit(0.3);
                q.quadratic[nxt][nxt] = T::one();
                q.quadratic[i][nxt] = q.quadratic[i][nxt] - T::lit(0.5);
                q
            })
            .collect();
        Self {
            name: "polynomial".into(),
            n,
            domain: T::lit(1.5),
            kind: TransitionKind::Polynomial {
                epsilon: T::lit(MAX_EPSILON),
                p,
            },
        }
    }

    pub fn by_name(name: &str, n: usize) -> Result<Self> {
        match name {
            "identity" => Ok(Self::identity(n)),
            "linear" => Ok(Self::linear(n)),
            "polynomial" => Ok(Self::polynomial(n)),
            other => Err(GeomError::Argument(format!("unknown transition '{other}'"))),
        }
    }

    pub fn catalog(n: usize) -> Vec<Self> {
        vec![Self::identity(n), Self::linear(n), Self::polynomial(n)]
    }

    pub fn check(&self) -> Result<()> {
        match &self.kind {
            TransitionKind::Identity => Ok(()),
            TransitionKind::Linear { a } => {
                if a.len() != self.n || a.iter().any(|r| r.len() != self.n) {
                    return Err(GeomError::Argument("linear transition must be n×n".into()));
                }
                let s = linalg::singular_values(a);
                if !(s[0] > T::lit(1e-6) * s[self.n - 1]) {
                    return Err(GeomError::Argument("linear transition is singular".into()));
                }
                Ok(())
            }
            TransitionKind::Polynomial { epsilon, p } => {
                if !(epsilon.abs() <= T::lit(MAX_EPSILON)) {
                    return Err(GeomError::Argument(format!(
                        "polynomial transition needs |epsilon| <= {MAX_EPSILON}"
                    )));
                }
                if p.len() != self.n {
                    return Err(GeomError::Argument(
                        "polynomial transition needs one component per coordinate".into(),
                    ));
                }
                p.iter().try_for_each(|q| {
                    if q.linear.len() != self.n
                        || q.quadratic.len() != self.n
                        || q.quadratic.iter().any(|r| r.len() != self.n)
                    {
                        Err(GeomError::Argument("polynomial component has wrong shape".into()))
                    } else {
                        Ok(())
                    }
                })
            }
        }
    }

    fn in_domain(&self, x: &[T]) -> Result<()> {
        if x.len() != self.n {
            return Err(GeomError::Argument(format!(
                "transition of dimension {} applied to {} coordinates",
                self.n,
                x.len()
            )));
        }
        if !(max_abs(x) <= self.domain) {
            return Err(GeomError::Argument(format!(
                "point outside the transition domain [-{}, {}]",
                self.domain, self.domain
            )));
        }
        Ok(())
    }

    /// `φ` on jets.
    pub fn forward_jet(&self, x: &[Jet3<T>]) -> Vec<Jet3<T>> {
        match &self.kind {
            TransitionKind::Identity => x.to_vec(),
            TransitionKind::Linear { a } => a
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(x)
                        .fold(x[0].clone() * T::zero(), |acc, (c, xi)| acc + xi * *c)
                })
                .collect(),
            TransitionKind::Polynomial { epsilon, p } => x
                .iter()
                .zip(p)
                .map(|(xi, q)| xi + &(q.eval_jet(x) * *epsilon))
                .collect(),
        }
    }

    pub fn forward(&self, x: &[T]) -> Result<Vec<T>> {
        self.in_domain(x)?;
        Ok(self.forward_unchecked(x))
    }

    fn forward_unchecked(&self, x: &[T]) -> Vec<T> {
        match &self.kind {
            TransitionKind::Identity => x.to_vec(),
            TransitionKind::Linear { a } => linalg::matvec(a, x),
            TransitionKind::Polynomial { epsilon, p } => x
                .iter()
                .zip(p)
                .map(|(xi, q)| *xi + *epsilon * q.eval(x))
                .collect(),
        }
    }

    /// `φ⁻¹`; for the polynomial family by fixed-point iteration, certified
    /// by the forward residual.
    pub fn inverse(&self, xt: &[T]) -> Result<Vec<T>> {
        match &self.kind {
            TransitionKind::Identity => Ok(xt.to_vec()),
            TransitionKind::Linear { a } => linalg::solve(a, xt),
            TransitionKind::Polynomial { epsilon, p } => {
                let mut x = xt.to_vec();
                for _ in 0..INVERSE_MAX_ITER {
                    let next: Vec<T> = xt
                        .iter()
                        .zip(p)
                        .map(|(v, q)| *v - *epsilon * q.eval(&x))
                        .collect();
                    let step = max_abs(&next.iter().zip(&x).map(|(a, b)| *a - *b).collect::<Vec<_>>());
                    x = next;
                    if step <= T::epsilon() {
                        break;
                    }
                }
                let back = self.forward_unchecked(&x);
                let res = max_abs(&back.iter().zip(xt).map(|(a, b)| *a - *b).collect::<Vec<_>>());
                let floor = T::lit(INVERSE_TOL).max(T::epsilon() * T::lit(16.0));
                if !(res <= floor * max_abs(xt).max(T::one())) {
                    return Err(GeomError::Argument(format!(
                        "inverse transition not certified (residual {res})"
                    )));
                }
                Ok(x)
            }
        }
    }

    /// `∂x̃/∂x` at `x`.
    pub fn jacobian(&self, x: &[T]) -> Result<Matrix<T>> {
        self.in_domain(x)?;
        let jets = Jet3::seed_all(x, 0, self.n)?;
        let out = self.forward_jet(&jets);
        Ok(out
            .iter()
            .map(|c| (0..self.n).map(|j| c.grad(j)).collect())
            .collect())
    }

    /// `(x̃, ỹ)` for a point of the source chart.
    pub fn push_point(&self, p: &PointTM<T>) -> Result<PointTM<T>> {
        let j = self.jacobian(&p.x)?;
        PointTM::new(self.forward_unchecked(&p.x), linalg::matvec(&j, &p.y))
    }

    /// Vertical jets of the pulled-back metric at a target-chart point.
    pub fn fiber_jets_tilde(&self, spec: &MetricSpec<T>, pt: &PointTM<T>) -> Result<FiberJets<T>> {
        let x = self.inverse(&pt.x)?;
        let k = linalg::inverse(&self.jacobian(&x)?)?;
        let n = self.n;
        let yt = Jet3::seed_all(&pt.y, 0, n)?;
        let y = pull_vector(&k, &yt);
        let xc: Vec<Jet3<T>> = x.iter().map(|v| Jet3::constant(*v, n)).collect();
        let f = spec.eval_jet(&xc, &y)?;
        FiberJets::from_f(pt.clone(), f)
    }
}

/// `K · v` for a constant matrix and jet components.
fn pull_vector<T: Real>(k: &Matrix<T>, v: &[Jet3<T>]) -> Vec<Jet3<T>> {
    k.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(v[0].clone() * T::zero(), |acc, (c, vi)| acc + vi * *c)
        })
        .collect()
}

fn max_diff<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()))
}

/// Both charts at one source point.
#[derive(Clone, Debug)]
pub struct ChartPair<T> {
    pub source: FiberJets<T>,
    pub target: FiberJets<T>,
    /// `∂x̃/∂x`.
    pub jacobian: Matrix<T>,
    /// `∂x/∂x̃`.
    pub jacobian_inv: Matrix<T>,
}

impl<T: Real> ChartPair<T> {
    pub fn new(spec: &MetricSpec<T>, tr: &ChartTransition<T>, p: &PointTM<T>) -> Result<Self> {
        let source = fiber_jets(spec, p)?;
        let pt = tr.push_point(p)?;
        let target = tr.fiber_jets_tilde(spec, &pt)?;
        let jacobian = tr.jacobian(&p.x)?;
        let jacobian_inv = linalg::inverse(&jacobian)?;
        Ok(Self {
            source,
            target,
            jacobian,
            jacobian_inv,
        })
    }

    fn t_values(fj: &FiberJets<T>) -> Vec<T> {
        fj.frame.t.iter().map(Jet3::value).collect()
    }

    /// `max |t̃_{k₁} − (∂xᵏ/∂x̃^{k₁}) t_k|`.
    pub fn t_covariance(&self) -> T {
        let t = Self::t_values(&self.source);
        let tt = Self::t_values(&self.target);
        let expected = linalg::matvec(&linalg::transpose(&self.jacobian_inv), &t);
        max_diff(&tt, &expected)
    }

    /// `max |X̃_{i₁} − (∂xᵏ/∂x̃^{i₁}) X_k|`, both sides in the target basis.
    pub fn x_covariance(&self) -> T {
        let n = self.source.n();
        let fs = self.source.frame.values();
        let ft = self.target.frame.values();
        let pushed: Vec<Vec<T>> = fs.x.iter().map(|v| linalg::matvec(&self.jacobian, v)).collect();
        let mut worst = T::zero();
        for i1 in 0..n {
            let expected: Vec<T> = (0..n)
                .map(|c| (0..n).map(|k| self.jacobian_inv[k][i1] * pushed[k][c]).sum())
                .collect();
            worst = worst.max(max_diff(&ft.x[i1], &expected));
        }
        worst
    }

    /// Pullback of `ω̃₀` against `ω₀` in the source chart.
    pub fn omega0_invariance(&self) -> T {
        let t = Self::t_values(&self.source);
        let tt = Self::t_values(&self.target);
        let pulled = linalg::matvec(&linalg::transpose(&self.jacobian), &tt);
        max_diff(&pulled, &t)
    }

    /// Coefficient law for `d′f` of a fiber function given in the source
    /// chart: `ã_{i₁} = (∂xⁱ/∂x̃^{i₁}) a_i`.
    pub fn one_form_law(&self, f: &dyn Fn(&[Jet3<T>]) -> Jet3<T>) -> Result<T> {
        let a = d01(&VerticalForm::scalar(self.source.n(), f(self.source.y())))
            .xi1(&self.source.frame)?
            .values();
        let y_from_tilde = pull_vector(&self.jacobian_inv, self.target.y());
        let at = d01(&VerticalForm::scalar(self.target.n(), f(&y_from_tilde)))
            .xi1(&self.target.frame)?
            .values();
        let expected = linalg::matvec(&linalg::transpose(&self.jacobian_inv), a.coeffs());
        Ok(max_diff(at.coeffs(), &expected))
    }

    /// Determinant of the change `{X₁..X_{n−1}, Z} → {X̃ without X̃_k, Z}`,
    /// computed by solving the change system and by the closed form.
    /// `k` is zero-based.
    pub fn frame_change_determinant(&self, k: usize) -> Result<(T, T)> {
        let n = self.source.n();
        if k >= n {
            return Err(GeomError::Argument(format!("dropped index {k} out of range")));
        }
        let y = &self.source.point.y;
        let yt = &self.target.point.y;
        let floor = T::lit(DENOMINATOR_FLOOR);
        if !(y[n - 1].abs() > floor * norm2(y)) || !(yt[k].abs() > floor * norm2(yt)) {
            return Err(GeomError::Precondition(format!(
                "need |y^n| and |ỹ^{}| above {DENOMINATOR_FLOOR} of the fiber norm",
                k + 1
            )));
        }
        let fs = self.source.frame.values();
        let ft = self.target.frame.values();
        // columns in source components
        let mut src: Vec<Vec<T>> = fs.x[..n - 1].to_vec();
        src.push(fs.z.clone());
        let mut tgt: Vec<Vec<T>> = (0..n)
            .filter(|&i| i != k)
            .map(|i| linalg::matvec(&self.jacobian_inv, &ft.x[i]))
            .collect();
        tgt.push(linalg::matvec(&self.jacobian_inv, &ft.z));
        let s = linalg::transpose(&src);
        let t = linalg::transpose(&tgt);
        let mut change = vec![Vec::with_capacity(n); n];
        for col in 0..n {
            let rhs: Vec<T> = t.iter().map(|r| r[col]).collect();
            let sol = linalg::solve(&s, &rhs)?;
            for (r, v) in sol.into_iter().enumerate() {
                change[r].push(v);
            }
        }
        let computed = linalg::determinant(&change);
        let sign = if (n + k + 1).is_multiple_of(2) {
            T::one()
        } else {
            -T::one()
        };
        let formula = sign * yt[k] / y[n - 1] * linalg::determinant(&self.jacobian_inv);
        Ok((computed, formula))
    }
}
