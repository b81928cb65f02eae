//! Leafwise calculus on vertical form fields.
//!
//! A field is a closure that, given the vertical jets at a point
//! ([`FiberJets`]), returns a jet-valued [`VerticalForm`]. Because the
//! coefficients are jets in the fiber variables, the derivative `d₀₁` of a
//! field is read off exactly, and derived fields (`d′ω`, `ξ₁ω`, `ω ∧ θ`)
//! can themselves be differentiated again as long as jet order remains.
//!
//! On a fiber `x = const` the forms `δyⁱ` restrict to `dyⁱ`, so `d₀₁` acts
//! by the coordinate formula `d₀₁(a_I δy^I) = ∂_j a_I δyʲ ∧ δy^I`.

use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::geometry::{FiberJets, LiouvilleFrame};
use crate::jets::Jet3;
use crate::scalar::{max_abs, Real};
use crate::vforms::{omega0, theta, VerticalForm};

pub type JetForm<T> = VerticalForm<Jet3<T>>;

type FieldFn<T> = dyn Fn(&FiberJets<T>) -> Result<JetForm<T>> + Send + Sync;
type ScalarFn<T> = dyn Fn(&FiberJets<T>) -> Result<Jet3<T>> + Send + Sync;

/// Purity tolerance for the inputs of `d′` and `d″`.
pub const PURITY_TOL: f64 = 1e-8;

/// Foliated derivative along the fibers, coefficientwise from jets.
pub fn d01<T: Real>(form: &JetForm<T>) -> JetForm<T> {
    let n = form.n();
    let q = form.degree();
    let Some(proto) = form.coeffs().first() else {
        return VerticalForm::zero(n, q + 1, &Jet3::constant(T::zero(), n));
    };
    let zero = Jet3::constant(T::zero(), proto.m());
    let mut acc: Option<JetForm<T>> = None;
    for j in 0..n {
        let dyj = VerticalForm::one_form(
            (0..n)
                .map(|i| {
                    if i == j {
                        zero.clone() + T::one()
                    } else {
                        zero.clone()
                    }
                })
                .collect(),
        );
        let dj = form.map(|c| c.partial(j));
        let term = dyj.wedge(&dj).expect("same dimension");
        acc = Some(match acc {
            None => term,
            Some(a) => a.try_add(&term).expect("same shape"),
        });
    }
    acc.expect("n ≥ 1")
}

fn check_tangential<T: Real>(form: &JetForm<T>, frame: &LiouvilleFrame<Jet3<T>>) -> Result<()> {
    if form.degree() == 0 || form.coeffs().is_empty() {
        return Ok(());
    }
    let iz = form.interior_z(frame)?.norm();
    let z: Vec<T> = frame.z.iter().map(Jet3::value).collect();
    let scale = form.norm().max(T::one()) * max_abs(&z).max(T::one());
    if iz > T::lit(PURITY_TOL) * scale {
        return Err(GeomError::NotTangential {
            degree: form.degree(),
            residual: iz.as_f64(),
        });
    }
    Ok(())
}

/// `d′ω = ξ₁(d₀₁ω)` for a `(0,q,0)` form.
pub fn d_prime<T: Real>(form: &JetForm<T>, frame: &LiouvilleFrame<Jet3<T>>) -> Result<JetForm<T>> {
    check_tangential(form, frame)?;
    d01(form).xi1(frame)
}

/// `d″ω = ξ₂(d₀₁ω)` for a `(0,q,0)` form.
///
/// The result has type `(0,q,1)` and is rejected as an input here, so
/// `d″∘d″` cannot be formed.
pub fn d_second<T: Real>(form: &JetForm<T>, frame: &LiouvilleFrame<Jet3<T>>) -> Result<JetForm<T>> {
    check_tangential(form, frame)?;
    d01(form).xi2(frame)
}

/// `[V, W]ⁱ = Vʲ ∂_j Wⁱ − Wʲ ∂_j Vⁱ` for vertical fields with jet components.
pub fn lie_bracket<T: Real>(v: &[Jet3<T>], w: &[Jet3<T>]) -> Vec<Jet3<T>> {
    (0..v.len())
        .map(|i| w[i].directional(v, 0) - v[i].directional(w, 0))
        .collect()
}

/// A scalar function on the fibers, produced as a vertical jet.
#[derive(Clone)]
pub struct ScalarField<T> {
    eval: Arc<ScalarFn<T>>,
}

impl<T: Real> ScalarField<T> {
    pub fn new(f: impl Fn(&FiberJets<T>) -> Result<Jet3<T>> + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(f) }
    }

    pub fn at(&self, fj: &FiberJets<T>) -> Result<Jet3<T>> {
        (self.eval)(fj)
    }

    /// The coordinate function `yⁱ` (zero-based).
    pub fn coordinate(i: usize) -> Self {
        Self::new(move |fj| {
            fj.y()
                .get(i)
                .cloned()
                .ok_or_else(|| GeomError::Argument(format!("coordinate {i} out of range")))
        })
    }

    pub fn constant(c: T) -> Self {
        Self::new(move |fj| Ok(fj.constant(c)))
    }

    /// The fundamental function `F` itself.
    pub fn finsler() -> Self {
        Self::new(|fj| Ok(fj.f.clone()))
    }

    pub fn ln_finsler() -> Self {
        Self::new(|fj| fj.f.try_ln())
    }

    pub fn map(&self, f: impl Fn(Jet3<T>) -> Result<Jet3<T>> + Send + Sync + 'static) -> Self {
        let inner = self.clone();
        Self::new(move |fj| f(inner.at(fj)?))
    }

    pub fn into_form(self) -> FormField<T> {
        FormField::new(0, move |fj| Ok(VerticalForm::scalar(fj.n(), self.at(fj)?)))
    }
}

/// A vertical form field of fixed degree.
#[derive(Clone)]
pub struct FormField<T> {
    degree: usize,
    eval: Arc<FieldFn<T>>,
}

impl<T: Real> FormField<T> {
    pub fn new(
        degree: usize,
        f: impl Fn(&FiberJets<T>) -> Result<JetForm<T>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            degree,
            eval: Arc::new(f),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn at(&self, fj: &FiberJets<T>) -> Result<JetForm<T>> {
        let w = (self.eval)(fj)?;
        if w.degree() != self.degree || w.n() != fj.n() {
            return Err(GeomError::Argument(format!(
                "field declared degree {} produced degree {} in dimension {}",
                self.degree,
                w.degree(),
                w.n()
            )));
        }
        Ok(w)
    }

    pub fn value_at(&self, fj: &FiberJets<T>) -> Result<VerticalForm<T>> {
        Ok(self.at(fj)?.values())
    }

    /// Field from jet-valued coefficients on the increasing index tuples.
    pub fn from_coefficients(degree: usize, coeffs: Vec<ScalarField<T>>) -> Self {
        Self::new(degree, move |fj| {
            let vals = coeffs.iter().map(|c| c.at(fj)).collect::<Result<Vec<_>>>()?;
            VerticalForm::new(fj.n(), degree, vals)
        })
    }

    /// `ω₀ = t_i δyⁱ`.
    pub fn omega0() -> Self {
        Self::new(1, |fj| Ok(omega0(&fj.frame)))
    }

    /// `θ_i = δyⁱ − yⁱ ω₀` (zero-based).
    pub fn theta(i: usize) -> Self {
        Self::new(1, move |fj| theta(&fj.frame, i))
    }

    pub fn d01(&self) -> Self {
        let inner = self.clone();
        Self::new(self.degree + 1, move |fj| Ok(d01(&inner.at(fj)?)))
    }

    pub fn d_prime(&self) -> Self {
        let inner = self.clone();
        Self::new(self.degree + 1, move |fj| d_prime(&inner.at(fj)?, &fj.frame))
    }

    pub fn d_second(&self) -> Self {
        let inner = self.clone();
        Self::new(self.degree + 1, move |fj| d_second(&inner.at(fj)?, &fj.frame))
    }

    pub fn xi1(&self) -> Self {
        let inner = self.clone();
        Self::new(self.degree, move |fj| inner.at(fj)?.xi1(&fj.frame))
    }

    pub fn xi2(&self) -> Self {
        let inner = self.clone();
        Self::new(self.degree, move |fj| inner.at(fj)?.xi2(&fj.frame))
    }

    pub fn interior_z(&self) -> Self {
        let inner = self.clone();
        let degree = self.degree.saturating_sub(1);
        Self::new(degree, move |fj| inner.at(fj)?.interior_z(&fj.frame))
    }

    pub fn wedge(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        Self::new(self.degree + other.degree, move |fj| a.at(fj)?.wedge(&b.at(fj)?))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        Self::new(self.degree, move |fj| a.at(fj)?.try_add(&b.at(fj)?))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        Self::new(self.degree, move |fj| a.at(fj)?.try_sub(&b.at(fj)?))
    }

    pub fn scale(&self, s: T) -> Self {
        let a = self.clone();
        Self::new(self.degree, move |fj| Ok(a.at(fj)?.scale(s)))
    }

    /// Multiplication by a scalar field.
    pub fn times(&self, f: &ScalarField<T>) -> Self {
        let (a, f) = (self.clone(), f.clone());
        Self::new(self.degree, move |fj| Ok(a.at(fj)?.times(&f.at(fj)?)))
    }
}

/// The frame fields `X_k` and `Z` as jet-valued vertical vectors.
pub fn frame_vector<T: Real>(fj: &FiberJets<T>, k: usize) -> Vec<Jet3<T>> {
    fj.frame.x[k].clone()
}

pub fn liouville_vector<T: Real>(fj: &FiberJets<T>) -> Vec<Jet3<T>> {
    fj.frame.z.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fiber_jets;
    use crate::metrics::{MetricSpec, PointTM};
    use approx::assert_relative_eq;

    fn fj34() -> FiberJets<f64> {
        fiber_jets(
            &MetricSpec::euclidean(2),
            &PointTM::new(vec![0.0, 0.0], vec![3.0, 4.0]).unwrap(),
        )
        .unwrap()
    }

    fn y1y2() -> ScalarField<f64> {
        ScalarField::new(|fj| Ok(&fj.y()[0] * &fj.y()[1]))
    }

    #[test]
    fn d01_of_product() {
        let fj = fj34();
        let d = y1y2().into_form().d01().value_at(&fj).unwrap();
        assert_eq!(d.coeffs(), &[4.0, 3.0]);
    }

    #[test]
    fn d_prime_and_d_second_by_hand() {
        let fj = fj34();
        let f = y1y2().into_form();
        let dp = f.d_prime().value_at(&fj).unwrap();
        assert_relative_eq!(dp.coeffs()[0], 1.12, epsilon = 1e-14);
        assert_relative_eq!(dp.coeffs()[1], -0.84, epsilon = 1e-14);
        assert!(dp.interior(&[3.0, 4.0]).unwrap().norm() < 1e-14);
        let ds = f.d_second().value_at(&fj).unwrap();
        assert_relative_eq!(ds.coeffs()[0], 2.88, epsilon = 1e-14);
        assert_relative_eq!(ds.coeffs()[1], 3.84, epsilon = 1e-14);
    }

    #[test]
    fn d_second_cannot_be_iterated() {
        let fj = fj34();
        let twice = y1y2().into_form().d_second().d_second();
        assert!(matches!(twice.at(&fj), Err(GeomError::NotTangential { .. })));
    }

    #[test]
    fn d_prime_rejects_mixed_input() {
        let fj = fj34();
        let dy1 = FormField::new(1, |fj: &FiberJets<f64>| {
            let one = fj.constant(1.0);
            let zero = fj.constant(0.0);
            Ok(VerticalForm::one_form(vec![one, zero]))
        });
        assert!(dy1.d_prime().at(&fj).is_err());
        assert!(dy1.xi1().d_prime().at(&fj).is_ok());
    }

    #[test]
    fn bracket_with_liouville_field() {
        let fj = fj34();
        let x1 = frame_vector(&fj, 0);
        let z = liouville_vector(&fj);
        let b = lie_bracket(&x1, &z);
        for i in 0..2 {
            assert_relative_eq!(b[i].value(), x1[i].value(), epsilon = 1e-15);
        }
        let zz = lie_bracket(&z, &z);
        assert!(zz.iter().all(|c| c.value() == 0.0));
    }

    #[test]
    fn log_finsler_differential_is_omega0() {
        let fj = fj34();
        let d = ScalarField::ln_finsler().into_form().d01().value_at(&fj).unwrap();
        assert_relative_eq!(d.coeffs()[0], 0.12, epsilon = 1e-15);
        assert_relative_eq!(d.coeffs()[1], 0.16, epsilon = 1e-15);
    }
}
