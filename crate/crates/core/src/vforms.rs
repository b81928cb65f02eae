//! Pointwise algebra of vertical forms.
//!
//! A degree-`q` form is stored by its coefficients on the basis
//! `δy^{i₁} ∧ … ∧ δy^{i_q}`, `i₁ < … < i_q`, in lexicographic order.
//! Evaluation uses the determinant convention
//! `(δy^{i₁}∧…∧δy^{i_q})(Y₁,…,Y_q) = det[δy^{i_a}(Y_b)]` with
//! `δyⁱ(∂/∂yʲ) = δⁱⱼ`, and the wedge product is the shuffle product, so
//! that `i_Z(ω₀ ∧ β) = ω₀(Z) β − ω₀ ∧ i_Z β`.
//!
//! Coefficients may be plain scalars or [`Jet3`]s; the latter lets the
//! calculus in [`crate::vcalc`] differentiate the result of any algebraic
//! operation here.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{GeomError, Result};
use crate::geometry::LiouvilleFrame;
use crate::jets::Jet3;
use crate::scalar::Real;

/// Coefficient ring of a vertical form.
pub trait FormCoeff:
    Clone + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    type Real: Real;

    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn scale(&self, s: Self::Real) -> Self;
    /// Absolute value of the pointwise value.
    fn magnitude(&self) -> Self::Real;
}

impl<T: Real> FormCoeff for T {
    type Real = T;
    fn zero_like(&self) -> Self {
        T::zero()
    }
    fn one_like(&self) -> Self {
        T::one()
    }
    fn scale(&self, s: T) -> Self {
        *self * s
    }
    fn magnitude(&self) -> T {
        self.abs()
    }
}

impl<T: Real> FormCoeff for Jet3<T> {
    type Real = T;
    fn zero_like(&self) -> Self {
        Jet3::constant(T::zero(), self.m())
    }
    fn one_like(&self) -> Self {
        Jet3::constant(T::one(), self.m())
    }
    fn scale(&self, s: T) -> Self {
        Jet3::scale(self, s)
    }
    fn magnitude(&self) -> T {
        self.value().abs()
    }
}

/// Increasing index tuples of a given degree, as bit masks, with a reverse
/// lookup from mask to slot.
#[derive(Clone, Debug)]
struct Slots {
    masks: Vec<u32>,
    rank: Vec<usize>,
}

impl Slots {
    fn new(n: usize, q: usize) -> Self {
        let mut masks = Vec::new();
        if q <= n {
            let mut idx: Vec<usize> = (0..q).collect();
            loop {
                masks.push(idx.iter().fold(0u32, |m, i| m | (1 << i)));
                // next combination in lexicographic order
                let mut pos = q;
                while pos > 0 && idx[pos - 1] == n - q + pos - 1 {
                    pos -= 1;
                }
                if pos == 0 {
                    break;
                }
                idx[pos - 1] += 1;
                for k in pos..q {
                    idx[k] = idx[k - 1] + 1;
                }
            }
        }
        let mut rank = vec![usize::MAX; 1 << n];
        for (s, m) in masks.iter().enumerate() {
            rank[*m as usize] = s;
        }
        Self { masks, rank }
    }
}

fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// Sign of the permutation sorting the concatenation `I ++ J` (disjoint).
fn shuffle_sign(i_mask: u32, j_mask: u32) -> bool {
    let mut inversions = 0;
    for j in mask_indices(j_mask) {
        inversions += (i_mask >> (j + 1)).count_ones();
    }
    inversions % 2 == 1
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerticalForm<C> {
    n: usize,
    q: usize,
    coeffs: Vec<C>,
}

impl<C: FormCoeff> VerticalForm<C> {
    pub fn new(n: usize, q: usize, coeffs: Vec<C>) -> Result<Self> {
        if coeffs.len() != binomial(n, q) {
            return Err(GeomError::Argument(format!(
                "degree-{q} form in dimension {n} needs {} coefficients, got {}",
                binomial(n, q),
                coeffs.len()
            )));
        }
        Ok(Self { n, q, coeffs })
    }

    pub fn zero(n: usize, q: usize, proto: &C) -> Self {
        Self {
            n,
            q,
            coeffs: vec![proto.zero_like(); binomial(n, q)],
        }
    }

    pub fn scalar(n: usize, c: C) -> Self {
        Self {
            n,
            q: 0,
            coeffs: vec![c],
        }
    }

    /// Builds a form from a function of the increasing index tuple.
    pub fn from_fn(n: usize, q: usize, mut f: impl FnMut(&[usize]) -> C) -> Self {
        let slots = Slots::new(n, q);
        let coeffs = slots.masks.iter().map(|m| f(&mask_indices(*m))).collect();
        Self { n, q, coeffs }
    }

    /// The 1-form `Σ aᵢ δyⁱ`.
    pub fn one_form(a: Vec<C>) -> Self {
        Self {
            n: a.len(),
            q: 1,
            coeffs: a,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.q
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    /// Increasing index tuples, parallel to [`Self::coeffs`].
    pub fn tuples(&self) -> Vec<Vec<usize>> {
        Slots::new(self.n, self.q)
            .masks
            .iter()
            .map(|m| mask_indices(*m))
            .collect()
    }

    /// Coefficient for an arbitrary index list, antisymmetrically extended.
    pub fn component(&self, idx: &[usize]) -> Option<C> {
        if idx.len() != self.q || idx.iter().any(|i| *i >= self.n) {
            return None;
        }
        let proto = self.coeffs.first()?;
        let mut sorted = idx.to_vec();
        let mut odd = false;
        // bubble sort tracks the permutation parity
        for a in 0..sorted.len() {
            for b in 0..sorted.len() - 1 - a {
                if sorted[b] > sorted[b + 1] {
                    sorted.swap(b, b + 1);
                    odd = !odd;
                }
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Some(proto.zero_like());
        }
        let mask = sorted.iter().fold(0u32, |m, i| m | (1 << i));
        let c = self.coeffs[Slots::new(self.n, self.q).rank[mask as usize]].clone();
        Some(if odd { -c } else { c })
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.q != other.q {
            return Err(GeomError::Argument(format!(
                "form shapes differ: (n={}, q={}) vs (n={}, q={})",
                self.n, self.q, other.n, other.q
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    fn zip(&self, other: &Self, f: impl Fn(C, C) -> C) -> Self {
        Self {
            n: self.n,
            q: self.q,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(a.clone(), b.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, s: C::Real) -> Self {
        self.map(|c| c.scale(s))
    }

    /// Multiplication by a function value.
    pub fn times(&self, f: &C) -> Self {
        self.map(|c| f.clone() * c.clone())
    }

    pub fn map(&self, f: impl Fn(&C) -> C) -> Self {
        Self {
            n: self.n,
            q: self.q,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Max-abs coefficient norm.
    pub fn norm(&self) -> C::Real {
        self.coeffs
            .iter()
            .fold(<C::Real as num_traits::Zero>::zero(), |m, c| {
                num_traits::Float::max(m, c.magnitude())
            })
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(GeomError::Argument(format!(
                "wedge of forms in dimensions {} and {}",
                self.n, other.n
            )));
        }
        let n = self.n;
        let q = self.q + other.q;
        let out_slots = Slots::new(n, q);
        if out_slots.masks.is_empty() {
            return Ok(Self {
                n,
                q,
                coeffs: Vec::new(),
            });
        }
        let proto = self.coeffs[0].zero_like();
        let mut coeffs = vec![proto; out_slots.masks.len()];
        let a_slots = Slots::new(n, self.q);
        let b_slots = Slots::new(n, other.q);
        for (ia, ma) in a_slots.masks.iter().enumerate() {
            for (ib, mb) in b_slots.masks.iter().enumerate() {
                if ma & mb != 0 {
                    continue;
                }
                let prod = self.coeffs[ia].clone() * other.coeffs[ib].clone();
                let slot = out_slots.rank[(ma | mb) as usize];
                let acc = coeffs[slot].clone();
                coeffs[slot] = if shuffle_sign(*ma, *mb) {
                    acc - prod
                } else {
                    acc + prod
                };
            }
        }
        Ok(Self { n, q, coeffs })
    }

    /// Contraction of the first slot with the vertical vector `v`.
    pub fn interior(&self, v: &[C]) -> Result<Self> {
        if self.q == 0 {
            return Err(GeomError::Argument("interior product of a degree-0 form".into()));
        }
        if self.coeffs.is_empty() {
            return Err(GeomError::Argument(format!(
                "degree {} exceeds dimension {}",
                self.q, self.n
            )));
        }
        if v.len() != self.n {
            return Err(GeomError::Argument(format!(
                "vector has {} components, form lives in dimension {}",
                v.len(),
                self.n
            )));
        }
        let n = self.n;
        let src = Slots::new(n, self.q);
        let dst = Slots::new(n, self.q - 1);
        let proto = self.coeffs[0].zero_like();
        let mut coeffs = vec![proto; dst.masks.len()];
        for (slot, mj) in dst.masks.iter().enumerate() {
            for (i, vi) in v.iter().enumerate() {
                if mj & (1 << i) != 0 {
                    continue;
                }
                let below = (mj & ((1u32 << i) - 1)).count_ones();
                let c = vi.clone() * self.coeffs[src.rank[(mj | (1 << i)) as usize]].clone();
                let acc = coeffs[slot].clone();
                coeffs[slot] = if below % 2 == 1 { acc - c } else { acc + c };
            }
        }
        Ok(Self {
            n,
            q: self.q - 1,
            coeffs,
        })
    }

    /// `i_Z ω`.
    pub fn interior_z(&self, frame: &LiouvilleFrame<C>) -> Result<Self> {
        self.interior(&frame.z)
    }

    /// `ω(Y₁, …, Y_q)` with `Y_b` given by their `∂/∂y` components.
    pub fn evaluate(&self, args: &[Vec<C>]) -> Result<C> {
        if args.len() != self.q {
            return Err(GeomError::Argument(format!(
                "degree-{} form evaluated on {} vectors",
                self.q,
                args.len()
            )));
        }
        if args.iter().any(|a| a.len() != self.n) {
            return Err(GeomError::Argument("argument dimension mismatch".into()));
        }
        if self.q == 0 {
            return Ok(self.coeffs[0].clone());
        }
        let mut acc = self.coeffs[0].zero_like();
        for (c, idx) in self.coeffs.iter().zip(self.tuples()) {
            let minor: Vec<Vec<C>> = idx
                .iter()
                .map(|i| args.iter().map(|y| y[*i].clone()).collect())
                .collect();
            acc = acc + c.clone() * determinant(&minor);
        }
        Ok(acc)
    }

    /// `ξ₁(ω) = ω − ω₀ ∧ i_Z ω`, the `(0,q,0)` part.
    pub fn xi1(&self, frame: &LiouvilleFrame<C>) -> Result<Self> {
        if self.q == 0 {
            return Ok(self.clone());
        }
        self.try_sub(&self.xi2(frame)?)
    }

    /// `ξ₂(ω) = ω₀ ∧ i_Z ω`, the `(0,q−1,1)` part.
    pub fn xi2(&self, frame: &LiouvilleFrame<C>) -> Result<Self> {
        // degree 0, or above the dimension (no coefficients)
        if self.q == 0 || self.coeffs.is_empty() {
            return Ok(self.map(|c| c.zero_like()));
        }
        omega0(frame).wedge(&self.interior_z(frame)?)
    }

    pub fn split(&self, frame: &LiouvilleFrame<C>) -> Result<SplitForm<C>> {
        let radial = self.xi2(frame)?;
        let tangential = if self.q == 0 {
            self.clone()
        } else {
            self.try_sub(&radial)?
        };
        Ok(SplitForm { tangential, radial })
    }
}

impl<T: Real> VerticalForm<Jet3<T>> {
    pub fn values(&self) -> VerticalForm<T> {
        VerticalForm {
            n: self.n,
            q: self.q,
            coeffs: self.coeffs.iter().map(Jet3::value).collect(),
        }
    }
}

/// Determinant by cofactor expansion (ring operations only).
fn determinant<C: FormCoeff>(m: &[Vec<C>]) -> C {
    match m.len() {
        1 => m[0][0].clone(),
        2 => m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone(),
        k => {
            let mut acc = m[0][0].zero_like();
            for col in 0..k {
                let minor: Vec<Vec<C>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != col)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = m[0][col].clone() * determinant(&minor);
                acc = if col % 2 == 1 { acc - term } else { acc + term };
            }
            acc
        }
    }
}

/// `ω₀ = t_i δyⁱ`.
pub fn omega0<C: FormCoeff>(frame: &LiouvilleFrame<C>) -> VerticalForm<C> {
    VerticalForm::one_form(frame.t.clone())
}

/// `θ_i = δyⁱ − yⁱ ω₀` (`i` is zero-based).
pub fn theta<C: FormCoeff>(frame: &LiouvilleFrame<C>, i: usize) -> Result<VerticalForm<C>> {
    let n = frame.n();
    if i >= n {
        return Err(GeomError::Argument(format!("theta index {i} out of range")));
    }
    let coeffs = (0..n)
        .map(|j| {
            let tj = frame.t[j].clone();
            let base = frame.z[i].clone() * tj;
            if j == i {
                frame.t[0].one_like() - base
            } else {
                -base
            }
        })
        .collect();
    Ok(VerticalForm::one_form(coeffs))
}

/// A vertical form split into its `(0,q,0)` and `(0,q−1,1)` components.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitForm<C> {
    /// `ξ₁ω`, annihilated by `i_Z`.
    pub tangential: VerticalForm<C>,
    /// `ξ₂ω = ω₀ ∧ i_Z ω`.
    pub radial: VerticalForm<C>,
}

/// Type of a vertical form relative to `VTM⁰ = L′ ⊕ L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormType {
    Zero,
    /// A `(0,s,0)`-form: vanishes as soon as one argument is `Z`.
    Tangential {
        s: usize,
    },
    /// A `(0,s,1)`-form: `ω₀ ∧ α` with `α` of type `(0,s,0)`.
    Radial {
        s: usize,
    },
    Mixed,
}

/// Relative tolerance for the type tests; forms whose max-abs coefficient
/// is below it (absolutely) classify as zero.
pub const CLASSIFY_TOL: f64 = 1e-10;

pub fn classify<C: FormCoeff>(form: &VerticalForm<C>, frame: &LiouvilleFrame<C>) -> FormType {
    classify_with(form, frame, C::Real::lit(CLASSIFY_TOL))
}

pub fn classify_with<C: FormCoeff>(
    form: &VerticalForm<C>,
    frame: &LiouvilleFrame<C>,
    tol: C::Real,
) -> FormType {
    let norm = form.norm();
    if norm <= tol {
        return FormType::Zero;
    }
    let q = form.degree();
    if q == 0 {
        return FormType::Tangential { s: 0 };
    }
    let iz = form.interior_z(frame).expect("degree checked");
    if iz.norm() <= tol * norm {
        return FormType::Tangential { s: q };
    }
    let xi1 = form.xi1(frame).expect("degree checked");
    if xi1.norm() <= tol * norm {
        return FormType::Radial { s: q - 1 };
    }
    FormType::Mixed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::liouville_frame;
    use crate::metrics::{MetricSpec, PointTM};
    use approx::assert_relative_eq;

    fn frame34() -> LiouvilleFrame<f64> {
        liouville_frame(
            &MetricSpec::euclidean(2),
            &PointTM::new(vec![0.0, 0.0], vec![3.0, 4.0]).unwrap(),
        )
        .unwrap()
    }

    fn dy(n: usize, i: usize) -> VerticalForm<f64> {
        VerticalForm::one_form((0..n).map(|j| if j == i { 1.0 } else { 0.0 }).collect())
    }

    #[test]
    fn slot_enumeration() {
        let f = VerticalForm::<f64>::zero(4, 2, &0.0);
        assert_eq!(
            f.tuples(),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(VerticalForm::<f64>::zero(3, 4, &0.0).coeffs().len(), 0);
        assert_eq!(binomial(6, 3), 20);
    }

    #[test]
    fn evaluation_examples() {
        let fr = frame34();
        assert_eq!(dy(2, 0).evaluate(std::slice::from_ref(&fr.z)).unwrap(), 3.0);
        let w = dy(2, 0).wedge(&dy(2, 1)).unwrap();
        assert_eq!(w.evaluate(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(), 1.0);
        let v = vec![0.3, -0.7];
        assert_eq!(w.evaluate(&[v.clone(), v]).unwrap(), 0.0);
        assert!(w.evaluate(&[vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn antisymmetric_component_lookup() {
        let w = dy(3, 0).wedge(&dy(3, 2)).unwrap();
        assert_eq!(w.component(&[0, 2]), Some(1.0));
        assert_eq!(w.component(&[2, 0]), Some(-1.0));
        assert_eq!(w.component(&[2, 2]), Some(0.0));
    }

    #[test]
    fn omega0_and_theta_by_hand() {
        let fr = frame34();
        let w0 = omega0(&fr);
        assert_relative_eq!(w0.coeffs()[0], 0.12);
        assert_relative_eq!(w0.coeffs()[1], 0.16);
        assert_relative_eq!(w0.interior_z(&fr).unwrap().coeffs()[0], 1.0, epsilon = 1e-15);
        let th = theta(&fr, 0).unwrap();
        assert_relative_eq!(th.coeffs()[0], 0.64, epsilon = 1e-15);
        assert_relative_eq!(th.coeffs()[1], -0.48, epsilon = 1e-15);
        assert!(th.interior_z(&fr).unwrap().coeffs()[0].abs() < 1e-15);
        assert!(theta(&fr, 2).is_err());
    }

    #[test]
    fn split_of_dy1() {
        let fr = frame34();
        let s = dy(2, 0).split(&fr).unwrap();
        let th = theta(&fr, 0).unwrap();
        for k in 0..2 {
            assert_relative_eq!(s.tangential.coeffs()[k], th.coeffs()[k], epsilon = 1e-15);
        }
        assert_relative_eq!(s.radial.coeffs()[0], 0.36, epsilon = 1e-15);
        assert_relative_eq!(s.radial.coeffs()[1], 0.48, epsilon = 1e-15);
    }

    #[test]
    fn classification_examples() {
        let fr = frame34();
        assert_eq!(classify(&omega0(&fr), &fr), FormType::Radial { s: 0 });
        assert_eq!(classify(&dy(2, 0), &fr), FormType::Mixed);
        let t12 = theta(&fr, 0).unwrap().wedge(&theta(&fr, 1).unwrap()).unwrap();
        // in two dimensions θ₁∧θ₂ vanishes identically
        assert_eq!(classify(&t12, &fr), FormType::Zero);
        assert_eq!(classify(&VerticalForm::zero(2, 1, &0.0), &fr), FormType::Zero);
    }

    #[test]
    fn interior_requires_positive_degree() {
        let fr = frame34();
        assert!(VerticalForm::scalar(2, 1.0).interior_z(&fr).is_err());
    }

    #[test]
    fn omega0_wedge_itself_vanishes() {
        let fr = frame34();
        let w = omega0(&fr).wedge(&omega0(&fr)).unwrap();
        assert_eq!(w.norm(), 0.0);
    }
}
