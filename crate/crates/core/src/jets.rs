//! Truncated multivariate Taylor arithmetic through total order three.
//!
//! A [`Jet3`] carries the value and all partial derivatives up to order
//! three of a scalar function of `m` variables at one point. Derivatives
//! (not Taylor coefficients) are stored, so `hess(i, j)` is
//! `∂²f/∂uⁱ∂uʲ` and `third(i, j, k)` is `∂³f/∂uⁱ∂uʲ∂uᵏ`.
//!
//! Symmetric tensors are stored once per unordered index set, packed so
//! that the slot of a sorted tuple does not depend on `m`:
//! `(a ≤ b) ↦ b(b+1)/2 + a` and `(a ≤ b ≤ c) ↦ c(c+1)(c+2)/6 + b(b+1)/2 + a`.
//!
//! Differentiating a jet ([`Jet3::partial`]) lowers its order; levels above
//! the valid order are filled with NaN so that any accidental use poisons
//! the result instead of silently returning zero.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{GeomError, Result};
use crate::scalar::Real;

/// Highest derivative order carried by a jet.
pub const MAX_ORDER: u8 = 3;

#[inline]
fn idx2(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    b * (b + 1) / 2 + a
}

#[inline]
fn idx3(i: usize, j: usize, k: usize) -> usize {
    let mut s = [i, j, k];
    s.sort_unstable();
    let [a, b, c] = s;
    c * (c + 1) * (c + 2) / 6 + b * (b + 1) / 2 + a
}

fn hess_len(m: usize) -> usize {
    m * (m + 1) / 2
}

fn third_len(m: usize) -> usize {
    m * (m + 1) * (m + 2) / 6
}

#[derive(Clone, Debug, PartialEq)]
pub struct Jet3<T> {
    m: usize,
    order: u8,
    value: T,
    grad: Vec<T>,
    hess: Vec<T>,
    third: Vec<T>,
}

impl<T: Real> Jet3<T> {
    pub fn constant(value: T, m: usize) -> Self {
        Self {
            m,
            order: MAX_ORDER,
            value,
            grad: vec![T::zero(); m],
            hess: vec![T::zero(); hess_len(m)],
            third: vec![T::zero(); third_len(m)],
        }
    }

    /// Jet of the coordinate function `u ↦ u_index` at `value`.
    pub fn variable(index: usize, value: T, m: usize) -> Result<Self> {
        if index >= m {
            return Err(GeomError::Argument(format!(
                "variable index {index} out of range for {m} variables"
            )));
        }
        let mut j = Self::constant(value, m);
        j.grad[index] = T::one();
        Ok(j)
    }

    /// Seeds `values.len()` independent variables starting at `offset`.
    pub fn seed_all(values: &[T], offset: usize, m: usize) -> Result<Vec<Self>> {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| Self::variable(offset + i, *v, m))
            .collect()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of valid derivative orders (0 ..= 3).
    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn value(&self) -> T {
        self.value
    }

    pub fn grad(&self, i: usize) -> T {
        self.grad[i]
    }

    pub fn gradient(&self) -> &[T] {
        &self.grad
    }

    pub fn hess(&self, i: usize, j: usize) -> T {
        self.hess[idx2(i, j)]
    }

    pub fn third(&self, i: usize, j: usize, k: usize) -> T {
        self.third[idx3(i, j, k)]
    }

    pub fn hessian_matrix(&self) -> Vec<Vec<T>> {
        (0..self.m)
            .map(|i| (0..self.m).map(|j| self.hess(i, j)).collect())
            .collect()
    }

    /// Directional derivative `Σ vⁱ ∂f/∂uⁱ` with jet-valued components.
    pub fn directional(&self, v: &[Jet3<T>], offset: usize) -> Jet3<T> {
        let mut acc = Jet3::constant(T::zero(), self.m).with_order(self.order.saturating_sub(1));
        for (i, vi) in v.iter().enumerate() {
            acc = acc + vi * &self.partial(offset + i);
        }
        acc
    }

    fn with_order(mut self, order: u8) -> Self {
        self.order = order;
        self.poison();
        self
    }

    fn poison(&mut self) {
        if self.order < 3 {
            self.third.iter_mut().for_each(|v| *v = T::nan());
        }
        if self.order < 2 {
            self.hess.iter_mut().for_each(|v| *v = T::nan());
        }
        if self.order < 1 {
            self.grad.iter_mut().for_each(|v| *v = T::nan());
        }
    }

    /// Jet of `∂f/∂u_k`, one order lower.
    pub fn partial(&self, k: usize) -> Jet3<T> {
        let m = self.m;
        let mut out = Self {
            m,
            order: self.order.saturating_sub(1),
            value: self.grad[k],
            grad: (0..m).map(|i| self.hess(k, i)).collect(),
            hess: vec![T::zero(); hess_len(m)],
            third: vec![T::zero(); third_len(m)],
        };
        for j in 0..m {
            for i in 0..=j {
                out.hess[idx2(i, j)] = self.third(k, i, j);
            }
        }
        if self.order == 0 {
            out.value = T::nan();
        }
        out.poison();
        out
    }

    /// Applies a univariate function given its derivatives `[φ, φ', φ'', φ''']`
    /// at the current value (Faà di Bruno through order three).
    pub fn compose(&self, f: [T; 4]) -> Jet3<T> {
        let m = self.m;
        let u = self;
        let mut out = Self {
            m,
            order: self.order,
            value: f[0],
            grad: u.grad.iter().map(|g| f[1] * *g).collect(),
            hess: vec![T::zero(); hess_len(m)],
            third: vec![T::zero(); third_len(m)],
        };
        let mut s = 0;
        for b in 0..m {
            for a in 0..=b {
                out.hess[s] = f[2] * u.grad[a] * u.grad[b] + f[1] * u.hess[s];
                s += 1;
            }
        }
        let mut s = 0;
        for c in 0..m {
            for b in 0..=c {
                for a in 0..=b {
                    let (ga, gb, gc) = (u.grad[a], u.grad[b], u.grad[c]);
                    out.third[s] = f[3] * ga * gb * gc
                        + f[2] * (u.hess(a, b) * gc + u.hess(a, c) * gb + u.hess(b, c) * ga)
                        + f[1] * u.third[s];
                    s += 1;
                }
            }
        }
        out.poison();
        out
    }

    fn domain(op: &'static str, v: T) -> GeomError {
        GeomError::Domain {
            op,
            value: v.as_f64(),
        }
    }

    pub fn try_recip(&self) -> Result<Jet3<T>> {
        let u = self.value;
        if u == T::zero() || !u.is_finite() {
            return Err(Self::domain("recip", u));
        }
        let r = u.recip();
        let r2 = r * r;
        Ok(self.compose([r, -r2, T::lit(2.0) * r2 * r, T::lit(-6.0) * r2 * r2]))
    }

    pub fn try_div(&self, rhs: &Jet3<T>) -> Result<Jet3<T>> {
        if rhs.value == T::zero() || !rhs.value.is_finite() {
            return Err(Self::domain("div", rhs.value));
        }
        Ok(self * &rhs.try_recip()?)
    }

    pub fn try_sqrt(&self) -> Result<Jet3<T>> {
        let u = self.value;
        if u <= T::zero() || !u.is_finite() {
            return Err(Self::domain("sqrt", u));
        }
        let s = u.sqrt();
        let s3 = s * s * s;
        Ok(self.compose([
            s,
            T::lit(0.5) / s,
            T::lit(-0.25) / s3,
            T::lit(0.375) / (s3 * s * s),
        ]))
    }

    pub fn try_ln(&self) -> Result<Jet3<T>> {
        let u = self.value;
        if u <= T::zero() || !u.is_finite() {
            return Err(Self::domain("ln", u));
        }
        let r = u.recip();
        Ok(self.compose([u.ln(), r, -r * r, T::lit(2.0) * r * r * r]))
    }

    /// Real power `u^p`, defined for `u > 0`.
    pub fn try_powf(&self, p: T) -> Result<Jet3<T>> {
        let u = self.value;
        if u <= T::zero() || !u.is_finite() {
            return Err(Self::domain("pow", u));
        }
        let one = T::one();
        let two = T::lit(2.0);
        let f0 = u.powf(p);
        let f1 = p * u.powf(p - one);
        let f2 = p * (p - one) * u.powf(p - two);
        let f3 = p * (p - one) * (p - two) * u.powf(p - T::lit(3.0));
        Ok(self.compose([f0, f1, f2, f3]))
    }

    /// Integer power; valid for any value when `k ≥ 0`.
    pub fn powi(&self, k: i32) -> Jet3<T> {
        let u = self.value;
        let kt = T::from_i32(k).expect("small integer");
        let one = T::one();
        let two = T::lit(2.0);
        // falling-factorial coefficient vanishes once the exponent is exhausted
        let f = |e: i32| if k >= 0 && e > k { T::zero() } else { u.powi(k - e) };
        self.compose([
            u.powi(k),
            kt * f(1),
            kt * (kt - one) * f(2),
            kt * (kt - one) * (kt - two) * f(3),
        ])
    }

    pub fn exp(&self) -> Jet3<T> {
        let e = self.value.exp();
        self.compose([e, e, e, e])
    }

    pub fn scale(&self, s: T) -> Jet3<T> {
        Self {
            m: self.m,
            order: self.order,
            value: self.value * s,
            grad: self.grad.iter().map(|v| *v * s).collect(),
            hess: self.hess.iter().map(|v| *v * s).collect(),
            third: self.third.iter().map(|v| *v * s).collect(),
        }
    }

    fn zip(&self, rhs: &Jet3<T>, f: impl Fn(T, T) -> T) -> Jet3<T> {
        assert_eq!(self.m, rhs.m, "jet variable counts differ");
        let mut out = Self {
            m: self.m,
            order: self.order.min(rhs.order),
            value: f(self.value, rhs.value),
            grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| f(*a, *b)).collect(),
            hess: self.hess.iter().zip(&rhs.hess).map(|(a, b)| f(*a, *b)).collect(),
            third: self
                .third
                .iter()
                .zip(&rhs.third)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        };
        out.poison();
        out
    }

    fn product(&self, b: &Jet3<T>) -> Jet3<T> {
        assert_eq!(self.m, b.m, "jet variable counts differ");
        let a = self;
        let m = a.m;
        let (av, bv) = (a.value, b.value);
        let mut out = Self {
            m,
            order: a.order.min(b.order),
            value: av * bv,
            grad: (0..m).map(|i| a.grad[i] * bv + av * b.grad[i]).collect(),
            hess: vec![T::zero(); hess_len(m)],
            third: vec![T::zero(); third_len(m)],
        };
        let mut s = 0;
        for j in 0..m {
            for i in 0..=j {
                out.hess[s] = a.hess[s] * bv + a.grad[i] * b.grad[j] + a.grad[j] * b.grad[i] + av * b.hess[s];
                s += 1;
            }
        }
        let mut s = 0;
        for k in 0..m {
            for j in 0..=k {
                for i in 0..=j {
                    out.third[s] = a.third[s] * bv
                        + a.hess(i, j) * b.grad[k]
                        + a.hess(i, k) * b.grad[j]
                        + a.hess(j, k) * b.grad[i]
                        + a.grad[i] * b.hess(j, k)
                        + a.grad[j] * b.hess(i, k)
                        + a.grad[k] * b.hess(i, j)
                        + av * b.third[s];
                    s += 1;
                }
            }
        }
        out.poison();
        out
    }
}

macro_rules! jet_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a, T: Real> $tr<&'a Jet3<T>> for &'a Jet3<T> {
            type Output = Jet3<T>;
            fn $method(self, rhs: &'a Jet3<T>) -> Jet3<T> {
                $body(self, rhs)
            }
        }
        impl<T: Real> $tr<Jet3<T>> for Jet3<T> {
            type Output = Jet3<T>;
            fn $method(self, rhs: Jet3<T>) -> Jet3<T> {
                $body(&self, &rhs)
            }
        }
        impl<'a, T: Real> $tr<&'a Jet3<T>> for Jet3<T> {
            type Output = Jet3<T>;
            fn $method(self, rhs: &'a Jet3<T>) -> Jet3<T> {
                $body(&self, rhs)
            }
        }
        impl<'a, T: Real> $tr<Jet3<T>> for &'a Jet3<T> {
            type Output = Jet3<T>;
            fn $method(self, rhs: Jet3<T>) -> Jet3<T> {
                $body(self, &rhs)
            }
        }
    };
}

jet_binop!(Add, add, |a: &Jet3<T>, b: &Jet3<T>| a.zip(b, |x, y| x + y));
jet_binop!(Sub, sub, |a: &Jet3<T>, b: &Jet3<T>| a.zip(b, |x, y| x - y));
jet_binop!(Mul, mul, |a: &Jet3<T>, b: &Jet3<T>| a.product(b));
// Unchecked: a zero divisor yields infinities. Use `try_div` for validated paths.
jet_binop!(Div, div, |a: &Jet3<T>, b: &Jet3<T>| a.product(&b.compose({
    let r = b.value.recip();
    [r, -r * r, T::lit(2.0) * r * r * r, T::lit(-6.0) * r * r * r * r]
})));

impl<T: Real> Neg for Jet3<T> {
    type Output = Jet3<T>;
    fn neg(self) -> Jet3<T> {
        self.scale(-T::one())
    }
}

impl<T: Real> Neg for &Jet3<T> {
    type Output = Jet3<T>;
    fn neg(self) -> Jet3<T> {
        self.scale(-T::one())
    }
}

impl<T: Real> Add<T> for Jet3<T> {
    type Output = Jet3<T>;
    fn add(mut self, rhs: T) -> Jet3<T> {
        self.value = self.value + rhs;
        self
    }
}

impl<T: Real> Sub<T> for Jet3<T> {
    type Output = Jet3<T>;
    fn sub(mut self, rhs: T) -> Jet3<T> {
        self.value = self.value - rhs;
        self
    }
}

impl<T: Real> Mul<T> for Jet3<T> {
    type Output = Jet3<T>;
    fn mul(self, rhs: T) -> Jet3<T> {
        self.scale(rhs)
    }
}

impl<T: Real> Mul<T> for &Jet3<T> {
    type Output = Jet3<T>;
    fn mul(self, rhs: T) -> Jet3<T> {
        self.scale(rhs)
    }
}

impl<T: Real> Div<T> for Jet3<T> {
    type Output = Jet3<T>;
    fn div(self, rhs: T) -> Jet3<T> {
        self.scale(rhs.recip())
    }
}

/// Requested derivative order for [`fd_oracle`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FdOrder {
    Gradient,
    Hessian,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FdDerivative<T> {
    Gradient(Vec<T>),
    Hessian(Vec<Vec<T>>),
}

impl<T> FdDerivative<T> {
    pub fn gradient(self) -> Option<Vec<T>> {
        match self {
            FdDerivative::Gradient(g) => Some(g),
            FdDerivative::Hessian(_) => None,
        }
    }

    pub fn hessian(self) -> Option<Vec<Vec<T>>> {
        match self {
            FdDerivative::Hessian(h) => Some(h),
            FdDerivative::Gradient(_) => None,
        }
    }
}

/// Central finite differences of a plain scalar function.
///
/// Independent of the jet arithmetic; used to cross-check it.
pub fn fd_oracle<T, F>(f: F, point: &[T], order: FdOrder, h: T) -> FdDerivative<T>
where
    T: Real,
    F: Fn(&[T]) -> T,
{
    let n = point.len();
    let shifted = |steps: &[(usize, T)]| {
        let mut p = point.to_vec();
        for (i, s) in steps {
            p[*i] = p[*i] + *s;
        }
        f(&p)
    };
    let two = T::lit(2.0);
    match order {
        FdOrder::Gradient => FdDerivative::Gradient(
            (0..n)
                .map(|i| (shifted(&[(i, h)]) - shifted(&[(i, -h)])) / (two * h))
                .collect(),
        ),
        FdOrder::Hessian => {
            let f0 = f(point);
            let mut hm = vec![vec![T::zero(); n]; n];
            for i in 0..n {
                hm[i][i] = (shifted(&[(i, h)]) - two * f0 + shifted(&[(i, -h)])) / (h * h);
                for j in 0..i {
                    let v = (shifted(&[(i, h), (j, h)])
                        - shifted(&[(i, h), (j, -h)])
                        - shifted(&[(i, -h), (j, h)])
                        + shifted(&[(i, -h), (j, -h)]))
                        / (T::lit(4.0) * h * h);
                    hm[i][j] = v;
                    hm[j][i] = v;
                }
            }
            FdDerivative::Hessian(hm)
        }
    }
}

/// Relative agreement test used against finite-difference estimates:
/// `|a - b| ≤ rel·max(|a|,|b|) + abs`.
pub fn fd_agrees<T: Real>(a: T, b: T, rel: T, abs: T) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + abs
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn seeds_coordinate_functions() {
        let u = Jet3::variable(0, 3.0, 2).unwrap();
        let v = Jet3::variable(1, 4.0, 2).unwrap();
        assert_eq!(u.value(), 3.0);
        assert_eq!(u.gradient(), &[1.0, 0.0]);
        assert_eq!(u.hess(0, 0), 0.0);
        assert_eq!(v.gradient(), &[0.0, 1.0]);
        let w = &u * &v;
        assert_eq!(w.value(), 12.0);
        assert_eq!(w.gradient(), &[4.0, 3.0]);
        assert_eq!(w.hess(0, 1), 1.0);
        assert_eq!(w.hess(1, 0), 1.0);
        assert_eq!(w.hess(0, 0), 0.0);
    }

    #[test]
    fn variable_index_out_of_range() {
        assert!(matches!(
            Jet3::<f64>::variable(2, 1.0, 2),
            Err(GeomError::Argument(_))
        ));
    }

    #[test]
    fn sqrt_of_constant() {
        let c = Jet3::constant(25.0, 3).try_sqrt().unwrap();
        assert_eq!(c.value(), 5.0);
        assert!(c.gradient().iter().all(|g| *g == 0.0));
        assert_eq!(c.third(0, 1, 2), 0.0);
    }

    #[test]
    fn ln_derivatives_at_one() {
        let x = Jet3::variable(0, 1.0, 1).unwrap().try_ln().unwrap();
        assert_eq!(x.value(), 0.0);
        assert_eq!(x.grad(0), 1.0);
        assert_eq!(x.hess(0, 0), -1.0);
        assert_eq!(x.third(0, 0, 0), 2.0);
    }

    #[test]
    fn sum_of_squares() {
        let y = Jet3::seed_all(&[3.0, 4.0], 0, 2).unwrap();
        let s = &y[0] * &y[0] + &y[1] * &y[1];
        assert_eq!(s.value(), 25.0);
        assert_eq!(s.gradient(), &[6.0, 8.0]);
        assert_eq!(s.hess(0, 0), 2.0);
        assert_eq!(s.hess(1, 1), 2.0);
        assert_eq!(s.hess(0, 1), 0.0);
    }

    #[test]
    fn domain_errors_carry_operation() {
        let z = Jet3::constant(-1.0, 1);
        match z.try_sqrt() {
            Err(GeomError::Domain { op, value }) => {
                assert_eq!(op, "sqrt");
                assert_eq!(value, -1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(z.try_ln().is_err());
        assert!(Jet3::constant(1.0, 1).try_div(&Jet3::constant(0.0, 1)).is_err());
        assert!(Jet3::constant(0.0, 1).try_powf(0.25).is_err());
    }

    #[test]
    fn partial_lowers_order_and_poisons() {
        let y = Jet3::seed_all(&[1.5, -0.5], 0, 2).unwrap();
        let c = &y[0] * &y[0] * &y[1];
        let d: Jet3<f64> = c.partial(0);
        assert_eq!(d.order(), 2);
        assert_relative_eq!(d.value(), 2.0 * 1.5 * -0.5);
        assert_relative_eq!(d.grad(0), 2.0 * -0.5);
        assert_relative_eq!(d.grad(1), 3.0);
        assert_relative_eq!(d.hess(0, 1), 2.0);
        assert!(d.third(0, 0, 0).is_nan());
        let dd: Jet3<f64> = d.partial(1).partial(0);
        assert_eq!(dd.order(), 0);
        assert_relative_eq!(dd.value(), 2.0);
        assert!(dd.grad(0).is_nan());
        assert!(dd.partial(0).value().is_nan());
    }

    #[test]
    fn powf_matches_repeated_sqrt() {
        let y = Jet3::seed_all(&[1.3, 0.7], 0, 2).unwrap();
        let u = &y[0] * &y[0] + &y[1] * &y[1] * 2.0;
        let a = u.try_powf(0.25).unwrap();
        let b = u.try_sqrt().unwrap().try_sqrt().unwrap();
        for i in 0..2 {
            assert_relative_eq!(a.grad(i), b.grad(i), epsilon = 1e-14);
            for j in 0..2 {
                assert_relative_eq!(a.hess(i, j), b.hess(i, j), epsilon = 1e-14);
                for k in 0..2 {
                    assert_relative_eq!(a.third(i, j, k), b.third(i, j, k), epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn fd_oracle_examples() {
        let sq = |p: &[f64]| p[0] * p[0] + p[1] * p[1];
        let g = fd_oracle(sq, &[3.0, 4.0], FdOrder::Gradient, 1e-5)
            .gradient()
            .unwrap();
        assert!((g[0] - 6.0).abs() < 1e-6 && (g[1] - 8.0).abs() < 1e-6);
        let c = fd_oracle(|_: &[f64]| 7.0, &[0.3, 0.1], FdOrder::Gradient, 1e-5)
            .gradient()
            .unwrap();
        assert!(c.iter().all(|v| v.abs() < 1e-9));
        let h = fd_oracle(|p: &[f64]| p[0] * p[1], &[0.3, 0.1], FdOrder::Hessian, 1e-4)
            .hessian()
            .unwrap();
        assert!((h[0][1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn f32_arithmetic() {
        let y = Jet3::<f32>::seed_all(&[3.0, 4.0], 0, 2).unwrap();
        let f = (&y[0] * &y[0] + &y[1] * &y[1]).try_sqrt().unwrap();
        assert!((f.value() - 5.0).abs() < 1e-6);
        assert!((f.grad(0) - 0.6).abs() < 1e-6);
    }
}
