//! Seeded sampling of points, forms and polynomial fields.

use rand::Rng;

use crate::error::{GeomError, Result};
use crate::metrics::{validate_at, MetricSpec, PointTM, Poly2};
use crate::scalar::{norm2, Real};
use crate::vcalc::{FormField, ScalarField};
use crate::vforms::{binomial, VerticalForm};

pub const FIBER_MIN: f64 = 0.5;
pub const FIBER_MAX: f64 = 2.0;
/// Smallest accepted ratio of extreme eigenvalues of `g`.
pub const CONDITION_FLOOR: f64 = 1e-4;
const MAX_ATTEMPTS: usize = 10_000;

fn uniform<T: Real, R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> T {
    T::lit(rng.gen_range(lo..hi))
}

pub fn random_vector<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, half_width: f64) -> Vec<T> {
    (0..n).map(|_| uniform(rng, -half_width, half_width)).collect()
}

/// `x ∈ [-1, 1]ⁿ`, `y` uniform in the shell `0.5 ≤ |y| ≤ 2`, rejected
/// until the metric is valid and well conditioned there.
pub fn sample_point<T: Real, R: Rng + ?Sized>(spec: &MetricSpec<T>, rng: &mut R) -> Result<PointTM<T>> {
    let n = spec.n;
    for _ in 0..MAX_ATTEMPTS {
        let x = random_vector(rng, n, 1.0);
        let y: Vec<T> = random_vector(rng, n, FIBER_MAX);
        let r = norm2(&y);
        if r < T::lit(FIBER_MIN) || r > T::lit(FIBER_MAX) {
            continue;
        }
        let p = PointTM::new(x, y)?;
        let v = validate_at(spec, &p);
        if v.passed && v.min_eigenvalue >= T::lit(CONDITION_FLOOR) * v.max_eigenvalue {
            return Ok(p);
        }
    }
    Err(GeomError::Precondition(format!(
        "no admissible point for '{}' after {MAX_ATTEMPTS} draws",
        spec.name
    )))
}

pub fn sample_points<T: Real, R: Rng + ?Sized>(
    spec: &MetricSpec<T>,
    count: usize,
    rng: &mut R,
) -> Result<Vec<PointTM<T>>> {
    (0..count).map(|_| sample_point(spec, rng)).collect()
}

/// Constant-coefficient form with entries in `[-1, 1]`.
pub fn random_form<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, q: usize) -> VerticalForm<T> {
    let coeffs = (0..binomial(n, q)).map(|_| uniform(rng, -1.0, 1.0)).collect();
    VerticalForm::new(n, q, coeffs).expect("slot count matches")
}

/// Polynomial of degree at most two with coefficients in `[-1, 1]`.
pub fn random_poly<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Poly2<T> {
    Poly2 {
        constant: uniform(rng, -1.0, 1.0),
        linear: random_vector(rng, n, 1.0),
        quadratic: (0..n).map(|_| random_vector(rng, n, 1.0)).collect(),
    }
}

/// The polynomial read as a function of the fiber coordinates.
pub fn poly_in_y<T: Real>(p: Poly2<T>) -> ScalarField<T> {
    ScalarField::new(move |fj| Ok(p.eval_jet(fj.y())))
}

pub fn random_scalar_field<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> ScalarField<T> {
    poly_in_y(random_poly(rng, n))
}

/// Form field whose coefficients are random polynomials in `y`.
pub fn random_form_field<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, q: usize) -> FormField<T> {
    let coeffs = (0..binomial(n, q)).map(|_| random_scalar_field(rng, n)).collect();
    FormField::from_coefficients(q, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn points_respect_the_shell_and_are_reproducible() {
        let spec = MetricSpec::<f64>::minkowski_quartic(3);
        let a = sample_points(&spec, 20, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = sample_points(&spec, 20, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a, b);
        for p in &a {
            let r = norm2(&p.y);
            assert!((0.5..=2.0).contains(&r));
            assert!(p.x.iter().all(|v| v.abs() <= 1.0));
        }
    }

    #[test]
    fn random_form_has_full_slot_count() {
        let w: VerticalForm<f64> = random_form(&mut ChaCha8Rng::seed_from_u64(1), 4, 2);
        assert_eq!(w.coeffs().len(), 6);
        assert!(w.coeffs().iter().all(|c| c.abs() <= 1.0));
    }
}
