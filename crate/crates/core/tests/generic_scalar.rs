//! The core runs unchanged in single precision.

use finsler_liouville::geometry::{fiber_jets, liouville_frame};
use finsler_liouville::vforms::omega0;
use finsler_liouville::{MetricSpec, PointTM, ScalarField};

#[test]
fn frame_in_f32() {
    let spec = MetricSpec::<f32>::randers(3);
    let p = PointTM::new(vec![0.1f32, -0.2, 0.3], vec![0.6f32, 0.8, -0.5]).unwrap();
    let fr = liouville_frame(&spec, &p).unwrap();
    let yt: f32 = p.y.iter().zip(&fr.t).map(|(a, b)| a * b).sum();
    assert!((yt - 1.0).abs() < 1e-5);
    let w0 = omega0(&fr);
    assert!((w0.evaluate(std::slice::from_ref(&fr.z)).unwrap() - 1.0).abs() < 1e-5);
}

#[test]
fn operators_in_f32_match_f64() {
    let g32 = ScalarField::<f32>::new(|fj| Ok(&fj.y()[0] * &fj.y()[1]));
    let g64 = ScalarField::<f64>::new(|fj| Ok(&fj.y()[0] * &fj.y()[1]));
    let p32 = PointTM::new(vec![0.0f32; 2], vec![3.0f32, 4.0]).unwrap();
    let p64 = PointTM::new(vec![0.0f64; 2], vec![3.0f64, 4.0]).unwrap();
    let fj32 = fiber_jets(&MetricSpec::<f32>::euclidean(2), &p32).unwrap();
    let fj64 = fiber_jets(&MetricSpec::<f64>::euclidean(2), &p64).unwrap();
    let a = g32.into_form().d_prime().value_at(&fj32).unwrap();
    let b = g64.into_form().d_prime().value_at(&fj64).unwrap();
    for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
        assert!((f64::from(*x) - y).abs() < 1e-5);
    }
}
