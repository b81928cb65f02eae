//! Hand-computed values, through the public API only.

use approx::assert_relative_eq;

use finsler_liouville::geometry::{fiber_jets, liouville_frame};
use finsler_liouville::leafprim::{leaf_route, primitive_1form, project_to_leaf, route_integral};
use finsler_liouville::vforms::{omega0, theta};
use finsler_liouville::{ChartPair, Field, Form, Metric, Point, Scalar, Transition};

fn euclid_34() -> (Metric, Point) {
    (
        Metric::euclidean(2),
        Point::new(vec![0.0, 0.0], vec![3.0, 4.0]).unwrap(),
    )
}

#[test]
fn euclidean_frame_at_3_4() {
    let (spec, p) = euclid_34();
    let fr = liouville_frame(&spec, &p).unwrap();
    assert_relative_eq!(fr.t[0], 0.12, epsilon = 1e-15);
    assert_relative_eq!(fr.t[1], 0.16, epsilon = 1e-15);
    assert_relative_eq!(fr.x[0][0], 0.64, epsilon = 1e-15);
    assert_relative_eq!(fr.x[0][1], -0.48, epsilon = 1e-15);
    assert_eq!(fr.z, vec![3.0, 4.0]);
    let th = theta(&fr, 0).unwrap();
    assert_relative_eq!(th.coeffs()[0], 0.64, epsilon = 1e-15);
    assert_relative_eq!(th.coeffs()[1], -0.48, epsilon = 1e-15);
    assert_relative_eq!(
        omega0(&fr).evaluate(&[vec![3.0, 4.0]]).unwrap(),
        1.0,
        epsilon = 1e-15
    );
}

#[test]
fn derivatives_of_y1y2() {
    let (spec, p) = euclid_34();
    let fj = fiber_jets(&spec, &p).unwrap();
    let g = Scalar::new(|fj| Ok(&fj.y()[0] * &fj.y()[1])).into_form();
    let d = g.d01().value_at(&fj).unwrap();
    assert_eq!(d.coeffs(), &[4.0, 3.0]);
    let dp = g.d_prime().value_at(&fj).unwrap();
    assert_relative_eq!(dp.coeffs()[0], 1.12, epsilon = 1e-14);
    assert_relative_eq!(dp.coeffs()[1], -0.84, epsilon = 1e-14);
    let ds = g.d_second().value_at(&fj).unwrap();
    assert_relative_eq!(ds.coeffs()[0], 2.88, epsilon = 1e-14);
    assert_relative_eq!(ds.coeffs()[1], 3.84, epsilon = 1e-14);
    assert!(g.d_second().d_second().value_at(&fj).is_err());
}

#[test]
fn doubling_map_has_determinant_one_half() {
    let tr = Transition::linear_with(vec![vec![2.0, 0.0], vec![0.0, 2.0]]);
    let p = Point::new(vec![0.1, 0.2], vec![1.0, 1.0]).unwrap();
    let pair = ChartPair::new(&Metric::euclidean(2), &tr, &p).unwrap();
    for k in 0..2 {
        let (computed, formula) = pair.frame_change_determinant(k).unwrap();
        assert_relative_eq!(computed, formula, epsilon = 1e-12);
    }
    let (c, _) = pair.frame_change_determinant(1).unwrap();
    assert_relative_eq!(c.abs(), 0.5, epsilon = 1e-12);
}

#[test]
fn quarter_circle_integral() {
    let spec = Metric::euclidean(2);
    let a = project_to_leaf(&spec, &[0.0, 0.0], &[1.0, 0.0], 1.0).unwrap();
    let b = project_to_leaf(&spec, &[0.0, 0.0], &[0.0, 1.0], 1.0).unwrap();
    let omega = Scalar::new(|fj| Ok(&fj.y()[0] * &fj.y()[1]))
        .into_form()
        .d_prime();
    let route = leaf_route(&spec, &a, &b, 16).unwrap();
    // y¹y² vanishes at both ends of the arc
    assert!(route_integral(&spec, &omega, &route).unwrap().abs() < 1e-9);
    let omega = Scalar::coordinate(1).into_form().d_prime();
    assert_relative_eq!(
        route_integral(&spec, &omega, &route).unwrap(),
        1.0,
        epsilon = 1e-9
    );
}

#[test]
fn antipodal_endpoints_are_routed() {
    let spec = Metric::randers(2);
    let x0 = [0.2, -0.1];
    let a = project_to_leaf(&spec, &x0, &[1.0, 0.0], 1.0).unwrap();
    let b = project_to_leaf(&spec, &x0, &[-1.0, 1e-4], 1.0).unwrap();
    let g = Scalar::coordinate(0);
    let omega: Field = g.into_form().d_prime();
    let prim = primitive_1form(&spec, &omega, &a, std::slice::from_ref(&b), 16).unwrap();
    assert_relative_eq!(prim.values[0], b.y[0] - a.y[0], epsilon = 1e-8);
}

#[test]
fn wedge_of_coordinate_forms() {
    let dy1 = Form::one_form(vec![1.0, 0.0, 0.0]);
    let dy2 = Form::one_form(vec![0.0, 1.0, 0.0]);
    let w = dy1.wedge(&dy2).unwrap();
    assert_eq!(
        w.evaluate(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap(),
        1.0
    );
    assert_eq!(
        w.evaluate(&[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]]).unwrap(),
        -1.0
    );
}
