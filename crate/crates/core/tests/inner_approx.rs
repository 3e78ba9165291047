use conefix::counterexample::bodies::Curve;
use conefix::counterexample::build_bodies;
use conefix::counterexample::suite::inner_with_s;
use conefix::face::FaceSpec;
use conefix::inner::{build_inner_approx, extract_perturbed_curve, lambda_of, u_of, worst_gap_violation, GapFunction};
use conefix::linalg::{dist, norm};
use conefix::{tol, ConvexBody};
use proptest::prelude::*;
use std::sync::OnceLock;

fn square() -> ConvexBody {
    ConvexBody::from_points(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap()
}

fn square_face(sq: &ConvexBody) -> FaceSpec {
    FaceSpec::new(sq, vec![0, 2], Some(vec![1.0, 0.0])).unwrap()
}

struct SquareCase {
    body: ConvexBody,
    result: conefix::inner::InnerApproxResult,
}

fn square_case() -> &'static SquareCase {
    static CASE: OnceLock<SquareCase> = OnceLock::new();
    CASE.get_or_init(|| {
        let body = square();
        let face = square_face(&body);
        let result = build_inner_approx(&body, &face, &GapFunction::Coordinate { index: 0 }, 256, 5).unwrap();
        SquareCase { body, result }
    })
}

#[test]
fn lambda_examples() {
    let phi = GapFunction::Coordinate { index: 0 };
    let c = [0.5, 0.5];
    assert!((lambda_of(&[1.0, 0.5], &c, &phi, 0.25).unwrap() - 0.25).abs() <= tol::SAMPLE);
    assert!(lambda_of(&[0.0, 0.0], &c, &phi, 0.25).unwrap().abs() <= tol::SAMPLE);
    assert!(lambda_of(&[0.0, 1.0], &c, &phi, 0.25).unwrap().abs() <= tol::SAMPLE);
    assert!(lambda_of(&[0.6, 0.5], &c, &phi, 0.25).is_err());
}

#[test]
fn u_examples() {
    let x = [1.0, 0.5];
    let c = [0.5, 0.5];
    assert_eq!(u_of(&x, &c, 0.0).unwrap(), x.to_vec());
    assert!(dist(&u_of(&x, &c, 0.5).unwrap(), &c) <= tol::EXACT);
    assert!(dist(&u_of(&x, &c, 0.25).unwrap(), &[0.75, 0.5]) <= tol::EXACT);
    assert!(u_of(&x, &c, 0.6).is_err());
    assert!(u_of(&x, &c, -0.1).is_err());
}

#[test]
fn square_keeps_edge_and_leaves_other_edges() {
    let case = square_case();
    let cp = &case.result.c_prime;
    for k in 0..=100 {
        assert!(cp.membership(&[0.0, k as f64 / 100.0], tol::EXACT));
    }
    // Dense oracle on the other three edges.
    for k in 1..=400 {
        let s = k as f64 / 400.0;
        for p in [[s, 0.0], [1.0, s], [s, 1.0]] {
            assert!(cp.distance(&p).unwrap() > 0.0, "{p:?}");
        }
    }
}

#[test]
fn square_gap_bound_on_fresh_samples() {
    let case = square_case();
    let phi = GapFunction::Coordinate { index: 0 };
    let pts = case.body.sample_members(10_000, 77).unwrap();
    assert!(worst_gap_violation(&case.result.c_prime, &phi, &pts).unwrap() <= tol::SAMPLE);
}

#[test]
fn square_lambda_and_u_properties() {
    let case = square_case();
    let face = square_face(&case.body);
    for (row, u) in case.result.lambda_table.iter().zip(&case.result.u_points) {
        assert!(row.lambda >= 0.0);
        let on_face = face.distance(&row.x).unwrap() <= tol::SAMPLE;
        assert_eq!(row.lambda <= tol::SAMPLE, on_face, "{:?}", row.x);
        assert!(case.body.membership(u, tol::SAMPLE));
        if !on_face {
            assert!(dist(u, &row.x) > 0.0);
        }
    }
}

#[test]
fn square_contains_center_ball() {
    let case = square_case();
    let r = case.result.margin_r;
    let c = &case.result.center;
    for k in 0..256 {
        let a = std::f64::consts::TAU * k as f64 / 256.0;
        let p = [c[0] + r * a.cos(), c[1] + r * a.sin()];
        assert!(case.result.c_prime.membership(&p, tol::SAMPLE));
    }
}

#[test]
fn triangle_vertex_face() {
    let t = ConvexBody::from_points(2, vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, 1.0]]).unwrap();
    let face = FaceSpec::new(&t, vec![2], Some(vec![0.0, -1.0])).unwrap();
    let phi = GapFunction::hyperplane_power(&[0.0, 1.0], vec![1.0, 1.0], 1.0).unwrap();
    let res = build_inner_approx(&t, &face, &phi, 256, 9).unwrap();
    assert!(res.c_prime.membership(&[1.0, 1.0], tol::EXACT));
    for k in 0..=200 {
        let s = k as f64 / 200.0;
        for p in [[s * 2.0, 0.0], [s, s], [2.0 - s, s]] {
            if dist(&p, &[1.0, 1.0]) > 1e-3 {
                assert!(res.c_prime.distance(&p).unwrap() > 0.0, "{p:?}");
            }
        }
    }
    let pts = t.sample_members(2000, 4).unwrap();
    assert!(worst_gap_violation(&res.c_prime, &phi, &pts).unwrap() <= tol::SAMPLE);
}

#[test]
fn whole_body_is_not_a_proper_face() {
    let sq = square();
    assert!(FaceSpec::new(&sq, vec![0, 1, 2, 3], None).is_err());
}

#[test]
fn perturbed_curves_on_five_dimensional_body() {
    let bodies = build_bodies().unwrap();
    let res = inner_with_s(&bodies, 256, 0).unwrap();
    let grid: Vec<f64> = (0..100).map(|k| k as f64 / 99.0).collect();
    for curve in Curve::ALL {
        let spec = curve.spec(1025);
        let pts = extract_perturbed_curve(&res, &spec, &grid).unwrap();
        for (t, p) in grid.iter().zip(&pts) {
            let delta = dist(p, &curve.eval(*t));
            assert!(delta <= t.powi(3) + tol::SAMPLE, "{} t={t} delta={delta}", curve.name());
        }
    }
    let spec = Curve::Alpha.spec(1025);
    let pts = extract_perturbed_curve(&res, &spec, &[0.0, 1.0, 0.1]).unwrap();
    assert!(dist(&pts[0], &Curve::Alpha.eval(0.0)) <= tol::SAMPLE);
    assert!(dist(&pts[1], &Curve::Alpha.eval(1.0)) <= 1.0 + tol::SAMPLE);
    assert!(dist(&pts[2], &Curve::Alpha.eval(0.1)) <= 1e-3 + tol::SAMPLE);
    for g in bodies.face.generators() {
        assert!(res.c_prime.membership(g, tol::EXACT));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lambda_is_bounded_by_gap_and_margin(y in 0.0f64..1.0, side in 0usize..3, r in 0.05f64..0.3) {
        let x = match side { 0 => [1.0, y], 1 => [y, 0.0], _ => [y, 1.0] };
        let c = [0.5, 0.5];
        let phi = GapFunction::Coordinate { index: 0 };
        let l = lambda_of(&x, &c, &phi, r).unwrap();
        prop_assert!(l >= 0.0);
        prop_assert!(l <= phi.eval(&x) + tol::EXACT);
        prop_assert!(l <= dist(&x, &c) - r + tol::EXACT);
        let u = u_of(&x, &c, l).unwrap();
        prop_assert!((dist(&u, &x) - l).abs() <= tol::EXACT);
        prop_assert!(u[0] >= -tol::EXACT && u[0] <= 1.0 + tol::EXACT && u[1] >= -tol::EXACT && u[1] <= 1.0 + tol::EXACT);
    }

    #[test]
    fn gap_bound_holds_at_random_members(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let case = square_case();
        let d = case.result.c_prime.distance(&[a, b]).unwrap();
        prop_assert!(d <= a + tol::SAMPLE);
        prop_assert!(norm(&[a, b]).is_finite());
    }
}
