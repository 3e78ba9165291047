use conefix::face::FaceSpec;
use conefix::inner::GapFunction;
use conefix::linalg::{dist, dot, norm};
use conefix::sandwich::{amalgamate, build_sandwich, face_probe, fatten, PipelineParams, SandwichBody, SeparatorSet};
use conefix::separator::{constructive_ball, inversion_ball, minimal_separating_ball, Ball, HalfSpace};
use conefix::{tol, AffineSubspace, ConvexBody, PointCloud};
use proptest::prelude::*;
use std::sync::OnceLock;

fn cloud(pts: &[[f64; 2]]) -> PointCloud {
    PointCloud::from_points(2, pts.iter().map(|p| &p[..]))
}

fn square() -> ConvexBody {
    ConvexBody::from_points(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap()
}

fn disk(n: usize) -> ConvexBody {
    let pts = (0..n)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / n as f64;
            vec![a.cos(), a.sin()]
        })
        .collect();
    ConvexBody::from_points(2, pts).unwrap()
}

struct SquareSandwich {
    c: ConvexBody,
    d: ConvexBody,
    e: SandwichBody,
}

fn square_sandwich() -> &'static SquareSandwich {
    static S: OnceLock<SquareSandwich> = OnceLock::new();
    S.get_or_init(|| {
        let c = square();
        let face = FaceSpec::new(&c, vec![0, 2], Some(vec![1.0, 0.0])).unwrap();
        let d = ConvexBody::from_points(2, vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]]).unwrap();
        let e = build_sandwich(&c, &face, &d, 512, 8).unwrap();
        SquareSandwich { c, d, e }
    })
}

#[test]
fn constructive_ball_examples() {
    let b = constructive_ball(&cloud(&[[0.0, 0.0]]), &[1.0, 0.0]).unwrap();
    assert!((b.d - 1.0).abs() <= tol::EXACT && (b.m - 1.0).abs() <= tol::EXACT);
    assert!((b.ball.r - 0.5).abs() <= tol::EXACT);
    assert!(dist(&b.ball.c, &[0.5, 0.0]) <= tol::EXACT);
    assert!(b.ball.contains(&[0.0, 0.0], tol::EXACT));
    assert!(b.ball.excess(&[1.0, 0.0]).abs() <= tol::EXACT);

    let b = constructive_ball(&cloud(&[[0.0, 0.0], [0.0, 1.0]]), &[1.0, 0.5]).unwrap();
    assert!((b.ball.r - 0.625).abs() <= tol::EXACT);
    assert!(dist(&b.ball.c, &[0.375, 0.5]) <= tol::EXACT);
    assert!((b.m - 1.25f64.sqrt()).abs() <= tol::EXACT);

    // d = M: the point and its antipode on the sphere.
    let b = constructive_ball(&cloud(&[[2.0, 3.0]]), &[5.0, -1.0]).unwrap();
    assert!((b.ball.r - 2.5).abs() <= tol::EXACT);
    assert!(b.ball.excess(&[2.0, 3.0]).abs() <= tol::EXACT);

    assert!(constructive_ball(&cloud(&[[0.0, 0.0], [1.0, 0.0]]), &[0.5, 0.0]).is_err());
}

#[test]
fn minimal_ball_single_point() {
    let m = minimal_separating_ball(&cloud(&[[0.0, 0.0]]), &[1.0, 0.0], 200).unwrap();
    assert!((m.ball.r - 0.5).abs() <= tol::BOUNDARY);
    assert!(dist(&m.ball.c, &[0.5, 0.0]) <= 1e-6);
}

#[test]
fn minimal_ball_against_center_grid() {
    let d = cloud(&[[-1.0, 0.0], [1.0, 0.0]]);
    let x = [0.0, 1.0];
    let m = minimal_separating_ball(&d, &x, 200).unwrap();
    // Brute force: smallest |x - c| over grid centres whose ball contains D.
    let mut best = (f64::INFINITY, [0.0, 0.0]);
    for i in 0..400 {
        for j in 0..400 {
            let c = [-2.0 + 4.0 * i as f64 / 399.0, -3.0 + 4.0 * j as f64 / 399.0];
            let r = dist(&c, &x);
            if d.iter().all(|g| dist(g, &c) <= r) && r < best.0 {
                best = (r, c);
            }
        }
    }
    let h = 4.0 / 399.0;
    assert!(m.ball.r <= best.0 + 1e-9, "{} vs grid {}", m.ball.r, best.0);
    assert!(m.ball.r >= best.0 - 2.0 * h);
    assert!(m.ball.c[0].abs() <= 1e-6 && m.ball.c[1] <= 1e-6, "{:?}", m.ball.c);
    assert!(dist(&m.ball.c, &best.1) <= 2.0 * h);

    let inv = inversion_ball(&d, &x).unwrap();
    assert!((inv.r - m.ball.r).abs() <= 1e-6);
}

#[test]
fn minimal_ball_far_point_asymptotics() {
    let d = cloud(&[[0.0, -0.005], [0.0, 0.005], [0.003, 0.0]]);
    let x = [100.0, 0.0];
    let m = minimal_separating_ball(&d, &x, 200).unwrap();
    let far = d.iter().map(|g| dist(g, &x)).fold(0.0, f64::max);
    assert!((m.ball.r - far / 2.0).abs() <= 1e-3 * far, "{} vs {}", m.ball.r, far / 2.0);
}

#[test]
fn sandwich_of_body_with_itself() {
    let c = square();
    let face = FaceSpec::new(&c, vec![0, 2], Some(vec![1.0, 0.0])).unwrap();
    let e = build_sandwich(&c, &face, &c, 128, 1).unwrap();
    for p in c.sample_members(500, 2).unwrap() {
        assert!(e.membership(&p, tol::SAMPLE));
    }
    for k in 0..200 {
        let a = std::f64::consts::TAU * k as f64 / 200.0;
        let p = [0.5 + 0.8 * a.cos(), 0.5 + 0.8 * a.sin()];
        assert_eq!(e.membership(&p, tol::SAMPLE), c.membership(&p, tol::SAMPLE), "{p:?}");
    }
}

#[test]
fn square_sandwich_chain_and_probe() {
    let s = square_sandwich();
    for p in s.d.sample_members(1000, 3).unwrap() {
        assert!(s.e.membership(&p, tol::SAMPLE));
    }
    let dirs = s.c.directions(1000, 4).unwrap();
    for v in &dirs {
        let b = s.e.boundary_point(v);
        assert!(s.c.distance(&b).unwrap() <= tol::SAMPLE);
    }
    for g in s.d.generators() {
        assert!(s.e.separators.violation(g) <= tol::SAMPLE);
    }
    for seg in face_probe(&s.e, 2000, 5).unwrap() {
        assert!(seg.u[0].abs() <= 1e-5 && seg.v[0].abs() <= 1e-5, "{seg:?}");
    }
}

#[test]
fn ball_body_has_no_flat_chords() {
    let mut set = SeparatorSet::default();
    set.balls.push(Ball::new(vec![0.0; 5], 1.0).unwrap());
    let e = SandwichBody::from_separators(set, AffineSubspace::full(5), vec![0.0; 5]);
    assert!(face_probe(&e, 2000, 6).unwrap().is_empty());
}

#[test]
fn fatten_disk_at_a_point() {
    let c = disk(1024);
    let face = FaceSpec::new(&c, vec![0], Some(vec![-1.0, 0.0])).unwrap();
    let d = ConvexBody::from_points(2, vec![vec![1.0, 0.0]]).unwrap();
    let h = HalfSpace::new(&[-1.0, 0.0], vec![1.0, 0.0]).unwrap();
    let (g, q) = fatten(&c, &face, &d, &h, 1024, 2).unwrap();
    assert!(g.membership(&[1.0, 0.0], tol::EXACT));
    assert!((g.support_value(&[1.0, 0.0]) - 1.0).abs() <= tol::EXACT);
    for p in g.generators() {
        assert!(c.membership(p, tol::EXACT));
    }
    // Tilted lines through (1, 0) do not support G.
    for eps in [0.2, 0.1, 0.05] {
        for sgn in [1.0, -1.0] {
            let p = [f64::cos(eps), sgn * f64::sin(eps)];
            assert!(g.support_value(&p) > p[0] + 1e-9, "eps {eps}");
        }
    }
    // The gap vanishes on the hyperplane.
    let phi = GapFunction::hyperplane_power(&h.p, h.w.clone(), 2.0).unwrap();
    assert_eq!(phi.eval(&[1.0, 7.0]), 0.0);
    for row in &q.lambda_table {
        assert!(row.lambda >= 0.0);
    }
}

#[test]
fn fatten_rejects_non_exposing_hyperplane() {
    let c = square();
    let face = FaceSpec::new(&c, vec![0, 2], Some(vec![1.0, 0.0])).unwrap();
    let d = ConvexBody::from_points(2, vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]]).unwrap();
    let h = HalfSpace::new(&[0.0, 1.0], vec![0.0, 0.0]).unwrap();
    assert!(fatten(&c, &face, &d, &h, 64, 0).is_err());
}

#[test]
fn square_pipeline_passes_every_check() {
    let c = square();
    let face = FaceSpec::new(&c, vec![0, 2], Some(vec![1.0, 0.0])).unwrap();
    let params = PipelineParams { boundary_count: 256, seed: 3, check_samples: 1000, probes: 1000 };
    let a = amalgamate(&c, &face, &GapFunction::Coordinate { index: 0 }, &params).unwrap();
    for ch in &a.checks {
        assert!(ch.passed, "{ch:?}");
    }
}

#[test]
fn slack_gap_still_preserves_the_face() {
    let c = square();
    let face = FaceSpec::new(&c, vec![0, 2], Some(vec![1.0, 0.0])).unwrap();
    let phi = GapFunction::custom("steep", |x: &[f64]| 10.0 * x[0].max(0.0).powf(0.25));
    let params = PipelineParams { boundary_count: 256, seed: 4, check_samples: 500, probes: 500 };
    let a = amalgamate(&c, &face, &phi, &params).unwrap();
    let e = &a.refinement.sandwich;
    for g in face.generators() {
        assert!(e.membership(g, tol::SAMPLE));
    }
    for k in 1..100 {
        let s = k as f64 / 100.0;
        assert!(a.inner.c_prime.distance(&[1.0, s]).unwrap() > 0.0);
    }
    for ch in &a.checks {
        assert!(ch.passed, "{ch:?}");
    }
}

fn vec_in(dim: usize, lo: f64, hi: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(lo..hi, dim)
}

fn dim_and_points() -> impl Strategy<Value = (Vec<f64>, f64, Vec<f64>, Vec<f64>, f64)> {
    prop_oneof![Just(2usize), Just(5usize)].prop_flat_map(|n| {
        (vec_in(n, -2.0, 2.0), 0.1f64..3.0, vec_in(n, -1.0, 1.0), vec_in(n, -1.0, 1.0), 0.01f64..0.99)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    /// z in B, x in (y, z) outside or on B: then y is not in B.
    #[test]
    fn chord_beyond_an_outside_point_leaves_the_ball((c, r, zd, xd, s) in dim_and_points()) {
        let zn = norm(&zd).max(1e-9);
        let z: Vec<f64> = c.iter().zip(&zd).map(|(a, b)| a + r * b / zn * zn.min(1.0)).collect();
        let xn = norm(&xd).max(1e-9);
        let x: Vec<f64> = c.iter().zip(&xd).map(|(a, b)| a + r * (1.0 + xn) * b / xn).collect();
        // x = z + s (y - z)
        let y: Vec<f64> = z.iter().zip(&x).map(|(a, b)| a + (b - a) / s).collect();
        prop_assert!(dist(&z, &c) <= r * (1.0 + 1e-12));
        prop_assert!(dist(&x, &c) >= r);
        prop_assert!(dist(&y, &c) > r * (1.0 - 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sandwich_inclusion_chain(a in -0.2f64..1.2, b in -0.2f64..1.2) {
        let s = square_sandwich();
        let p = [a, b];
        if s.d.membership(&p, tol::EXACT) {
            prop_assert!(s.e.membership(&p, tol::SAMPLE));
        }
        if s.e.separators_contain(&p, tol::EXACT) && s.e.membership(&p, tol::EXACT) {
            prop_assert!(s.c.membership(&p, tol::SAMPLE));
        }
    }

    #[test]
    fn every_separator_contains_the_inner_body(k in 0usize..64) {
        let s = square_sandwich();
        let balls = &s.e.separators.balls;
        if !balls.is_empty() {
            let b = &balls[k % balls.len()];
            for g in s.d.generators() {
                prop_assert!(b.excess(g) <= tol::SAMPLE);
            }
        }
        for h in &s.e.separators.halfspaces {
            for g in s.d.generators() {
                prop_assert!(h.value(g) >= -tol::SAMPLE);
            }
        }
    }
}

#[test]
fn centers_depart_to_infinity_near_a_segment() {
    let d = cloud(&[[-1.0, 0.0], [1.0, 0.0], [0.0, -1.0]]);
    let mut last = 0.0;
    let mut centres = Vec::new();
    for k in 1..=6 {
        let delta = 10f64.powi(-(k as i32)) * 0.5;
        let w = [0.0, delta];
        let b = inversion_ball(&d, &w).unwrap();
        let cb = constructive_ball(&d, &w).unwrap();
        let cn = norm(&b.c);
        assert!(cn > last, "centre norm {cn} after {last}");
        assert!(norm(&cb.ball.c) >= cn * (1.0 - 1e-9));
        last = cn;
        centres.push((w, b));
    }
    assert!(last > 1e5);
    // Limit half-space: <x - wbar, p> >= 0 on D with p the centre direction.
    let (w, b) = centres.last().unwrap();
    let p: Vec<f64> = b.c.iter().zip(w).map(|(a, c)| a - c).collect();
    let pn = norm(&p);
    let p: Vec<f64> = p.iter().map(|v| v / pn).collect();
    for g in d.iter() {
        assert!(dot(g, &p) >= -tol::SAMPLE, "{g:?}");
    }
}
