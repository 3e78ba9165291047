use conefix::counterexample::build_bodies;
use conefix::linalg::{dist, dot, norm};
use conefix::{affine_hull, tol, ConvexBody, CurveSpec, PointCloud};
use proptest::prelude::*;

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

#[test]
fn affine_hull_examples() {
    assert_eq!(square().affine_hull().dim(), 2);

    let b = build_bodies().unwrap();
    let h = b.d.affine_hull();
    assert_eq!(h.dim(), 2);
    assert!(h.contains(&[1.0, 0.0, 1.0, 0.0, 0.0], tol::EXACT));
    for e in [[0.0, 1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0, 0.0]] {
        assert!(h.direction_residual(&e) < tol::EXACT);
    }
    for e in [[1.0, 0.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 0.0, 1.0]] {
        assert!(h.direction_residual(&e) > 0.5);
    }

    let p = ConvexBody::from_points(3, vec![vec![1.0, 2.0, 3.0]]).unwrap();
    assert_eq!(p.affine_hull().dim(), 0);
}

#[test]
fn membership_examples() {
    let sq = square();
    assert!(sq.membership(&[0.5, 0.5], tol::EXACT));
    assert!(!sq.membership(&[2.0, 0.0], 1e-9));

    let alpha = CurveSpec::new(vec![
        vec![1.0],
        vec![0.0],
        vec![0.0, 0.0, 1.0],
        vec![0.0, 1.0],
        vec![0.0, 0.0, 0.0, 1.0],
    ])
    .with_samples(1025);
    let body = ConvexBody::new(5, vec![], vec![alpha]).unwrap();
    assert!(body.membership(&[1.0, 0.0, 0.25, 0.5, 0.125], tol::SAMPLE));
}

#[test]
fn projection_examples() {
    let sq = square();
    let p = sq.project(&[0.3, 0.6]).unwrap();
    assert!(p.distance <= tol::EXACT);
    assert!(dist(&p.point, &[0.3, 0.6]) <= tol::EXACT);

    let p = sq.project(&[2.0, 0.5]).unwrap();
    assert!(dist(&p.point, &[1.0, 0.5]) <= tol::EXACT);
    assert!((p.distance - 1.0).abs() <= tol::EXACT);

    // Brute force over the segment parameter.
    let seg = ConvexBody::from_points(2, vec![vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
    let p = seg.project(&[0.0, 0.0]).unwrap();
    let brute = (0..=20000)
        .map(|k| {
            let t = k as f64 / 20000.0;
            norm(&[1.0, 1.0 - 2.0 * t])
        })
        .fold(f64::INFINITY, f64::min);
    assert!((p.distance - brute).abs() <= tol::EXACT);
    assert!(dist(&p.point, &[1.0, 0.0]) <= tol::EXACT);
}

#[test]
fn ray_shoot_examples() {
    let d = disk(8192);
    let x = d.boundary_ray_shoot(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
    assert!(dist(&x, &[1.0, 0.0]) <= tol::BOUNDARY);

    let sq = square();
    let x = sq.boundary_ray_shoot(&[0.5, 0.5], &[1.0, 1.0]).unwrap();
    assert!(dist(&x, &[1.0, 1.0]) <= tol::BOUNDARY);

    assert!(sq.boundary_ray_shoot(&[0.5, 0.5], &[0.0, 0.0]).is_err());
    let flat = ConvexBody::from_points(2, vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
    assert!(flat.boundary_ray_shoot(&[0.5, 0.0], &[0.0, 1.0]).is_err());
}

#[test]
fn ray_shoot_towards_positive_s() {
    let b = build_bodies().unwrap();
    let c = b.c.interior_point().to_vec();
    let v = b.c.affine_hull().project_direction(&[0.0, 0.0, 0.0, 0.0, 1.0]);
    let x = b.c.boundary_ray_shoot(&c, &v).unwrap();
    assert!(x[4] > 0.0);
    // Oracle: plain bisection on membership.
    let (mut lo, mut hi) = (0.0, 1.0);
    while b.c.membership(&c.iter().zip(&v).map(|(a, d)| a + hi * d).collect::<Vec<_>>(), tol::EXACT) {
        hi *= 2.0;
    }
    while (hi - lo) * norm(&v) > 1e-9 {
        let m = 0.5 * (lo + hi);
        if b.c.membership(&c.iter().zip(&v).map(|(a, d)| a + m * d).collect::<Vec<_>>(), tol::EXACT) {
            lo = m;
        } else {
            hi = m;
        }
    }
    let y: Vec<f64> = c.iter().zip(&v).map(|(a, d)| a + lo * d).collect();
    assert!(dist(&x, &y) < 1e-7, "{x:?} vs {y:?}");
}

#[test]
fn sample_boundary_examples() {
    let d = disk(8192);
    for seed in [0, 1, 2] {
        let pts = d.sample_boundary(4, seed).unwrap();
        assert_eq!(pts.len(), 4);
        for p in pts {
            assert!((norm(&p) - 1.0).abs() <= tol::BOUNDARY, "{p:?}");
        }
    }

    let pts = square().sample_boundary(1000, 3).unwrap();
    assert_eq!(pts.len(), 1000);
    for p in pts {
        let edge = p[0].abs().min((1.0 - p[0]).abs()).min(p[1].abs()).min((1.0 - p[1]).abs());
        assert!(edge <= tol::BOUNDARY, "{p:?}");
    }
}

#[test]
fn sample_boundary_on_five_dimensional_body() {
    let b = build_bodies().unwrap();
    let c = b.c.interior_point().to_vec();
    let mut shrunk_cloud = PointCloud::new(5);
    for p in b.c.cloud().iter() {
        let q: Vec<f64> = p.iter().zip(&c).map(|(a, o)| o + 0.999 * (a - o)).collect();
        shrunk_cloud.push(&q);
    }
    let pts = b.c.sample_boundary(10_000, 11).unwrap();
    assert_eq!(pts.len(), 10_000);
    for p in &pts {
        assert!(b.c.membership(p, tol::SAMPLE));
        assert!(!shrunk_cloud.contains(p, 0.0));
    }
}

#[test]
fn support_value_examples() {
    let sq = square();
    assert_eq!(sq.support_value(&[1.0, 0.0]), 1.0);
    assert_eq!(sq.support_value(&[1.0, 1.0]), 2.0);
    let b = build_bodies().unwrap();
    assert!((b.d.support_value(&[0.0, 0.0, 1.0, 0.0, 0.0]) - 2.0).abs() <= tol::EXACT);
}

fn cloud_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 3), 4..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_satisfies_variational_inequality(pts in cloud_strategy(), x in prop::collection::vec(-6.0f64..6.0, 3)) {
        let cloud = PointCloud::from_points(3, pts.iter().map(|p| p.as_slice()));
        let p = cloud.project(&x).unwrap();
        prop_assert!(cloud.contains(&p.point, tol::EXACT));
        let r: Vec<f64> = x.iter().zip(&p.point).map(|(a, b)| a - b).collect();
        for g in &pts {
            let d: Vec<f64> = g.iter().zip(&p.point).map(|(a, b)| a - b).collect();
            prop_assert!(dot(&r, &d) <= tol::EXACT * (1.0 + norm(&r) * norm(&d)));
        }
    }

    #[test]
    fn support_dominates_members(pts in cloud_strategy(), w in prop::collection::vec(0.0f64..1.0, 12), p in prop::collection::vec(-1.0f64..1.0, 3)) {
        let body = ConvexBody::from_points(3, pts.clone()).unwrap();
        let total: f64 = w[..pts.len()].iter().sum::<f64>() + 1e-12;
        let mut x = vec![0.0; 3];
        for (g, wi) in pts.iter().zip(&w) {
            for k in 0..3 {
                x[k] += wi / total * g[k];
            }
        }
        prop_assert!(body.support_value(&p) >= dot(&p, &x) - tol::EXACT);
    }

    #[test]
    fn ray_shoot_lands_on_boundary(seed in 0u64..1000, k in 0usize..16) {
        let body = ConvexBody::from_points(
            3,
            vec![
                vec![0.0, 0.0, 0.0], vec![2.0, 0.0, 0.0], vec![0.0, 1.5, 0.0], vec![0.0, 0.0, 1.0],
                vec![1.0, 1.0, 1.0], vec![1.5, 0.5, -0.5],
            ],
        ).unwrap();
        let dirs = body.directions(16, seed).unwrap();
        let v = &dirs[k];
        let c = body.interior_point().to_vec();
        let x = body.boundary_ray_shoot(&c, v).unwrap();
        prop_assert!(body.membership(&x, tol::BOUNDARY));
        let vn = norm(v);
        let beyond: Vec<f64> = x.iter().zip(v).map(|(a, d)| a + 10.0 * tol::BOUNDARY * d / vn).collect();
        prop_assert!(!body.membership(&beyond, tol::BOUNDARY));
    }

    #[test]
    fn segment_from_interior_stays_interior(seed in 0u64..1000, s in 0.0f64..0.999) {
        // x in the relative interior, y in the body: [x, y) keeps a positive margin.
        let body = square();
        let x = vec![0.3, 0.6];
        let ys = body.sample_boundary(1, seed).unwrap();
        let y = &ys[0];
        let z: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + s * (b - a)).collect();
        let margin = z[0].min(1.0 - z[0]).min(z[1]).min(1.0 - z[1]);
        prop_assert!(margin > 0.0);
        prop_assert!(body.probe_margin(&z, 32, seed).unwrap() > 0.0);
    }
}

#[test]
fn affine_hull_of_embedded_triangle() {
    let pts = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let cloud = PointCloud::from_points(3, pts.iter().map(|p| &p[..]));
    let h = affine_hull(&cloud, tol::EXACT);
    assert_eq!(h.dim(), 2);
    assert!(h.orthonormality_defect() < tol::EXACT);
    for p in &pts {
        assert!(h.residual(p) < tol::EXACT);
    }
}
