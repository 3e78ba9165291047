//! Error-bound probe `dist(x, F) <= κ dist(x, K)` for finitely generated
//! cones, with distances from nonnegative least squares.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::affine::affine_hull;
use crate::error::{Error, Result};
use crate::hull::PointCloud;
use crate::linalg::{axpy, dot, norm, normalized, scale};

/// Lawson–Hanson NNLS: `min |A c - b|` over `c >= 0`, with the columns of
/// `A` given as `cols`. Returns the coefficients and the residual norm.
pub fn nnls(cols: &[Vec<f64>], b: &[f64]) -> (Vec<f64>, f64) {
    let n = cols.len();
    let m = b.len();
    let mut x = vec![0.0; n];
    let mut passive = vec![false; n];
    let col_scale = cols.iter().map(|c| norm(c)).fold(0.0, f64::max).max(1.0);
    let floor = 1e-15 * col_scale * norm(b).max(1.0);
    let tol = 1e-12 * col_scale * norm(b).max(1.0);
    let residual = |x: &[f64]| -> Vec<f64> {
        let mut r = b.to_vec();
        for (j, c) in cols.iter().enumerate() {
            if x[j] != 0.0 {
                r = axpy(&r, -x[j], c);
            }
        }
        r
    };
    let solve = |set: &[usize]| -> Vec<f64> {
        let a = DMatrix::from_fn(m, set.len(), |i, k| cols[set[k]][i]);
        let svd = a.svd(true, true);
        svd.solve(&DVector::from_column_slice(b), 1e-13).map(|v| v.iter().copied().collect()).unwrap_or_else(|_| vec![0.0; set.len()])
    };
    for _ in 0..3 * n.max(1) {
        let r = residual(&x);
        let rn = norm(&r);
        if rn <= floor {
            break;
        }
        // Dual threshold relative to the residual: near-parallel columns
        // leave a residual almost orthogonal to all of them.
        let dual_tol = 1e-12 * col_scale * rn;
        let (j, wj) = (0..n)
            .filter(|&j| !passive[j])
            .map(|j| (j, dot(&cols[j], &r)))
            .fold((usize::MAX, dual_tol), |a, c| if c.1 > a.1 { c } else { a });
        if j == usize::MAX || !(wj > dual_tol) {
            break;
        }
        passive[j] = true;
        for _ in 0..3 * n.max(1) {
            let set: Vec<usize> = (0..n).filter(|&k| passive[k]).collect();
            let z = solve(&set);
            if z.iter().all(|&v| v > 0.0) {
                for (k, &i) in set.iter().enumerate() {
                    x[i] = z[k];
                }
                break;
            }
            let mut alpha = 1.0f64;
            for (k, &i) in set.iter().enumerate() {
                if z[k] <= 0.0 {
                    alpha = alpha.min(x[i] / (x[i] - z[k]));
                }
            }
            for (k, &i) in set.iter().enumerate() {
                x[i] += alpha * (z[k] - x[i]);
                if x[i] <= tol {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
        }
    }
    let r = norm(&residual(&x));
    (x, r)
}

/// Distance to the cone generated by `cols`.
pub fn cone_distance(cols: &[Vec<f64>], v: &[f64]) -> f64 {
    nnls(cols, v).1
}

#[derive(Clone, Debug, Serialize)]
pub struct ScaleRow {
    pub scale: f64,
    pub samples: usize,
    pub outside: usize,
    pub max_ratio: f64,
    pub median_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AmenabilityReport {
    pub face_span_dim: usize,
    pub rows: Vec<ScaleRow>,
    /// Largest sampled ratio: a lower bound for the error-bound constant.
    pub kappa_hat: f64,
}

/// Samples `x = p + ε z` in `span F`, with `p` on the relative boundary of
/// `F` and `z` a random unit vector of `span F`, and reports
/// `dist(x, F) / dist(x, K)` over the samples outside `K`.
pub fn amenability_probe(
    cone: &[Vec<f64>],
    face: &[Vec<f64>],
    scales: &[f64],
    samples: usize,
    seed: u64,
) -> Result<AmenabilityReport> {
    let dim = face.first().map(|f| f.len()).ok_or_else(|| Error::InvalidFace("empty face".into()))?;
    let mut with_origin = PointCloud::from_points(dim, face.iter().map(|f| f.as_slice()));
    with_origin.push(&vec![0.0; dim]);
    let span = affine_hull(&with_origin, 1e-9);
    let k = span.dim();
    if k == 0 {
        return Err(Error::ZeroDimensional);
    }
    let mid = normalized(&face.iter().fold(vec![0.0; dim], |a, f| axpy(&a, 1.0, &normalized(f).unwrap_or_else(|| f.clone()))))
        .ok_or_else(|| Error::InvalidFace("face generators sum to zero".into()))?;
    let in_face = |v: &[f64]| cone_distance(face, v) <= 1e-10 * norm(v).max(1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> Vec<f64> {
        let c: Vec<f64> = (0..k).map(|_| StandardNormal.sample(&mut rng)).collect();
        let v = span.basis.iter().zip(&c).fold(vec![0.0; dim], |a, (b, &ci)| axpy(&a, ci, b));
        normalized(&v).unwrap_or_else(|| span.basis[0].clone())
    };
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..samples).map(|_| (draw(), draw())).collect();

    // Relative-boundary points of F along rays from its middle direction.
    let boundary: Vec<Option<Vec<f64>>> = pairs
        .par_iter()
        .map(|(d, _)| {
            let at = |s: f64| axpy(&mid, s, d);
            if in_face(&at(1e3)) {
                return None;
            }
            let (mut lo, mut hi) = (0.0, 1e3);
            for _ in 0..80 {
                let m = 0.5 * (lo + hi);
                if in_face(&at(m)) {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            let p = at(lo);
            Some(scale(&p, 1.0 / norm(&p)))
        })
        .collect();

    let mut rows = Vec::new();
    for &eps in scales {
        let ratios: Vec<Option<f64>> = boundary
            .par_iter()
            .zip(&pairs)
            .map(|(p, (_, z))| {
                let p = p.as_ref()?;
                let x = axpy(p, eps, z);
                let dk = cone_distance(cone, &x);
                if !(dk > 1e-12) {
                    return None;
                }
                let df = cone_distance(face, &x);
                Some(df / dk)
            })
            .collect();
        let mut r: Vec<f64> = ratios.into_iter().flatten().collect();
        r.sort_by(f64::total_cmp);
        rows.push(ScaleRow {
            scale: eps,
            samples,
            outside: r.len(),
            max_ratio: r.last().copied().unwrap_or(f64::NAN),
            median_ratio: if r.is_empty() { f64::NAN } else { r[r.len() / 2] },
        });
    }
    let kappa_hat = rows.iter().map(|r| r.max_ratio).filter(|x| x.is_finite()).fold(0.0, f64::max);
    Ok(AmenabilityReport { face_span_dim: k, rows, kappa_hat })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nnls_orthant_projection() {
        let cols = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let (x, r) = nnls(&cols, &[1.0, -2.0, 3.0]);
        for (a, b) in x.iter().zip([1.0, 0.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((r - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nnls_redundant_columns() {
        let cols = vec![vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![2.0, 2.0]];
        let (_, r) = nnls(&cols, &[0.5, 3.0]);
        assert!(r < 1e-12);
        let (_, r) = nnls(&cols, &[-1.0, -1.0]);
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn orthant_face_ratio_is_one() {
        let cone = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let face = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let rep = amenability_probe(&cone, &face, &[1.0, 0.1, 0.01], 200, 5).unwrap();
        assert_eq!(rep.face_span_dim, 2);
        for row in &rep.rows {
            assert!(row.outside > 0);
            assert!((row.max_ratio - 1.0).abs() < 1e-9, "{row:?}");
        }
    }
}
