//! Ray shooting from an interior point to the relative boundary of a hull.
//!
//! Each step projects the current overestimate onto the hull and intersects
//! the ray with the resulting supporting hyperplane. On polytopes this lands
//! on the exit facet after a few steps; on curved boundaries it converges
//! quadratically. Bisection takes over whenever a cut stalls.

use crate::hull::PointCloud;
use crate::linalg::{dist, dot, norm, solve_dense};

/// Largest `beta` with `c + beta v` in the hull, to within `target` in
/// Euclidean length along the ray. The returned parameter is always a
/// verified member (distance at most `inside_tol`).
///
/// The simplex exit is tried first and accepted when its primal point and
/// dual facet bracket the exit within `target`; cutting planes finish the
/// job otherwise.
pub fn exit_parameter(cloud: &PointCloud, c: &[f64], v: &[f64], target: f64, inside_tol: f64) -> f64 {
    let vn = norm(v);
    let (h, _) = cloud.support(v);
    let mut hi = (h - dot(v, c)) / (vn * vn);
    let mut lo = 0.0f64;
    if hi <= 0.0 {
        return 0.0;
    }
    if let Some(b) = simplex_exit(cloud, c, v) {
        if b.residual <= inside_tol {
            if (b.upper - b.lower) * vn <= target {
                return b.lower;
            }
            lo = b.lower.min(hi);
        }
        hi = hi.min(b.upper).max(lo);
    }
    let point_at = |beta: f64| -> Vec<f64> { c.iter().zip(v).map(|(a, b)| a + beta * b).collect() };
    for _ in 0..400 {
        if (hi - lo) * vn <= target {
            break;
        }
        let y = point_at(hi);
        let proj = match cloud.project(&y) {
            Ok(p) => p,
            Err(_) => {
                let mid = 0.5 * (lo + hi);
                if cloud.contains(&point_at(mid), inside_tol) {
                    lo = mid;
                } else {
                    hi = mid;
                }
                continue;
            }
        };
        if proj.distance <= inside_tol {
            lo = hi;
            break;
        }
        // Supporting hyperplane with outward normal y - q, shifted to the true
        // support value so that the cut is valid even for an inexact q.
        let nrm: Vec<f64> = y.iter().zip(&proj.point).map(|(a, b)| a - b).collect();
        let nv = dot(&nrm, v);
        let old_hi = hi;
        if nv > 0.0 {
            let (hn, _) = cloud.support(&nrm);
            let cut = (hn - dot(&nrm, c)) / nv;
            if cut < hi {
                hi = cut.max(lo);
            }
        }
        let gain = old_hi - hi;
        if (hi - lo) * vn <= target {
            break;
        }
        if gain * vn <= target {
            // The cut has converged from above; confirm a point just below.
            let probe = (hi - target / vn).max(lo);
            if cloud.contains(&point_at(probe), inside_tol) {
                // Within target of a certified upper bound.
                lo = probe;
                break;
            } else {
                hi = probe;
                let mid = 0.5 * (lo + hi);
                if cloud.contains(&point_at(mid), inside_tol) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        } else if gain < 0.25 * (old_hi - lo) {
            let mid = 0.5 * (lo + hi);
            if cloud.contains(&point_at(mid), inside_tol) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    lo
}

/// Bracket from the exit linear program: `lower` is attained by a convex
/// combination within `residual` of `c + lower v`, `upper` comes from the
/// support value of the optimal dual normal.
#[derive(Clone, Copy, Debug)]
pub struct SimplexExit {
    pub lower: f64,
    pub upper: f64,
    pub residual: f64,
}

/// Maximize `beta` subject to `sum l_i (g_i - c) = beta v`, `sum l_i = 1`,
/// `l >= 0`, by a two-phase revised simplex with artificial slacks. `None`
/// when `c` is not in the hull or the iteration breaks down numerically.
pub fn simplex_exit(cloud: &PointCloud, c: &[f64], v: &[f64]) -> Option<SimplexExit> {
    let n = cloud.dim();
    let m = n + 1;
    let ng = cloud.len();
    if ng == 0 {
        return None;
    }
    // Columns: generators, then beta, then one artificial per row.
    let mut cols = Vec::with_capacity((ng + 1) * m);
    for g in cloud.iter() {
        cols.extend(g.iter().zip(c).map(|(a, b)| a - b));
        cols.push(1.0);
    }
    cols.extend(v.iter().map(|x| -x));
    cols.push(0.0);
    let scale = cols.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    let beta_col = ng;
    let art0 = ng + 1;
    let total = art0 + m;
    let column = |j: usize| -> Vec<f64> {
        if j < art0 {
            cols[j * m..(j + 1) * m].to_vec()
        } else {
            let mut e = vec![0.0; m];
            e[j - art0] = 1.0;
            e
        }
    };
    let mut rhs = vec![0.0; m];
    rhs[n] = 1.0;
    let mut basis: Vec<usize> = (art0..total).collect();
    let mut is_basic = vec![false; total];
    for &j in &basis {
        is_basic[j] = true;
    }
    let eps_d = 1e-12 * scale;
    let eps_piv = 1e-11 * scale;
    let mut xb = rhs.clone();

    for phase in 0..2 {
        let cost = |j: usize| -> f64 {
            match phase {
                0 => {
                    if j >= art0 {
                        -1.0
                    } else {
                        0.0
                    }
                }
                _ => {
                    if j == beta_col {
                        1.0
                    } else {
                        0.0
                    }
                }
            }
        };
        let mut degenerate_run = 0usize;
        let mut converged = false;
        for _ in 0..50 * m + 200 {
            // Basis matrix, column-major by basis position, solved row-major.
            let mut bmat = vec![0.0; m * m];
            let mut bt = vec![0.0; m * m];
            for (k, &j) in basis.iter().enumerate() {
                let col = column(j);
                for r in 0..m {
                    bmat[r * m + k] = col[r];
                    bt[k * m + r] = col[r];
                }
            }
            xb = solve_dense(bmat.clone(), rhs.clone(), m, 1e-14)?;
            let cb: Vec<f64> = basis.iter().map(|&j| cost(j)).collect();
            let y = solve_dense(bt, cb, m, 1e-14)?;
            let bland = degenerate_run > 2 * m;
            let mut enter: Option<(usize, f64)> = None;
            for j in 0..art0 {
                if is_basic[j] {
                    continue;
                }
                let d = cost(j) - dot(&y, &cols[j * m..(j + 1) * m]);
                if d > eps_d {
                    match enter {
                        None => enter = Some((j, d)),
                        Some((_, best)) if !bland && d > best => enter = Some((j, d)),
                        _ => {}
                    }
                    if bland {
                        break;
                    }
                }
            }
            let Some((j, _)) = enter else {
                converged = true;
                break;
            };
            let u = solve_dense(bmat, column(j), m, 1e-14)?;
            let mut leave: Option<(usize, f64, f64)> = None;
            for r in 0..m {
                let artificial_at_zero = phase == 1 && basis[r] >= art0;
                let ratio = if artificial_at_zero && u[r].abs() > eps_piv {
                    0.0
                } else if u[r] > eps_piv {
                    xb[r].max(0.0) / u[r]
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some((lr, lratio, lu)) => {
                        ratio < lratio - 1e-15 || (ratio <= lratio + 1e-15 && (if bland { basis[r] < basis[lr] } else { u[r].abs() > lu }))
                    }
                };
                if better {
                    leave = Some((r, ratio, u[r].abs()));
                }
            }
            let (r, ratio, _) = leave?;
            degenerate_run = if ratio <= 1e-15 { degenerate_run + 1 } else { 0 };
            is_basic[basis[r]] = false;
            basis[r] = j;
            is_basic[j] = true;
        }
        if !converged {
            return None;
        }
        if phase == 0 {
            let infeas: f64 = basis.iter().zip(&xb).filter(|(j, _)| **j >= art0).map(|(_, x)| x.abs()).sum();
            if infeas > 1e-9 {
                return None;
            }
        }
    }

    let mut lambda = vec![0.0; ng];
    let mut beta = 0.0;
    for (&j, &x) in basis.iter().zip(&xb) {
        if j < ng {
            lambda[j] = x.max(0.0);
        } else if j == beta_col {
            beta = x;
        }
    }
    let total_weight: f64 = lambda.iter().sum();
    if !(total_weight > 0.0) || !beta.is_finite() {
        return None;
    }
    let beta = beta.max(0.0);
    let mut p = vec![0.0; n];
    for (i, &l) in lambda.iter().enumerate() {
        if l > 0.0 {
            for (pk, gk) in p.iter_mut().zip(cloud.point(i)) {
                *pk += l / total_weight * gk;
            }
        }
    }
    let x: Vec<f64> = c.iter().zip(v).map(|(a, b)| a + beta * b).collect();
    let residual = dist(&p, &x);

    // Dual normal from the final basis of the phase-two problem.
    let mut bt = vec![0.0; m * m];
    for (k, &j) in basis.iter().enumerate() {
        let col = column(j);
        for r in 0..m {
            bt[k * m + r] = col[r];
        }
    }
    let cb: Vec<f64> = basis.iter().map(|&j| if j == beta_col { 1.0 } else { 0.0 }).collect();
    let y = solve_dense(bt, cb, m, 1e-14)?;
    let w: Vec<f64> = y[..n].iter().map(|a| -a).collect();
    let wv = dot(&w, v);
    let upper = if wv > 0.0 {
        let (hw, _) = cloud.support(&w);
        (hw - dot(&w, c)) / wv
    } else {
        f64::INFINITY
    };
    (upper >= beta - 1e-9 * (1.0 + beta)).then_some(SimplexExit { lower: beta, upper: upper.max(beta), residual })
}

/// Reference bisection on membership alone, used as a test oracle.
pub fn exit_parameter_bisection(cloud: &PointCloud, c: &[f64], v: &[f64], target: f64, inside_tol: f64) -> f64 {
    let vn = norm(v);
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let at = |beta: f64| -> Vec<f64> { c.iter().zip(v).map(|(a, b)| a + beta * b).collect() };
    while cloud.contains(&at(hi), inside_tol) {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo) * vn > target {
        let mid = 0.5 * (lo + hi);
        if cloud.contains(&at(mid), inside_tol) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
