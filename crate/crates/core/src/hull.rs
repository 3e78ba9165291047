//! Nearest-point queries against the convex hull of a finite point cloud.
//!
//! The workhorse is Wolfe's minimum-norm-point method: an active-set scheme
//! that keeps a corral of at most `dim + 1` affinely independent points and
//! terminates finitely. A pairwise Frank–Wolfe loop serves as fallback when
//! the active-set iteration stalls on a degenerate corral.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm_sq};

/// Generators stored row-major for cache-friendly scans.
#[derive(Clone, Debug)]
pub struct PointCloud {
    dim: usize,
    data: Vec<f64>,
}

/// Result of a projection onto a hull.
#[derive(Clone, Debug)]
pub struct Projection {
    pub point: Vec<f64>,
    pub distance: f64,
    /// Active generators and their convex weights.
    pub support: Vec<(usize, f64)>,
    /// Certified lower bound on the distance (from the final separating
    /// hyperplane); equals `distance` up to the solver tolerance.
    pub lower_bound: f64,
}

/// Outcome of a thresholded membership query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Membership {
    Inside { distance_upper: f64 },
    Outside { distance_lower: f64 },
}

impl Membership {
    pub fn is_inside(self) -> bool {
        matches!(self, Membership::Inside { .. })
    }
}

const REL_GAP: f64 = 1e-14;

impl PointCloud {
    pub fn new(dim: usize) -> Self {
        Self { dim, data: Vec::new() }
    }

    pub fn from_points<'a, I: IntoIterator<Item = &'a [f64]>>(dim: usize, pts: I) -> Self {
        let mut c = Self::new(dim);
        for p in pts {
            c.push(p);
        }
        c
    }

    pub fn push(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.dim, "point dimension mismatch");
        self.data.extend_from_slice(p);
    }

    pub fn extend(&mut self, other: &PointCloud) {
        assert_eq!(other.dim, self.dim);
        self.data.extend_from_slice(&other.data);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for p in self.iter() {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi;
            }
        }
        let n = self.len().max(1) as f64;
        c.iter_mut().for_each(|v| *v /= n);
        c
    }

    /// `max_i <p, g_i>` with the maximizing index.
    pub fn support(&self, p: &[f64]) -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, g) in self.iter().enumerate() {
            let v = dot(p, g);
            if v > best.0 {
                best = (v, i);
            }
        }
        best
    }

    /// `max_i ||x - g_i||`
    pub fn max_distance_from(&self, x: &[f64]) -> f64 {
        self.iter()
            .map(|g| g.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
            .fold(0.0, f64::max)
            .sqrt()
    }

    /// Coordinate-wise extent, used to scale tolerances.
    pub fn diameter_bound(&self) -> f64 {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.iter() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt()
    }

    /// Euclidean projection of `x` onto the convex hull.
    pub fn project(&self, x: &[f64]) -> Result<Projection> {
        let mut w = Wolfe::new(self, x);
        match w.run(None) {
            Ok(()) => Ok(w.finish()),
            Err(_) => frank_wolfe(self, x, w.state_weights()),
        }
    }

    /// Decide `dist(x, hull) <= tol`, stopping as soon as either bound settles
    /// the question.
    pub fn membership(&self, x: &[f64], tol: f64) -> Membership {
        let mut w = Wolfe::new(self, x);
        match w.run(Some(tol)) {
            Ok(()) => {
                let ub = norm_sq(&w.y).sqrt();
                if ub <= tol {
                    Membership::Inside { distance_upper: ub }
                } else {
                    Membership::Outside { distance_lower: w.lower.max(0.0) }
                }
            }
            Err(_) => match frank_wolfe(self, x, w.state_weights()) {
                Ok(p) if p.distance <= tol => Membership::Inside { distance_upper: p.distance },
                Ok(p) => Membership::Outside { distance_lower: p.lower_bound },
                // Treat a solver failure conservatively as "outside" with zero certified gap.
                Err(_) => Membership::Outside { distance_lower: 0.0 },
            },
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.membership(x, tol).is_inside()
    }

    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        Ok(self.project(x)?.distance)
    }
}

struct Wolfe<'a> {
    cloud: &'a PointCloud,
    x: &'a [f64],
    /// Corral indices and weights.
    s: Vec<usize>,
    lam: Vec<f64>,
    /// Current iterate, shifted so that `x` is the origin.
    y: Vec<f64>,
    lower: f64,
    scale_sq: f64,
}

impl<'a> Wolfe<'a> {
    fn new(cloud: &'a PointCloud, x: &'a [f64]) -> Self {
        let n = cloud.dim;
        // Start from the generator closest to x.
        let mut best = (f64::INFINITY, 0usize);
        for (i, g) in cloud.iter().enumerate() {
            let d: f64 = g.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            if d < best.0 {
                best = (d, i);
            }
        }
        let y: Vec<f64> = (0..n).map(|k| cloud.point(best.1)[k] - x[k]).collect();
        let scale_sq = best.0.max(1e-300);
        Self { cloud, x, s: vec![best.1], lam: vec![1.0], y, lower: 0.0, scale_sq }
    }

    fn shifted(&self, i: usize) -> Vec<f64> {
        self.cloud.point(i).iter().zip(self.x).map(|(a, b)| a - b).collect()
    }

    fn state_weights(&self) -> Vec<(usize, f64)> {
        self.s.iter().copied().zip(self.lam.iter().copied()).collect()
    }

    fn recompute_y(&mut self) {
        let n = self.cloud.dim;
        let mut y = vec![0.0; n];
        for (&i, &l) in self.s.iter().zip(&self.lam) {
            let g = self.cloud.point(i);
            for k in 0..n {
                y[k] += l * (g[k] - self.x[k]);
            }
        }
        self.y = y;
    }

    /// Affine minimizer of the corral: weights summing to one.
    fn affine_minimizer(&self) -> Option<Vec<f64>> {
        let m = self.s.len();
        if m == 1 {
            return Some(vec![1.0]);
        }
        let n = self.cloud.dim;
        let p0 = self.shifted(self.s[0]);
        // Columns d_j = p_j - p_0, j = 1..m-1; solve min ||p0 + D b|| via QR.
        let k = m - 1;
        let mut d = vec![0.0; n * k]; // column-major n x k
        for j in 0..k {
            let pj = self.cloud.point(self.s[j + 1]);
            for r in 0..n {
                d[j * n + r] = pj[r] - self.x[r] - p0[r];
            }
        }
        let mut rhs: Vec<f64> = p0.iter().map(|v| -v).collect();
        // Householder QR in place.
        let mut rdiag = vec![0.0; k];
        for j in 0..k {
            let col = &mut d[j * n..(j + 1) * n];
            let nrm = col[j..].iter().map(|v| v * v).sum::<f64>().sqrt();
            let colscale = (0..n).map(|r| col[r].abs()).fold(0.0, f64::max);
            if nrm <= 1e-13 * self.scale_sq.sqrt().max(colscale) {
                return None;
            }
            let alpha = if col[j] > 0.0 { -nrm } else { nrm };
            col[j] -= alpha;
            let vnorm_sq: f64 = col[j..].iter().map(|v| v * v).sum();
            rdiag[j] = alpha;
            // apply reflector to later columns and rhs
            let v: Vec<f64> = col[j..].to_vec();
            for jj in j + 1..k {
                let c2 = &mut d[jj * n..(jj + 1) * n];
                let f = 2.0 * v.iter().zip(&c2[j..]).map(|(a, b)| a * b).sum::<f64>() / vnorm_sq;
                for (t, vi) in v.iter().enumerate() {
                    c2[j + t] -= f * vi;
                }
            }
            let f = 2.0 * v.iter().zip(&rhs[j..]).map(|(a, b)| a * b).sum::<f64>() / vnorm_sq;
            for (t, vi) in v.iter().enumerate() {
                rhs[j + t] -= f * vi;
            }
        }
        // back substitution R b = Q^T rhs (first k entries)
        let mut b = vec![0.0; k];
        for j in (0..k).rev() {
            let mut sum = rhs[j];
            for jj in j + 1..k {
                sum -= d[jj * n + j] * b[jj];
            }
            b[j] = sum / rdiag[j];
        }
        let mut a = Vec::with_capacity(m);
        a.push(1.0 - b.iter().sum::<f64>());
        a.extend(b);
        a.iter().all(|v| v.is_finite()).then_some(a)
    }

    /// Run to optimality, or until the membership threshold `tol` is settled.
    fn run(&mut self, tol: Option<f64>) -> Result<()> {
        let n = self.cloud.dim;
        let max_major = 200 + 40 * n;
        let mut prev_norm = f64::INFINITY;
        for _ in 0..max_major {
            let ysq = norm_sq(&self.y);
            if ysq <= 1e-30 * self.scale_sq {
                self.lower = 0.0;
                return Ok(());
            }
            let yx = dot(&self.y, self.x);
            let mut best = (f64::INFINITY, 0usize);
            for (i, g) in self.cloud.iter().enumerate() {
                let v = dot(&self.y, g);
                if v < best.0 {
                    best = (v, i);
                }
            }
            let min_inner = best.0 - yx;
            let ynorm = ysq.sqrt();
            self.lower = (min_inner / ynorm).max(self.lower);
            if let Some(t) = tol {
                if ynorm <= t || self.lower > t {
                    return Ok(());
                }
            }
            let j = best.1;
            let pj_sq = {
                let pj = self.shifted(j);
                norm_sq(&pj)
            };
            let gap = ysq - min_inner;
            if gap <= REL_GAP * ysq.max(pj_sq).max(self.scale_sq * 1e-6) || self.s.contains(&j) {
                return Ok(());
            }
            if ynorm >= prev_norm * (1.0 - 1e-15) && self.s.len() > n {
                return Err(Error::Numeric { what: "active-set projection stalled", residual: gap });
            }
            prev_norm = ynorm;
            self.s.push(j);
            self.lam.push(0.0);
            // minor cycles
            let mut minor = 0;
            loop {
                minor += 1;
                if minor > 4 * (n + 2) {
                    return Err(Error::Numeric { what: "active-set minor cycle", residual: gap });
                }
                let alpha = match self.affine_minimizer() {
                    Some(a) => a,
                    None => {
                        // Affinely dependent corral: drop the newcomer and stop improving.
                        self.s.pop();
                        self.lam.pop();
                        self.recompute_y();
                        return Err(Error::Numeric { what: "degenerate corral", residual: gap });
                    }
                };
                if alpha.iter().all(|&a| a > 1e-15) {
                    self.lam = alpha;
                    break;
                }
                let mut theta = 1.0f64;
                for (l, a) in self.lam.iter().zip(&alpha) {
                    if *a <= 1e-15 {
                        let denom = l - a;
                        if denom > 0.0 {
                            theta = theta.min(l / denom);
                        }
                    }
                }
                let theta = theta.clamp(0.0, 1.0);
                for (l, a) in self.lam.iter_mut().zip(&alpha) {
                    *l += theta * (a - *l);
                }
                let mut k = 0;
                while k < self.s.len() {
                    if self.lam[k] <= 1e-15 {
                        self.s.swap_remove(k);
                        self.lam.swap_remove(k);
                    } else {
                        k += 1;
                    }
                }
                if self.s.is_empty() {
                    return Err(Error::Numeric { what: "active set emptied", residual: gap });
                }
                let total: f64 = self.lam.iter().sum();
                self.lam.iter_mut().for_each(|l| *l /= total);
            }
            self.recompute_y();
        }
        Err(Error::Numeric { what: "active-set iteration limit", residual: norm_sq(&self.y).sqrt() })
    }

    fn finish(&self) -> Projection {
        let point: Vec<f64> = self.y.iter().zip(self.x).map(|(a, b)| a + b).collect();
        let distance = norm_sq(&self.y).sqrt();
        Projection {
            point,
            distance,
            support: self.state_weights(),
            lower_bound: self.lower.max(0.0).min(distance),
        }
    }
}

/// Pairwise Frank–Wolfe on the simplex of weights.
fn frank_wolfe(cloud: &PointCloud, x: &[f64], start: Vec<(usize, f64)>) -> Result<Projection> {
    let n = cloud.dim;
    let mut weights: std::collections::BTreeMap<usize, f64> = start.into_iter().filter(|(_, w)| *w > 0.0).collect();
    if weights.is_empty() {
        weights.insert(0, 1.0);
    }
    let total: f64 = weights.values().sum();
    weights.values_mut().for_each(|w| *w /= total);
    let point_of = |weights: &std::collections::BTreeMap<usize, f64>| {
        let mut y = vec![0.0; n];
        for (&i, &w) in weights {
            for (k, yk) in y.iter_mut().enumerate() {
                *yk += w * (cloud.point(i)[k] - x[k]);
            }
        }
        y
    };
    let mut y = point_of(&weights);
    let mut lower = 0.0f64;
    let mut gap = f64::INFINITY;
    for _ in 0..20_000 {
        let yx = dot(&y, x);
        let (mut fw, mut fwv) = (0usize, f64::INFINITY);
        for (i, g) in cloud.iter().enumerate() {
            let v = dot(&y, g) - yx;
            if v < fwv {
                fwv = v;
                fw = i;
            }
        }
        let ysq = norm_sq(&y);
        if ysq > 0.0 {
            lower = lower.max(fwv / ysq.sqrt());
        }
        let (aw, _) = weights
            .iter()
            .map(|(&i, _)| (i, dot(&y, cloud.point(i)) - yx))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        gap = ysq - fwv;
        if gap <= 1e-13 * ysq.max(1e-300) || ysq < 1e-28 {
            break;
        }
        let d: Vec<f64> = (0..n).map(|k| cloud.point(fw)[k] - cloud.point(aw)[k]).collect();
        let dd = norm_sq(&d);
        if dd == 0.0 {
            break;
        }
        let max_step = weights[&aw];
        let step = (-dot(&y, &d) / dd).clamp(0.0, max_step);
        *weights.entry(fw).or_insert(0.0) += step;
        let wa = weights.get_mut(&aw).unwrap();
        *wa -= step;
        if *wa <= 0.0 {
            weights.remove(&aw);
        }
        for k in 0..n {
            y[k] += step * d[k];
        }
    }
    let distance = norm_sq(&y).sqrt();
    if gap.is_finite() && gap > 1e-8 * distance.max(1e-12) && distance > 1e-9 {
        return Err(Error::Numeric { what: "first-order projection", residual: gap });
    }
    Ok(Projection {
        point: y.iter().zip(x).map(|(a, b)| a + b).collect(),
        distance,
        support: weights.into_iter().collect(),
        lower_bound: lower.max(0.0).min(distance),
    })
}
