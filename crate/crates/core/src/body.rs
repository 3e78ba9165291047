//! Convex bodies in V-representation: finite generators plus sampled
//! polynomial curves.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::affine::{affine_hull, AffineSubspace};
use crate::error::{Error, Result};
use crate::hull::{Membership, PointCloud, Projection};
use crate::linalg::{dist, norm};
use crate::ray::exit_parameter;
use crate::tol;

/// Polynomial curve `t -> sum_k coeffs[i][k] t^k` per coordinate `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub coeffs: Vec<Vec<f64>>,
    #[serde(default = "unit_range")]
    pub t_range: [f64; 2],
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn unit_range() -> [f64; 2] {
    [0.0, 1.0]
}

fn default_samples() -> usize {
    tol::DEFAULT_CURVE_SAMPLES
}

impl CurveSpec {
    pub fn new(coeffs: Vec<Vec<f64>>) -> Self {
        Self { coeffs, t_range: unit_range(), samples: default_samples() }
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().map(|c| c.len().saturating_sub(1)).max().unwrap_or(0)
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.iter().rev().fold(0.0, |acc, &a| acc * t + a))
            .collect()
    }

    /// Chebyshev–Lobatto parameters on `t_range`, endpoints included.
    pub fn parameters(&self) -> Vec<f64> {
        let [a, b] = self.t_range;
        let m = self.samples;
        if m <= 1 {
            return vec![0.5 * (a + b)];
        }
        (0..m)
            .map(|k| {
                let s = 0.5 * (1.0 - (std::f64::consts::PI * k as f64 / (m - 1) as f64).cos());
                if k == 0 {
                    a
                } else if k == m - 1 {
                    b
                } else {
                    a + (b - a) * s
                }
            })
            .collect()
    }

    pub fn sample_points(&self) -> Vec<Vec<f64>> {
        self.parameters().into_iter().map(|t| self.eval(t)).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct BodyJson {
    dim: usize,
    generators: Vec<Vec<f64>>,
    #[serde(default)]
    curves: Vec<CurveSpec>,
}

/// Compact convex set `conv(generators ∪ curve samples)`.
#[derive(Clone, Debug)]
pub struct ConvexBody {
    dim: usize,
    generators: Vec<Vec<f64>>,
    curves: Vec<CurveSpec>,
    cloud: PointCloud,
    affine: AffineSubspace,
    interior: Vec<f64>,
    scale: f64,
}

impl ConvexBody {
    pub fn new(dim: usize, generators: Vec<Vec<f64>>, curves: Vec<CurveSpec>) -> Result<Self> {
        if dim == 0 || dim > 8 {
            return Err(Error::InvalidBody(format!("dimension {dim} outside 1..=8")));
        }
        if generators.is_empty() && curves.is_empty() {
            return Err(Error::InvalidBody("no generators".into()));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.len() != dim {
                return Err(Error::InvalidBody(format!("generator {i} has length {} (expected {dim})", g.len())));
            }
            if g.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidBody(format!("generator {i} has a non-finite entry")));
            }
        }
        let mut cloud = PointCloud::from_points(dim, generators.iter().map(|g| g.as_slice()));
        for (i, c) in curves.iter().enumerate() {
            if c.dim() != dim {
                return Err(Error::InvalidBody(format!("curve {i} has {} coordinates (expected {dim})", c.dim())));
            }
            if c.samples == 0 || !(c.t_range[0] <= c.t_range[1]) {
                return Err(Error::InvalidBody(format!("curve {i} has an empty sample grid")));
            }
            for p in c.sample_points() {
                if p.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidBody(format!("curve {i} evaluates to a non-finite point")));
                }
                cloud.push(&p);
            }
        }
        let affine = affine_hull(&cloud, tol::EXACT);
        let scale = cloud.diameter_bound().max(1e-300);
        let mut body = Self { dim, generators, curves, cloud, affine, interior: Vec::new(), scale };
        body.interior = body.choose_interior();
        Ok(body)
    }

    pub fn from_points(dim: usize, generators: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(dim, generators, Vec::new())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: BodyJson = serde_json::from_str(text)?;
        Self::new(j.dim, j.generators, j.curves)
    }

    pub fn to_json(&self) -> Result<String> {
        let j = BodyJson { dim: self.dim, generators: self.generators.clone(), curves: self.curves.clone() };
        Ok(serde_json::to_string_pretty(&j)?)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({ "dim": self.dim, "generators": self.generators, "curves": self.curves })
    }

    fn choose_interior(&self) -> Vec<f64> {
        let mut c = self.cloud.centroid();
        if self.affine.dim() == 0 {
            return c;
        }
        // Recenter along the basis direction with the thinnest side.
        for _ in 0..self.affine.dim() + 1 {
            let mut worst: Option<(f64, Vec<f64>, f64, f64)> = None;
            for b in &self.affine.basis {
                let fwd = self.exit_beta_unchecked(&c, b);
                let back: Vec<f64> = b.iter().map(|x| -x).collect();
                let bwd = self.exit_beta_unchecked(&c, &back);
                let m = fwd.min(bwd);
                if worst.as_ref().is_none_or(|w| m < w.0) {
                    worst = Some((m, b.clone(), fwd, bwd));
                }
            }
            let (m, b, fwd, bwd) = worst.unwrap();
            if m >= tol::BOUNDARY {
                break;
            }
            let shift = 0.5 * (fwd - bwd);
            c.iter_mut().zip(&b).for_each(|(ci, bi)| *ci += shift * bi);
        }
        c
    }

    fn exit_beta_unchecked(&self, c: &[f64], v: &[f64]) -> f64 {
        exit_parameter(&self.cloud, c, v, self.ray_target(), self.inside_tol())
    }

    /// Length accuracy of ray shooting.
    pub fn ray_target(&self) -> f64 {
        1e-11 * self.scale.max(1.0)
    }

    fn inside_tol(&self) -> f64 {
        1e-13 * self.scale.max(1.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    pub fn curves(&self) -> &[CurveSpec] {
        &self.curves
    }

    /// All points whose hull is the body: generators first, then curve samples.
    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn affine_hull(&self) -> &AffineSubspace {
        &self.affine
    }

    pub fn interior_point(&self) -> &[f64] {
        &self.interior
    }

    /// Bounding-box diagonal.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn membership(&self, x: &[f64], tol: f64) -> bool {
        self.cloud.contains(x, tol)
    }

    pub fn membership_detail(&self, x: &[f64], tol: f64) -> Membership {
        self.cloud.membership(x, tol)
    }

    pub fn project(&self, x: &[f64]) -> Result<Projection> {
        self.cloud.project(x)
    }

    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        self.cloud.distance(x)
    }

    pub fn support_value(&self, p: &[f64]) -> f64 {
        self.cloud.support(p).0
    }

    fn check_direction(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim {
            return Err(Error::Precondition(format!("direction has length {} (expected {})", v.len(), self.dim)));
        }
        let vn = norm(v);
        if vn == 0.0 || !vn.is_finite() {
            return Err(Error::ZeroDirection);
        }
        let off = self.affine.direction_residual(v);
        if off > tol::EXACT * vn.max(1.0) {
            return Err(Error::DirectionOutsideHull(off));
        }
        if self.affine.dim() == 0 {
            return Err(Error::ZeroDimensional);
        }
        Ok(if self.affine.is_full() { v.to_vec() } else { self.affine.project_direction(v) })
    }

    /// Largest `beta` with `c + beta v` in the body.
    pub fn ray_exit(&self, c: &[f64], v: &[f64]) -> Result<f64> {
        let v = self.check_direction(v)?;
        Ok(self.exit_beta_unchecked(c, &v))
    }

    /// Relative boundary point `c + beta v` with `beta` maximal.
    pub fn boundary_ray_shoot(&self, c: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        let w = self.check_direction(v)?;
        let beta = self.exit_beta_unchecked(c, &w);
        Ok(c.iter().zip(&w).map(|(a, b)| a + beta * b).collect())
    }

    /// Quasi-uniform unit directions in the direction space.
    pub fn directions(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        let k = self.affine.dim();
        if k == 0 {
            return Err(Error::ZeroDimensional);
        }
        Ok(unit_directions(k, count, seed).iter().map(|c| self.affine.lift(c)).collect())
    }

    /// Boundary points hit from the interior point along quasi-uniform
    /// directions; deterministic for a given seed.
    pub fn sample_boundary(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        if count == 0 {
            return Err(Error::Precondition("count must be at least 1".into()));
        }
        let dirs = self.directions(count, seed)?;
        let c = self.interior.clone();
        Ok(dirs
            .par_iter()
            .map(|v| {
                let beta = self.exit_beta_unchecked(&c, v);
                c.iter().zip(v).map(|(a, b)| a + beta * b).collect()
            })
            .collect())
    }

    /// Minimum distance from `c` to the relative boundary over `probes`
    /// directions.
    pub fn probe_margin(&self, c: &[f64], probes: usize, seed: u64) -> Result<f64> {
        let dirs = self.directions(probes, seed)?;
        Ok(dirs.par_iter().map(|v| self.exit_beta_unchecked(c, v)).reduce(|| f64::INFINITY, f64::min))
    }

    /// Points drawn from the body: random convex combinations of boundary
    /// samples and the interior point, deterministic for the seed.
    pub fn sample_members(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dirs = self.directions(count, seed ^ 0x9e37_79b9_7f4a_7c15)?;
        let radii: Vec<f64> = (0..count).map(|_| rng.random::<f64>().powf(1.0 / self.affine.dim() as f64)).collect();
        let c = self.interior.clone();
        Ok(dirs
            .par_iter()
            .zip(radii.par_iter())
            .map(|(v, &s)| {
                let beta = self.exit_beta_unchecked(&c, v) * s;
                c.iter().zip(v).map(|(a, b)| a + beta * b).collect()
            })
            .collect())
    }

    /// Distance from `x` to the nearest listed generator (not the hull).
    pub fn nearest_generator_distance(&self, x: &[f64]) -> f64 {
        self.cloud.iter().map(|g| dist(g, x)).fold(f64::INFINITY, f64::min)
    }
}

/// Unit vectors in `R^k`: alternating signs for `k = 1`, equally spaced
/// angles with a random phase for `k = 2`, normalized Gaussians otherwise.
pub fn unit_directions(k: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match k {
        1 => (0..count).map(|i| vec![if i % 2 == 0 { 1.0 } else { -1.0 }]).collect(),
        2 => {
            let phase: f64 = rng.random();
            (0..count)
                .map(|i| {
                    let a = std::f64::consts::TAU * (i as f64 + phase) / count as f64;
                    vec![a.cos(), a.sin()]
                })
                .collect()
        }
        _ => (0..count)
            .map(|_| loop {
                let v: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let n = norm(&v);
                if n > 1e-12 {
                    break v.iter().map(|x| x / n).collect();
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn square() -> ConvexBody {
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
    fn square_membership_and_projection() {
        let sq = square();
        assert!(sq.membership(&[0.5, 0.5], tol::EXACT));
        assert!(!sq.membership(&[2.0, 0.0], tol::EXACT));
        let p = sq.project(&[2.0, 0.5]).unwrap();
        assert!((p.distance - 1.0).abs() < 1e-12);
        assert_eq!(sq.support_value(&[1.0, 0.0]), 1.0);
        assert_eq!(sq.support_value(&[1.0, 1.0]), 2.0);
        assert_eq!(sq.interior_point(), &[0.5, 0.5]);
    }

    #[test]
    fn corner_ray() {
        let x = square().boundary_ray_shoot(&[0.5, 0.5], &[1.0, 1.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-9 && (x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn disk_ray_and_samples() {
        // A vertex direction of the inscribed polygon reaches the unit circle.
        let d = disk(4096);
        let x = d.boundary_ray_shoot(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-9);
        for p in d.sample_boundary(4, 3).unwrap() {
            assert!((norm(&p) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn ray_rejects_bad_directions() {
        assert!(matches!(square().boundary_ray_shoot(&[0.5, 0.5], &[0.0, 0.0]), Err(Error::ZeroDirection)));
        let seg = ConvexBody::from_points(2, vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(seg.boundary_ray_shoot(&[0.5, 0.0], &[0.0, 1.0]), Err(Error::DirectionOutsideHull(_))));
    }

    #[test]
    fn square_boundary_samples_on_edges() {
        for p in square().sample_boundary(1000, 11).unwrap() {
            let edge = p[0].min(p[1]).min(1.0 - p[0]).min(1.0 - p[1]);
            assert!(edge.abs() <= tol::BOUNDARY, "{p:?}");
        }
    }

    #[test]
    fn curve_sampling_is_chebyshev_with_endpoints() {
        let c = CurveSpec::new(vec![vec![1.0], vec![0.0, 1.0]]).with_samples(5);
        let t = c.parameters();
        assert_eq!(t[0], 0.0);
        assert_eq!(t[4], 1.0);
        assert!((t[2] - 0.5).abs() < 1e-15);
        assert!(t[1] < 0.25);
    }

    #[test]
    fn json_round_trip() {
        let body = ConvexBody::new(
            2,
            vec![vec![0.0, 0.0]],
            vec![CurveSpec::new(vec![vec![0.0, 1.0], vec![0.0, 0.0, 1.0]]).with_samples(16)],
        )
        .unwrap();
        let back = ConvexBody::from_json(&body.to_json().unwrap()).unwrap();
        assert_eq!(back.generators(), body.generators());
        assert_eq!(back.curves(), body.curves());
        assert_eq!(back.cloud().len(), 17);
    }
}
