//! Half-spaces and Euclidean balls used as separators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hull::PointCloud;
use crate::linalg::{dist, dot, norm, norm_sq, normalized};
use crate::tol;

/// `{y : <y - w, p> >= 0}` with unit normal `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub p: Vec<f64>,
    pub w: Vec<f64>,
}

impl HalfSpace {
    /// Normalizes `p`; fails on a zero normal.
    pub fn new(p: &[f64], w: Vec<f64>) -> Result<Self> {
        let p = normalized(p).ok_or(Error::ZeroDirection)?;
        Ok(Self { p, w })
    }

    /// Signed distance `<y - w, p>`, nonnegative inside.
    pub fn value(&self, y: &[f64]) -> f64 {
        self.p.iter().zip(y.iter().zip(&self.w)).map(|(p, (a, b))| p * (a - b)).sum()
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        self.value(y) >= -tol
    }

    /// Largest `beta >= 0` keeping `a + beta v` inside (infinite if the ray
    /// never leaves). Assumes `a` is inside.
    pub fn ray_exit(&self, a: &[f64], v: &[f64]) -> f64 {
        let pv = dot(&self.p, v);
        if pv >= 0.0 {
            f64::INFINITY
        } else {
            (self.value(a) / -pv).max(0.0)
        }
    }
}

/// Touch point and unit normal of a ball built to pass through a point.
///
/// Balls of enormous radius lose all precision when evaluated through the
/// center; with an anchor, `|y - c|^2 - r^2` is computed as
/// `|y - x|^2 - 2r <y - x, p>` instead.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub touch: Vec<f64>,
    pub normal: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub c: Vec<f64>,
    pub r: f64,
    #[serde(default, skip_serializing_if = "Option::is_none", flatten)]
    pub anchor: Option<Anchor>,
}

impl Ball {
    pub fn new(c: Vec<f64>, r: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Precondition(format!("ball radius {r} is not a finite nonnegative number")));
        }
        Ok(Self { c, r, anchor: None })
    }

    /// Ball of radius `r` whose boundary passes through `x` with inward unit
    /// normal `p`, i.e. `c = x + r p`.
    pub fn through(x: &[f64], p: &[f64], r: f64) -> Self {
        let c = x.iter().zip(p).map(|(a, b)| a + r * b).collect();
        Self { c, r, anchor: Some(Anchor { touch: x.to_vec(), normal: p.to_vec() }) }
    }

    /// `|y - c|^2 - r^2`.
    pub fn power(&self, y: &[f64]) -> f64 {
        match &self.anchor {
            Some(a) => {
                let d: Vec<f64> = y.iter().zip(&a.touch).map(|(u, v)| u - v).collect();
                norm_sq(&d) - 2.0 * self.r * dot(&d, &a.normal)
            }
            None => norm_sq(&y.iter().zip(&self.c).map(|(u, v)| u - v).collect::<Vec<_>>()) - self.r * self.r,
        }
    }

    /// `|y - c| - r`, positive outside.
    pub fn excess(&self, y: &[f64]) -> f64 {
        let denom = dist(y, &self.c) + self.r;
        if denom == 0.0 {
            return 0.0;
        }
        self.power(y) / denom
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        self.excess(y) <= tol
    }

    /// Largest `beta >= 0` keeping `a + beta v` inside. Assumes `a` inside.
    pub fn ray_exit(&self, a: &[f64], v: &[f64]) -> f64 {
        let aa = norm_sq(v);
        let (b, c0) = match &self.anchor {
            Some(an) => {
                let d: Vec<f64> = a.iter().zip(&an.touch).map(|(u, w)| u - w).collect();
                (dot(&d, v) - self.r * dot(v, &an.normal), norm_sq(&d) - 2.0 * self.r * dot(&d, &an.normal))
            }
            None => {
                let d: Vec<f64> = a.iter().zip(&self.c).map(|(u, w)| u - w).collect();
                (dot(&d, v), norm_sq(&d) - self.r * self.r)
            }
        };
        if c0 >= 0.0 {
            return 0.0;
        }
        let disc = (b * b - aa * c0).sqrt();
        if b > 0.0 {
            -c0 / (b + disc)
        } else {
            (disc - b) / aa
        }
    }
}

/// Constructive separating ball with its defining quantities.
#[derive(Clone, Debug)]
pub struct BallConstruction {
    pub ball: Ball,
    /// Separation margin: `min_g <g - x, p>`.
    pub d: f64,
    /// `max_g |x - g|`.
    pub m: f64,
}

/// Ball containing the hull of `cloud` with `x` on its boundary sphere:
/// `r = M^2 / (2d)`, `c = x + r p`, where `p` points from `x` to its nearest
/// hull point.
pub fn constructive_ball(cloud: &PointCloud, x: &[f64]) -> Result<BallConstruction> {
    let proj = cloud.project(x)?;
    if proj.distance <= tol::BOUNDARY {
        return Err(Error::Precondition(format!(
            "point lies in the body (distance {:e}); no separating ball exists",
            proj.distance
        )));
    }
    let p: Vec<f64> = proj.point.iter().zip(x).map(|(a, b)| (a - b) / proj.distance).collect();
    let p = normalized(&p).ok_or(Error::ZeroDirection)?;
    let b = constructive_ball_with_normal(cloud, x, &p);
    if !(b.d > 0.0) || !b.ball.r.is_finite() {
        return Err(Error::Numeric { what: "constructive ball margin", residual: b.d });
    }
    Ok(b)
}

/// Same construction for a caller-supplied unit normal `p` with
/// `<g - x, p> > 0` for every generator.
pub fn constructive_ball_with_normal(cloud: &PointCloud, x: &[f64], p: &[f64]) -> BallConstruction {
    let xp = dot(x, p);
    let d = cloud.iter().map(|g| dot(g, p) - xp).fold(f64::INFINITY, f64::min);
    let m = cloud.max_distance_from(x);
    let r = m * m / (2.0 * d);
    BallConstruction { ball: Ball::through(x, p, r), d, m }
}

/// Smallest ball containing the hull of `cloud` with `x` on its sphere,
/// computed in closed form through inversion.
///
/// With `c = x + q`, containment of `g` reads `2<g - x, q> >= |g - x|^2`,
/// i.e. `<z_g, q> >= 1` for `z_g = 2(g - x)/|g - x|^2`. The shortest such `q`
/// is `y / |y|^2` with `y` the minimum-norm point of `conv{z_g}`.
pub fn inversion_ball(cloud: &PointCloud, x: &[f64]) -> Result<Ball> {
    let n = cloud.dim();
    let mut inv = PointCloud::new(n);
    for g in cloud.iter() {
        let d: Vec<f64> = g.iter().zip(x).map(|(a, b)| a - b).collect();
        let dd = norm_sq(&d);
        if dd == 0.0 {
            return Err(Error::Precondition("point coincides with a generator".into()));
        }
        let z: Vec<f64> = d.iter().map(|v| 2.0 * v / dd).collect();
        inv.push(&z);
    }
    let origin = vec![0.0; n];
    let y = inv.project(&origin)?;
    if y.lower_bound <= 0.0 {
        return Err(Error::Precondition("point lies in the body; no separating ball exists".into()));
    }
    let p = normalized(&y.point).ok_or(Error::ZeroDirection)?;
    // Tightest radius for this normal, which also absorbs solver slack.
    let xp = dot(x, &p);
    let mut r = 0.0f64;
    for g in cloud.iter() {
        let d: Vec<f64> = g.iter().zip(x).map(|(a, b)| a - b).collect();
        let along = dot(g, &p) - xp;
        if along <= 0.0 {
            return Err(Error::Numeric { what: "inversion ball normal", residual: along });
        }
        r = r.max(norm_sq(&d) / (2.0 * along));
    }
    Ok(Ball::through(x, &p, r))
}

/// Outcome of the minimal-radius search.
#[derive(Clone, Debug)]
pub struct MinimalBall {
    pub ball: Ball,
    pub converged: bool,
}

/// Smallest separating ball, found by bisection on the radius.
///
/// The ball must contain every generator and have `x` on its sphere. For a
/// candidate `r` the admissible centers form `K_r = ∩ B(g, r)`; Dykstra's
/// alternating projections give the member of `K_r` nearest to `x` and,
/// started far beyond the hull along the separating direction, one far from
/// `x`. The radius is feasible when these straddle the sphere `|x - c| = r`.
pub fn minimal_separating_ball(cloud: &PointCloud, x: &[f64], iterations: usize) -> Result<MinimalBall> {
    let con = constructive_ball(cloud, x)?;
    let p = con.ball.anchor.as_ref().map(|a| a.normal.clone()).unwrap();
    let mut hi = con.ball.r;
    let mut best: Option<Ball> = None;
    let mut lo = 0.0;
    for _ in 0..iterations.max(1) {
        if hi - lo <= tol::BOUNDARY * hi.max(1.0) {
            break;
        }
        let r = 0.5 * (lo + hi);
        match feasible_center(cloud, x, &p, r) {
            Some(c) => {
                hi = r;
                best = Some(Ball::new(c, r)?);
            }
            None => lo = r,
        }
    }
    match best {
        Some(ball) if cloud.iter().all(|g| ball.excess(g) <= tol::EXACT * ball.r.max(1.0)) => {
            Ok(MinimalBall { ball, converged: hi - lo <= tol::BOUNDARY * hi.max(1.0) })
        }
        _ => Ok(MinimalBall { ball: con.ball, converged: false }),
    }
}

/// Center `c` with every generator in `B(c, r)` and `|x - c| = r`, if one is
/// found. Such centers form a connected family, so one exists as soon as the
/// nearest and the farthest admissible centers straddle the sphere around `x`.
fn feasible_center(cloud: &PointCloud, x: &[f64], p: &[f64], r: f64) -> Option<Vec<f64>> {
    let far_start: Vec<f64> = x.iter().zip(p).map(|(a, b)| a + (4.0 * r + norm(x) + 1.0) * b).collect();
    let far = dykstra(cloud, &far_start, r)?;
    if dist(x, &far) < r {
        return None;
    }
    let near = dykstra(cloud, x, r)?;
    if dist(x, &near) > r {
        return None;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let at = |s: f64| -> Vec<f64> { near.iter().zip(&far).map(|(a, b)| a + s * (b - a)).collect() };
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if dist(x, &at(mid)) < r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(at(hi))
}

/// Dykstra's alternating projections onto `∩ B(g, r)`; `None` if the
/// iterate does not settle inside the intersection.
fn dykstra(cloud: &PointCloud, start: &[f64], r: f64) -> Option<Vec<f64>> {
    let n = cloud.dim();
    let mut z = start.to_vec();
    let mut incr = vec![0.0; cloud.len() * n];
    for _ in 0..5000 {
        let mut moved = 0.0f64;
        for (j, g) in cloud.iter().enumerate() {
            let inc = &mut incr[j * n..(j + 1) * n];
            let y: Vec<f64> = z.iter().zip(inc.iter()).map(|(a, b)| a + b).collect();
            let dy = dist(&y, g);
            let proj: Vec<f64> = if dy <= r {
                y.clone()
            } else {
                g.iter().zip(&y).map(|(gi, yi)| gi + (yi - gi) * r / dy).collect()
            };
            for i in 0..n {
                inc[i] = y[i] - proj[i];
                moved = moved.max((proj[i] - z[i]).abs());
            }
            z = proj;
        }
        if moved <= 1e-13 * r.max(1.0) {
            break;
        }
    }
    cloud.iter().all(|g| dist(g, &z) <= r * (1.0 + 1e-10) + 1e-12).then_some(z)
}
