//! Inner approximations that touch the boundary only on a prescribed face.
//!
//! Every sampled boundary point `x` is pulled towards the interior point `c`
//! by `λ(x) = min(min_{u ∈ [x, c]} φ(u), |x - c| - r)`; the hull of the
//! pulled points, the face generators and `c` is the approximation.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::body::{ConvexBody, CurveSpec};
use crate::error::{Error, Result};
use crate::face::FaceSpec;
use crate::linalg::{dist, norm, normalized};
use crate::tol;

/// Grid resolution of the segment minimization in `λ`.
pub const LAMBDA_GRID: usize = 1024;
/// Probe directions used to measure the interior margin of `c`.
pub const MARGIN_PROBES: usize = 64;
/// Directions per affine dimension for the points covering the interior ball.
pub const BALL_DIRECTIONS: usize = 64;
const BALL_COVER: f64 = 1.5;

/// Continuous function, nonnegative on the body, vanishing exactly on the
/// face.
#[derive(Clone)]
pub enum GapFunction {
    /// `|<x - w, p>|^exponent` for the hyperplane through `w` with normal `p`.
    HyperplanePower { normal: Vec<f64>, offset: Vec<f64>, exponent: f64 },
    /// `x[index]`.
    Coordinate { index: usize },
    Custom { name: String, f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync> },
}

impl fmt::Debug for GapFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GapFunction::HyperplanePower { normal, offset, exponent } => f
                .debug_struct("HyperplanePower")
                .field("normal", normal)
                .field("offset", offset)
                .field("exponent", exponent)
                .finish(),
            GapFunction::Coordinate { index } => f.debug_struct("Coordinate").field("index", index).finish(),
            GapFunction::Custom { name, .. } => f.debug_struct("Custom").field("name", name).finish(),
        }
    }
}

/// Serializable gap descriptions.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GapSpec {
    HyperplanePower { normal: Vec<f64>, offset: Vec<f64>, exponent: f64 },
    Coordinate { index: usize },
}

impl GapSpec {
    pub fn build(&self) -> Result<GapFunction> {
        match self {
            GapSpec::Coordinate { index } => Ok(GapFunction::Coordinate { index: *index }),
            GapSpec::HyperplanePower { normal, offset, exponent } => {
                GapFunction::hyperplane_power(normal, offset.clone(), *exponent)
            }
        }
    }
}

impl GapFunction {
    pub fn hyperplane_power(normal: &[f64], offset: Vec<f64>, exponent: f64) -> Result<Self> {
        if !(exponent > 0.0) || !exponent.is_finite() {
            return Err(Error::InvalidGap(format!("exponent {exponent} must be positive")));
        }
        if offset.len() != normal.len() {
            return Err(Error::InvalidGap("hyperplane point and normal differ in length".into()));
        }
        let normal = normalized(normal).ok_or_else(|| Error::InvalidGap("zero hyperplane normal".into()))?;
        Ok(GapFunction::HyperplanePower { normal, offset, exponent })
    }

    pub fn custom(name: &str, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        GapFunction::Custom { name: name.to_string(), f: Arc::new(f) }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            GapFunction::HyperplanePower { normal, offset, exponent } => {
                let v: f64 = normal.iter().zip(x.iter().zip(offset)).map(|(p, (a, b))| p * (a - b)).sum();
                v.abs().powf(*exponent)
            }
            GapFunction::Coordinate { index } => x[*index],
            GapFunction::Custom { f, .. } => f(x),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            GapFunction::HyperplanePower { exponent, .. } => format!("hyperplane distance to the power {exponent}"),
            GapFunction::Coordinate { index } => format!("coordinate {index}"),
            GapFunction::Custom { name, .. } => name.clone(),
        }
    }

    /// Checks the gap against the body's points: nonnegative everywhere,
    /// zero on the face generators and positive off the face.
    pub fn validate(&self, body: &ConvexBody, face: &FaceSpec) -> Result<()> {
        if let GapFunction::Coordinate { index } = self {
            if *index >= body.dim() {
                return Err(Error::InvalidGap(format!("coordinate {index} out of range")));
            }
        }
        if let GapFunction::HyperplanePower { normal, .. } = self {
            if normal.len() != body.dim() {
                return Err(Error::InvalidGap("hyperplane dimension mismatch".into()));
            }
        }
        for (i, g) in face.generators().iter().enumerate() {
            let v = self.eval(g);
            if !(v.abs() <= tol::EXACT) {
                return Err(Error::InvalidGap(format!("gap is {v:e} at face generator {i}")));
            }
        }
        for (i, x) in body.cloud().iter().enumerate() {
            let v = self.eval(x);
            if !v.is_finite() || v < -tol::EXACT {
                return Err(Error::InvalidGap(format!("gap is negative ({v:e}) at body point {i}")));
            }
            if v <= 0.0 && !face.contains(x, tol::SAMPLE) {
                return Err(Error::InvalidGap(format!("gap vanishes at body point {i}, which is off the face")));
            }
        }
        Ok(())
    }
}

/// Golden-section minimum of `f` on `[a, b]`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Minimum of `φ` over the segment `[x, c]`.
pub fn segment_min(x: &[f64], c: &[f64], phi: &GapFunction) -> f64 {
    let at = |s: f64| -> Vec<f64> { x.iter().zip(c).map(|(a, b)| a + s * (b - a)).collect() };
    let step = 1.0 / (LAMBDA_GRID - 1) as f64;
    let mut best = (f64::INFINITY, 0usize);
    for k in 0..LAMBDA_GRID {
        let v = phi.eval(&at(k as f64 * step));
        if v < best.0 {
            best = (v, k);
        }
    }
    let lo = (best.1 as f64 - 1.0).max(0.0) * step;
    let hi = ((best.1 as f64 + 1.0) * step).min(1.0);
    let (_, refined) = golden_min(|s| phi.eval(&at(s)), lo, hi, 60);
    best.0.min(refined)
}

/// `λ(x)`; requires `|x - c| > r`.
pub fn lambda_of(x: &[f64], c: &[f64], phi: &GapFunction, r: f64) -> Result<f64> {
    let d = dist(x, c);
    if !(d > r) {
        return Err(Error::Precondition(format!("|x - c| = {d} does not exceed r = {r}")));
    }
    Ok(segment_min(x, c, phi).min(d - r).max(0.0))
}

/// Point of `[x, c]` at distance `λ` from `x`.
pub fn u_of(x: &[f64], c: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let d = dist(x, c);
    if !(lambda >= 0.0) || lambda > d * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!("λ = {lambda} outside [0, {d}]")));
    }
    if d == 0.0 || lambda == 0.0 {
        return Ok(x.to_vec());
    }
    if lambda >= d {
        return Ok(c.to_vec());
    }
    let s = lambda / d;
    Ok(x.iter().zip(c).map(|(a, b)| a + s * (b - a)).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct LambdaRow {
    pub x: Vec<f64>,
    pub lambda: f64,
    pub phi: f64,
}

#[derive(Clone, Debug)]
pub struct InnerApproxResult {
    pub c_prime: ConvexBody,
    pub lambda_table: Vec<LambdaRow>,
    pub u_points: Vec<Vec<f64>>,
    pub margin_r: f64,
    pub center: Vec<f64>,
}

impl InnerApproxResult {
    /// CSV with the boundary point coordinates, `λ` and `φ`.
    pub fn lambda_csv(&self) -> String {
        let n = self.center.len();
        let mut out = String::new();
        let head: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        out.push_str(&head.join(","));
        out.push_str(",lambda,phi\n");
        for row in &self.lambda_table {
            let mut cells: Vec<String> = row.x.iter().map(|v| format!("{v:.17e}")).collect();
            cells.push(format!("{:.17e}", row.lambda));
            cells.push(format!("{:.17e}", row.phi));
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Builds `C' = conv({u(x)} ∪ F ∪ {c})` over the body's points and
/// `boundary_count` ray-shot boundary samples.
pub fn build_inner_approx(
    body: &ConvexBody,
    face: &FaceSpec,
    phi: &GapFunction,
    boundary_count: usize,
    seed: u64,
) -> Result<InnerApproxResult> {
    phi.validate(body, face)?;
    let c = body.interior_point().to_vec();
    let mut boundary: Vec<Vec<f64>> = body.cloud().iter().map(|p| p.to_vec()).collect();
    if boundary_count > 0 {
        boundary.extend(body.sample_boundary(boundary_count, seed)?);
    }
    let probe = body.probe_margin(&c, MARGIN_PROBES, seed.wrapping_add(1))?;
    let nearest = boundary.iter().map(|x| dist(x, &c)).fold(f64::INFINITY, f64::min);
    let margin = probe.min(nearest);
    if !(margin > tol::BOUNDARY) {
        return Err(Error::MarginTooSmall { margin });
    }
    let r = 0.5 * margin;
    let rows: Vec<(LambdaRow, Vec<f64>)> = boundary
        .par_iter()
        .map(|x| {
            let lambda = lambda_of(x, &c, phi, r)?;
            let u = u_of(x, &c, lambda)?;
            Ok((LambdaRow { x: x.clone(), lambda, phi: phi.eval(x) }, u))
        })
        .collect::<Result<_>>()?;
    let mut gens: Vec<Vec<f64>> = face.generators().to_vec();
    gens.push(c.clone());
    // Sampled u(x) can sit at distance r from c, so their hull only covers
    // the r-ball up to a sagitta; points at 1.5 r along a dense direction set
    // cover it and stay inside the probed margin 2 r.
    let k = body.affine_hull().dim();
    if k > 0 {
        let mut dirs = body.directions(BALL_DIRECTIONS * k, seed.wrapping_add(2))?;
        for b in &body.affine_hull().basis {
            dirs.push(b.clone());
            dirs.push(b.iter().map(|x| -x).collect());
        }
        for v in dirs {
            let vn = norm(&v);
            gens.push(c.iter().zip(&v).map(|(a, d)| a + BALL_COVER * r * d / vn).collect());
        }
    }
    let mut u_points = Vec::with_capacity(rows.len());
    let mut table = Vec::with_capacity(rows.len());
    for (row, u) in rows {
        // Points fixed on the face are already spanned by its generators.
        if row.lambda > 0.0 || !face.contains(&u, tol::SAMPLE) {
            gens.push(u.clone());
        }
        u_points.push(u);
        table.push(row);
    }
    let c_prime = ConvexBody::from_points(body.dim(), gens)?;
    Ok(InnerApproxResult { c_prime, lambda_table: table, u_points, margin_r: r, center: c })
}

/// Projections of `curve(t)` onto `C'`; the residual is the perturbation.
pub fn extract_perturbed_curve(result: &InnerApproxResult, curve: &CurveSpec, t_grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    t_grid
        .par_iter()
        .map(|&t| Ok(result.c_prime.project(&curve.eval(t))?.point))
        .collect()
}

/// `dist(x, C') <= φ(x) + tol` on every point, returning the worst slack.
pub fn worst_gap_violation(c_prime: &ConvexBody, phi: &GapFunction, points: &[Vec<f64>]) -> Result<f64> {
    let v: Vec<f64> = points
        .par_iter()
        .map(|x| Ok(c_prime.distance(x)? - phi.eval(x)))
        .collect::<Result<_>>()?;
    Ok(v.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> ConvexBody {
        ConvexBody::from_points(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap()
    }

    #[test]
    fn lambda_on_square() {
        let phi = GapFunction::Coordinate { index: 0 };
        let c = [0.5, 0.5];
        assert!((lambda_of(&[1.0, 0.5], &c, &phi, 0.25).unwrap() - 0.25).abs() < 1e-12);
        assert_eq!(lambda_of(&[0.0, 0.0], &c, &phi, 0.25).unwrap(), 0.0);
        assert!(lambda_of(&[0.6, 0.5], &c, &phi, 0.25).is_err());
    }

    #[test]
    fn u_examples() {
        let x = [1.0, 0.5];
        let c = [0.5, 0.5];
        assert_eq!(u_of(&x, &c, 0.0).unwrap(), x.to_vec());
        assert_eq!(u_of(&x, &c, 0.5).unwrap(), c.to_vec());
        let u = u_of(&x, &c, 0.25).unwrap();
        assert!((u[0] - 0.75).abs() < 1e-15 && (u[1] - 0.5).abs() < 1e-15);
        assert!(u_of(&x, &c, 0.6).is_err());
        assert!(u_of(&x, &c, -0.1).is_err());
    }

    #[test]
    fn golden_section_finds_interior_minimum() {
        let phi = GapFunction::custom("bowl", |x| (x[0] - 0.3137).powi(2) + 0.01);
        let m = segment_min(&[0.0, 0.0], &[1.0, 0.0], &phi);
        assert!((m - 0.01).abs() < 1e-14);
    }

    #[test]
    fn square_edge_inner_approximation() {
        let sq = square();
        let face = FaceSpec::new(&sq, vec![0, 2], Some(vec![1.0, 0.0])).unwrap();
        let phi = GapFunction::Coordinate { index: 0 };
        let res = build_inner_approx(&sq, &face, &phi, 512, 5).unwrap();
        assert!((res.margin_r - 0.25).abs() < 1e-3);
        assert!(res.c_prime.membership(&[0.0, 0.0], tol::EXACT));
        assert!(res.c_prime.membership(&[0.0, 1.0], tol::EXACT));
        assert!(!res.c_prime.membership(&[1.0, 0.5], 1e-3));
        assert!(!res.c_prime.membership(&[0.5, 0.0], 1e-3));
        for u in &res.u_points {
            assert!(sq.membership(u, tol::EXACT));
        }
    }

    #[test]
    fn negative_gap_is_rejected() {
        let sq = square();
        let face = FaceSpec::new(&sq, vec![0, 2], None).unwrap();
        let phi = GapFunction::custom("shifted", |x| x[0] - 0.5);
        assert!(matches!(build_inner_approx(&sq, &face, &phi, 16, 0), Err(Error::InvalidGap(_))));
    }
}
