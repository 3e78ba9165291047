//! Fattening, separator intersections and the face-fixing pipeline.
//!
//! A [`SandwichBody`] is the intersection of the affine hull of an outer
//! body `C` with one separator per sampled boundary point of `C`: the
//! supporting half-space at points of the inner body, and a ball containing
//! the inner body with the point on its sphere elsewhere. The body is only
//! ever queried through its membership and ray-exit oracles.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::affine::AffineSubspace;
use crate::body::ConvexBody;
use crate::check::Check;
use crate::error::{Error, Result};
use crate::face::FaceSpec;
use crate::inner::{build_inner_approx, GapFunction, InnerApproxResult};
use crate::linalg::{dist, dot, norm, normalized};
use crate::ray::exit_parameter;
use crate::separator::{constructive_ball, inversion_ball, Ball, HalfSpace};
use crate::tol;

/// Half-spaces at sampled face points and balls at the other sampled
/// boundary points.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SeparatorSet {
    pub halfspaces: Vec<HalfSpace>,
    pub balls: Vec<Ball>,
    #[serde(skip)]
    pub halfspace_sources: Vec<Vec<f64>>,
    #[serde(skip)]
    pub ball_sources: Vec<Vec<f64>>,
}

impl SeparatorSet {
    pub fn len(&self) -> usize {
        self.halfspaces.len() + self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        self.halfspaces.iter().all(|h| h.contains(y, tol)) && self.balls.iter().all(|b| b.contains(y, tol))
    }

    /// Largest violation over all separators (nonpositive inside).
    pub fn violation(&self, y: &[f64]) -> f64 {
        let h = self.halfspaces.iter().map(|h| -h.value(y)).fold(f64::NEG_INFINITY, f64::max);
        let b = self.balls.iter().map(|b| b.excess(y)).fold(f64::NEG_INFINITY, f64::max);
        h.max(b)
    }

    pub fn ray_exit(&self, a: &[f64], v: &[f64]) -> f64 {
        let h = self.halfspaces.iter().map(|h| h.ray_exit(a, v)).fold(f64::INFINITY, f64::min);
        let b = self.balls.iter().map(|b| b.ray_exit(a, v)).fold(f64::INFINITY, f64::min);
        h.min(b)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// A single separator.
#[derive(Clone, Debug)]
pub enum Separator {
    Half(HalfSpace),
    Ball(Ball),
}

impl Separator {
    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        match self {
            Separator::Half(h) => h.contains(y, tol),
            Separator::Ball(b) => b.contains(y, tol),
        }
    }
}

/// `E = aff C ∩ (separators) ∩ C`.
///
/// The sampled separators are only finitely many of the separators defining
/// `E`. For a point `y` outside `C` the separator attached to the boundary
/// point where `[z, y]` leaves `C` (with `z` in the inner body) already
/// excludes `y`; testing membership in `C` is that separator's lazy
/// evaluation. [`SandwichBody::exit_separator`] materializes it.
#[derive(Clone, Debug)]
pub struct SandwichBody {
    pub separators: SeparatorSet,
    affine: AffineSubspace,
    outer: Option<ConvexBody>,
    inner: Option<ConvexBody>,
    face: Option<FaceSpec>,
    anchor: Vec<f64>,
}

impl SandwichBody {
    /// Body given only by separators, with `anchor` a strictly interior point.
    pub fn from_separators(separators: SeparatorSet, affine: AffineSubspace, anchor: Vec<f64>) -> Self {
        Self { separators, affine, outer: None, inner: None, face: None, anchor }
    }

    pub fn affine_hull(&self) -> &AffineSubspace {
        &self.affine
    }

    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    pub fn inner(&self) -> Option<&ConvexBody> {
        self.inner.as_ref()
    }

    pub fn outer(&self) -> Option<&ConvexBody> {
        self.outer.as_ref()
    }

    pub fn face(&self) -> Option<&FaceSpec> {
        self.face.as_ref()
    }

    /// Separators only, without the outer-body check.
    pub fn separators_contain(&self, y: &[f64], tol: f64) -> bool {
        self.affine.contains(y, tol) && self.separators.contains(y, tol)
    }

    pub fn membership(&self, y: &[f64], tol: f64) -> bool {
        self.separators_contain(y, tol) && self.outer.as_ref().is_none_or(|c| c.membership(y, tol))
    }

    /// Largest `beta` with `a + beta v` in E, for `a` inside.
    pub fn ray_exit(&self, a: &[f64], v: &[f64]) -> f64 {
        let v = self.affine.project_direction(v);
        let beta_sep = self.separators.ray_exit(a, &v);
        match &self.outer {
            Some(c) => {
                // When the separators' exit point is already in C the segment
                // up to it lies in C as well.
                let y: Vec<f64> = a.iter().zip(&v).map(|(p, d)| p + beta_sep * d).collect();
                if beta_sep.is_finite() && c.membership(&y, tol::EXACT * 1e-3) {
                    return beta_sep;
                }
                let beta_c = exit_parameter(c.cloud(), a, &v, c.ray_target(), 1e-13 * c.scale().max(1.0));
                beta_c.min(beta_sep)
            }
            None => beta_sep,
        }
    }

    pub fn boundary_point(&self, v: &[f64]) -> Vec<f64> {
        let v = self.affine.project_direction(v);
        let beta = self.ray_exit(&self.anchor, &v);
        self.anchor.iter().zip(&v).map(|(a, b)| a + beta * b).collect()
    }

    /// The separator attached to the boundary point of `C` where the segment
    /// from the anchor to `y` leaves `C`. `None` if `y` is in `C` or the body
    /// has no outer/inner part.
    pub fn exit_separator(&self, y: &[f64]) -> Result<Option<Separator>> {
        let (Some(c), Some(inner)) = (&self.outer, &self.inner) else {
            return Ok(None);
        };
        if c.membership(y, tol::EXACT) {
            return Ok(None);
        }
        let v: Vec<f64> = y.iter().zip(&self.anchor).map(|(a, b)| a - b).collect();
        let v = self.affine.project_direction(&v);
        let beta = exit_parameter(c.cloud(), &self.anchor, &v, c.ray_target(), 1e-13 * c.scale().max(1.0));
        let x: Vec<f64> = self.anchor.iter().zip(&v).map(|(a, b)| a + beta * b).collect();
        Ok(Some(separator_at(c, self.face.as_ref(), inner, &x)?))
    }
}

/// Supporting half-space of `C` at a face point `x`.
fn face_halfspace(c: &ConvexBody, face: Option<&FaceSpec>, x: &[f64]) -> Result<HalfSpace> {
    if let Some(u) = face.and_then(|f| f.exposing()) {
        let h = HalfSpace::new(u, face.unwrap().generators()[0].clone())?;
        if h.value(c.interior_point()) <= tol::BOUNDARY {
            return Err(Error::NotAFace("exposing hyperplane does not have the interior strictly inside".into()));
        }
        return Ok(h);
    }
    // Outward offset, then the supporting hyperplane at the projection.
    let ci = c.interior_point();
    let out: Vec<f64> = x.iter().zip(ci).map(|(a, b)| a + 1e-3 * (a - b)).collect();
    let proj = c.project(&out)?;
    let inward: Vec<f64> = proj.point.iter().zip(&out).map(|(a, b)| a - b).collect();
    let inward = c.affine_hull().project_direction(&inward);
    let p = normalized(&inward).ok_or(Error::Numeric { what: "supporting half-space", residual: 0.0 })?;
    let level = c.cloud().iter().map(|g| dot(g, &p)).fold(f64::INFINITY, f64::min);
    let h = HalfSpace { w: x.iter().zip(&p).map(|(a, b)| a + (level - dot(x, &p)) * b).collect(), p };
    if h.value(ci) <= tol::BOUNDARY {
        return Err(Error::Numeric { what: "no strict supporting half-space at a face point", residual: h.value(ci) });
    }
    Ok(h)
}

fn separator_at(c: &ConvexBody, face: Option<&FaceSpec>, inner: &ConvexBody, x: &[f64]) -> Result<Separator> {
    let d = inner.distance(x)?;
    if d <= tol::BOUNDARY {
        Ok(Separator::Half(face_halfspace(c, face, x)?))
    } else {
        let valid = |b: &Ball| b.r > 0.0 && b.r.is_finite() && inner.cloud().iter().all(|g| b.excess(g) <= tol::EXACT * b.r.max(1.0));
        if let Ok(b) = inversion_ball(inner.cloud(), x) {
            if valid(&b) {
                return Ok(Separator::Ball(b));
            }
        }
        match constructive_ball(inner.cloud(), x) {
            Ok(b) if valid(&b.ball) => Ok(Separator::Ball(b.ball)),
            // Too close to the inner body for a ball in floating point; the
            // supporting half-space of C at x still contains it.
            _ => Ok(Separator::Half(face_halfspace(c, None, x)?)),
        }
    }
}

/// Builds `E` with `D ⊆ E ⊆ C` from the body's points and `boundary_count`
/// ray-shot boundary samples.
pub fn build_sandwich(
    c: &ConvexBody,
    face: &FaceSpec,
    inner: &ConvexBody,
    boundary_count: usize,
    seed: u64,
) -> Result<SandwichBody> {
    let ic = inner.interior_point();
    if !c.membership(ic, tol::EXACT) {
        return Err(Error::Precondition("inner body's interior point is outside the outer body".into()));
    }
    let mut points: Vec<Vec<f64>> = c.cloud().iter().map(|p| p.to_vec()).collect();
    if boundary_count > 0 {
        points.extend(c.sample_boundary(boundary_count, seed)?);
    }
    let seps: Vec<Separator> = points.par_iter().map(|x| separator_at(c, Some(face), inner, x)).collect::<Result<_>>()?;
    let mut set = SeparatorSet::default();
    for (x, s) in points.into_iter().zip(seps) {
        match s {
            Separator::Half(h) => {
                set.halfspaces.push(h);
                set.halfspace_sources.push(x);
            }
            Separator::Ball(b) => {
                set.balls.push(b);
                set.ball_sources.push(x);
            }
        }
    }
    Ok(SandwichBody {
        separators: set,
        affine: c.affine_hull().clone(),
        outer: Some(c.clone()),
        inner: Some(inner.clone()),
        face: Some(face.clone()),
        anchor: ic.to_vec(),
    })
}

/// Adds separators at points of `∂C` where `C`, not the separators, bounds
/// `E` along random rays from the anchor. Each round shoots `count` rays and
/// stops early once none of them exits through `C`. Returns the number of
/// separators added.
pub fn densify(e: &mut SandwichBody, count: usize, rounds: usize, seed: u64) -> Result<usize> {
    let (Some(c), Some(inner)) = (e.outer.clone(), e.inner.clone()) else {
        return Ok(0);
    };
    let mut added = 0;
    for round in 0..rounds {
        let dirs = c.directions(count, seed.wrapping_add(round as u64))?;
        let found: Vec<Option<(Vec<f64>, Separator)>> = dirs
            .par_iter()
            .map(|v| {
                let v = e.affine.project_direction(v);
                let beta_sep = e.separators.ray_exit(&e.anchor, &v);
                let y: Vec<f64> = e.anchor.iter().zip(&v).map(|(p, d)| p + beta_sep * d).collect();
                if beta_sep.is_finite() && c.membership(&y, tol::EXACT * 1e-3) {
                    return Ok(None);
                }
                let beta = exit_parameter(c.cloud(), &e.anchor, &v, c.ray_target(), 1e-13 * c.scale().max(1.0));
                let x: Vec<f64> = e.anchor.iter().zip(&v).map(|(p, d)| p + beta * d).collect();
                Ok(Some((x.clone(), separator_at(&c, e.face.as_ref(), &inner, &x)?)))
            })
            .collect::<Result<_>>()?;
        let before = added;
        for (x, s) in found.into_iter().flatten() {
            added += 1;
            match s {
                Separator::Half(h) => {
                    e.separators.halfspaces.push(h);
                    e.separators.halfspace_sources.push(x);
                }
                Separator::Ball(b) => {
                    e.separators.balls.push(b);
                    e.separators.ball_sources.push(x);
                }
            }
        }
        if added == before {
            break;
        }
    }
    Ok(added)
}

/// A chord of E whose midpoint lies on the boundary.
#[derive(Clone, Debug, Serialize)]
pub struct FlatSegment {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// Distance from the midpoint to the boundary along the anchor ray.
    pub midpoint_gap: f64,
    /// Distances of the endpoints from the face (or the inner body when no
    /// face is attached).
    pub endpoint_offsets: [f64; 2],
}

/// Chords shorter than this are inconclusive: even a boundary whose radius of
/// curvature equals the body's diameter would leave a midpoint gap of less
/// than ten times the flatness threshold.
fn min_chord_length(e: &SandwichBody) -> f64 {
    let scale = match (&e.outer, &e.inner) {
        (Some(c), _) => c.scale(),
        (None, Some(d)) => d.scale(),
        _ => {
            let r = e.separators.balls.iter().map(|b| b.r).fold(0.0, f64::max);
            if r > 0.0 { 2.0 * r } else { 1.0 }
        }
    };
    (80.0 * scale * tol::FLAT_SEGMENT).sqrt()
}

/// Chord probes for flat boundary pieces. Each probe joins the boundary
/// points hit along two random directions and checks whether the chord's
/// midpoint is itself a boundary point.
pub fn face_probe(e: &SandwichBody, probes: usize, seed: u64) -> Result<Vec<FlatSegment>> {
    let k = e.affine.dim();
    if k == 0 {
        return Err(Error::ZeroDimensional);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs: Vec<(Vec<f64>, Vec<f64>)> = (0..probes)
        .map(|_| {
            let mut draw = || {
                let c: Vec<f64> = (0..k).map(|_| StandardNormal.sample(&mut rng)).collect();
                e.affine.lift(&c)
            };
            (draw(), draw())
        })
        .collect();
    let min_chord = min_chord_length(e);
    let target: Option<&ConvexBody> = e.face.as_ref().map(|f| f.body()).or(e.inner.as_ref());
    let found: Vec<Option<FlatSegment>> = dirs
        .par_iter()
        .map(|(d1, d2)| {
            let u = e.boundary_point(d1);
            let v = e.boundary_point(d2);
            if dist(&u, &v) < min_chord {
                return Ok(None);
            }
            let m: Vec<f64> = u.iter().zip(&v).map(|(a, b)| 0.5 * (a + b)).collect();
            let dm: Vec<f64> = m.iter().zip(&e.anchor).map(|(a, b)| a - b).collect();
            if norm(&dm) <= tol::BOUNDARY {
                return Ok(None);
            }
            let b = e.boundary_point(&dm);
            let gap = dist(&b, &m);
            if gap > tol::FLAT_SEGMENT {
                return Ok(None);
            }
            let offsets = match target {
                Some(t) => [t.distance(&u)?, t.distance(&v)?],
                None => [0.0, 0.0],
            };
            Ok(Some(FlatSegment { u, v, midpoint_gap: gap, endpoint_offsets: offsets }))
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// Sampling and seeding knobs for the pipeline stages.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineParams {
    pub boundary_count: usize,
    pub seed: u64,
    pub check_samples: usize,
    pub probes: usize,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self { boundary_count: 2048, seed: 0, check_samples: 2000, probes: 2000 }
    }
}

/// `conv(D ∪ Q)` where `Q` approximates `C` from inside with gap
/// `dist(·, H)^2`, so that the result shares the supporting hyperplanes of
/// `C` along `F`.
pub fn fatten(
    c: &ConvexBody,
    face: &FaceSpec,
    d: &ConvexBody,
    h: &HalfSpace,
    boundary_count: usize,
    seed: u64,
) -> Result<(ConvexBody, InnerApproxResult)> {
    let exposes = FaceSpec::new(c, face.indices().to_vec(), Some(h.p.clone()));
    if let Err(e) = exposes {
        return Err(Error::NotAFace(format!("hyperplane does not expose the face: {e}")));
    }
    for (i, g) in face.generators().iter().enumerate() {
        if h.value(g).abs() > tol::SAMPLE {
            return Err(Error::NotAFace(format!("face generator {i} is off the hyperplane by {:e}", h.value(g))));
        }
    }
    for g in d.cloud().iter() {
        if !c.membership(g, tol::SAMPLE) {
            return Err(Error::Precondition("inner body is not contained in the outer body".into()));
        }
    }
    let phi = GapFunction::hyperplane_power(&h.p, h.w.clone(), 2.0)?;
    let q = build_inner_approx(c, face, &phi, boundary_count, seed)?;
    let mut gens: Vec<Vec<f64>> = d.cloud().iter().map(|p| p.to_vec()).collect();
    gens.extend(q.c_prime.generators().iter().cloned());
    Ok((ConvexBody::from_points(c.dim(), gens)?, q))
}

/// Output of the refinement step.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub fattened: ConvexBody,
    pub sandwich: SandwichBody,
}

/// Fattens `inner` along the exposed face and sandwiches the result.
pub fn refine(c: &ConvexBody, face: &FaceSpec, inner: &ConvexBody, params: &PipelineParams) -> Result<Refinement> {
    let u = face
        .exposing()
        .ok_or_else(|| Error::InvalidFace("refinement needs an exposing functional".into()))?;
    let h = HalfSpace::new(u, face.generators()[0].clone())?;
    let (g, _) = fatten(c, face, inner, &h, params.boundary_count, params.seed.wrapping_add(17))?;
    let mut e = build_sandwich(c, face, &g, params.boundary_count, params.seed.wrapping_add(29))?;
    densify(&mut e, 16 * params.boundary_count, 2, params.seed.wrapping_add(31))?;
    Ok(Refinement { fattened: g, sandwich: e })
}

/// Inner approximation, fattening and sandwich with sampled stage checks.
#[derive(Clone, Debug)]
pub struct Amalgamation {
    pub inner: InnerApproxResult,
    pub refinement: Refinement,
    pub checks: Vec<Check>,
}

pub fn amalgamate(c: &ConvexBody, face: &FaceSpec, phi: &GapFunction, params: &PipelineParams) -> Result<Amalgamation> {
    if face.exposing().is_none() {
        return Err(Error::InvalidFace("amalgamation needs an exposed face with its functional".into()));
    }
    let inner = build_inner_approx(c, face, phi, params.boundary_count, params.seed)?;
    let refinement = refine(c, face, &inner.c_prime, params)?;
    let checks = pipeline_checks(c, face, phi, &inner, &refinement, params)?;
    Ok(Amalgamation { inner, refinement, checks })
}

/// Sampled verification of the pipeline's guarantees.
pub fn pipeline_checks(
    c: &ConvexBody,
    face: &FaceSpec,
    phi: &GapFunction,
    inner: &InnerApproxResult,
    refinement: &Refinement,
    params: &PipelineParams,
) -> Result<Vec<Check>> {
    let n = params.check_samples;
    let seed = params.seed.wrapping_add(101);
    let e = &refinement.sandwich;
    let g = &refinement.fattened;
    let mut members = c.sample_members(n, seed)?;
    members.extend(c.sample_boundary(n, seed.wrapping_add(1))?);

    let gap: f64 = members
        .par_iter()
        .map(|x| Ok(inner.c_prime.distance(x)? - phi.eval(x)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut checks = vec![Check::at_most(
        "gap_bound",
        gap,
        tol::SAMPLE,
        members.len(),
        "max of dist(x, C') - phi(x) over sampled points of C",
    )];

    let inner_pts = inner.c_prime.sample_members(n, seed.wrapping_add(2))?;
    let worst_inner = inner_pts.par_iter().map(|x| e.separators.violation(x)).reduce(|| f64::NEG_INFINITY, f64::max);
    let inner_ok = inner_pts.par_iter().all(|x| e.membership(x, tol::SAMPLE));
    checks.push(Check::new("inner_in_sandwich", inner_ok, worst_inner, inner_pts.len(), "C' members are E members"));

    let dirs = c.directions(n, seed.wrapping_add(3))?;
    let e_pts: Vec<Vec<f64>> = dirs.par_iter().map(|v| e.boundary_point(v)).collect();
    let worst_outer = e_pts
        .par_iter()
        .map(|x| c.distance(x))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(Check::at_most("sandwich_in_body", worst_outer, tol::SAMPLE, e_pts.len(), "E boundary points lie in C"));

    let sep_worst = g
        .cloud()
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|x| e.separators.violation(x))
        .reduce(|| f64::NEG_INFINITY, f64::max);
    checks.push(Check::at_most(
        "separators_contain_fattened",
        sep_worst,
        tol::SAMPLE,
        g.cloud().len(),
        "every separator contains every generator of G",
    ));

    let touching = face.generators().iter().all(|x| e.membership(x, tol::SAMPLE));
    checks.push(Check::new("face_in_sandwich", touching, 0.0, face.generators().len(), "F generators are E members"));

    let segs = face_probe(e, params.probes, seed.wrapping_add(4))?;
    let worst_seg = segs.iter().map(|s| s.endpoint_offsets[0].max(s.endpoint_offsets[1])).fold(0.0, f64::max);
    checks.push(Check::at_most(
        "face_probe",
        worst_seg,
        1e-5,
        params.probes,
        format!("statistical: {} flat chords detected; worst endpoint distance from F", segs.len()),
    ));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> ConvexBody {
        ConvexBody::from_points(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap()
    }

    #[test]
    fn separator_json_shape() {
        let mut s = SeparatorSet::default();
        s.halfspaces.push(HalfSpace::new(&[1.0, 0.0], vec![0.0, 0.0]).unwrap());
        s.balls.push(Ball::new(vec![0.0, 0.0], 2.0).unwrap());
        let v: serde_json::Value = serde_json::from_str(&s.to_json().unwrap()).unwrap();
        assert_eq!(v["halfspaces"][0]["p"][0], 1.0);
        assert_eq!(v["balls"][0]["r"], 2.0);
    }

    #[test]
    fn square_sandwich_chain() {
        let sq = square();
        let face = FaceSpec::new(&sq, vec![0, 2], Some(vec![1.0, 0.0])).unwrap();
        let d = ConvexBody::from_points(2, vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]]).unwrap();
        let e = build_sandwich(&sq, &face, &d, 256, 3).unwrap();
        for g in d.generators() {
            assert!(e.membership(g, tol::SAMPLE));
        }
        assert!(!e.membership(&[1.0, 0.5], tol::SAMPLE));
        assert!(!e.membership(&[1.1, 0.5], tol::SAMPLE));
        let y = [1.5, 0.5];
        let sep = e.exit_separator(&y).unwrap().unwrap();
        assert!(!sep.contains(&y, 0.0));
        for seg in face_probe(&e, 400, 1).unwrap() {
            assert!(seg.endpoint_offsets[0] <= 1e-5 && seg.endpoint_offsets[1] <= 1e-5, "{seg:?}");
        }
    }

    #[test]
    fn single_ball_has_no_flat_chords() {
        let mut s = SeparatorSet::default();
        s.balls.push(Ball::new(vec![0.0, 0.0], 1.0).unwrap());
        let e = SandwichBody::from_separators(s, AffineSubspace::full(2), vec![0.0, 0.0]);
        assert!(face_probe(&e, 500, 2).unwrap().is_empty());
    }

    #[test]
    fn fatten_disk_keeps_tangent() {
        let n = 256;
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / n as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
        let disk = ConvexBody::from_points(2, pts).unwrap();
        let face = FaceSpec::new(&disk, vec![0], Some(vec![-1.0, 0.0])).unwrap();
        let d = ConvexBody::from_points(2, vec![vec![1.0, 0.0]]).unwrap();
        let h = HalfSpace::new(&[-1.0, 0.0], vec![1.0, 0.0]).unwrap();
        let (g, _) = fatten(&disk, &face, &d, &h, 512, 4).unwrap();
        assert!(g.membership(&[1.0, 0.0], tol::EXACT));
        assert!((g.support_value(&[1.0, 0.0]) - 1.0).abs() < 1e-12);
        for p in g.generators() {
            assert!(disk.membership(p, tol::EXACT));
        }
    }
}
