//! The curves, disks and slice bodies of the five-dimensional construction.
//!
//! Coordinates are `(l, x, y, z, s)`. Cones are handled through their
//! slices at `l = 1`.

use std::f64::consts::{PI, TAU};

use crate::body::{ConvexBody, CurveSpec};
use crate::error::Result;
use crate::face::FaceSpec;
use crate::poly::{qr, Poly, Q};
use num_traits::One;
use serde::{Deserialize, Serialize};

pub const L: usize = 0;
pub const X: usize = 1;
pub const Y: usize = 2;
pub const Z: usize = 3;
pub const S: usize = 4;

/// Vertices on the boundary circle of the disk; a multiple of four so that
/// `(x, y) = (0, 0)` and `(0, 2)` are vertices.
pub const DISK_RING: usize = 2048;
/// Chebyshev samples per curve; odd so that `t = 1/2` is a node.
pub const CURVE_SAMPLES: usize = 1025;
/// Samples of each parametrization of the curved side of `D1`.
pub const CUSP_SAMPLES: usize = 512;

/// Functional exposing the disk's cone (and `F1`, `F2`).
pub const EXPOSING: [f64; 5] = [0.0, 0.0, 0.0, 0.0, 1.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Curve {
    Alpha,
    Beta,
    Gamma,
}

impl Curve {
    pub const ALL: [Curve; 3] = [Curve::Alpha, Curve::Beta, Curve::Gamma];

    pub fn name(self) -> &'static str {
        match self {
            Curve::Alpha => "alpha",
            Curve::Beta => "beta",
            Curve::Gamma => "gamma",
        }
    }

    /// Exact coordinate polynomials.
    pub fn exact(self) -> [Poly; 5] {
        let one = Poly::constant(Q::one());
        let t = Poly::t();
        let t2 = Poly::monomial(Q::one(), 2);
        let t3 = Poly::monomial(Q::one(), 3);
        let half_t = Poly::monomial(qr(1, 2), 1);
        let neg_half_t = Poly::monomial(qr(-1, 2), 1);
        match self {
            Curve::Alpha => [one, Poly::zero(), t2, t, t3],
            Curve::Beta => [one, half_t, t3.clone(), neg_half_t, t3],
            Curve::Gamma => [one, Poly::monomial(qr(-1, 2), 1), t3.clone(), neg_half_t, t3],
        }
    }

    pub fn eval(self, t: f64) -> Vec<f64> {
        match self {
            Curve::Alpha => vec![1.0, 0.0, t * t, t, t * t * t],
            Curve::Beta => vec![1.0, 0.5 * t, t * t * t, -0.5 * t, t * t * t],
            Curve::Gamma => vec![1.0, -0.5 * t, t * t * t, -0.5 * t, t * t * t],
        }
    }

    pub fn spec(self, samples: usize) -> CurveSpec {
        let coeffs = self
            .exact()
            .iter()
            .map(|p| p.coeffs().iter().map(|c| num_traits::ToPrimitive::to_f64(c).unwrap()).collect())
            .collect();
        CurveSpec::new(coeffs).with_samples(samples)
    }
}

/// The disk and its two cubic companions, all inside the plane
/// `l = 1, z = s = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    D,
    D1,
    D2,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::D => "D",
            Region::D1 => "D1",
            Region::D2 => "D2",
        }
    }

    /// Largest violation of the defining inequalities at a planar point
    /// (nonpositive inside).
    pub fn violation(self, x: f64, y: f64) -> f64 {
        match self {
            Region::D => x * x + (y - 1.0).powi(2) - 1.0,
            Region::D1 => (x.powi(3) - (y - 1.0).powi(3) - 1.0).max(-x).max(-y).max(y - 1.0),
            Region::D2 => (-x.powi(3) - (y - 1.0).powi(3) - 1.0).max(x).max(-y).max(y - 1.0),
        }
    }

    pub fn contains(self, x: f64, y: f64, tol: f64) -> bool {
        self.violation(x, y) <= tol
    }

    /// Planar boundary points whose hull is the region.
    pub fn boundary_points(self) -> Vec<[f64; 2]> {
        match self {
            Region::D => (0..DISK_RING)
                .map(|k| {
                    let a = TAU * k as f64 / DISK_RING as f64;
                    [a.sin(), 1.0 - a.cos()]
                })
                .collect(),
            Region::D1 => d1_boundary(),
            Region::D2 => d1_boundary().into_iter().map(|[x, y]| [-x, y]).collect(),
        }
    }

    /// Deterministic interior-and-boundary sample grid: polar `64 x 16` for
    /// the disk, the inequality-filtered `64 x 64` grid for the cubic regions.
    pub fn sampler(self) -> Vec<[f64; 2]> {
        match self {
            Region::D => {
                let mut out = Vec::with_capacity(64 * 16);
                for i in 0..64 {
                    let a = TAU * i as f64 / 64.0;
                    for j in 1..=16 {
                        let r = j as f64 / 16.0;
                        out.push([r * a.sin(), 1.0 - r * a.cos()]);
                    }
                }
                out
            }
            Region::D1 | Region::D2 => {
                let sign = if self == Region::D1 { 1.0 } else { -1.0 };
                let mut out = Vec::new();
                for i in 0..64 {
                    for j in 0..64 {
                        let x = sign * i as f64 / 63.0;
                        let y = j as f64 / 63.0;
                        if self.contains(x, y, 0.0) {
                            out.push([x, y]);
                        }
                    }
                }
                out
            }
        }
    }
}

/// The curved side `x^3 - (y - 1)^3 = 1` parametrized both by `x` and by
/// `y`, so that the flat cusp at the origin and the steep end at `(1, 1)`
/// are both resolved, plus the corner `(0, 1)`.
fn d1_boundary() -> Vec<[f64; 2]> {
    let m = CUSP_SAMPLES;
    let mut out = Vec::with_capacity(2 * m + 1);
    for k in 0..m {
        let x = k as f64 / (m - 1) as f64;
        out.push([x, 1.0 - (1.0 - x.powi(3)).cbrt()]);
    }
    for k in 1..m - 1 {
        let y = 0.5 * (1.0 - (PI * k as f64 / (m - 1) as f64).cos());
        out.push([(1.0 - (1.0 - y).powi(3)).cbrt(), y]);
    }
    out.push([0.0, 1.0]);
    out
}

/// Lifts a planar point to `(1, x, y, 0, 0)`.
pub fn lift(p: [f64; 2]) -> Vec<f64> {
    vec![1.0, p[0], p[1], 0.0, 0.0]
}

/// Drops a slice point to its planar `(x, y)` part.
pub fn planar(v: &[f64]) -> [f64; 2] {
    [v[X], v[Y]]
}

/// Residual `2yl - x^2 - y^2` of the disk cone; nonnegative on the cone.
pub fn disk_cone_residual(v: &[f64]) -> f64 {
    2.0 * v[Y] * v[L] - v[X] * v[X] - v[Y] * v[Y]
}

/// All slice bodies with their designated faces.
#[derive(Clone, Debug)]
pub struct CounterexampleBodies {
    pub c: ConvexBody,
    pub c1: ConvexBody,
    pub c2: ConvexBody,
    pub d: ConvexBody,
    pub d1: ConvexBody,
    pub d2: ConvexBody,
    pub f_slice: ConvexBody,
    pub f1_slice: ConvexBody,
    pub f2_slice: ConvexBody,
    pub face: FaceSpec,
    pub face1: FaceSpec,
    pub face2: FaceSpec,
}

impl CounterexampleBodies {
    pub fn curves(samples: usize) -> Vec<CurveSpec> {
        Curve::ALL.iter().map(|c| c.spec(samples)).collect()
    }

    pub fn cone(&self, i: usize) -> (&ConvexBody, &FaceSpec, &ConvexBody) {
        match i {
            0 => (&self.c, &self.face, &self.f_slice),
            1 => (&self.c1, &self.face1, &self.f1_slice),
            2 => (&self.c2, &self.face2, &self.f2_slice),
            _ => panic!("cone index {i} out of range"),
        }
    }

    pub fn region(&self, r: Region) -> &ConvexBody {
        match r {
            Region::D => &self.d,
            Region::D1 => &self.d1,
            Region::D2 => &self.d2,
        }
    }
}

fn region_points(r: Region) -> Vec<Vec<f64>> {
    r.boundary_points().into_iter().map(lift).collect()
}

/// Builds every slice body at the default sampling densities.
pub fn build_bodies() -> Result<CounterexampleBodies> {
    build_bodies_with(CURVE_SAMPLES)
}

pub fn build_bodies_with(curve_samples: usize) -> Result<CounterexampleBodies> {
    let disk = region_points(Region::D);
    let d1 = region_points(Region::D1);
    let d2 = region_points(Region::D2);
    let curves = CounterexampleBodies::curves(curve_samples);
    let u = Some(EXPOSING.to_vec());

    let c = ConvexBody::new(5, disk.clone(), curves.clone())?;
    let face = FaceSpec::new(&c, (0..disk.len()).collect(), u.clone())?;

    let with = |extra: &Vec<Vec<f64>>| -> Result<(ConvexBody, FaceSpec, ConvexBody)> {
        let mut gens = disk.clone();
        gens.extend(extra.iter().cloned());
        let body = ConvexBody::new(5, gens.clone(), curves.clone())?;
        let f = FaceSpec::new(&body, (0..gens.len()).collect(), u.clone())?;
        let slice = ConvexBody::from_points(5, gens)?;
        Ok((body, f, slice))
    };
    let (c1, face1, f1_slice) = with(&d1)?;
    let (c2, face2, f2_slice) = with(&d2)?;
    Ok(CounterexampleBodies {
        f_slice: ConvexBody::from_points(5, disk.clone())?,
        d: ConvexBody::from_points(5, disk)?,
        d1: ConvexBody::from_points(5, d1)?,
        d2: ConvexBody::from_points(5, d2)?,
        c,
        c1,
        c2,
        f1_slice,
        f2_slice,
        face,
        face1,
        face2,
    })
}
