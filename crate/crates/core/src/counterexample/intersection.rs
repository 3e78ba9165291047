//! `conv(D ∪ D1) ∩ conv(D ∪ D2) = D`, checked by sampling in the plane.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::bodies::{disk_cone_residual, lift, Region};
use super::certificate::{Certificate, CertificateKind, Witness};
use crate::body::ConvexBody;
use crate::check::Check;
use crate::error::Result;
use crate::tol;

/// The three planar hulls `D`, `conv(D ∪ D1)`, `conv(D ∪ D2)`.
pub struct PlanarSlices {
    pub d: ConvexBody,
    pub f1: ConvexBody,
    pub f2: ConvexBody,
}

impl PlanarSlices {
    pub fn new() -> Result<Self> {
        let ring: Vec<Vec<f64>> = Region::D.boundary_points().iter().map(|p| p.to_vec()).collect();
        let with = |r: Region| {
            let mut g = ring.clone();
            g.extend(r.boundary_points().iter().map(|p| p.to_vec()));
            ConvexBody::from_points(2, g)
        };
        Ok(Self { d: ConvexBody::from_points(2, ring.clone())?, f1: with(Region::D1)?, f2: with(Region::D2)? })
    }

    /// `(in F1, in F2, in D)` at tolerance `tol`.
    pub fn classify(&self, p: &[f64], tol: f64) -> (bool, bool, bool) {
        (self.f1.membership(p, tol), self.f2.membership(p, tol), self.d.membership(p, tol))
    }
}

/// Two-sided sampled check: disk samples lie in both face slices, and
/// uniform samples of the box `[-1, 1] x [0, 2]` are in both face slices
/// exactly when they are in the disk.
pub fn verify_face_intersection(samples: usize, seed: u64) -> Result<Certificate> {
    let s = PlanarSlices::new()?;
    let tol = tol::SAMPLE;

    let disk = Region::D.sampler();
    let missing: Vec<usize> = disk
        .par_iter()
        .enumerate()
        .filter(|(_, p)| {
            let (a, b, _) = s.classify(&p[..], tol);
            !(a && b)
        })
        .map(|(i, _)| i)
        .collect();
    let quad = disk.iter().map(|&p| -disk_cone_residual(&lift(p))).fold(f64::NEG_INFINITY, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<[f64; 2]> = (0..samples).map(|_| [rng.random_range(-1.0..=1.0), rng.random_range(0.0..=2.0)]).collect();
    let cls: Vec<(bool, bool, bool)> = pts.par_iter().map(|p| s.classify(&p[..], tol)).collect();
    let both = cls.iter().filter(|c| c.0 && c.1).count();
    let in_d = cls.iter().filter(|c| c.2).count();
    let mismatches: Vec<usize> = cls.iter().enumerate().filter(|(_, c)| (c.0 && c.1) != c.2).map(|(i, _)| i).collect();

    let checks = vec![
        Check::new("disk_in_both_faces", missing.is_empty(), missing.len() as f64, disk.len(), "disk sampler points in F1 and F2 slices"),
        Check::at_most("face_quadratic", quad, tol, disk.len(), "max of -(2yl - x^2 - y^2) over disk samples"),
        Check::new(
            "intersection_is_disk",
            mismatches.is_empty(),
            mismatches.len() as f64,
            samples,
            format!("{both} samples in both face slices, {in_d} in the disk"),
        ),
    ];
    let witness = mismatches
        .first()
        .map(|&i| Witness { description: format!("sample {i}: in both faces = {}, in disk = {}", cls[i].0 && cls[i].1, cls[i].2), point: lift(pts[i]), value: 0.0 })
        .or_else(|| missing.first().map(|&i| Witness { description: format!("disk sample {i} outside a face slice"), point: lift(disk[i]), value: 0.0 }));
    let mut margins = BTreeMap::new();
    margins.insert("mismatches".into(), mismatches.len() as f64);
    let evidence = json!({ "seed": seed, "samples": samples, "in_both": both, "in_disk": in_d, "disk_samples": disk.len() });
    Ok(Certificate::new(CertificateKind::FaceIntersection, "F1 ∩ F2 = F", checks, evidence, margins, witness))
}
