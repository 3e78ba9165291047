//! Projectional exposedness: an idempotent map sending the cone onto the
//! face.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::json;

use super::bodies::{Curve, Region, L, S, X, Y, Z};
use super::certificate::{Certificate, CertificateKind, Witness};
use super::map::IdempotentMap;
use crate::body::{ConvexBody, CurveSpec};
use crate::check::Check;
use crate::error::Result;
use crate::linalg::norm;
use crate::poly::{q, q_from_f64, Poly};
use crate::tol;

const SIGN_DEPTH: usize = 24;

/// Residual polynomial certifying that the planar curve `(x(t), y(t))`
/// lies in `region` on `[0, 1]`: the disk residual `2y - x^2 - y^2 >= 0`, or
/// the cubic residual `±x^3 - (y - 1)^3 - 1 <= 0` with the side conditions.
pub fn region_residual(region: Region, x: &Poly, y: &Poly) -> Poly {
    let one = Poly::constant(q(1));
    match region {
        Region::D => &(&y.scale(&q(2)) - &(x * x)) - &(y * y),
        Region::D1 | Region::D2 => {
            let xs = if region == Region::D1 { x.clone() } else { -x };
            let ym = y - &one;
            &(&xs.pow(3) - &ym.pow(3)) - &one
        }
    }
}

/// Exact sign certificate of `region_residual` and the side conditions.
pub fn region_certified(region: Region, x: &Poly, y: &Poly) -> bool {
    let r = region_residual(region, x, y);
    match region {
        Region::D => r.nonnegative_on_unit_interval(SIGN_DEPTH),
        Region::D1 | Region::D2 => {
            let xs = if region == Region::D1 { x.clone() } else { -x };
            r.nonpositive_on_unit_interval(SIGN_DEPTH)
                && xs.nonnegative_on_unit_interval(SIGN_DEPTH)
                && y.nonnegative_on_unit_interval(SIGN_DEPTH)
                && (&Poly::constant(q(1)) - y).nonnegative_on_unit_interval(SIGN_DEPTH)
        }
    }
}

/// One closed-form identity: the residual of `P curve(t)` for `region`.
#[derive(Clone, Debug)]
pub struct CurveIdentity {
    pub curve: Curve,
    pub region: Region,
    pub image: [Poly; 3],
    pub residual: Poly,
    pub expected: Poly,
}

impl CurveIdentity {
    pub fn holds(&self) -> bool {
        self.residual == self.expected && region_certified(self.region, &self.image[1], &self.image[2])
    }
}

fn factored(curve_residual: &str) -> Poly {
    let t = Poly::t();
    let one = Poly::constant(q(1));
    let t2 = t.pow(2);
    let t3 = t.pow(3);
    match curve_residual {
        // t^2 (1 - t^2)
        "quadratic" => &t2 * &(&one - &t2),
        // t^3 (2 - t^3)
        "cubic" => &t3 * &(&Poly::constant(q(2)) - &t3),
        // (1 - t) t^3 (t^2 + t + 1) (t^3 - 2)
        _ => &(&(&(&one - &t) * &t3) * &(&(&t2 + &t) + &one)) * &(&t3 - &Poly::constant(q(2))),
    }
}

/// The closed-form residuals for `P1` (and, mirrored, `P2`); `None` for any
/// other map.
pub fn closed_form_identities(p: &IdempotentMap) -> Option<Vec<CurveIdentity>> {
    let (beta_region, gamma_region, cusp) = if p.matrix == IdempotentMap::p1().matrix {
        (Region::D1, Region::D, Curve::Beta)
    } else if p.matrix == IdempotentMap::p2().matrix {
        (Region::D, Region::D2, Curve::Gamma)
    } else {
        return None;
    };
    Some(
        Curve::ALL
            .iter()
            .map(|&c| {
                let img = p.apply_poly(&c.exact());
                let region = match c {
                    Curve::Alpha => Region::D,
                    Curve::Beta => beta_region,
                    Curve::Gamma => gamma_region,
                };
                let expected = match c {
                    Curve::Alpha => factored("quadratic"),
                    _ if c == cusp => factored("cusp"),
                    _ => factored("cubic"),
                };
                let residual = region_residual(region, &img[X], &img[Y]);
                CurveIdentity { curve: c, region, image: [img[L].clone(), img[X].clone(), img[Y].clone()], residual, expected }
            })
            .collect(),
    )
}

fn curve_polys(c: &CurveSpec) -> Vec<Poly> {
    c.coeffs.iter().map(|row| Poly::new(row.iter().map(|&x| q_from_f64(x).expect("finite")).collect())).collect()
}

/// Distance of `P g` from the face slice after rescaling to `l = 1`; the
/// origin counts as the cone's apex.
fn mapped_distance(p: &IdempotentMap, face_slice: &ConvexBody, g: &[f64]) -> Result<f64> {
    let w = p.apply(g);
    let l = w[L];
    if l > tol::EXACT {
        let v: Vec<f64> = w.iter().map(|x| x / l).collect();
        face_slice.distance(&v)
    } else {
        Ok(norm(&w))
    }
}

/// Certifies `P(K) ⊆ F` for the cone `K` and face `F` given by their
/// slices. Idempotency is checked first and is an error when it fails.
pub fn verify_pexposed_map(
    subject: &str,
    p: &IdempotentMap,
    cone_slice: &ConvexBody,
    face_slice: &ConvexBody,
) -> Result<Certificate> {
    p.check_idempotent()?;
    let defect = p.idempotency_defect();
    let mut checks = vec![Check::at_most("idempotent", defect, tol::EXACT, 1, "max |P P - P|")];
    let mut margins = BTreeMap::new();
    let mut witness = None;

    let gens: Vec<&[f64]> = cone_slice.cloud().iter().collect();
    let d: Vec<f64> = gens.par_iter().map(|g| mapped_distance(p, face_slice, g)).collect::<Result<_>>()?;
    let (wi, worst) = d.iter().copied().enumerate().fold((0, 0.0), |a, (i, x)| if x > a.1 { (i, x) } else { a });
    checks.push(Check::at_most(
        "generators_mapped_into_face",
        worst,
        tol::SAMPLE,
        gens.len(),
        "distance of P g (rescaled to l = 1) from the face slice",
    ));
    if worst > tol::SAMPLE {
        witness = Some(Witness { description: format!("generator {wi} maps outside the face"), point: gens[wi].to_vec(), value: worst });
    }
    margins.insert("max_mapped_distance".into(), worst);

    // Face fixed: P acts as the identity on the face generators.
    let fixed = face_slice
        .cloud()
        .iter()
        .map(|g| norm(&p.apply(g).iter().zip(g).map(|(a, b)| a - b).collect::<Vec<_>>()))
        .fold(0.0, f64::max);
    checks.push(Check::at_most("face_fixed", fixed, tol::EXACT, face_slice.cloud().len(), "max |P g - g| on face generators"));

    // Exact images of the curves.
    let allowed: Vec<Region> = [Region::D, Region::D1, Region::D2]
        .into_iter()
        .filter(|r| r.boundary_points().iter().all(|&pt| face_slice.membership(&super::bodies::lift(pt), tol::SAMPLE)))
        .collect();
    let mut curve_log = Vec::new();
    let mut curves_ok = true;
    for (i, c) in cone_slice.curves().iter().enumerate() {
        let img = p.apply_poly(&curve_polys(c));
        let planar = img[Z].is_zero() && img[S].is_zero() && img[L] == Poly::constant(q(1));
        let region = if planar && c.t_range == [0.0, 1.0] {
            allowed.iter().copied().find(|&r| region_certified(r, &img[X], &img[Y]))
        } else {
            None
        };
        curves_ok &= region.is_some();
        curve_log.push(json!({
            "curve": i,
            "image": img.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "region": region.map(|r| r.name()),
            "residual": region.map(|r| region_residual(r, &img[X], &img[Y]).to_string()),
        }));
    }
    if !cone_slice.curves().is_empty() {
        checks.push(Check::new(
            "curve_images_in_face",
            curves_ok,
            0.0,
            cone_slice.curves().len(),
            format!("exact sign certificates against the regions inside the face: {:?}", allowed.iter().map(|r| r.name()).collect::<Vec<_>>()),
        ));
    }

    let mut identities = Vec::new();
    if let Some(ids) = closed_form_identities(p) {
        let ok = ids.iter().all(|id| id.holds());
        for id in &ids {
            identities.push(json!({
                "curve": id.curve.name(),
                "region": id.region.name(),
                "image": id.image.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                "residual": id.residual.to_string(),
                "holds": id.holds(),
            }));
        }
        checks.push(Check::new("closed_form_residuals", ok, 0.0, ids.len(), "exact residual polynomials of the mapped curves"));
    }
    let evidence = json!({ "map": p, "curves": curve_log, "identities": identities });
    Ok(Certificate::new(CertificateKind::PExposed, subject, checks, evidence, margins, witness))
}
