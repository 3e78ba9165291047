//! Exposedness certificates for a face of a cone, checked on the slice.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde_json::json;

use super::bodies::{Curve, EXPOSING};
use super::certificate::{Certificate, CertificateKind, Witness};
use crate::body::{ConvexBody, CurveSpec};
use crate::check::Check;
use crate::error::{Error, Result};
use crate::poly::{q_from_f64, Poly, Q};
use crate::tol;

const SIGN_DEPTH: usize = 24;

fn exact_vec(v: &[f64]) -> Result<Vec<Q>> {
    v.iter().map(|&x| q_from_f64(x).ok_or(Error::Numeric { what: "non-finite coordinate", residual: x })).collect()
}

fn exact_dot(u: &[Q], v: &[f64]) -> Q {
    u.iter().zip(v).fold(Q::zero(), |acc, (a, &b)| acc + a * q_from_f64(b).expect("finite"))
}

/// `<u, curve(t)>` as an exact polynomial.
pub fn curve_pairing(u: &[Q], curve: &CurveSpec) -> Poly {
    curve.coeffs.iter().zip(u).fold(Poly::zero(), |acc, (c, a)| {
        let p = Poly::new(c.iter().map(|&x| q_from_f64(x).expect("finite")).collect());
        &acc + &p.scale(a)
    })
}

/// `<e_s, curve(t)> - t^3` for each of the three curves; all zero.
pub fn curve_exposure_residuals() -> Vec<(Curve, Poly)> {
    let t3 = Poly::monomial(num_traits::One::one(), 3);
    Curve::ALL
        .iter()
        .map(|&c| {
            let v = c.exact();
            let s = EXPOSING.iter().zip(&v).fold(Poly::zero(), |acc, (&a, p)| &acc + &p.scale(&q_from_f64(a).unwrap()));
            (c, &s - &t3)
        })
        .collect()
}

/// Certifies that `u` exposes the face whose slice is `fhat` in the cone
/// whose slice is `khat`.
///
/// Generator checks are exact in rational arithmetic; curves are checked
/// as polynomials with Bernstein sign certificates, so the sampled curve
/// points only matter through the face-membership check at the zero set.
pub fn verify_exposed(subject: &str, khat: &ConvexBody, fhat: &ConvexBody, u: &[f64]) -> Result<Certificate> {
    if u.len() != khat.dim() || fhat.dim() != khat.dim() {
        return Err(Error::Precondition("functional and bodies must share a dimension".into()));
    }
    let uq = exact_vec(u)?;
    let gens: Vec<&[f64]> = khat.cloud().iter().collect();
    let values: Vec<Q> = gens.par_iter().map(|g| exact_dot(&uq, g)).collect();

    let mut checks = Vec::new();
    let mut witness = None;
    let mut margins = BTreeMap::new();

    let neg = values.iter().enumerate().filter(|(_, v)| v.is_negative()).min_by(|a, b| a.1.cmp(b.1));
    let min_val = values.iter().min().cloned().unwrap_or_else(Q::zero);
    let min_f = num_traits::ToPrimitive::to_f64(&min_val).unwrap_or(0.0);
    checks.push(Check::new(
        "nonnegative_on_generators",
        neg.is_none(),
        -min_f,
        values.len(),
        "exact <u, g> >= 0 over every generator and curve sample of the cone slice",
    ));
    if let Some((i, v)) = neg {
        witness = Some(Witness {
            description: format!("generator {i} has <u, g> < 0"),
            point: gens[i].to_vec(),
            value: num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::NAN),
        });
    }

    let fvals: Vec<(usize, Q)> = fhat.cloud().iter().enumerate().map(|(i, g)| (i, exact_dot(&uq, g))).collect();
    let off = fvals.iter().filter(|(_, v)| !v.is_zero()).max_by(|a, b| a.1.abs().cmp(&b.1.abs()));
    let worst_face = off.map(|(_, v)| num_traits::ToPrimitive::to_f64(&v.abs()).unwrap_or(f64::NAN)).unwrap_or(0.0);
    checks.push(Check::new("vanishes_on_face", off.is_none(), worst_face, fvals.len(), "exact <u, g> = 0 on face generators"));
    if let (None, Some((i, v))) = (&witness, off) {
        witness = Some(Witness {
            description: format!("face generator {i} is off the hyperplane"),
            point: fhat.cloud().point(*i).to_vec(),
            value: num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::NAN),
        });
    }
    margins.insert("max_abs_on_face".into(), worst_face);

    // The zero set of <u, .> on the cone slice must be the face.
    let zeros: Vec<usize> = values.iter().enumerate().filter(|(_, v)| v.is_zero()).map(|(i, _)| i).collect();
    let stray: Vec<(usize, f64)> = zeros
        .par_iter()
        .map(|&i| Ok((i, fhat.distance(gens[i])?)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(_, d)| *d > tol::SAMPLE)
        .collect();
    let worst_stray = stray.iter().map(|s| s.1).fold(0.0, f64::max);
    checks.push(Check::new(
        "zero_set_in_face",
        stray.is_empty(),
        worst_stray,
        zeros.len(),
        "generators on the hyperplane lie in the face slice",
    ));
    if let (None, Some(&(i, d))) = (&witness, stray.first()) {
        witness = Some(Witness { description: format!("generator {i} is on the hyperplane but not in the face"), point: gens[i].to_vec(), value: d });
    }
    let min_off_face = values
        .iter()
        .filter(|v| v.is_positive())
        .min()
        .map(|v| num_traits::ToPrimitive::to_f64(v).unwrap_or(0.0))
        .unwrap_or(0.0);
    margins.insert("min_positive_pairing".into(), min_off_face);

    let mut curve_ok = true;
    let mut curve_log = Vec::new();
    for (i, c) in khat.curves().iter().enumerate() {
        let p = curve_pairing(&uq, c);
        let ok = curve_sign_ok(&p, c, fhat)?;
        if !ok && witness.is_none() {
            let t = c.parameters().into_iter().min_by(|a, b| p.eval_f64(*a).total_cmp(&p.eval_f64(*b))).unwrap_or(0.0);
            witness = Some(Witness { description: format!("curve {i} at t = {t}"), point: c.eval(t), value: p.eval_f64(t) });
        }
        curve_ok &= ok;
        curve_log.push(json!({ "curve": i, "pairing": p.to_string(), "positive_off_zero": ok }));
    }
    checks.push(Check::new(
        "curve_pairings",
        curve_ok,
        0.0,
        khat.curves().len(),
        "<u, curve(t)> = t^k q(t) with q > 0 on [0, 1] and curve(0) in the face when k > 0",
    ));

    let evidence = json!({ "u": u, "curves": curve_log, "zero_generators": zeros.len() });
    Ok(Certificate::new(CertificateKind::Exposed, subject, checks, evidence, margins, witness))
}

fn curve_sign_ok(p: &Poly, c: &CurveSpec, fhat: &ConvexBody) -> Result<bool> {
    if p.is_zero() {
        // The whole curve lies on the hyperplane.
        for x in c.sample_points() {
            if fhat.distance(&x)? > tol::SAMPLE {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    // Rescale the parameter range onto [0, 1].
    let lo = exact_vec(&[c.t_range[0], c.t_range[1] - c.t_range[0]])?;
    let affine = Poly::new(lo);
    let p = p.coeffs().iter().rev().fold(Poly::zero(), |acc, a| &(&acc * &affine) + &Poly::constant(a.clone()));
    let k = p.valuation().unwrap_or(0);
    if !p.shift_down(k).positive_on_unit_interval(SIGN_DEPTH) {
        return Ok(false);
    }
    if k > 0 && fhat.distance(&c.eval(c.t_range[0]))? > tol::SAMPLE {
        return Ok(false);
    }
    Ok(true)
}
