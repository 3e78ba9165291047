//! The full certificate suite for the construction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bodies::{build_bodies, Curve, CounterexampleBodies, Region, EXPOSING};
use super::certificate::Certificate;
use super::exposure::verify_exposed;
use super::intersection::verify_face_intersection;
use super::map::IdempotentMap;
use super::pexposure::verify_pexposed_map;
use super::refute::{refute_pexposure_numeric, refute_pexposure_symbolic, symbolic_refutation, CurveSource, NumericGrid};
use crate::body::ConvexBody;
use crate::check::{all_passed, Check};
use crate::error::Result;
use crate::inner::{build_inner_approx, GapFunction, InnerApproxResult};
use crate::linalg::dist;
use crate::sandwich::{face_probe, refine, PipelineParams, SandwichBody};
use crate::tol;

use super::bodies::S;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub seed: u64,
    pub boundary_count: usize,
    pub skip_sandwich: bool,
    /// Base seed of the random perturbation runs.
    pub perturb_seed: u64,
    pub perturbation_runs: usize,
    pub a_min: f64,
    pub a_max: f64,
    pub a_step: f64,
    pub t_min: f64,
    pub t_count: usize,
    pub intersection_samples: usize,
    pub check_samples: usize,
    pub probes: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            boundary_count: 512,
            skip_sandwich: false,
            perturb_seed: 0,
            perturbation_runs: 5,
            a_min: -4.0,
            a_max: 4.0,
            a_step: 0.25,
            t_min: 1e-4,
            t_count: 200,
            intersection_samples: 10_000,
            check_samples: 500,
            probes: 500,
        }
    }
}

impl SuiteConfig {
    pub fn grid(&self) -> Result<NumericGrid> {
        NumericGrid::new(self.a_min, self.a_max, self.a_step, self.t_min, self.t_count)
    }

    pub fn params(&self) -> PipelineParams {
        PipelineParams { boundary_count: self.boundary_count, seed: self.seed, check_samples: self.check_samples, probes: self.probes }
    }
}

/// Checks on one sandwiched cone.
#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub name: String,
    pub separators: usize,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub passed: bool,
    pub certificates: Vec<Certificate>,
    pub stages: Vec<StageReport>,
    pub refutation_trace: Vec<String>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Inner approximation of `C` with gap `s`.
pub fn inner_with_s(bodies: &CounterexampleBodies, boundary_count: usize, seed: u64) -> Result<InnerApproxResult> {
    build_inner_approx(&bodies.c, &bodies.face, &GapFunction::Coordinate { index: S }, boundary_count, seed)
}

/// Projections of the exact curves onto `C'`, indexed `[curve][t]`.
pub fn perturbed_curves(inner: &InnerApproxResult, t_values: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
    Curve::ALL
        .iter()
        .map(|c| t_values.par_iter().map(|&t| Ok(inner.c_prime.project(&c.eval(t))?.point)).collect())
        .collect()
}

/// Largest `|δ(t)| - t^3` over the perturbed curves.
pub fn perturbation_excess(curves: &[Vec<Vec<f64>>], t_values: &[f64]) -> f64 {
    Curve::ALL
        .iter()
        .zip(curves)
        .flat_map(|(c, pts)| pts.iter().zip(t_values).map(move |(p, &t)| dist(p, &c.eval(t)) - t.powi(3)))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `conv(C' ∪ D_i)`.
pub fn widened_inner(c_prime: &ConvexBody, region: &ConvexBody) -> Result<ConvexBody> {
    let mut gens = c_prime.generators().to_vec();
    gens.extend(region.generators().iter().cloned());
    ConvexBody::from_points(c_prime.dim(), gens)
}

/// Sandwich for cone `i` (1 or 2) with its chain, probe and map checks.
pub fn sandwich_stage(
    bodies: &CounterexampleBodies,
    c_prime: &ConvexBody,
    i: usize,
    params: &PipelineParams,
    curve_points: &[Vec<Vec<f64>>],
) -> Result<(SandwichBody, StageReport)> {
    let (ci, face, f_slice) = bodies.cone(i);
    let region = if i == 1 { Region::D1 } else { Region::D2 };
    let inner = widened_inner(c_prime, bodies.region(region))?;
    let refinement = refine(ci, face, &inner, params)?;
    let e = refinement.sandwich;
    let n = params.check_samples;
    let seed = params.seed.wrapping_add(1000 * i as u64);

    let inner_pts = inner.sample_members(n, seed)?;
    let bad_inner = inner_pts.par_iter().filter(|x| !e.membership(x, tol::SAMPLE)).count();
    let mut checks = vec![Check::new(
        "inner_in_sandwich",
        bad_inner == 0,
        bad_inner as f64,
        inner_pts.len(),
        "members of conv(C' ∪ D_i) that are not members of E_i",
    )];

    let dirs = ci.directions(n, seed.wrapping_add(1))?;
    let e_pts: Vec<Vec<f64>> = dirs.par_iter().map(|v| e.boundary_point(v)).collect();
    let outer = e_pts.par_iter().map(|x| ci.distance(x)).collect::<Result<Vec<f64>>>()?.into_iter().fold(0.0, f64::max);
    checks.push(Check::at_most("sandwich_in_body", outer, tol::SAMPLE, e_pts.len(), "distance of E_i boundary points from C_i"));

    let p = if i == 1 { IdempotentMap::p1() } else { IdempotentMap::p2() };
    let mapped = e_pts
        .par_iter()
        .map(|x| {
            let w = p.apply(x);
            let v: Vec<f64> = w.iter().map(|a| a / w[0]).collect();
            f_slice.distance(&v)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(Check::at_most("map_onto_face", mapped, tol::SAMPLE, e_pts.len(), "distance of P_i(E_i boundary points) from F_i"));

    let all_pts: Vec<&Vec<f64>> = curve_points.iter().flatten().collect();
    let stray = all_pts.par_iter().filter(|x| !e.membership(x, tol::SAMPLE)).count();
    checks.push(Check::new("perturbed_curves_in_sandwich", stray == 0, stray as f64, all_pts.len(), "perturbed curve points outside E_i"));

    let segs = face_probe(&e, params.probes, seed.wrapping_add(2))?;
    let worst = segs
        .iter()
        .map(|s| -> Result<f64> { Ok(f_slice.distance(&s.u)?.max(f_slice.distance(&s.v)?)) })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(Check::at_most(
        "face_probe",
        worst,
        1e-5,
        params.probes,
        format!("statistical: {} flat chords; worst endpoint distance from conv(D ∪ D_i)", segs.len()),
    ));
    let report = StageReport { name: format!("K{i}"), separators: e.separators.len(), checks };
    Ok((e, report))
}

/// Runs every certificate of the construction.
pub fn certify_counterexample(config: &SuiteConfig) -> Result<SuiteReport> {
    let bodies = build_bodies()?;
    let grid = config.grid()?;
    let mut certs = Vec::new();

    certs.push(verify_exposed("K", &bodies.c, &bodies.f_slice, &EXPOSING)?);
    certs.push(verify_exposed("K1", &bodies.c1, &bodies.f1_slice, &EXPOSING)?);
    certs.push(verify_exposed("K2", &bodies.c2, &bodies.f2_slice, &EXPOSING)?);
    certs.push(verify_pexposed_map("K1", &IdempotentMap::p1(), &bodies.c1, &bodies.f1_slice)?);
    certs.push(verify_pexposed_map("K2", &IdempotentMap::p2(), &bodies.c2, &bodies.f2_slice)?);
    certs.push(refute_pexposure_symbolic(3));
    certs.push(refute_pexposure_numeric(&grid, &CurveSource::Exact)?);
    for k in 0..config.perturbation_runs {
        let source = CurveSource::Random { seed: config.perturb_seed.wrapping_add(k as u64), exponent: 3 };
        certs.push(refute_pexposure_numeric(&grid, &source)?);
    }
    certs.push(verify_face_intersection(config.intersection_samples, config.seed)?);

    let mut stages = Vec::new();
    if !config.skip_sandwich {
        let inner = inner_with_s(&bodies, config.boundary_count, config.seed)?;
        let curves = perturbed_curves(&inner, &grid.t_values)?;
        let excess = perturbation_excess(&curves, &grid.t_values);
        let mut cprime_checks = vec![Check::at_most(
            "perturbation_bound",
            excess,
            tol::SAMPLE,
            curves.len() * grid.t_values.len(),
            "max of |δ(t)| - t^3 for the projections of the curves onto C'",
        )];
        let params = config.params();
        for i in 1..=2 {
            let (_, report) = sandwich_stage(&bodies, &inner.c_prime, i, &params, &curves)?;
            stages.push(report);
        }
        cprime_checks.push(Check::new(
            "curves_in_both_sandwiches",
            stages.iter().all(|s| s.checks.iter().any(|c| c.name == "perturbed_curves_in_sandwich" && c.passed)),
            0.0,
            2,
            "C' curves lie in E_1 ∩ E_2, so the refutation below applies to the intersection",
        ));
        stages.insert(0, StageReport { name: "C'".into(), separators: 0, checks: cprime_checks });
        let source = CurveSource::Tabulated { label: "perturbed(C')".into(), points: curves };
        certs.push(refute_pexposure_numeric(&grid, &source)?);
    }

    let passed = certs.iter().all(|c| c.passed()) && stages.iter().all(|s| all_passed(&s.checks));
    Ok(SuiteReport { config: config.clone(), passed, certificates: certs, stages, refutation_trace: symbolic_refutation(3).trace })
}
