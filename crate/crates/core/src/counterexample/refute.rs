//! No idempotent map sends the cone onto the disk face: an exact
//! coefficient argument plus a numeric grid search.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::bodies::{disk_cone_residual, Curve};
use super::certificate::{Certificate, CertificateKind, Witness};
use super::map::IdempotentMap;
use crate::check::Check;
use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::poly::{q, qr, MPoly, Poly, Q};

pub const PARAMS: [&str; 6] = ["a1", "a2", "a3", "b1", "b2", "b3"];
const PERTURB: [&str; 4] = ["w1", "w2", "w3", "w4"];

/// A residual at or below this counts as a violation.
pub const VIOLATION: f64 = -1e-10;

fn vars() -> Vec<&'static str> {
    let mut v = vec!["t"];
    v.extend(PARAMS);
    v.extend(PERTURB);
    v
}

fn mp(p: &Poly) -> MPoly {
    MPoly::from_poly(&vars(), "t", p)
}

fn var(name: &str) -> MPoly {
    MPoly::var(&vars(), name)
}

fn cst(a: Q) -> MPoly {
    MPoly::constant(&vars(), a)
}

/// The normal form applied to `v = (l, x, y, z, s)`: the first three
/// coordinates of the image (the last two vanish).
fn apply_normal_form(v: &[MPoly]) -> [MPoly; 3] {
    let row = |i: usize, a: &str, b: &str| &(&v[i] + &(&var(a) * &v[3])) + &(&var(b) * &v[4]);
    [row(0, "a1", "b1"), row(1, "a2", "b2"), row(2, "a3", "b3")]
}

fn disk_residual(img: &[MPoly; 3]) -> MPoly {
    let [l, x, y] = img;
    &(&(&cst(q(2)) * &(y * l)) - &(x * x)) - &(y * y)
}

/// Face residual `2yl - x^2 - y^2` of `P (curve(t) + t^e w)` with
/// `w = (0, w1, w2, w3, w4)`.
pub fn constraint(curve: Curve, exponent: u32) -> MPoly {
    let te = var("t");
    let mut scale = cst(q(1));
    for _ in 0..exponent {
        scale = &scale * &te;
    }
    let mut v: Vec<MPoly> = curve.exact().iter().map(mp).collect();
    for (k, w) in PERTURB.iter().enumerate() {
        v[k + 1] = &v[k + 1] + &(&scale * &var(w));
    }
    disk_residual(&apply_normal_form(&v))
}

/// The unperturbed residual.
pub fn constraint_exact(curve: Curve) -> MPoly {
    let v: Vec<MPoly> = curve.exact().iter().map(mp).collect();
    disk_residual(&apply_normal_form(&v))
}

/// Hand-expanded low-order coefficients `[t, t^2]` of each constraint.
pub fn expected_low_order(curve: Curve) -> [MPoly; 2] {
    let a1 = var("a1");
    let a2 = var("a2");
    let a3 = var("a3");
    let common = &(&cst(q(2)) * &(&a1 * &a3)) - &(&(&a2 * &a2) + &(&a3 * &a3));
    match curve {
        Curve::Alpha => [&cst(q(2)) * &a3, &cst(q(2)) + &common],
        Curve::Beta => [-&a3, (&(&cst(q(-1)) + &(&cst(q(2)) * &a2)) + &common).scale(&qr(1, 4))],
        Curve::Gamma => [-&a3, (&(&cst(q(-1)) - &(&cst(q(2)) * &a2)) + &common).scale(&qr(1, 4))],
    }
}

/// Outcome of the exact refutation.
#[derive(Clone, Debug, Serialize)]
pub struct SymbolicRefutation {
    pub trace: Vec<String>,
    pub normal_form_idempotent: bool,
    pub constant_terms_vanish: bool,
    pub low_order_match: bool,
    pub b_free: bool,
    pub forces_a3_zero: bool,
    pub t2_sum: String,
    pub t2_sum_bound: bool,
    pub perturbation_degree: Option<u32>,
    pub robust: bool,
}

impl SymbolicRefutation {
    pub fn refuted(&self) -> bool {
        self.normal_form_idempotent
            && self.constant_terms_vanish
            && self.low_order_match
            && self.forces_a3_zero
            && self.t2_sum_bound
            && self.robust
    }
}

fn normal_form_idempotent() -> bool {
    let zero = cst(q(0));
    let one = cst(q(1));
    let m: Vec<Vec<MPoly>> = vec![
        vec![one.clone(), zero.clone(), zero.clone(), var("a1"), var("b1")],
        vec![zero.clone(), one.clone(), zero.clone(), var("a2"), var("b2")],
        vec![zero.clone(), zero.clone(), one.clone(), var("a3"), var("b3")],
        vec![zero.clone(); 5],
        vec![zero.clone(); 5],
    ];
    (0..5).all(|i| {
        (0..5).all(|j| {
            let s = (0..5).fold(cst(q(0)), |acc, k| &acc + &(&m[i][k] * &m[k][j]));
            s == m[i][j]
        })
    })
}

/// Runs the exact argument with perturbations of size `t^exponent`.
pub fn symbolic_refutation(exponent: u32) -> SymbolicRefutation {
    let mut trace = Vec::new();
    trace.push("normal form: P maps K' onto span F = R^3 x {0}^2 and fixes it, so P = [[I, A], [0, 0]] with A = [[a1, b1], [a2, b2], [a3, b3]]".to_string());
    let nf = normal_form_idempotent();
    trace.push(format!("P^2 - P = 0 identically in a1..b3: {nf}"));

    let exact: Vec<(Curve, MPoly)> = Curve::ALL.iter().map(|&c| (c, constraint_exact(c))).collect();
    let mut constant_ok = true;
    let mut low_ok = true;
    let mut b_free = true;
    let mut low: Vec<[MPoly; 2]> = Vec::new();
    for (c, r) in &exact {
        let c0 = r.coeff_of("t", 0);
        let c1 = r.coeff_of("t", 1);
        let c2 = r.coeff_of("t", 2);
        constant_ok &= c0.is_zero();
        let [e1, e2] = expected_low_order(*c);
        low_ok &= c1 == e1 && c2 == e2;
        b_free &= ["b1", "b2", "b3"].iter().all(|b| !c0.involves(b) && !c1.involves(b) && !c2.involves(b));
        trace.push(format!("constraint {}: 2yl - x^2 - y^2 of P{}(t) = ({c1}) t + ({c2}) t^2 + O(t^3)", c.name(), c.name()));
        low.push([c1, c2]);
    }
    trace.push(format!("b1, b2, b3 first enter at order t^3 and stay free: {b_free}"));

    // 2a3 >= 0 from the first constraint, -a3 >= 0 from the second.
    let a3 = var("a3");
    let forces = low[0][0] == &cst(q(2)) * &a3 && low[1][0] == -&a3 && low[2][0] == -&a3;
    trace.push("t-coefficients: 2*a3 >= 0 (alpha) and -a3 >= 0 (beta, gamma), hence a3 = 0".to_string());

    let zero = q(0);
    let sum = (&low[1][1] + &low[2][1]).subs("a3", &zero);
    let a2 = var("a2");
    let target = (&cst(q(1)) + &(&a2 * &a2)).scale(&qr(-1, 2));
    // sum + 1/2 = -a2^2 / 2 is a nonpositive multiple of a square.
    let bound = sum == target && (&sum + &cst(qr(1, 2))) == (&a2 * &a2).scale(&qr(-1, 2));
    trace.push(format!("t^2-coefficients of beta and gamma at a3 = 0 add up to {sum}"));

    let pert_degree = Curve::ALL
        .iter()
        .filter_map(|&c| {
            let d = &constraint(c, exponent) - &constraint_exact(c);
            d.min_degree_with("t", &PERTURB)
        })
        .min();
    let robust = pert_degree.is_none_or(|d| d >= 3);
    trace.push(format!(
        "perturbation t^{exponent} w: every w-term has t-degree >= {}, so it is bounded by M t^3 on compact parameter sets: {robust}",
        pert_degree.map(|d| d.to_string()).unwrap_or_else(|| "inf".into())
    ));
    trace.push("contradiction: the beta + gamma t^2-coefficient is at most -1/2 < 0 while both constraints need it >= 0; it equals −(1+a₂²)/2".to_string());

    SymbolicRefutation {
        trace,
        normal_form_idempotent: nf,
        constant_terms_vanish: constant_ok,
        low_order_match: low_ok,
        b_free,
        forces_a3_zero: forces,
        t2_sum: sum.to_string(),
        t2_sum_bound: bound,
        perturbation_degree: pert_degree,
        robust,
    }
}

/// Certificate for the exact argument.
pub fn refute_pexposure_symbolic(exponent: u32) -> Certificate {
    let r = symbolic_refutation(exponent);
    let checks = vec![
        Check::new("normal_form_idempotent", r.normal_form_idempotent, 0.0, 1, "P^2 = P for all parameters"),
        Check::new("constant_terms_vanish", r.constant_terms_vanish, 0.0, 3, "t^0 coefficients are zero"),
        Check::new("low_order_coefficients", r.low_order_match, 0.0, 6, "t and t^2 coefficients match the hand expansion"),
        Check::new("a3_forced_zero", r.forces_a3_zero, 0.0, 3, "2*a3 >= 0 and -a3 >= 0"),
        Check::new("t2_sum_negative", r.t2_sum_bound, 0.0, 1, "sum equals -(1 + a2^2)/2 <= -1/2"),
        Check::new("perturbation_robust", r.robust, 0.0, 3, format!("perturbation exponent {exponent}")),
    ];
    let mut margins = BTreeMap::new();
    margins.insert("t2_sum_upper_bound".into(), -0.5);
    let evidence = json!({
        "exponent": exponent,
        "trace": r.trace,
        "t2_sum": r.t2_sum,
        "b_free": r.b_free,
        "perturbation_degree": r.perturbation_degree,
    });
    Certificate::new(CertificateKind::Refutation, "symbolic", checks, evidence, margins, None)
}

/// Parameter and time grids for the numeric search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericGrid {
    pub a_values: Vec<f64>,
    pub t_values: Vec<f64>,
}

impl NumericGrid {
    pub fn new(a_min: f64, a_max: f64, a_step: f64, t_min: f64, t_count: usize) -> Result<Self> {
        if !(a_step > 0.0) || a_max < a_min || t_count == 0 || !(t_min > 0.0 && t_min <= 1.0) {
            return Err(Error::Precondition("empty refutation grid".into()));
        }
        let n = ((a_max - a_min) / a_step).round() as usize + 1;
        let a_values = (0..n).map(|k| a_min + a_step * k as f64).collect();
        Ok(Self { a_values, t_values: log_grid(t_min, 1.0, t_count) })
    }
}

impl Default for NumericGrid {
    fn default() -> Self {
        Self::new(-4.0, 4.0, 0.25, 1e-4, 200).expect("valid default grid")
    }
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut v: Vec<f64> = (0..count).map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp()).collect();
    v[0] = lo;
    v[count - 1] = hi;
    v
}

/// Where the curve points come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveSource {
    Exact,
    /// `curve(t) + δ(t)` with `δ ∈ {0} x R^4`, `|δ(t)| <= t^exponent`, drawn
    /// from the seed.
    Random { seed: u64, exponent: u32 },
    /// Precomputed points, one row per curve and grid value.
    Tabulated { label: String, points: Vec<Vec<Vec<f64>>> },
}

impl CurveSource {
    pub fn label(&self) -> String {
        match self {
            CurveSource::Exact => "exact".into(),
            CurveSource::Random { seed, exponent } => format!("random(seed={seed}, exponent={exponent})"),
            CurveSource::Tabulated { label, .. } => label.clone(),
        }
    }

    /// Curve points on `t_values`, indexed `[curve][t]`.
    pub fn resolve(&self, t_values: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
        match self {
            CurveSource::Exact => Ok(Curve::ALL.iter().map(|c| t_values.iter().map(|&t| c.eval(t)).collect()).collect()),
            CurveSource::Random { seed, exponent } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok(Curve::ALL
                    .iter()
                    .map(|c| {
                        t_values
                            .iter()
                            .map(|&t| {
                                let w: Vec<f64> = (0..4).map(|_| rng.sample(StandardNormal)).collect();
                                let rho: f64 = rng.random::<f64>() * t.powi(*exponent as i32) / norm(&w).max(f64::MIN_POSITIVE);
                                let mut v = c.eval(t);
                                for k in 0..4 {
                                    v[k + 1] += rho * w[k];
                                }
                                v
                            })
                            .collect()
                    })
                    .collect())
            }
            CurveSource::Tabulated { points, .. } => {
                if points.len() != 3 || points.iter().any(|p| p.len() != t_values.len() || p.iter().any(|x| x.len() != 5)) {
                    return Err(Error::Precondition("tabulated curves must be 3 x |t grid| points in R^5".into()));
                }
                Ok(points.clone())
            }
        }
    }
}

/// Best violation found for one parameter tuple.
#[derive(Clone, Debug, Serialize)]
pub struct GridHit {
    pub a: [f64; 3],
    pub curve: Curve,
    pub t: f64,
    pub residual: f64,
}

/// Most negative face residual of `P_a` over the curve table.
pub fn best_violation(a: [f64; 3], t_values: &[f64], curves: &[Vec<Vec<f64>>]) -> GridHit {
    let p = IdempotentMap::normal_form([a[0], a[1], a[2], 0.0, 0.0, 0.0]);
    let mut best = GridHit { a, curve: Curve::Alpha, t: t_values[0], residual: f64::INFINITY };
    for (ci, pts) in curves.iter().enumerate() {
        for (ti, v) in pts.iter().enumerate() {
            let r = disk_cone_residual(&p.apply(v));
            if r < best.residual {
                best = GridHit { a, curve: Curve::ALL[ci], t: t_values[ti], residual: r };
            }
        }
    }
    best
}

/// Searches every `(a1, a2, a3)` on the grid (with `b = 0`) for a curve
/// point whose image violates `2yl - x^2 - y^2 >= 0`.
pub fn refute_pexposure_numeric(grid: &NumericGrid, source: &CurveSource) -> Result<Certificate> {
    if grid.a_values.is_empty() || grid.t_values.is_empty() {
        return Err(Error::Precondition("empty refutation grid".into()));
    }
    let curves = source.resolve(&grid.t_values)?;
    let n = grid.a_values.len();
    let hits: Vec<GridHit> = (0..n * n * n)
        .into_par_iter()
        .map(|k| {
            let a = [grid.a_values[k / (n * n)], grid.a_values[(k / n) % n], grid.a_values[k % n]];
            best_violation(a, &grid.t_values, &curves)
        })
        .collect();
    let missed: Vec<&GridHit> = hits.iter().filter(|h| !(h.residual <= VIOLATION)).collect();
    let weakest = hits.iter().max_by(|a, b| a.residual.total_cmp(&b.residual)).expect("nonempty grid");
    let margin = -weakest.residual;
    let checks = vec![Check::new(
        "violation_at_every_grid_point",
        missed.is_empty(),
        weakest.residual,
        hits.len(),
        format!("largest best residual over the grid; violations need <= {VIOLATION:e}"),
    )];
    let witness = missed.first().map(|h| Witness {
        description: format!("no violation found for a = {:?}", h.a),
        point: h.a.to_vec(),
        value: h.residual,
    });
    let mut margins = BTreeMap::new();
    margins.insert("min_violation_margin".into(), margin);
    let max_delta = if let CurveSource::Exact = source {
        0.0
    } else {
        let exact = CurveSource::Exact.resolve(&grid.t_values)?;
        curves
            .iter()
            .zip(&exact)
            .flat_map(|(a, b)| a.iter().zip(b).zip(&grid.t_values).map(|((p, q), t)| crate::linalg::dist(p, q) / t.powi(3)))
            .fold(0.0, f64::max)
    };
    margins.insert("max_delta_over_t3".into(), max_delta);
    let evidence = json!({
        "source": match source { CurveSource::Tabulated { label, .. } => json!({ "kind": "tabulated", "label": label }), s => serde_json::to_value(s)? },
        "grid": { "a_min": grid.a_values[0], "a_max": grid.a_values[n - 1], "a_count": n, "t_min": grid.t_values[0], "t_count": grid.t_values.len() },
        "weakest": weakest,
        "sample_hits": [&hits[0], &hits[hits.len() / 2], &hits[hits.len() - 1]],
    });
    Ok(Certificate::new(CertificateKind::Refutation, format!("numeric/{}", source.label()), checks, evidence, margins, witness))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbolic_trace_refutes() {
        let r = symbolic_refutation(3);
        assert!(r.refuted(), "{r:?}");
        assert!(r.b_free);
        assert!(r.trace.last().unwrap().ends_with("−(1+a₂²)/2"));
        assert_eq!(r.perturbation_degree, Some(3));
        assert!(!symbolic_refutation(2).refuted());
    }

    #[test]
    fn coefficient_examples() {
        let alpha = constraint_exact(Curve::Alpha).coeff_of("t", 2);
        let at0 = PARAMS.iter().fold(alpha, |p, v| p.subs(v, &q(0)));
        assert_eq!(at0, cst(q(2)));
        let beta1 = constraint_exact(Curve::Beta).coeff_of("t", 1);
        assert_eq!(beta1.subs("a3", &q(0)), cst(q(0)));
        let sum = &constraint_exact(Curve::Beta).coeff_of("t", 2) + &constraint_exact(Curve::Gamma).coeff_of("t", 2);
        let v = ["a1", "a3"].iter().fold(sum.subs("a2", &q(1)), |p, n| p.subs(n, &q(0)));
        assert_eq!(v, cst(q(-1)));
    }

    #[test]
    fn grid_examples() {
        let t = [0.1, 1e-3];
        let exact = CurveSource::Exact.resolve(&t).unwrap();
        let h = best_violation([0.0, 0.0, 0.0], &t[..1], &[exact[1][..1].to_vec()]);
        assert!((h.residual + 0.25 * 0.01).abs() < 2e-3 && h.residual < 0.0);
        assert!(best_violation([0.0, 0.0, 0.5], &t[1..], &[exact[1][1..].to_vec()]).residual < 0.0);
        assert!(best_violation([0.0, 0.0, -0.5], &t[1..], &[exact[0][1..].to_vec()]).residual < 0.0);
    }

    #[test]
    fn small_grid_refutes() {
        let g = NumericGrid::new(-1.0, 1.0, 0.5, 1e-4, 60).unwrap();
        assert!(refute_pexposure_numeric(&g, &CurveSource::Exact).unwrap().passed());
        assert!(refute_pexposure_numeric(&g, &CurveSource::Random { seed: 3, exponent: 3 }).unwrap().passed());
    }
}
