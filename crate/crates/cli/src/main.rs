//! `conefix` command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use conefix::amenability::{amenability_probe, cone_distance};
use conefix::body::ConvexBody;
use conefix::check::{all_passed, Check};
use conefix::counterexample::suite::inner_with_s;
use conefix::counterexample::{build_bodies, certify_counterexample, export_figure, SuiteConfig};
use conefix::face::FaceSpec;
use conefix::inner::{build_inner_approx, GapSpec};
use conefix::sandwich::{amalgamate, PipelineParams};

const EXIT_FAILURE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_CHECK: u8 = 3;

#[derive(Parser)]
#[command(name = "conefix", version, about = "Face-fixing inner approximations, convex sandwiches and the 5-D counterexample")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inner approximation C' of a body that keeps a face fixed.
    Approximate(RunArgs),
    /// Inner approximation, fattening and sandwich body E.
    Sandwich(RunArgs),
    /// Certificates for the 5-D counterexample.
    CertifyCounterexample(CertifyArgs),
    /// Sampled lower bound for the error-bound constant of a cone and face.
    AmenabilityProbe(ProbeArgs),
    /// CSV curves and an OBJ boundary sample of the counterexample bodies.
    ExportFigure(FigureArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Problem JSON: {"body": ..., "face": {"generators": [...], "exposing": [...]}, "gap": {...}}
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    boundary_count: Option<usize>,
    /// Tolerance of the sampled checks.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    check_samples: Option<usize>,
    #[arg(long)]
    probes: Option<usize>,
}

#[derive(Args)]
struct CertifyArgs {
    /// Report file; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    boundary_count: Option<usize>,
    #[arg(long)]
    skip_sandwich: bool,
    #[arg(long)]
    perturb_seed: Option<u64>,
    #[arg(long)]
    check_samples: Option<usize>,
    #[arg(long)]
    probes: Option<usize>,
}

#[derive(Args)]
struct ProbeArgs {
    /// JSON {"cone": [[...]], "face": [[...]]} of cone and face generators.
    /// Defaults to the cone over C' with the face over the disk.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    boundary_count: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    /// Comma-separated distances from the face.
    #[arg(long, value_delimiter = ',')]
    scales: Option<Vec<f64>>,
}

#[derive(Args)]
struct FigureArgs {
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 101)]
    resolution: usize,
}

/// Settings shared by `approximate` and `sandwich`; flat keys mirror flags.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
struct RunConfig {
    seed: u64,
    boundary_count: usize,
    tol: f64,
    check_samples: usize,
    probes: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { seed: 0, boundary_count: 256, tol: conefix::tol::SAMPLE, check_samples: 2000, probes: 2000 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
struct ProbeConfig {
    seed: u64,
    boundary_count: usize,
    samples: usize,
    scales: Vec<f64>,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self { seed: 0, boundary_count: 512, samples: 200, scales: vec![1e-1, 1e-2, 1e-3] }
    }
}

#[derive(Deserialize)]
struct FaceInput {
    generators: Vec<usize>,
    #[serde(default)]
    exposing: Option<Vec<f64>>,
}

#[derive(Deserialize)]
struct Problem {
    body: Value,
    face: FaceInput,
    gap: GapSpec,
}

#[derive(Deserialize)]
struct ConeInput {
    cone: Vec<Vec<f64>>,
    face: Vec<Vec<f64>>,
}

/// Error carrying its exit code.
#[derive(Debug)]
struct Fail {
    code: u8,
    message: String,
}

fn invalid(message: impl Into<String>) -> Fail {
    Fail { code: EXIT_INVALID, message: message.into() }
}

fn classify(e: anyhow::Error) -> Fail {
    let code = match e.downcast_ref::<conefix::Error>() {
        Some(err) if err.is_validation() => EXIT_INVALID,
        Some(conefix::Error::Json(_)) => EXIT_INVALID,
        _ if e.downcast_ref::<serde_json::Error>().is_some() => EXIT_INVALID,
        _ => EXIT_FAILURE,
    };
    Fail { code, message: format!("{e:#}") }
}

fn load_config<T: Default + for<'de> Deserialize<'de>>(path: Option<&Path>) -> Result<T, Fail> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| invalid(format!("reading {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| invalid(format!("config {}: {e}", p.display())))
        }
    }
}

fn read_input(path: Option<&Path>) -> Result<String, Fail> {
    let p = path.ok_or_else(|| invalid("--input is required"))?;
    fs::read_to_string(p).map_err(|e| invalid(format!("reading {}: {e}", p.display())))
}

fn write_out(dir: &Path, name: &str, text: &str) -> Result<(), Fail> {
    fs::create_dir_all(dir).map_err(|e| Fail { code: EXIT_FAILURE, message: format!("creating {}: {e}", dir.display()) })?;
    let p = dir.join(name);
    fs::write(&p, text).map_err(|e| Fail { code: EXIT_FAILURE, message: format!("writing {}: {e}", p.display()) })
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Fail> {
    match output {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| Fail { code: EXIT_FAILURE, message: format!("{e}") })?;
            }
            fs::write(p, text).map_err(|e| Fail { code: EXIT_FAILURE, message: format!("writing {}: {e}", p.display()) })
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run_config(args: &RunArgs) -> Result<RunConfig, Fail> {
    let mut c: RunConfig = load_config(args.config.as_deref())?;
    if let Some(v) = args.seed {
        c.seed = v;
    }
    if let Some(v) = args.boundary_count {
        c.boundary_count = v;
    }
    if let Some(v) = args.tol {
        c.tol = v;
    }
    if let Some(v) = args.check_samples {
        c.check_samples = v;
    }
    if let Some(v) = args.probes {
        c.probes = v;
    }
    if !(c.tol >= 0.0) {
        return Err(invalid("tolerance must be nonnegative"));
    }
    Ok(c)
}

fn load_problem(args: &RunArgs) -> Result<(ConvexBody, FaceSpec, GapSpec), Fail> {
    let text = read_input(args.input.as_deref())?;
    let p: Problem = serde_json::from_str(&text).map_err(|e| invalid(format!("problem JSON: {e}")))?;
    let body = ConvexBody::from_json(&p.body.to_string()).map_err(|e| classify(e.into()))?;
    let face = FaceSpec::new(&body, p.face.generators, p.face.exposing).map_err(|e| classify(e.into()))?;
    Ok((body, face, p.gap))
}

fn cmd_approximate(args: &RunArgs) -> Result<u8, Fail> {
    let cfg = run_config(args)?;
    let (body, face, gap) = load_problem(args)?;
    let phi = gap.build().map_err(|e| classify(e.into()))?;
    let res = build_inner_approx(&body, &face, &phi, cfg.boundary_count, cfg.seed).map_err(|e| classify(e.into()))?;
    let c_prime = &res.c_prime;
    let n = cfg.check_samples;
    let seed = cfg.seed.wrapping_add(101);
    let check = || -> conefix::Result<Vec<Check>> {
        let mut pts = body.sample_members(n, seed)?;
        let boundary = body.sample_boundary(n, seed.wrapping_add(1))?;
        pts.extend(boundary.iter().cloned());
        let gap = pts
            .par_iter()
            .map(|x| Ok(c_prime.distance(x)? - phi.eval(x)))
            .collect::<conefix::Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        let off_face: Vec<&Vec<f64>> = boundary.iter().filter(|x| phi.eval(x) > cfg.tol).collect();
        let sep = off_face
            .par_iter()
            .map(|x| c_prime.distance(x))
            .collect::<conefix::Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let face_in = face.generators().iter().all(|g| c_prime.membership(g, cfg.tol));
        Ok(vec![
            Check::at_most("gap_bound", gap, cfg.tol, pts.len(), "max of dist(x, C') - phi(x) over sampled points of C"),
            Check::new(
                "boundary_off_face_outside",
                off_face.is_empty() || sep > 0.0,
                if sep.is_finite() { sep } else { 0.0 },
                off_face.len(),
                "min dist(x, C') over sampled boundary points with phi(x) > tol",
            ),
            Check::new("face_in_inner", face_in, 0.0, face.generators().len(), "face generators are members of C'"),
        ])
    };
    let checks = check().map_err(|e| classify(e.into()))?;
    let passed = all_passed(&checks);
    if let Some(dir) = &args.output {
        write_out(dir, "inner.json", &c_prime.to_json().map_err(|e| classify(e.into()))?)?;
        write_out(dir, "lambda.csv", &res.lambda_csv())?;
        let cert = json!({
            "command": "approximate",
            "config": cfg,
            "gap": phi.describe(),
            "margin_r": res.margin_r,
            "generators": c_prime.generators().len(),
            "passed": passed,
            "checks": checks,
        });
        write_out(dir, "certificate.json", &serde_json::to_string_pretty(&cert).unwrap())?;
    } else {
        println!("{}", serde_json::to_string_pretty(&json!({ "passed": passed, "checks": checks })).unwrap());
    }
    Ok(if passed { 0 } else { EXIT_CHECK })
}

fn cmd_sandwich(args: &RunArgs) -> Result<u8, Fail> {
    let cfg = run_config(args)?;
    let (body, face, gap) = load_problem(args)?;
    let phi = gap.build().map_err(|e| classify(e.into()))?;
    let params = PipelineParams {
        boundary_count: cfg.boundary_count,
        seed: cfg.seed,
        check_samples: cfg.check_samples,
        probes: cfg.probes,
    };
    let a = amalgamate(&body, &face, &phi, &params).map_err(|e| classify(e.into()))?;
    let passed = all_passed(&a.checks);
    let e = &a.refinement.sandwich;
    if let Some(dir) = &args.output {
        write_out(dir, "inner.json", &a.inner.c_prime.to_json().map_err(|e| classify(e.into()))?)?;
        write_out(dir, "fattened.json", &a.refinement.fattened.to_json().map_err(|e| classify(e.into()))?)?;
        write_out(dir, "separators.json", &e.separators.to_json().map_err(|e| classify(e.into()))?)?;
        let cert = json!({
            "command": "sandwich",
            "config": cfg,
            "gap": phi.describe(),
            "separators": { "halfspaces": e.separators.halfspaces.len(), "balls": e.separators.balls.len() },
            "passed": passed,
            "checks": a.checks,
        });
        write_out(dir, "certificate.json", &serde_json::to_string_pretty(&cert).unwrap())?;
    } else {
        println!("{}", serde_json::to_string_pretty(&json!({ "passed": passed, "checks": a.checks })).unwrap());
    }
    Ok(if passed { 0 } else { EXIT_CHECK })
}

fn cmd_certify(args: &CertifyArgs) -> Result<u8, Fail> {
    let mut c: SuiteConfig = load_config(args.config.as_deref())?;
    if let Some(v) = args.seed {
        c.seed = v;
    }
    if let Some(v) = args.boundary_count {
        c.boundary_count = v;
    }
    if args.skip_sandwich {
        c.skip_sandwich = true;
    }
    if let Some(v) = args.perturb_seed {
        c.perturb_seed = v;
    }
    if let Some(v) = args.check_samples {
        c.check_samples = v;
    }
    if let Some(v) = args.probes {
        c.probes = v;
    }
    let report = certify_counterexample(&c).map_err(|e| classify(e.into()))?;
    emit(args.output.as_deref(), &report.to_json())?;
    for cert in &report.certificates {
        if !cert.passed() {
            eprintln!("failed: {:?} {}", cert.kind, cert.subject);
        }
    }
    for stage in &report.stages {
        for ch in stage.checks.iter().filter(|c| !c.passed) {
            eprintln!("failed: {} {} (worst {:e})", stage.name, ch.name, ch.worst);
        }
    }
    Ok(if report.passed { 0 } else { EXIT_CHECK })
}

fn cmd_probe(args: &ProbeArgs) -> Result<u8, Fail> {
    let mut c: ProbeConfig = load_config(args.config.as_deref())?;
    if let Some(v) = args.seed {
        c.seed = v;
    }
    if let Some(v) = args.boundary_count {
        c.boundary_count = v;
    }
    if let Some(v) = args.samples {
        c.samples = v;
    }
    if let Some(v) = &args.scales {
        c.scales = v.clone();
    }
    if c.scales.is_empty() || c.scales.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(invalid("scales must be positive"));
    }
    let (cone, face, label) = match &args.input {
        Some(p) => {
            let text = read_input(Some(p))?;
            let inp: ConeInput = serde_json::from_str(&text).map_err(|e| invalid(format!("cone JSON: {e}")))?;
            (inp.cone, inp.face, "input".to_string())
        }
        None => {
            let bodies = build_bodies().map_err(|e| classify(e.into()))?;
            let inner = inner_with_s(&bodies, c.boundary_count, c.seed).map_err(|e| classify(e.into()))?;
            (inner.c_prime.generators().to_vec(), bodies.face.generators().to_vec(), "cone(C') with face cone(D)".to_string())
        }
    };
    let dim = cone.first().map(|g| g.len()).ok_or_else(|| invalid("empty cone"))?;
    if face.is_empty() {
        return Err(invalid("empty face"));
    }
    if cone.iter().chain(&face).any(|g| g.len() != dim || g.iter().any(|x| !x.is_finite())) {
        return Err(invalid("generators must be finite and of equal length"));
    }
    let rel = |v: &[f64]| 1e-9 * v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    if let Some(i) = face.iter().position(|f| cone_distance(&cone, f) > rel(f)) {
        return Err(invalid(format!("face generator {i} is not in the cone")));
    }
    if cone.iter().all(|g| cone_distance(&face, g) <= rel(g)) {
        return Err(invalid("face is not proper: it equals the cone"));
    }
    let report = amenability_probe(&cone, &face, &c.scales, c.samples, c.seed).map_err(|e| classify(e.into()))?;
    let out = json!({ "command": "amenability-probe", "subject": label, "config": c, "report": report });
    emit(args.output.as_deref(), &serde_json::to_string_pretty(&out).unwrap())?;
    Ok(0)
}

fn cmd_figure(args: &FigureArgs) -> Result<u8, Fail> {
    if args.resolution < 2 {
        return Err(invalid("resolution must be at least 2"));
    }
    let paths = export_figure(&args.output, args.resolution).map_err(|e| classify(e.into()))?;
    for p in paths {
        println!("{}", p.display());
    }
    Ok(0)
}

fn configure_threads() -> Result<(), Fail> {
    if let Ok(v) = std::env::var("CONE_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| invalid(format!("CONE_THREADS={v} is not a thread count")))?;
        if n > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .context("configuring the thread pool")
                .map_err(classify)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| match &cli.command {
        Command::Approximate(a) => cmd_approximate(a),
        Command::Sandwich(a) => cmd_sandwich(a),
        Command::CertifyCounterexample(a) => cmd_certify(a),
        Command::AmenabilityProbe(a) => cmd_probe(a),
        Command::ExportFigure(a) => cmd_figure(a),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
