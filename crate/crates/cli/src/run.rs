use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use hypcircle::complex::{subdivide_cell_complex, Triangulation};
use hypcircle::conditions::{
    check_c1, check_c2, check_c3, check_ideal_conditions, check_r1, ideal_weights, ConditionReport, IdealConditions,
    WeightFunction,
};
use hypcircle::document::{MeshDocument, SCHEMA_VERSION};
use hypcircle::layout::{develop_with, to_svg, verify_primitive_contact, DevelopOptions, PatternVerdict, SvgOptions, VerifyOptions};
use hypcircle::selfcheck::{self, SelfcheckOptions, SuiteReport};
use hypcircle::solver::{
    continuation_solve, default_start, ideal_solve, newton_solve, ricci_flow, total_deficit, ContinuationOptions,
    FlowOptions, IdealOptions, IdealSolveResult, NewtonOptions, RadiusVector, SolveResult,
};
use hypcircle::{Error, ErrorClass};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::output::Outputs;
use crate::{Command, StrategyArg};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub command: Command,
    pub strategy: StrategyArg,
    pub tol: f64,
    pub size_cap: usize,
    pub eps_schedule: Vec<f64>,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    ValidationFailed,
    VerificationFailed,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::ValidationFailed => 3,
            Status::VerificationFailed => 5,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Failure {
    pub class: &'static str,
    pub message: String,
    #[serde(skip)]
    code: u8,
}

impl Failure {
    fn io(message: String) -> Self {
        Failure { class: "io", message, code: 1 }
    }

    pub fn code(&self) -> u8 {
        self.code
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).unwrap_or_else(|_| self.message.clone())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (class, code) = match e.class() {
            ErrorClass::Parse => ("parse", 2),
            ErrorClass::Validation => ("validation", 3),
            ErrorClass::Convergence => ("convergence", 4),
            ErrorClass::Verification => ("verification", 5),
            ErrorClass::Internal => ("internal", 1),
        };
        Failure { class, message: e.to_string(), code }
    }
}

type RunResult<T> = std::result::Result<T, Failure>;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'static str,
    seed: Option<u64>,
    input: Option<&'a str>,
    #[serde(flatten)]
    body: T,
}

fn command_name(c: Command) -> &'static str {
    match c {
        Command::Validate => "validate",
        Command::Solve => "solve",
        Command::Develop => "develop",
        Command::Ideal => "ideal",
        Command::Selfcheck => "selfcheck",
    }
}

fn report<T: Serialize>(cfg: &RunConfig, body: T) -> String {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        command: command_name(cfg.command),
        seed: cfg.seed,
        input: cfg.input.as_deref().and_then(Path::to_str),
        body,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("reports serialize");
    s.push('\n');
    s
}

fn read_input(cfg: &RunConfig) -> RunResult<String> {
    let path = cfg.input.as_ref().ok_or_else(|| Failure::from(Error::Parse("--input is required".into())))?;
    fs::read_to_string(path).map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))
}

fn start_point(tri: &Triangulation, seed: Option<u64>) -> RadiusVector {
    match seed {
        None => default_start(tri),
        Some(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let radii: Vec<f64> = (0..tri.vertex_count()).map(|_| rng.random_range(0.5f64.ln()..2.0f64.ln()).exp()).collect();
            RadiusVector::from_radii(&radii).expect("sampled radii are positive")
        }
    }
}

pub fn run(cfg: &RunConfig) -> RunResult<Status> {
    if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
        return Err(Error::Domain(format!("--tol must be positive, got {}", cfg.tol)).into());
    }
    let mut outputs = Outputs::default();
    let status = match cfg.command {
        Command::Validate => validate(cfg, &mut outputs)?,
        Command::Solve => solve_command(cfg, &mut outputs)?,
        Command::Develop => develop_command(cfg, &mut outputs)?,
        Command::Ideal => ideal_command(cfg, &mut outputs)?,
        Command::Selfcheck => selfcheck_command(cfg, &mut outputs),
    };
    outputs.commit().map_err(|e| Failure::io(format!("cannot write outputs: {e}")))?;
    Ok(status)
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Validation {
    Triangulation { genus: u32, vertices: usize, edges: usize, faces: usize, reports: Vec<ConditionReport> },
    CellComplex { genus: u32, vertices: usize, edges: usize, cells: usize, conditions: IdealConditions },
}

fn validate(cfg: &RunConfig, outputs: &mut Outputs) -> RunResult<Status> {
    let doc = MeshDocument::parse(&read_input(cfg)?)?;
    let w = doc.weight_function()?;
    let (body, ok) = if doc.is_cell_complex() {
        let complex = doc.cell_complex()?;
        let conditions = check_ideal_conditions(&complex, &w, cfg.size_cap, 0.0)?;
        let ok = conditions.passed();
        let body = Validation::CellComplex {
            genus: complex.genus(),
            vertices: complex.vertex_count(),
            edges: complex.edge_count(),
            cells: complex.cells().len(),
            conditions,
        };
        (body, ok)
    } else {
        let tri = doc.triangulation()?;
        let c1 = check_c1(&tri, &w)?;
        let c2 = check_c2(&tri, &w, cfg.size_cap)?;
        let ok = c1.passed() && c2.passed();
        let reports = vec![c1, c2, check_c3(&tri, &w)?, check_r1(&tri, &w)?];
        let body = Validation::Triangulation {
            genus: tri.genus(),
            vertices: tri.vertex_count(),
            edges: tri.edge_count(),
            faces: tri.face_count(),
            reports,
        };
        (body, ok)
    };
    outputs.add(cfg.out.as_deref(), report(cfg, body));
    Ok(if ok { Status::Ok } else { Status::ValidationFailed })
}

fn solve(cfg: &RunConfig, tri: &Triangulation, w: &WeightFunction) -> RunResult<SolveResult> {
    let q0 = start_point(tri, cfg.seed);
    let result = match cfg.strategy {
        StrategyArg::Newton => newton_solve(tri, w, &q0, &NewtonOptions { tol: cfg.tol, ..Default::default() })?,
        StrategyArg::Flow => ricci_flow(tri, w, &q0, &FlowOptions { tol: cfg.tol, ..Default::default() })?,
        StrategyArg::Continuation => {
            let opts = ContinuationOptions {
                newton: NewtonOptions { tol: cfg.tol, ..Default::default() },
                size_cap: cfg.size_cap,
                ..Default::default()
            };
            continuation_solve(tri, w, &q0, &opts)?
        }
    };
    Ok(result)
}

#[derive(Serialize)]
struct GaussBonnet {
    total_deficit: f64,
    expected: f64,
    error: f64,
}

#[derive(Serialize)]
struct SolveBody<'a> {
    tol: f64,
    mesh: &'a MeshDocument,
    result: &'a SolveResult,
    radii: Vec<f64>,
    gauss_bonnet: GaussBonnet,
}

fn solve_command(cfg: &RunConfig, outputs: &mut Outputs) -> RunResult<Status> {
    let doc = MeshDocument::parse(&read_input(cfg)?)?;
    let tri = doc.triangulation()?;
    let w = doc.weight_function()?;
    let result = solve(cfg, &tri, &w)?;
    let deficit = total_deficit(&tri, &w, &result.q_star)?;
    let expected = -2.0 * PI * tri.euler_characteristic() as f64;
    let body = SolveBody {
        tol: cfg.tol,
        mesh: &doc,
        radii: result.q_star.radii(),
        result: &result,
        gauss_bonnet: GaussBonnet { total_deficit: deficit, expected, error: (deficit - expected).abs() },
    };
    outputs.add(cfg.out.as_deref(), report(cfg, body));
    Ok(Status::Ok)
}

#[derive(Deserialize)]
struct SolvedQ {
    q_star: Vec<f64>,
}

#[derive(Deserialize)]
struct SolveReportInput {
    mesh: MeshDocument,
    result: SolvedQ,
}

#[derive(Serialize)]
struct DevelopBody<'a> {
    solve_residual: f64,
    /// Whether the radii came from a solve report rather than a fresh solve.
    from_solve_report: bool,
    vertex_copies: usize,
    verdict: &'a PatternVerdict,
}

fn develop_command(cfg: &RunConfig, outputs: &mut Outputs) -> RunResult<Status> {
    let text = read_input(cfg)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Failure::from(Error::Parse(e.to_string())))?;
    let is_report = value.get("mesh").is_some() && value.get("result").is_some();
    let (doc, q) = if is_report {
        let input: SolveReportInput = serde_json::from_value(value).map_err(|e| Failure::from(Error::Parse(e.to_string())))?;
        (input.mesh, Some(input.result.q_star))
    } else {
        (MeshDocument::parse(&text)?, None)
    };
    let tri = doc.triangulation()?;
    let w = doc.weight_function()?;
    let q = match q {
        Some(q) => RadiusVector::new(q).map_err(|e| Failure::from(Error::Parse(e.to_string())))?,
        None => solve(cfg, &tri, &w)?.q_star,
    };
    let pattern = develop_with(&tri, &w, &q, &DevelopOptions::default())?;
    let verdict = verify_primitive_contact(&pattern, &tri, &w, &VerifyOptions::default())?;
    let body = DevelopBody {
        solve_residual: pattern.residual,
        from_solve_report: is_report,
        vertex_copies: pattern.copies.len(),
        verdict: &verdict,
    };
    outputs.add(cfg.out.as_deref(), report(cfg, body));
    if let Some(svg) = &cfg.svg {
        outputs.add(Some(svg), to_svg(&pattern, &SvgOptions::default()));
    }
    Ok(if verdict.passed { Status::Ok } else { Status::VerificationFailed })
}

#[derive(Serialize)]
struct IdealBody<'a> {
    tol: f64,
    eps_schedule: &'a [f64],
    result: &'a IdealSolveResult,
    final_stage_verdict: &'a PatternVerdict,
}

fn ideal_command(cfg: &RunConfig, outputs: &mut Outputs) -> RunResult<Status> {
    let doc = MeshDocument::parse(&read_input(cfg)?)?;
    let complex = doc.cell_complex()?;
    let w = doc.weight_function()?;
    let opts = IdealOptions {
        eps_schedule: cfg.eps_schedule.clone(),
        continuation: ContinuationOptions {
            newton: NewtonOptions { tol: cfg.tol, ..Default::default() },
            size_cap: cfg.size_cap,
            ..Default::default()
        },
    };
    let result = ideal_solve(&complex, &w, &opts)?;
    let sub = subdivide_cell_complex(&complex)?;
    let wd = ideal_weights(&sub, &w, result.final_eps)?;
    let pattern = develop_with(&sub.triangulation, &wd, &result.final_q, &DevelopOptions::default())?;
    let verdict = verify_primitive_contact(&pattern, &sub.triangulation, &wd, &VerifyOptions::default())?;
    let body = IdealBody { tol: cfg.tol, eps_schedule: &cfg.eps_schedule, result: &result, final_stage_verdict: &verdict };
    outputs.add(cfg.out.as_deref(), report(cfg, body));
    if let Some(svg) = &cfg.svg {
        outputs.add(Some(svg), to_svg(&pattern, &SvgOptions::default()));
    }
    let ok = result.star_radii_decreasing && verdict.passed;
    Ok(if ok { Status::Ok } else { Status::VerificationFailed })
}

#[derive(Serialize)]
struct SelfcheckBody {
    suites: Vec<SuiteReport>,
    passed: bool,
}

fn selfcheck_command(cfg: &RunConfig, outputs: &mut Outputs) -> Status {
    let suites = selfcheck::run(&SelfcheckOptions { seed: cfg.seed.unwrap_or(0), ..Default::default() });
    let passed = suites.iter().all(|s| s.passed);
    outputs.add(cfg.out.as_deref(), report(cfg, SelfcheckBody { suites, passed }));
    if passed {
        Status::Ok
    } else {
        Status::VerificationFailed
    }
}
