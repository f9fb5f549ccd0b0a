use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::catalog;
use super::config::{parse_value, run_spec, ConfigError, ReferenceDoc, RegionDoc, RunSpec};
use crate::discretize::{
    build_context, discretize, fixed_point_residual, DiscConfig, DiscError, EvolutionMatrix, ForwardBasis, Method,
};
use crate::oracles::{char_roots, monodromy_bruteforce_at, OracleError, RootSearchRegion};
use crate::problems::{ProblemError, ProblemKind, ProblemSpec};
use crate::spectra::{
    convergence_sweep_with, dominant_delta, eig_dense, match_dominant, order_estimate, ConvergenceTable, Reference,
    SpectraError, Spectrum,
};

const DEFAULT_N_LIST: [usize; 5] = [5, 10, 15, 20, 25];
const DEFAULT_BRUTEFORCE_M: usize = 24;
const DEFAULT_BRUTEFORCE_STEPS: usize = 4096;
const CHECK_BRUTEFORCE_STEPS: usize = 1024;
const CHECK_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eig,
    Converge,
    Compare,
    Oracle,
    Check,
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "eig" => Ok(Command::Eig),
            "converge" => Ok(Command::Converge),
            "compare" => Ok(Command::Compare),
            "oracle" => Ok(Command::Oracle),
            "check" => Ok(Command::Check),
            other => Err(format!("unknown command {other:?}")),
        }
    }
}

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    ConfigError = 2,
    NumericalFailure = 3,
    CheckFailed = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("unknown problem {0:?}; known: hayes, ode, re-basic, delayed-mathieu")]
    UnknownProblem(String),
    #[error("either --config or --problem is required")]
    MissingInput,
    #[error(transparent)]
    Disc(#[from] DiscError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Config(_) | CliError::Io { .. } | CliError::UnknownProblem(_) | CliError::MissingInput => {
                ExitStatus::ConfigError
            }
            CliError::Disc(e) => match e {
                DiscError::BadStep(_)
                | DiscError::Indices { .. }
                | DiscError::BadPieces { .. }
                | DiscError::DegeneratePiece(..)
                | DiscError::MethodMismatch(_)
                | DiscError::Grid(_) => ExitStatus::ConfigError,
                _ => ExitStatus::NumericalFailure,
            },
            CliError::Oracle(OracleError::BadRegion | OracleError::TooFewSteps(_) | OracleError::BadStep(_)) => {
                ExitStatus::ConfigError
            }
            CliError::Oracle(OracleError::Problem(ProblemError::NonAutonomous)) => ExitStatus::ConfigError,
            CliError::Spectra(_) | CliError::Oracle(_) => ExitStatus::NumericalFailure,
        }
    }
}

/// Parsed command line.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub config: Option<PathBuf>,
    pub problem: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

/// A named output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub content: String,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub status: ExitStatus,
    pub artifacts: Vec<Artifact>,
    /// Human-readable notes for stderr.
    pub messages: Vec<String>,
}

/// Reads the catalog entry and/or the config file. With both, sections
/// present in the file replace those of the catalog entry.
pub fn load_spec(inv: &Invocation) -> Result<RunSpec, CliError> {
    let base = match &inv.problem {
        Some(name) => Some(catalog::document(name).ok_or_else(|| CliError::UnknownProblem(name.clone()))?),
        None => None,
    };
    let file = match &inv.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
                path: path.clone(),
                message: e.to_string(),
            })?;
            let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| ConfigError::Schema {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            Some(value)
        }
        None => None,
    };
    let doc = match (base, file) {
        (Some(b), Some(f)) => catalog::merge(b, f),
        (Some(b), None) => b,
        (None, Some(f)) => f,
        (None, None) => return Err(CliError::MissingInput),
    };
    Ok(run_spec(parse_value(doc)?)?)
}

/// Runs an invocation end to end, never panicking on bad input.
pub fn run(inv: &Invocation) -> Report {
    let spec = match load_spec(inv) {
        Ok(s) => s,
        Err(e) => return failure(e),
    };
    match execute(inv.command, &spec, inv.seed) {
        Ok(r) => r,
        Err(e) => failure(e),
    }
}

fn failure(e: CliError) -> Report {
    Report {
        status: e.status(),
        artifacts: Vec::new(),
        messages: vec![format!("error: {e}")],
    }
}

pub fn execute(command: Command, spec: &RunSpec, seed: u64) -> Result<Report, CliError> {
    match command {
        Command::Eig => eig(spec),
        Command::Converge => converge(spec),
        Command::Compare => compare(spec),
        Command::Oracle => oracle(spec),
        Command::Check => check(spec, seed),
    }
}

/// Writes artifacts into `dir` (created if needed), or to stdout.
pub fn emit(report: &Report, dir: Option<&Path>) -> Result<(), CliError> {
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
                path: dir.into(),
                message: e.to_string(),
            })?;
            for a in &report.artifacts {
                let path = dir.join(&a.name);
                std::fs::write(&path, &a.content).map_err(|e| CliError::Io {
                    path,
                    message: e.to_string(),
                })?;
            }
        }
        None => {
            let many = report.artifacts.len() > 1;
            for a in &report.artifacts {
                if many {
                    println!("# file: {}", a.name);
                }
                print!("{}", a.content);
            }
        }
    }
    Ok(())
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// `index,re,im,modulus,residual`
pub fn spectrum_csv(s: &Spectrum) -> String {
    let mut out = String::from("index,re,im,modulus,residual\n");
    for (i, (z, r)) in s.eigenvalues.iter().zip(&s.residuals).enumerate() {
        writeln!(out, "{i},{},{},{},{}", num(z.re), num(z.im), num(z.norm()), num(*r)).unwrap();
    }
    out
}

/// `N,M,re,im,abs_error,cond_estimate`, followed by comment trailers.
pub fn convergence_csv(t: &ConvergenceTable) -> String {
    let mut out = String::from("N,M,re,im,abs_error,cond_estimate\n");
    let opt = |v: Option<f64>| v.map_or(String::new(), num);
    for r in &t.rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n,
            r.m,
            opt(r.eigenvalue.map(|z| z.re)),
            opt(r.eigenvalue.map(|z| z.im)),
            opt(r.error),
            opt(r.condition)
        )
        .unwrap();
    }
    let rf = &t.reference;
    writeln!(
        out,
        "# reference,{},{},{}",
        rf.provenance,
        num(rf.value.re),
        num(rf.value.im)
    )
    .unwrap();
    match order_estimate(t) {
        Ok(slope) => writeln!(out, "# order_estimate,{}", num(slope)).unwrap(),
        Err(e) => writeln!(out, "# order_estimate,unavailable: {e}").unwrap(),
    }
    if t.failures() > 0 {
        writeln!(out, "# partial: {} of {} rows failed", t.failures(), t.rows.len()).unwrap();
    }
    out
}

fn warnings(t: &EvolutionMatrix) -> Vec<String> {
    t.warnings.iter().map(|w| format!("warning: {w}")).collect()
}

fn eig(spec: &RunSpec) -> Result<Report, CliError> {
    let t = discretize(&spec.problem, &spec.disc)?;
    let s = eig_dense(&t.data)?;
    let mut messages = warnings(&t);
    messages.push(format!(
        "matrix order {}, condition estimate of I - U2 {:.3e}",
        t.data.nrows(),
        t.condition_estimate
    ));
    Ok(Report {
        status: ExitStatus::Success,
        artifacts: vec![Artifact {
            name: "spectrum.csv".into(),
            content: spectrum_csv(&s),
        }],
        messages,
    })
}

fn default_region() -> RegionDoc {
    RegionDoc {
        re: [-2.0, 1.0],
        im: [-10.0, 10.0],
        grid: [12, 40],
    }
}

fn region(doc: &RegionDoc) -> Result<RootSearchRegion, OracleError> {
    RootSearchRegion::new(
        (doc.re[0], doc.re[1]),
        (doc.im[0], doc.im[1]),
        (doc.grid[0], doc.grid[1]),
    )
}

/// The reference multiplier of a sweep, resolved from the run section.
pub fn resolve_reference(spec: &RunSpec) -> Result<Reference, CliError> {
    let p = &spec.problem;
    let h = spec.disc.h;
    let doc = spec.run.reference.clone().unwrap_or(if p.is_autonomous() {
        ReferenceDoc::CharRoots {
            region: default_region(),
        }
    } else {
        ReferenceDoc::Bruteforce {
            m: DEFAULT_BRUTEFORCE_M,
            steps: DEFAULT_BRUTEFORCE_STEPS,
        }
    });
    match doc {
        ReferenceDoc::Value { re, im } => Ok(Reference::new(Complex64::new(re, im), "value")),
        ReferenceDoc::CharRoots { region: r } => {
            let roots = char_roots(p, &region(&r)?)?;
            let lambda = roots.first().copied().ok_or_else(|| {
                CliError::Config(ConfigError::Invalid(
                    "run.reference: no characteristic root in region".into(),
                ))
            })?;
            Ok(Reference::new(
                (lambda * h).exp(),
                format!("char-roots exp(h*({}{:+}i))", lambda.re, lambda.im),
            ))
        }
        ReferenceDoc::Bruteforce { m, steps } => {
            let a = monodromy_bruteforce_at(p, spec.disc.s, h, m, steps)?;
            let s = eig_dense(&a)?;
            let mu = s.eigenvalues.first().copied().unwrap_or_default();
            Ok(Reference::new(mu, format!("bruteforce M={m} steps={steps}")))
        }
    }
}

fn converge(spec: &RunSpec) -> Result<Report, CliError> {
    let reference = resolve_reference(spec)?;
    let n_list = spec.run.n_list.clone().unwrap_or_else(|| DEFAULT_N_LIST.to_vec());
    let offset = spec.disc.m as isize - spec.disc.n as isize;
    let kind = spec.problem.kind;
    let table = convergence_sweep_with(&spec.problem, &spec.disc, &n_list, reference, |n| {
        ((n as isize + offset).max(0) as usize).max(DiscConfig::min_m(kind, n))
    });
    let mut messages = Vec::new();
    for r in &table.rows {
        if let Some(f) = &r.failure {
            messages.push(format!("N = {}: {f}", r.n));
        }
    }
    match order_estimate(&table) {
        Ok(slope) => messages.push(format!("order estimate {slope:.3}")),
        Err(e) => messages.push(format!("order estimate unavailable: {e}")),
    }
    let status = if table.failures() > 0 {
        ExitStatus::NumericalFailure
    } else {
        ExitStatus::Success
    };
    Ok(Report {
        status,
        artifacts: vec![Artifact {
            name: "convergence.csv".into(),
            content: convergence_csv(&table),
        }],
        messages,
    })
}

fn with_method(cfg: &DiscConfig, method: Method) -> DiscConfig {
    let mut c = cfg.clone().with_method(method);
    c.pieces = None;
    c
}

fn compare(spec: &RunSpec) -> Result<Report, CliError> {
    let p = &spec.problem;
    let col = discretize(p, &with_method(&spec.disc, Method::Collocation))?;
    let wr = discretize(p, &with_method(&spec.disc, Method::WeightedResiduals))?;
    let sc = eig_dense(&col.data)?;
    let sw = eig_dense(&wr.data)?;
    let mut out = String::from("index,collocation_re,collocation_im,weighted_re,weighted_im,delta\n");
    let mut worst: f64 = 0.0;
    for (i, (z, w)) in match_dominant(&sc.eigenvalues, &sw.eigenvalues).into_iter().enumerate() {
        let w = w.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        let d = (w - z).norm();
        worst = worst.max(if d.is_nan() { f64::INFINITY } else { d });
        writeln!(
            out,
            "{i},{},{},{},{},{}",
            num(z.re),
            num(z.im),
            num(w.re),
            num(w.im),
            num(d)
        )
        .unwrap();
    }
    writeln!(out, "# max_delta,{}", num(worst)).unwrap();
    let mut messages = warnings(&col);
    messages.extend(warnings(&wr));
    messages.push(format!("max dominant-cluster delta {worst:.3e}"));
    Ok(Report {
        status: ExitStatus::Success,
        artifacts: vec![Artifact {
            name: "compare.csv".into(),
            content: out,
        }],
        messages,
    })
}

fn oracle(spec: &RunSpec) -> Result<Report, CliError> {
    let p = &spec.problem;
    let h = spec.disc.h;
    let mut artifacts = Vec::new();
    let mut messages = Vec::new();
    let (bf_m, bf_steps) = match &spec.run.reference {
        Some(ReferenceDoc::Bruteforce { m, steps }) => (*m, *steps),
        _ => (DEFAULT_BRUTEFORCE_M, DEFAULT_BRUTEFORCE_STEPS),
    };
    if p.is_autonomous() {
        let r = match &spec.run.reference {
            Some(ReferenceDoc::CharRoots { region }) => region.clone(),
            _ => default_region(),
        };
        let roots = char_roots(p, &region(&r)?)?;
        let mut out = String::from("index,re,im,multiplier_re,multiplier_im\n");
        for (i, z) in roots.iter().enumerate() {
            let mu = (z * h).exp();
            writeln!(out, "{i},{},{},{},{}", num(z.re), num(z.im), num(mu.re), num(mu.im)).unwrap();
        }
        messages.push(format!("{} characteristic roots in the search region", roots.len()));
        artifacts.push(Artifact {
            name: "roots.csv".into(),
            content: out,
        });
    } else {
        messages.push("problem is not autonomous: characteristic roots skipped".into());
    }
    let a = monodromy_bruteforce_at(p, spec.disc.s, h, bf_m, bf_steps)?;
    let s = eig_dense(&a)?;
    messages.push(format!("brute-force monodromy with M = {bf_m}, {bf_steps} steps"));
    artifacts.push(Artifact {
        name: "bruteforce.csv".into(),
        content: spectrum_csv(&s),
    });
    Ok(Report {
        status: ExitStatus::Success,
        artifacts,
        messages,
    })
}

/// Outcome of one invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: &'static str,
    pub value: Option<f64>,
    pub tolerance: f64,
    /// `None` for skipped checks.
    pub passed: Option<bool>,
    pub note: String,
}

impl CheckLine {
    fn measured(name: &'static str, value: f64, tolerance: f64) -> CheckLine {
        CheckLine {
            name,
            value: Some(value),
            tolerance,
            passed: Some(value <= tolerance),
            note: String::new(),
        }
    }

    fn skipped(name: &'static str, tolerance: f64, note: impl Into<String>) -> CheckLine {
        CheckLine {
            name,
            value: None,
            tolerance,
            passed: None,
            note: note.into(),
        }
    }

    fn failed(name: &'static str, tolerance: f64, note: impl Into<String>) -> CheckLine {
        CheckLine {
            name,
            value: None,
            tolerance,
            passed: Some(false),
            note: note.into(),
        }
    }
}

fn spectrum_of(p: &ProblemSpec, cfg: &DiscConfig) -> Result<Spectrum, CliError> {
    Ok(eig_dense(&discretize(p, cfg)?.data)?)
}

fn conjugate_gap(s: &Spectrum) -> f64 {
    s.eigenvalues
        .iter()
        .map(|z| {
            s.eigenvalues
                .iter()
                .map(|w| (w - z.conj()).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// The invariant suite on the run's problem and discretization.
pub fn invariant_suite(spec: &RunSpec, seed: u64) -> Vec<CheckLine> {
    let p = &spec.problem;
    let cfg = &spec.disc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = Vec::new();

    let ctx = match build_context(p, cfg) {
        Ok(c) => c,
        Err(e) => return vec![CheckLine::failed("build", 0.0, e.to_string())],
    };

    let mut worst_fwd: f64 = 0.0;
    let mut worst_hist: f64 = 0.0;
    for _ in 0..CHECK_SAMPLES {
        let fwd = ctx.forward();
        let z: Vec<f64> = (0..fwd.slot_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let back = match fwd {
            ForwardBasis::Nodal(b) => b
                .slot_nodes()
                .iter()
                .enumerate()
                .map(|(s, &x)| b.prolong(&z, b.slot_piece(s), x))
                .collect(),
            _ => fwd.restrict(|x| fwd.prolong(&z, x)),
        };
        worst_fwd = worst_fwd.max(rel_gap(&back, &z));
        let hist = ctx.history();
        let phi: Vec<f64> = (0..hist.slot_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let back: Vec<f64> = hist
            .slot_nodes()
            .iter()
            .enumerate()
            .map(|(s, &x)| hist.prolong(&phi, hist.slot_piece(s), x))
            .collect();
        worst_hist = worst_hist.max(rel_gap(&back, &phi));
    }
    lines.push(CheckLine::measured("projection_forward", worst_fwd, 1e-12));
    lines.push(CheckLine::measured("projection_history", worst_hist, 1e-12));

    let blocks = match ctx.assemble() {
        Ok(b) => b,
        Err(e) => {
            lines.push(CheckLine::failed("assemble", 0.0, e.to_string()));
            return lines;
        }
    };
    let phi = DVector::from_fn(ctx.history_dim(), |_, _| rng.random_range(-1.0..1.0));
    lines.push(match fixed_point_residual(&ctx, &blocks, &phi) {
        Ok(r) => CheckLine::measured("fixed_point_residual", r, 1e-9),
        Err(e) => CheckLine::failed("fixed_point_residual", 1e-9, e.to_string()),
    });
    if p.kind == ProblemKind::Re && cfg.h >= p.max_delay {
        lines.push(CheckLine::measured("re_t1_zero", blocks.t1.amax(), 0.0));
    } else {
        lines.push(CheckLine::skipped("re_t1_zero", 0.0, "needs an RE with h >= max_delay"));
    }

    let t = match crate::discretize::solve_reduced(&blocks) {
        Ok(t) => t,
        Err(e) => {
            lines.push(CheckLine::failed("well_posed", f64::INFINITY, e.to_string()));
            return lines;
        }
    };
    lines.push(CheckLine::measured("well_posed", t.condition_estimate, f64::MAX));
    let s = match eig_dense(&t.data) {
        Ok(s) => s,
        Err(e) => {
            lines.push(CheckLine::failed("eigen_residuals", 1e-8, e.to_string()));
            return lines;
        }
    };
    lines.push(CheckLine::measured("eigen_residuals", s.max_residual(), 1e-8));
    lines.push(CheckLine::measured("conjugate_symmetry", conjugate_gap(&s), 1e-10));

    let single_step = cfg.method != Method::PiecewiseCollocation;
    if p.is_autonomous() {
        let two = cfg.clone().with_h(2.0 * cfg.h);
        lines.push(match spectrum_of(p, &two) {
            Ok(s2) => {
                let squares: Vec<Complex64> = s.eigenvalues.iter().map(|z| z * z).collect();
                CheckLine::measured("semigroup", dominant_delta(&s2.eigenvalues, &squares), 1e-6)
            }
            Err(e) => CheckLine::failed("semigroup", 1e-6, e.to_string()),
        });
    } else {
        lines.push(CheckLine::skipped("semigroup", 1e-6, "problem is not autonomous"));
    }
    if p.is_autonomous() && single_step {
        let tau = p.max_delay;
        let short = cfg.clone().with_h(tau / 2.0);
        let long = cfg.clone().with_h(tau);
        lines.push(
            match (discretize(p, &short).map_err(CliError::from), spectrum_of(p, &long)) {
                (Ok(ts), Ok(sl)) => match eig_dense(&(&ts.data * &ts.data)) {
                    Ok(sq) => CheckLine::measured(
                        "shift_consistency",
                        dominant_delta(&sl.eigenvalues, &sq.eigenvalues),
                        1e-5,
                    ),
                    Err(e) => CheckLine::failed("shift_consistency", 1e-5, e.to_string()),
                },
                (Err(e), _) | (_, Err(e)) => CheckLine::failed("shift_consistency", 1e-5, e.to_string()),
            },
        );
    } else {
        lines.push(CheckLine::skipped(
            "shift_consistency",
            1e-5,
            "needs an autonomous problem and a single-piece method",
        ));
    }

    lines.push(
        match monodromy_bruteforce_at(p, cfg.s, cfg.h, DEFAULT_BRUTEFORCE_M, CHECK_BRUTEFORCE_STEPS)
            .map_err(CliError::from)
            .and_then(|a| Ok(eig_dense(&a)?))
        {
            Ok(sb) => CheckLine::measured(
                "bruteforce_oracle",
                dominant_delta(&s.eigenvalues, &sb.eigenvalues),
                1e-4,
            ),
            Err(e) => CheckLine::failed("bruteforce_oracle", 1e-4, e.to_string()),
        },
    );
    lines
}

fn rel_gap(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

fn check(spec: &RunSpec, seed: u64) -> Result<Report, CliError> {
    let lines = invariant_suite(spec, seed);
    let mut out = String::from("invariant,status,value,tolerance,note\n");
    for l in &lines {
        let status = match l.passed {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "skip",
        };
        let value = l.value.map_or(String::new(), num);
        writeln!(
            out,
            "{},{status},{value},{},{}",
            l.name,
            num(l.tolerance),
            l.note.replace(',', ";")
        )
        .unwrap();
    }
    let failed: Vec<&str> = lines
        .iter()
        .filter(|l| l.passed == Some(false))
        .map(|l| l.name)
        .collect();
    let (status, messages) = if failed.is_empty() {
        (ExitStatus::Success, vec![format!("{} invariants checked", lines.len())])
    } else {
        (ExitStatus::CheckFailed, vec![format!("failed: {}", failed.join(", "))])
    };
    Ok(Report {
        status,
        artifacts: vec![Artifact {
            name: "check.csv".into(),
            content: out,
        }],
        messages,
    })
}
