//! JSON run documents.
//!
//! ```json
//! {"problem": {"kind": "rfde", "dim": 1, "max_delay": 1,
//!              "discrete": [{"delay": 1, "B": [["-(pi/2)"]]}]},
//!  "disc": {"M": 21, "N": 20, "h": 1, "s": 0, "method": "collocation"},
//!  "run": {"n_list": [5, 10, 15], "reference": {"kind": "value", "re": 0, "im": 1}}}
//! ```
//!
//! Matrix entries are numbers or expressions in `t` (and `theta` inside
//! kernels). Unknown keys are rejected.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::expr::{parse_expr, ParseError};
use crate::discretize::{DiscConfig, Method};
use crate::problems::{validate, CoeffMatrix, ProblemError, ProblemKind, ProblemSpec, ScalarFn, TrigPoly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: expression {src:?}: {source}")]
    Expr {
        path: String,
        src: String,
        source: ParseError,
    },
    #[error("{path}: `theta` is only allowed in kernel coefficients")]
    ThetaOutsideKernel { path: String },
    #[error("problem: {0}")]
    Problem(#[from] ProblemError),
    #[error("{0}")]
    Invalid(String),
}

/// A matrix entry: a number or an expression string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryDoc {
    Number(f64),
    Expr(String),
}

pub type MatrixDoc = Vec<Vec<EntryDoc>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindDoc {
    Rfde,
    Re,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteDoc {
    pub delay: f64,
    #[serde(rename = "B")]
    pub b: MatrixDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelDoc {
    pub support: [f64; 2],
    #[serde(rename = "C")]
    pub c: MatrixDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDoc {
    pub kind: KindDoc,
    pub dim: usize,
    pub max_delay: f64,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discrete: Option<Vec<DiscreteDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernels: Option<Vec<KernelDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodDoc {
    Collocation,
    WeightedResiduals,
    Piecewise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscDoc {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub h: f64,
    #[serde(default)]
    pub s: f64,
    #[serde(default = "default_method")]
    pub method: MethodDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pieces: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_order: Option<usize>,
}

fn default_method() -> MethodDoc {
    MethodDoc::Collocation
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionDoc {
    pub re: [f64; 2],
    pub im: [f64; 2],
    #[serde(default = "default_grid")]
    pub grid: [usize; 2],
}

fn default_grid() -> [usize; 2] {
    [8, 8]
}

/// Where the reference eigenvalue of `converge` comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ReferenceDoc {
    /// A given multiplier.
    Value { re: f64, im: f64 },
    /// The characteristic root in `region` with the largest real part,
    /// mapped to `e^{λh}`.
    CharRoots { region: RegionDoc },
    /// The dominant eigenvalue of the brute-force monodromy matrix.
    Bruteforce {
        #[serde(rename = "M", default = "default_bf_m")]
        m: usize,
        #[serde(default = "default_bf_steps")]
        steps: usize,
    },
}

fn default_bf_m() -> usize {
    24
}

fn default_bf_steps() -> usize {
    4096
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    pub problem: ProblemDoc,
    pub disc: DiscDoc,
    #[serde(default)]
    pub run: RunDoc,
}

/// Parsed and validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub problem: ProblemSpec,
    pub disc: DiscConfig,
    pub run: RunDoc,
}

/// Maps a deserialization error to `path: message`, naming missing keys
/// as part of the path.
fn schema_error(err: serde_path_to_error::Error<serde_json::Error>) -> ConfigError {
    let mut path = err.path().to_string();
    let inner = err.into_inner();
    let text = inner.to_string();
    let message = text.split(" at line ").next().unwrap_or(&text).to_string();
    if let Some(rest) = message.strip_prefix("missing field `") {
        let key = rest.trim_end_matches('`');
        path = if path == "." {
            key.to_string()
        } else {
            format!("{path}.{key}")
        };
    }
    ConfigError::Schema { path, message }
}

/// Parses a JSON document against the strict schema.
pub fn parse_document(text: &str) -> Result<ConfigDoc, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(schema_error)
}

/// Parses the generic JSON value form (used when merging documents).
pub fn parse_value(value: serde_json::Value) -> Result<ConfigDoc, ConfigError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let mut path = e.path().to_string();
        let message = e.into_inner().to_string();
        if let Some(rest) = message.strip_prefix("missing field `") {
            let key = rest.trim_end_matches('`');
            path = if path == "." {
                key.to_string()
            } else {
                format!("{path}.{key}")
            };
        }
        ConfigError::Schema { path, message }
    })
}

/// Full parse: schema, expressions, problem validation, discretization
/// parameters.
pub fn parse_config(text: &str) -> Result<RunSpec, ConfigError> {
    run_spec(parse_document(text)?)
}

fn entry(path: &str, e: &EntryDoc, allow_theta: bool) -> Result<ScalarFn, ConfigError> {
    match e {
        EntryDoc::Number(v) => Ok(ScalarFn::Const(*v)),
        EntryDoc::Expr(src) => {
            let expr = parse_expr(src).map_err(|source| ConfigError::Expr {
                path: path.to_string(),
                src: src.clone(),
                source,
            })?;
            if expr.uses_theta() && !allow_theta {
                return Err(ConfigError::ThetaOutsideKernel { path: path.to_string() });
            }
            Ok(ScalarFn::Expr(expr))
        }
    }
}

fn matrix(path: &str, m: &MatrixDoc, allow_theta: bool) -> Result<CoeffMatrix, ConfigError> {
    let rows = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, e)| entry(&format!("{path}[{i}][{j}]"), e, allow_theta))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CoeffMatrix::from_rows(rows))
}

/// Builds the problem described by a document (validated).
pub fn problem_from_doc(doc: &ProblemDoc) -> Result<ProblemSpec, ConfigError> {
    let mut p = match doc.kind {
        KindDoc::Rfde => ProblemSpec::rfde(doc.dim, doc.max_delay),
        KindDoc::Re => ProblemSpec::re(doc.dim, doc.max_delay),
    };
    if let Some(a) = &doc.a {
        p = p.with_a(matrix("problem.A", a, false)?);
    }
    for (i, d) in doc.discrete.iter().flatten().enumerate() {
        p = p.with_discrete(d.delay, matrix(&format!("problem.discrete[{i}].B"), &d.b, false)?);
    }
    for (i, k) in doc.kernels.iter().flatten().enumerate() {
        p = p.with_kernel(
            k.support[0],
            k.support[1],
            matrix(&format!("problem.kernels[{i}].C"), &k.c, true)?,
        );
    }
    if let Some(period) = doc.period {
        p = p.with_period(period);
    }
    Ok(validate(p)?)
}

fn disc_from_doc(doc: &DiscDoc) -> DiscConfig {
    DiscConfig {
        m: doc.m,
        n: doc.n,
        h: doc.h,
        s: doc.s,
        method: match doc.method {
            MethodDoc::Collocation => Method::Collocation,
            MethodDoc::WeightedResiduals => Method::WeightedResiduals,
            MethodDoc::Piecewise => Method::PiecewiseCollocation,
        },
        pieces: doc.pieces.clone(),
        quad_order: doc.quad_order,
    }
}

pub fn run_spec(doc: ConfigDoc) -> Result<RunSpec, ConfigError> {
    let problem = problem_from_doc(&doc.problem)?;
    let disc = disc_from_doc(&doc.disc);
    if !(disc.h.is_finite() && disc.h > 0.0) {
        return Err(ConfigError::Schema {
            path: "disc.h".into(),
            message: format!("must be positive, got {}", disc.h),
        });
    }
    let min_m = DiscConfig::min_m(problem.kind, disc.n);
    if disc.m < min_m {
        return Err(ConfigError::Schema {
            path: "disc.M".into(),
            message: format!("M = {} is below the minimum {min_m} for N = {}", disc.m, disc.n),
        });
    }
    if let Some(list) = &doc.run.n_list {
        if list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::Schema {
                path: "run.n_list".into(),
                message: "must increase strictly".into(),
            });
        }
    }
    Ok(RunSpec {
        problem,
        disc,
        run: doc.run,
    })
}

fn scalar_doc(f: &ScalarFn) -> EntryDoc {
    match f {
        ScalarFn::Const(v) => EntryDoc::Number(*v),
        ScalarFn::Expr(e) => EntryDoc::Expr(e.to_string()),
        ScalarFn::Trig(p) => EntryDoc::Expr(trig_source(p)),
        ScalarFn::Sum(parts) => EntryDoc::Expr(
            parts
                .iter()
                .map(|p| match scalar_doc(p) {
                    EntryDoc::Number(v) => format!("({v})"),
                    EntryDoc::Expr(s) => format!("({s})"),
                })
                .collect::<Vec<_>>()
                .join(" + "),
        ),
    }
}

fn trig_source(p: &TrigPoly) -> String {
    let mut s = format!("({})", p.constant);
    for (k, c) in p.cos.iter().enumerate() {
        s += &format!(" + ({c})*cos({}*{}*t)", k + 1, p.omega);
    }
    for (k, c) in p.sin.iter().enumerate() {
        s += &format!(" + ({c})*sin({}*{}*t)", k + 1, p.omega);
    }
    s
}

fn matrix_doc(m: &CoeffMatrix) -> MatrixDoc {
    let (rows, cols) = m.shape();
    (0..rows)
        .map(|i| (0..cols).map(|j| scalar_doc(m.entry(i, j))).collect())
        .collect()
}

/// The document describing a run specification.
pub fn to_document(spec: &RunSpec) -> ConfigDoc {
    let p = &spec.problem;
    let problem = ProblemDoc {
        kind: match p.kind {
            ProblemKind::Rfde => KindDoc::Rfde,
            ProblemKind::Re => KindDoc::Re,
        },
        dim: p.dim,
        max_delay: p.max_delay,
        a: p.a.as_ref().map(matrix_doc),
        discrete: (!p.discrete.is_empty()).then(|| {
            p.discrete
                .iter()
                .map(|d| DiscreteDoc {
                    delay: d.delay,
                    b: matrix_doc(&d.coeff),
                })
                .collect()
        }),
        kernels: (!p.kernels.is_empty()).then(|| {
            p.kernels
                .iter()
                .map(|k| KernelDoc {
                    support: [k.support.0, k.support.1],
                    c: matrix_doc(&k.coeff),
                })
                .collect()
        }),
        period: p.period,
    };
    let d = &spec.disc;
    let disc = DiscDoc {
        m: d.m,
        n: d.n,
        h: d.h,
        s: d.s,
        method: match d.method {
            Method::Collocation => MethodDoc::Collocation,
            Method::WeightedResiduals => MethodDoc::WeightedResiduals,
            Method::PiecewiseCollocation => MethodDoc::Piecewise,
        },
        pieces: d.pieces.clone(),
        quad_order: d.quad_order,
    };
    ConfigDoc {
        problem,
        disc,
        run: spec.run.clone(),
    }
}

/// Pretty-printed JSON of [`to_document`].
pub fn serialize(spec: &RunSpec) -> String {
    serde_json::to_string_pretty(&to_document(spec)).expect("documents always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    const HAYES: &str = r#"{
        "problem": {"kind": "rfde", "dim": 1, "max_delay": 1,
                    "discrete": [{"delay": 1, "B": [["-(pi/2)"]]}]},
        "disc": {"M": 21, "N": 20, "h": 1, "s": 0, "method": "collocation"}
    }"#;

    #[test]
    fn minimal_hayes() {
        let spec = parse_config(HAYES).unwrap();
        assert_eq!(spec.problem.dim, 1);
        assert_eq!(spec.problem.max_delay, 1.0);
        let b = spec.problem.discrete[0].coeff.entry(0, 0);
        assert!((b.eval(0.0, 0.0).unwrap() + std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(spec.disc.m, 21);
    }

    #[test]
    fn missing_key_path() {
        let doc = HAYES.replace(r#""max_delay": 1,"#, "");
        let err = parse_config(&doc).unwrap_err();
        let ConfigError::Schema { path, .. } = &err else {
            panic!("{err:?}")
        };
        assert_eq!(path, "problem.max_delay");
    }

    #[test]
    fn unknown_keys_rejected() {
        let doc = HAYES.replace(r#""dim": 1"#, r#""dim": 1, "dimension": 1"#);
        let err = parse_config(&doc).unwrap_err();
        assert!(err.to_string().contains("dimension"), "{err}");
        let doc = HAYES.replace(r#""h": 1"#, r#""h": 1, "hh": 2"#);
        assert!(matches!(parse_config(&doc), Err(ConfigError::Schema { .. })));
    }

    #[test]
    fn theta_only_in_kernels() {
        let doc = HAYES.replace("-(pi/2)", "theta");
        assert!(matches!(
            parse_config(&doc),
            Err(ConfigError::ThetaOutsideKernel { .. })
        ));
        let re = r#"{"problem": {"kind": "re", "dim": 1, "max_delay": 1,
                     "kernels": [{"support": [-1, 0], "C": [["0.5*exp(theta)"]]}]},
                     "disc": {"M": 8, "N": 8, "h": 1}}"#;
        assert!(parse_config(re).is_ok());
    }

    #[test]
    fn bad_expression_is_located() {
        let doc = HAYES.replace("-(pi/2)", "2 * (t");
        let err = parse_config(&doc).unwrap_err();
        assert!(err.to_string().starts_with("problem.discrete[0].B[0][0]"), "{err}");
    }

    #[test]
    fn roundtrip() {
        let spec = parse_config(HAYES).unwrap();
        let again = parse_config(&serialize(&spec)).unwrap();
        assert_eq!(spec, again);
    }

    #[test]
    fn validation_errors_propagate() {
        let doc = HAYES.replace(r#""delay": 1,"#, r#""delay": 2,"#);
        assert!(matches!(
            parse_config(&doc),
            Err(ConfigError::Problem(ProblemError::DelayExceedsMax { .. }))
        ));
    }
}
