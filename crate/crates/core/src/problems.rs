//! Linear retarded functional differential equations (RFDEs) of the form
//!
//! ```text
//! x'(t) = A(t) x(t) + Σ_k B_k(t) x(t - τ_k) + Σ_k ∫_{support_k} C_k(t, θ) x(t + θ) dθ
//! ```
//!
//! and linear renewal equations (REs) `x(t) = ∫_{-τ}^{0} C(t, θ) x(t + θ) dθ`,
//! together with coefficient evaluation, structural validation and the
//! characteristic matrix of autonomous problems.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::cli::expr::{CoeffExpr, EvalError};
use crate::grids::clenshaw_curtis;

/// Points used by [`characteristic_matrix`] for distributed terms.
pub const CHARACTERISTIC_QUAD_POINTS: usize = 64;
/// Tolerance of the periodicity sample check.
pub const PERIODICITY_TOL: f64 = 1e-10;
/// Side of the `(t, θ)` sampling grid used to bound kernels.
pub const KERNEL_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("max_delay must be positive and finite, got {0}")]
    BadMaxDelay(f64),
    #[error("delays must be positive and finite, got {0}")]
    BadDelay(f64),
    #[error("delay exceeds max_delay: {delay} > {max_delay}")]
    DelayExceedsMax { delay: f64, max_delay: f64 },
    #[error("largest delay {largest} does not equal max_delay {max_delay}")]
    MaxDelayMismatch { largest: f64, max_delay: f64 },
    #[error("{what}: expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("kernel support [{lo}, {hi}] must satisfy -max_delay <= lo < hi <= 0")]
    BadSupport { lo: f64, hi: f64 },
    #[error("kernel supports [{0}, {1}] and [{2}, {3}] overlap")]
    OverlappingSupports(f64, f64, f64, f64),
    #[error("renewal equations only take kernel terms")]
    TermsNotAllowed,
    #[error("period must be positive and finite, got {0}")]
    BadPeriod(f64),
    #[error("{what} is not periodic with period {period} (mismatch {mismatch:e} at t = {t})")]
    NotPeriodic {
        what: String,
        period: f64,
        t: f64,
        mismatch: f64,
    },
    #[error("kernel {index} is not bounded on the sampled grid")]
    UnboundedKernel { index: usize },
    #[error("problem is not autonomous: coefficients depend on t")]
    NonAutonomous,
    #[error("coefficient entry ({row}, {col}) at t = {t}, theta = {theta}: {source}")]
    Eval {
        row: usize,
        col: usize,
        t: f64,
        theta: f64,
        source: EvalError,
    },
}

/// `a0 + Σ_k (c_k cos(k ω t) + s_k sin(k ω t))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    pub omega: f64,
    pub constant: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigPoly {
    pub fn eval(&self, t: f64) -> f64 {
        let mut v = self.constant;
        for (k, c) in self.cos.iter().enumerate() {
            v += c * ((k + 1) as f64 * self.omega * t).cos();
        }
        for (k, s) in self.sin.iter().enumerate() {
            v += s * ((k + 1) as f64 * self.omega * t).sin();
        }
        v
    }

    fn is_constant(&self) -> bool {
        self.cos.iter().chain(&self.sin).all(|&c| c == 0.0)
    }
}

/// A scalar coefficient, a function of time `t` and (for kernels) of `θ`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarFn {
    Const(f64),
    Trig(TrigPoly),
    Expr(CoeffExpr),
    Sum(Vec<ScalarFn>),
}

impl ScalarFn {
    pub fn eval(&self, t: f64, theta: f64) -> Result<f64, EvalError> {
        match self {
            ScalarFn::Const(v) => Ok(*v),
            ScalarFn::Trig(p) => Ok(p.eval(t)),
            ScalarFn::Expr(e) => e.eval(t, theta),
            ScalarFn::Sum(parts) => parts.iter().try_fold(0.0, |acc, p| Ok(acc + p.eval(t, theta)?)),
        }
    }

    pub fn is_autonomous(&self) -> bool {
        match self {
            ScalarFn::Const(_) => true,
            ScalarFn::Trig(p) => p.is_constant(),
            ScalarFn::Expr(e) => !e.uses_t(),
            ScalarFn::Sum(parts) => parts.iter().all(ScalarFn::is_autonomous),
        }
    }

    pub fn uses_theta(&self) -> bool {
        match self {
            ScalarFn::Expr(e) => e.uses_theta(),
            ScalarFn::Sum(parts) => parts.iter().any(ScalarFn::uses_theta),
            _ => false,
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, ScalarFn::Const(v) if *v == 0.0)
    }
}

impl From<f64> for ScalarFn {
    fn from(v: f64) -> Self {
        ScalarFn::Const(v)
    }
}

impl From<CoeffExpr> for ScalarFn {
    fn from(e: CoeffExpr) -> Self {
        ScalarFn::Expr(e)
    }
}

/// A `d x d` matrix of scalar coefficient functions, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<ScalarFn>,
}

impl CoeffMatrix {
    /// Square matrix from rows of entries.
    pub fn from_rows(rows: Vec<Vec<ScalarFn>>) -> CoeffMatrix {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let ragged = rows.iter().any(|r| r.len() != ncols);
        CoeffMatrix {
            rows: nrows,
            // a ragged matrix is reported as having 0 columns and fails validation
            cols: if ragged { 0 } else { ncols },
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn constant(dim: usize, values: &[f64]) -> CoeffMatrix {
        assert_eq!(values.len(), dim * dim, "row-major d*d values");
        CoeffMatrix {
            rows: dim,
            cols: dim,
            entries: values.iter().map(|&v| ScalarFn::Const(v)).collect(),
        }
    }

    pub fn scalar(f: impl Into<ScalarFn>) -> CoeffMatrix {
        CoeffMatrix {
            rows: 1,
            cols: 1,
            entries: vec![f.into()],
        }
    }

    pub fn dim(&self) -> usize {
        self.rows
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entry(&self, row: usize, col: usize) -> &ScalarFn {
        &self.entries[row * self.cols + col]
    }

    pub fn entries(&self) -> &[ScalarFn] {
        &self.entries
    }

    /// Entry-wise evaluation at time `t` (with `θ = 0`).
    pub fn eval(&self, t: f64) -> Result<DMatrix<f64>, ProblemError> {
        self.eval_kernel(t, 0.0)
    }

    /// Entry-wise evaluation at `(t, θ)`.
    pub fn eval_kernel(&self, t: f64, theta: f64) -> Result<DMatrix<f64>, ProblemError> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for row in 0..self.rows {
            for col in 0..self.cols {
                m[(row, col)] = self
                    .entry(row, col)
                    .eval(t, theta)
                    .map_err(|source| ProblemError::Eval {
                        row,
                        col,
                        t,
                        theta,
                        source,
                    })?;
            }
        }
        Ok(m)
    }

    pub fn is_autonomous(&self) -> bool {
        self.entries.iter().all(ScalarFn::is_autonomous)
    }

    pub fn uses_theta(&self) -> bool {
        self.entries.iter().any(ScalarFn::uses_theta)
    }

    fn merged_with(self, other: CoeffMatrix) -> CoeffMatrix {
        let entries = self
            .entries
            .into_iter()
            .zip(other.entries)
            .map(|(a, b)| match (a, b) {
                (a, b) if b.is_zero() => a,
                (a, b) if a.is_zero() => b,
                (ScalarFn::Const(x), ScalarFn::Const(y)) => ScalarFn::Const(x + y),
                (ScalarFn::Sum(mut xs), b) => {
                    xs.push(b);
                    ScalarFn::Sum(xs)
                }
                (a, b) => ScalarFn::Sum(vec![a, b]),
            })
            .collect();
        CoeffMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    fn check_dim(&self, what: &str, d: usize) -> Result<(), ProblemError> {
        if self.rows != d || self.cols != d {
            return Err(ProblemError::DimensionMismatch {
                what: what.to_string(),
                expected: d,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }
}

/// `B_k(t) x(t - τ_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTerm {
    pub delay: f64,
    pub coeff: CoeffMatrix,
}

/// `∫_{lo}^{hi} C(t, θ) x(t + θ) dθ`, a kernel restricted to its support.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTerm {
    pub support: (f64, f64),
    pub coeff: CoeffMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Rfde,
    Re,
}

/// A linear RFDE or RE with its delay and coefficient data.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub dim: usize,
    pub max_delay: f64,
    /// Instantaneous term, RFDE only.
    pub a: Option<CoeffMatrix>,
    pub discrete: Vec<DiscreteTerm>,
    pub kernels: Vec<KernelTerm>,
    pub period: Option<f64>,
    pub label: String,
}

impl ProblemSpec {
    pub fn rfde(dim: usize, max_delay: f64) -> ProblemSpec {
        ProblemSpec {
            kind: ProblemKind::Rfde,
            dim,
            max_delay,
            a: None,
            discrete: Vec::new(),
            kernels: Vec::new(),
            period: None,
            label: String::new(),
        }
    }

    pub fn re(dim: usize, max_delay: f64) -> ProblemSpec {
        ProblemSpec {
            kind: ProblemKind::Re,
            ..ProblemSpec::rfde(dim, max_delay)
        }
    }

    pub fn with_a(mut self, a: CoeffMatrix) -> Self {
        self.a = Some(a);
        self
    }

    pub fn with_discrete(mut self, delay: f64, coeff: CoeffMatrix) -> Self {
        self.discrete.push(DiscreteTerm { delay, coeff });
        self
    }

    pub fn with_kernel(mut self, lo: f64, hi: f64, coeff: CoeffMatrix) -> Self {
        self.kernels.push(KernelTerm {
            support: (lo, hi),
            coeff,
        });
        self
    }

    pub fn with_period(mut self, period: f64) -> Self {
        self.period = Some(period);
        self
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn is_autonomous(&self) -> bool {
        self.a.iter().all(CoeffMatrix::is_autonomous)
            && self.discrete.iter().all(|d| d.coeff.is_autonomous())
            && self.kernels.iter().all(|k| k.coeff.is_autonomous())
    }

    /// Largest `|C(t, θ)|` entry over a `64 x 64` grid of `t ∈ [0, T]` and `θ`
    /// in each support, `T` being the period when given and `max_delay`
    /// otherwise. Returns `None` when there are no kernels.
    pub fn sampled_kernel_bound(&self) -> Result<Option<f64>, ProblemError> {
        if self.kernels.is_empty() {
            return Ok(None);
        }
        let horizon = self.period.unwrap_or(self.max_delay);
        let mut gamma = 0.0f64;
        for (index, k) in self.kernels.iter().enumerate() {
            let (lo, hi) = k.support;
            for i in 0..KERNEL_SAMPLES {
                let t = horizon * i as f64 / (KERNEL_SAMPLES - 1) as f64;
                for j in 0..KERNEL_SAMPLES {
                    let theta = lo + (hi - lo) * j as f64 / (KERNEL_SAMPLES - 1) as f64;
                    let m = k.coeff.eval_kernel(t, theta)?;
                    let local = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
                    if !local.is_finite() {
                        return Err(ProblemError::UnboundedKernel { index });
                    }
                    gamma = gamma.max(local);
                }
            }
        }
        Ok(Some(gamma))
    }

    fn all_coefficients(&self) -> Vec<NamedCoeff<'_>> {
        let mut out = Vec::new();
        if let Some(a) = &self.a {
            out.push(("A".to_string(), a, None));
        }
        for (k, d) in self.discrete.iter().enumerate() {
            out.push((format!("discrete[{k}].B"), &d.coeff, None));
        }
        for (k, c) in self.kernels.iter().enumerate() {
            out.push((format!("kernels[{k}].C"), &c.coeff, Some(c.support)));
        }
        out
    }
}

/// Structural validation. Unsorted delays are sorted (with a warning), equal
/// delays merged, and every other violation is rejected.
pub fn validate(raw: ProblemSpec) -> Result<ProblemSpec, ProblemError> {
    let mut p = raw;
    if p.dim == 0 {
        return Err(ProblemError::ZeroDimension);
    }
    let tau = p.max_delay;
    if !(tau.is_finite() && tau > 0.0) {
        return Err(ProblemError::BadMaxDelay(tau));
    }
    let tol = 1e-12 * tau;
    if p.kind == ProblemKind::Re && (p.a.is_some() || !p.discrete.is_empty()) {
        return Err(ProblemError::TermsNotAllowed);
    }
    for (what, m, _) in p.all_coefficients() {
        m.check_dim(&what, p.dim)?;
    }

    for d in &p.discrete {
        if !(d.delay.is_finite() && d.delay > 0.0) {
            return Err(ProblemError::BadDelay(d.delay));
        }
        if d.delay > tau + tol {
            return Err(ProblemError::DelayExceedsMax {
                delay: d.delay,
                max_delay: tau,
            });
        }
    }
    if p.discrete.windows(2).any(|w| w[0].delay > w[1].delay) {
        log::warn!("{}: discrete delays were not sorted; sorting them", p.label);
    }
    p.discrete.sort_by(|x, y| x.delay.total_cmp(&y.delay));
    let mut merged: Vec<DiscreteTerm> = Vec::with_capacity(p.discrete.len());
    for term in p.discrete.drain(..) {
        match merged.last_mut() {
            Some(last) if (last.delay - term.delay).abs() <= tol => {
                log::warn!("{}: merging repeated delay {}", p.label, term.delay);
                let prev = std::mem::replace(&mut last.coeff, CoeffMatrix::constant(0, &[]));
                last.coeff = prev.merged_with(term.coeff);
            }
            _ => merged.push(term),
        }
    }
    p.discrete = merged;

    for k in &p.kernels {
        let (lo, hi) = k.support;
        if !(lo.is_finite() && hi.is_finite() && lo < hi && lo >= -tau - tol && hi <= tol) {
            return Err(ProblemError::BadSupport { lo, hi });
        }
    }
    p.kernels.sort_by(|x, y| x.support.0.total_cmp(&y.support.0));
    for w in p.kernels.windows(2) {
        let ((a0, a1), (b0, b1)) = (w[0].support, w[1].support);
        if a1 > b0 + tol {
            return Err(ProblemError::OverlappingSupports(a0, a1, b0, b1));
        }
    }

    let largest = p
        .discrete
        .iter()
        .map(|d| d.delay)
        .chain(p.kernels.iter().map(|k| -k.support.0))
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
    if let Some(largest) = largest {
        if (largest - tau).abs() > tol {
            return Err(ProblemError::MaxDelayMismatch {
                largest,
                max_delay: tau,
            });
        }
    }

    if let Some(period) = p.period {
        if !(period.is_finite() && period > 0.0) {
            return Err(ProblemError::BadPeriod(period));
        }
        check_periodic(&p, period)?;
    }
    if let Some(gamma) = p.sampled_kernel_bound()? {
        log::warn!("{}: sampled kernel bound gamma = {gamma:e}", p.label);
    }
    Ok(p)
}

/// A coefficient with its display name and, for kernels, the support.
type NamedCoeff<'a> = (String, &'a CoeffMatrix, Option<(f64, f64)>);

fn check_periodic(p: &ProblemSpec, period: f64) -> Result<(), ProblemError> {
    const SAMPLES: usize = 17;
    for (what, m, support) in p.all_coefficients() {
        let thetas: Vec<f64> = match support {
            Some((lo, hi)) => vec![lo, (lo + hi) / 2.0, hi],
            None => vec![0.0],
        };
        for i in 0..SAMPLES {
            // irrational-ish offsets so samples do not sit on special points
            let t = period * (i as f64 + 0.3137) / SAMPLES as f64;
            for &theta in &thetas {
                let now = m.eval_kernel(t, theta)?;
                let later = m.eval_kernel(t + period, theta)?;
                let mismatch = (now.clone() - later)
                    .iter()
                    .zip(now.iter())
                    .map(|(d, v)| d.abs() / (1.0 + v.abs()))
                    .fold(0.0, f64::max);
                if mismatch > PERIODICITY_TOL {
                    return Err(ProblemError::NotPeriodic {
                        what,
                        period,
                        t,
                        mismatch,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Entry-wise coefficient evaluation.
pub fn eval_coeff(c: &CoeffMatrix, t: f64) -> Result<DMatrix<f64>, ProblemError> {
    c.eval(t)
}

fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|v| Complex64::new(v, 0.0))
}

/// `Δ(λ)` of an autonomous problem.
///
/// RFDE: `λI - A - Σ B_k e^{-λτ_k} - Σ ∫ C_k(θ) e^{λθ} dθ`.
/// RE: `I - ∫ C(θ) e^{λθ} dθ`.
pub fn characteristic_matrix(p: &ProblemSpec, lambda: Complex64) -> Result<DMatrix<Complex64>, ProblemError> {
    if !p.is_autonomous() {
        return Err(ProblemError::NonAutonomous);
    }
    let d = p.dim;
    let identity = DMatrix::<Complex64>::identity(d, d);
    let mut delta = match p.kind {
        ProblemKind::Rfde => identity * lambda,
        ProblemKind::Re => identity,
    };
    if let Some(a) = &p.a {
        delta -= to_complex(&a.eval(0.0)?);
    }
    for term in &p.discrete {
        delta -= to_complex(&term.coeff.eval(0.0)?) * (-lambda * term.delay).exp();
    }
    for k in &p.kernels {
        let (lo, hi) = k.support;
        let rule = clenshaw_curtis(CHARACTERISTIC_QUAD_POINTS, lo, hi).expect("support validated");
        for (&theta, &w) in rule.points.iter().zip(&rule.weights) {
            let c = to_complex(&k.coeff.eval_kernel(0.0, theta)?);
            delta -= c * ((lambda * theta).exp() * w);
        }
    }
    Ok(delta)
}

/// A point `x_t(θ) = x(t + θ)` of a solution segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentQuery {
    pub base_time: f64,
    pub offset: f64,
}

impl SegmentQuery {
    /// Checks `t ∈ [0, h]`, `θ ∈ [-τ, 0]`.
    pub fn new(base_time: f64, offset: f64, max_delay: f64, step: f64) -> Option<SegmentQuery> {
        ((0.0..=step).contains(&base_time) && (-max_delay..=0.0).contains(&offset))
            .then_some(SegmentQuery { base_time, offset })
    }

    pub fn absolute(&self) -> f64 {
        self.base_time + self.offset
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::expr::parse_expr;
    use std::f64::consts::PI;

    fn expr(s: &str) -> ScalarFn {
        ScalarFn::Expr(parse_expr(s).unwrap())
    }

    fn hayes() -> ProblemSpec {
        ProblemSpec::rfde(1, 1.0).with_discrete(1.0, CoeffMatrix::scalar(-PI / 2.0))
    }

    #[test]
    fn accepts_scalar_rfde() {
        let p = validate(ProblemSpec::rfde(1, 1.0).with_discrete(1.0, CoeffMatrix::scalar(-1.0))).unwrap();
        assert_eq!(p.discrete.len(), 1);
    }

    #[test]
    fn rejects_delay_beyond_max() {
        let err = validate(ProblemSpec::rfde(1, 1.0).with_discrete(2.0, CoeffMatrix::scalar(-1.0))).unwrap_err();
        assert!(err.to_string().contains("delay exceeds max_delay"));
    }

    #[test]
    fn accepts_re_with_partial_support() {
        let p = validate(ProblemSpec::re(1, 3.0).with_kernel(-3.0, -1.0, CoeffMatrix::scalar(0.5))).unwrap();
        assert_eq!(p.kernels[0].support, (-3.0, -1.0));
    }

    #[test]
    fn structural_errors() {
        assert_eq!(
            validate(ProblemSpec::rfde(1, 0.0)).unwrap_err(),
            ProblemError::BadMaxDelay(0.0)
        );
        let mismatch = ProblemSpec::rfde(2, 1.0).with_discrete(1.0, CoeffMatrix::scalar(1.0));
        assert!(matches!(
            validate(mismatch),
            Err(ProblemError::DimensionMismatch { .. })
        ));
        let short = ProblemSpec::rfde(1, 2.0).with_discrete(1.0, CoeffMatrix::scalar(1.0));
        assert!(matches!(validate(short), Err(ProblemError::MaxDelayMismatch { .. })));
        let overlap = ProblemSpec::rfde(1, 2.0)
            .with_kernel(-2.0, -0.5, CoeffMatrix::scalar(1.0))
            .with_kernel(-1.0, 0.0, CoeffMatrix::scalar(1.0));
        assert!(matches!(validate(overlap), Err(ProblemError::OverlappingSupports(..))));
        let re_with_a = ProblemSpec::re(1, 1.0).with_a(CoeffMatrix::scalar(1.0));
        assert_eq!(validate(re_with_a).unwrap_err(), ProblemError::TermsNotAllowed);
        let outside = ProblemSpec::re(1, 1.0).with_kernel(-2.0, 0.0, CoeffMatrix::scalar(1.0));
        assert!(matches!(validate(outside), Err(ProblemError::BadSupport { .. })));
    }

    #[test]
    fn sorts_and_merges_delays() {
        let p = ProblemSpec::rfde(1, 2.0)
            .with_discrete(2.0, CoeffMatrix::scalar(1.0))
            .with_discrete(1.0, CoeffMatrix::scalar(expr("cos(t)")))
            .with_discrete(1.0, CoeffMatrix::scalar(2.0));
        let v = validate(p).unwrap();
        assert_eq!(v.discrete.iter().map(|d| d.delay).collect::<Vec<_>>(), vec![1.0, 2.0]);
        let b = v.discrete[0].coeff.eval(0.0).unwrap();
        assert_eq!(b[(0, 0)], 3.0);
        assert_eq!(validate(v.clone()).unwrap(), v);
    }

    #[test]
    fn eval_examples() {
        let c = CoeffMatrix::constant(2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(eval_coeff(&c, 0.3).unwrap(), eval_coeff(&c, 7.0).unwrap());
        let e = CoeffMatrix::scalar(expr("1 + 2*cos(t)"));
        assert_eq!(eval_coeff(&e, 0.0).unwrap()[(0, 0)], 3.0);
        let e = CoeffMatrix::scalar(expr("cos(2*pi*t)"));
        assert!(eval_coeff(&e, 0.25).unwrap()[(0, 0)].abs() < 1e-15);
        let bad = CoeffMatrix::from_rows(vec![vec![0.0.into(), expr("1/t")], vec![0.0.into(), 0.0.into()]]);
        match eval_coeff(&bad, 0.0) {
            Err(ProblemError::Eval { row: 0, col: 1, t, .. }) => assert_eq!(t, 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn trig_polynomial() {
        let p = TrigPoly {
            omega: 2.0 * PI,
            constant: 0.5,
            cos: vec![1.0],
            sin: vec![0.0, 2.0],
        };
        assert!((p.eval(0.0) - 1.5).abs() < 1e-15);
        assert!(!ScalarFn::Trig(p.clone()).is_autonomous());
        let flat = TrigPoly {
            cos: vec![0.0],
            sin: vec![],
            ..p
        };
        assert!(ScalarFn::Trig(flat).is_autonomous());
    }

    #[test]
    fn periodicity_check() {
        let ok = ProblemSpec::rfde(1, 1.0)
            .with_a(CoeffMatrix::scalar(expr("-0.5 + 0.5*cos(2*pi*t)")))
            .with_discrete(1.0, CoeffMatrix::scalar(-1.0))
            .with_period(1.0);
        assert!(validate(ok).is_ok());
        let bad = ProblemSpec::rfde(1, 1.0)
            .with_a(CoeffMatrix::scalar(expr("cos(t)")))
            .with_discrete(1.0, CoeffMatrix::scalar(-1.0))
            .with_period(1.0);
        assert!(matches!(validate(bad), Err(ProblemError::NotPeriodic { .. })));
    }

    #[test]
    fn characteristic_examples() {
        let lam = Complex64::new(0.0, PI / 2.0);
        let d = characteristic_matrix(&hayes(), lam).unwrap();
        assert!(d[(0, 0)].norm() < 1e-14);

        let a = -0.7;
        let ode = ProblemSpec::rfde(1, 1.0).with_a(CoeffMatrix::scalar(a));
        assert!(characteristic_matrix(&ode, Complex64::new(a, 0.0)).unwrap()[(0, 0)].norm() < 1e-15);

        let re = ProblemSpec::re(1, 3.0).with_kernel(-3.0, -1.0, CoeffMatrix::scalar(0.5));
        assert!(characteristic_matrix(&re, Complex64::new(0.0, 0.0)).unwrap()[(0, 0)].norm() < 1e-14);

        let periodic = ProblemSpec::rfde(1, 1.0).with_a(CoeffMatrix::scalar(expr("cos(t)")));
        assert_eq!(
            characteristic_matrix(&periodic, lam).unwrap_err(),
            ProblemError::NonAutonomous
        );
    }

    #[test]
    fn distributed_term_matches_closed_form() {
        // x' = ∫_{-1}^{0} x(t+θ) dθ  ->  Δ(λ) = λ - (1 - e^{-λ}) / λ
        let p = ProblemSpec::rfde(1, 1.0).with_kernel(-1.0, 0.0, CoeffMatrix::scalar(1.0));
        let lam = Complex64::new(0.3, 1.7);
        let want = lam - (Complex64::new(1.0, 0.0) - (-lam).exp()) / lam;
        assert!((characteristic_matrix(&p, lam).unwrap()[(0, 0)] - want).norm() < 1e-13);
    }

    #[test]
    fn characteristic_matrix_is_smooth_in_lambda() {
        let p = ProblemSpec::rfde(1, 1.0)
            .with_a(CoeffMatrix::scalar(-0.2))
            .with_discrete(1.0, CoeffMatrix::scalar(-1.0))
            .with_kernel(-1.0, -0.5, CoeffMatrix::scalar(expr("theta")));
        let lam = Complex64::new(0.1, 0.8);
        let deriv = |step: f64| {
            let h = Complex64::new(step, 0.0);
            let f = |z| characteristic_matrix(&p, z).unwrap()[(0, 0)];
            (f(lam + h) - f(lam - h)) / (2.0 * step)
        };
        let ratio = (deriv(1e-6) / deriv(5e-7)).norm();
        assert!((ratio - 1.0).abs() < 1e-3);
    }

    #[test]
    fn segment_query() {
        let q = SegmentQuery::new(0.5, -0.8, 1.0, 1.0).unwrap();
        assert!((q.absolute() + 0.3).abs() < 1e-15);
        assert!(SegmentQuery::new(1.5, -0.2, 1.0, 1.0).is_none());
    }
}
