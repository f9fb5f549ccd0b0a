//! Reduction of the evolution operator `T = U(s + h, s)` to a finite matrix.
//!
//! The operator is written through a fixed-point equation `z = F_s V(φ, z)`
//! on the forward interval `[0, h]`, where `V` rebuilds the solution on
//! `[-τ, h]` from a history `φ` and forward data `z`. Discretizing the history
//! space (index `M`) and the forward space (index `N`) gives four blocks and
//!
//! ```text
//! T_{M,N} = T1 + T2 (I - U2)^{-1} U1
//! ```
//!
//! Variants: pseudospectral collocation for RFDEs and REs, piecewise
//! (spectral/finite element) collocation, weighted residuals with Legendre
//! test functions, and the shifted piecewise history layout used when `h < τ`.

mod assemble;
mod basis;
mod reduce;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::grids::{clenshaw_curtis, GridError, NodeFamily, QuadRule};
use crate::problems::{ProblemError, ProblemKind, ProblemSpec};

pub use assemble::{assemble_blocks, assemble_weighted_residuals, Blocks};
pub use basis::{ForwardBasis, Piece, PiecewiseBasis};
pub use reduce::{solve_reduced, EvolutionMatrix, SINGULARITY_TOL};

/// Minimum number of Clenshaw–Curtis points per smooth sub-interval.
pub const MIN_QUAD_POINTS: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiscError {
    #[error("step h must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("discretization indices M = {m}, N = {n} violate M >= {min_m}")]
    Indices { m: usize, n: usize, min_m: usize },
    #[error("pieces must increase strictly from 0 to h = {h}: {pieces:?}")]
    BadPieces { h: f64, pieces: Vec<f64> },
    #[error("degenerate piece [{0}, {1}]")]
    DegeneratePiece(f64, f64),
    #[error("method does not apply: {0}")]
    MethodMismatch(String),
    #[error("point {x} outside [-{tau}, {h}]")]
    OutOfRange { x: f64, tau: f64, h: f64 },
    #[error("I - U2 is singular to working tolerance (condition estimate {condition:e})")]
    Singular { condition: f64 },
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Collocation,
    WeightedResiduals,
    PiecewiseCollocation,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Collocation => "collocation",
            Method::WeightedResiduals => "weighted-residuals",
            Method::PiecewiseCollocation => "piecewise",
        }
    }
}

/// Discretization parameters.
///
/// For [`Method::PiecewiseCollocation`] `n` is the polynomial degree on each
/// forward piece and `m` the degree on each history piece.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscConfig {
    pub m: usize,
    pub n: usize,
    pub h: f64,
    pub s: f64,
    pub method: Method,
    pub pieces: Option<Vec<f64>>,
    pub quad_order: Option<usize>,
}

impl DiscConfig {
    /// Collocation with `M = N + 1`.
    pub fn collocation(n: usize, h: f64) -> DiscConfig {
        DiscConfig {
            m: n + 1,
            n,
            h,
            s: 0.0,
            method: Method::Collocation,
            pieces: None,
            quad_order: None,
        }
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_h(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn with_s(mut self, s: f64) -> Self {
        self.s = s;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_pieces(mut self, pieces: Vec<f64>) -> Self {
        self.pieces = Some(pieces);
        self
    }

    pub fn with_quad_order(mut self, k: usize) -> Self {
        self.quad_order = Some(k);
        self
    }

    /// Smallest admissible `M` for the given `N` and equation class.
    pub fn min_m(kind: ProblemKind, n: usize) -> usize {
        match kind {
            ProblemKind::Rfde => n + 1,
            ProblemKind::Re => n.max(1),
        }
    }

    /// Uniform partition of `[0, h]` into `count` pieces.
    pub fn uniform_pieces(h: f64, count: usize) -> Vec<f64> {
        (0..=count).map(|i| h * i as f64 / count as f64).collect()
    }

    fn check(&self, kind: ProblemKind) -> Result<(), DiscError> {
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(DiscError::BadStep(self.h));
        }
        let min_m = DiscConfig::min_m(kind, self.n);
        if self.m < min_m {
            return Err(DiscError::Indices {
                m: self.m,
                n: self.n,
                min_m,
            });
        }
        if self.method == Method::PiecewiseCollocation && self.n == 0 {
            return Err(DiscError::Indices {
                m: self.m,
                n: self.n,
                min_m: 1,
            });
        }
        if let Some(p) = &self.pieces {
            let tol = 1e-12 * self.h;
            let ends_ok = p.len() >= 2 && p[0].abs() <= tol && (p[p.len() - 1] - self.h).abs() <= tol;
            if !ends_ok {
                return Err(DiscError::BadPieces {
                    h: self.h,
                    pieces: p.clone(),
                });
            }
            if let Some(w) = p.windows(2).find(|w| w[1] - w[0] <= 0.0) {
                return Err(DiscError::DegeneratePiece(w[0], w[1]));
            }
        }
        Ok(())
    }
}

/// Action of `V(P_M Φ, P_N^+ Z)` at one point: the value is
/// `phi · Φ + z · Z`, each a `d x (d · slots)` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RowPair {
    pub phi: DMatrix<f64>,
    pub z: DMatrix<f64>,
}

/// Scalar weights per history/forward slot, before the `⊗ I_d` expansion.
#[derive(Debug, Clone)]
pub(crate) struct SlotWeights {
    pub phi: Vec<f64>,
    pub z: Vec<f64>,
}

/// Grids, bases and cached rules for one problem and configuration.
#[derive(Debug, Clone)]
pub struct DiscContext {
    problem: ProblemSpec,
    config: DiscConfig,
    history: PiecewiseBasis,
    forward: ForwardBasis,
    quad_points: usize,
    reference_rule: QuadRule,
    v_breaks: Vec<f64>,
    duplicates: Vec<(usize, usize)>,
    shift_pieces: usize,
}

/// Breakpoints `0, -h, …, -(Q-1)h, -τ` of the shifted history layout, with
/// `Q` the least positive integer such that `Q h >= τ`.
pub fn shift_breakpoints(tau: f64, h: f64) -> Vec<f64> {
    let q = ((tau / h) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let mut b: Vec<f64> = (0..q).map(|i| -(i as f64) * h).collect();
    b.push(-tau);
    b
}

/// Grid setup: forward nodes, history nodes (single piece, shifted pieces
/// when `h < τ`, or the translated forward partition for piecewise
/// collocation) and quadrature rules.
pub fn build_context(p: &ProblemSpec, cfg: &DiscConfig) -> Result<DiscContext, DiscError> {
    cfg.check(p.kind)?;
    let tau = p.max_delay;
    let h = cfg.h;
    let short_step = h < tau * (1.0 - 1e-12);

    let (history, forward, shift_pieces) = match cfg.method {
        Method::Collocation | Method::WeightedResiduals => {
            if cfg.method == Method::WeightedResiduals && p.kind == ProblemKind::Re {
                return Err(DiscError::MethodMismatch(
                    "weighted residuals are defined for RFDEs only".into(),
                ));
            }
            if cfg.pieces.is_some() {
                return Err(DiscError::MethodMismatch("pieces require the piecewise method".into()));
            }
            let breaks = if short_step {
                shift_breakpoints(tau, h)
            } else {
                vec![0.0, -tau]
            };
            let q = breaks.len() - 1;
            let history = PiecewiseBasis::history(&breaks, cfg.m, false)?;
            let forward = if cfg.method == Method::Collocation {
                ForwardBasis::Nodal(PiecewiseBasis::forward(&[0.0, h], cfg.n, NodeFamily::ChebyshevZeros)?)
            } else {
                ForwardBasis::Legendre { degree: cfg.n, h }
            };
            (history, forward, q)
        }
        Method::PiecewiseCollocation => {
            if short_step {
                return Err(DiscError::MethodMismatch(
                    "piecewise collocation needs h >= max_delay".into(),
                ));
            }
            let pieces = cfg.pieces.clone().unwrap_or_else(|| vec![0.0, h]);
            let forward = PiecewiseBasis::forward(&pieces, cfg.n, NodeFamily::ChebyshevExtrema)?;
            let history = PiecewiseBasis::history(&translated_partition(&pieces, h, tau), cfg.m, true)?;
            (history, ForwardBasis::Nodal(forward), 1)
        }
    };

    let quad_points = cfg.quad_order.unwrap_or_else(|| (2 * (cfg.n + 1)).max(MIN_QUAD_POINTS));
    let reference_rule = clenshaw_curtis(quad_points, -1.0, 1.0)?;

    let mut v_breaks: Vec<f64> = std::iter::once(0.0)
        .chain(history.breakpoints())
        .chain(forward.breakpoints())
        .collect();
    v_breaks.sort_by(f64::total_cmp);
    v_breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (tau + h));

    // Interface copies in the shifted layout: piece q+1's right end duplicates
    // piece q's left end. Continuity is enforced for RFDEs only.
    let mut duplicates = Vec::new();
    if p.kind == ProblemKind::Rfde && shift_pieces > 1 {
        let m1 = cfg.m + 1;
        for q in 1..shift_pieces {
            duplicates.push((q * m1, (q - 1) * m1 + cfg.m));
        }
    }

    Ok(DiscContext {
        problem: p.clone(),
        config: cfg.clone(),
        history,
        forward,
        quad_points,
        reference_rule,
        v_breaks,
        duplicates,
        shift_pieces,
    })
}

/// History partition: the forward partition translated by `-h`, cut at `-τ`.
fn translated_partition(pieces: &[f64], h: f64, tau: f64) -> Vec<f64> {
    let tol = 1e-12 * h.max(tau);
    let mut out = vec![0.0];
    for &b in pieces.iter().rev().skip(1) {
        let x = b - h;
        if x > -tau + tol {
            out.push(x);
        }
    }
    out.push(-tau);
    out
}

/// Piecewise collocation on the given partition of `[0, h]` with polynomial
/// degree `degree` per forward piece; history degree is raised if needed.
pub fn piecewise_partition(ctx: &DiscContext, degree: usize, pieces: Vec<f64>) -> Result<DiscContext, DiscError> {
    let min_m = DiscConfig::min_m(ctx.problem.kind, degree);
    let cfg = ctx
        .config
        .clone()
        .with_method(Method::PiecewiseCollocation)
        .with_n(degree)
        .with_m(ctx.config.m.max(min_m))
        .with_pieces(pieces);
    build_context(&ctx.problem, &cfg)
}

impl DiscContext {
    pub fn problem(&self) -> &ProblemSpec {
        &self.problem
    }

    pub fn config(&self) -> &DiscConfig {
        &self.config
    }

    pub fn history(&self) -> &PiecewiseBasis {
        &self.history
    }

    pub fn forward(&self) -> &ForwardBasis {
        &self.forward
    }

    pub fn quad_points(&self) -> usize {
        self.quad_points
    }

    /// Number of history pieces in the shifted layout (`Q`, 1 when `h >= τ`).
    pub fn shift_pieces(&self) -> usize {
        self.shift_pieces
    }

    /// Slots `(duplicate, canonical)` tied together by the continuity constraint.
    pub fn duplicate_slots(&self) -> &[(usize, usize)] {
        &self.duplicates
    }

    /// Abscissae where `V(φ, z)` may fail to be smooth.
    pub fn breakpoints(&self) -> &[f64] {
        &self.v_breaks
    }

    pub fn history_dim(&self) -> usize {
        self.problem.dim * self.history.slot_count()
    }

    pub fn forward_dim(&self) -> usize {
        self.problem.dim * self.forward.slot_count()
    }

    fn check_range(&self, x: f64) -> Result<(), DiscError> {
        let tau = self.problem.max_delay;
        let h = self.config.h;
        let tol = 1e-12 * (tau + h);
        if x < -tau - tol || x > h + tol || x.is_nan() {
            return Err(DiscError::OutOfRange { x, tau, h });
        }
        Ok(())
    }

    /// Slot weights of `V` at `x`. `hint` selects the side of a possible jump
    /// and the history piece: the point is evaluated with the polynomial that
    /// is active at `hint`.
    pub(crate) fn slot_weights(&self, x: f64, hint: f64, weight: f64, out: &mut SlotWeights) {
        let forward_side = match self.problem.kind {
            ProblemKind::Rfde => hint > 0.0,
            ProblemKind::Re => hint >= 0.0,
        };
        if forward_side {
            match self.problem.kind {
                ProblemKind::Rfde => {
                    let last = self.history.locate(0.0);
                    self.history.add_values(last, 0.0, weight, &mut out.phi);
                    self.forward.add_integrals(x, weight, &mut out.z);
                }
                ProblemKind::Re => self.forward.add_values(x, weight, &mut out.z),
            }
        } else {
            let piece = self.history.locate(hint);
            self.history.add_values(piece, x, weight, &mut out.phi);
        }
    }

    pub(crate) fn empty_weights(&self) -> SlotWeights {
        SlotWeights {
            phi: vec![0.0; self.history.slot_count()],
            z: vec![0.0; self.forward.slot_count()],
        }
    }

    fn expand_identity(&self, w: &SlotWeights) -> RowPair {
        let d = self.problem.dim;
        let mut phi = DMatrix::zeros(d, d * w.phi.len());
        let mut z = DMatrix::zeros(d, d * w.z.len());
        for c in 0..d {
            for (s, &v) in w.phi.iter().enumerate() {
                phi[(c, s * d + c)] = v;
            }
            for (s, &v) in w.z.iter().enumerate() {
                z[(c, s * d + c)] = v;
            }
        }
        RowPair { phi, z }
    }

    /// `V(P_M Φ, P_N^+ Z)(x)` as a [`RowPair`], `x ∈ [-τ, h]`.
    ///
    /// RFDE: `Φ(0) + ∫_0^x P_N^+ Z` for `x > 0`, `P_M Φ (x)` otherwise.
    /// RE: `P_N^+ Z (x)` for `x >= 0`, `P_M Φ (x)` otherwise.
    pub fn v_row(&self, x: f64) -> Result<RowPair, DiscError> {
        self.check_range(x)?;
        let mut w = self.empty_weights();
        self.slot_weights(x, x, 1.0, &mut w);
        Ok(self.expand_identity(&w))
    }

    pub(crate) fn v_row_hinted(&self, x: f64, hint: f64) -> RowPair {
        let mut w = self.empty_weights();
        self.slot_weights(x, hint, 1.0, &mut w);
        self.expand_identity(&w)
    }

    /// `F_s V(P_M Φ, P_N^+ Z)(t)` as a [`RowPair`], `t ∈ [0, h]`.
    ///
    /// Distributed terms are integrated with Clenshaw–Curtis rules on
    /// sub-intervals split at every point where `V` may be non-smooth,
    /// including the kink `θ = -t`.
    pub fn fs_row(&self, t: f64) -> Result<RowPair, DiscError> {
        let h = self.config.h;
        if !(-1e-12 * h..=h * (1.0 + 1e-12)).contains(&t) {
            return Err(DiscError::OutOfRange {
                x: t,
                tau: self.problem.max_delay,
                h,
            });
        }
        let d = self.problem.dim;
        let mut row = RowPair {
            phi: DMatrix::zeros(d, self.history_dim()),
            z: DMatrix::zeros(d, self.forward_dim()),
        };
        let abs_t = self.config.s + t;
        let mut w = self.empty_weights();

        if let Some(a) = &self.problem.a {
            w.reset();
            self.slot_weights(t, t, 1.0, &mut w);
            accumulate(&mut row, &a.eval(abs_t)?, &w);
        }
        for term in &self.problem.discrete {
            let x = t - term.delay;
            w.reset();
            self.slot_weights(x, x, 1.0, &mut w);
            accumulate(&mut row, &term.coeff.eval(abs_t)?, &w);
        }
        for kernel in &self.problem.kernels {
            let (lo, hi) = kernel.support;
            for (alpha, beta) in self.split_support(t, lo, hi) {
                let rule = self.reference_rule.mapped(alpha, beta);
                let hint = t + (alpha + beta) / 2.0;
                for (&theta, &qw) in rule.points.iter().zip(&rule.weights) {
                    w.reset();
                    self.slot_weights(t + theta, hint, qw, &mut w);
                    accumulate(&mut row, &kernel.coeff.eval_kernel(abs_t, theta)?, &w);
                }
            }
        }
        Ok(row)
    }

    /// Sub-intervals of `[lo, hi]` (in `θ`) between consecutive `V`
    /// breakpoints shifted by `-t`.
    pub fn split_support(&self, t: f64, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let tiny = 1e-13 * (hi - lo).max(self.config.h);
        let mut cuts: Vec<f64> = vec![lo];
        cuts.extend(
            self.v_breaks
                .iter()
                .map(|b| b - t)
                .filter(|&c| c > lo + tiny && c < hi - tiny),
        );
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Assembles the blocks for the configured method.
    pub fn assemble(&self) -> Result<Blocks, DiscError> {
        match self.config.method {
            Method::WeightedResiduals => assemble_weighted_residuals(self),
            _ => assemble_blocks(self),
        }
    }
}

impl SlotWeights {
    fn reset(&mut self) {
        self.phi.iter_mut().for_each(|v| *v = 0.0);
        self.z.iter_mut().for_each(|v| *v = 0.0);
    }
}

/// `row += coef ⊗ weights`, block `(i, s·d + j)` receiving `coef[i, j] · w_s`.
fn accumulate(row: &mut RowPair, coef: &DMatrix<f64>, w: &SlotWeights) {
    let d = coef.nrows();
    for (target, weights) in [(&mut row.phi, &w.phi), (&mut row.z, &w.z)] {
        for (s, &ws) in weights.iter().enumerate() {
            if ws == 0.0 {
                continue;
            }
            for i in 0..d {
                for j in 0..d {
                    target[(i, s * d + j)] += coef[(i, j)] * ws;
                }
            }
        }
    }
}

/// `||Z* - R^+ F_s V(P_M Φ, P^+ Z*)||_∞ / ||Z*||_∞` for `Z* = (I - U2)^{-1} U1 Φ`,
/// with the right-hand side evaluated from fresh `fs_row` calls rather than
/// from the assembled blocks.
pub fn fixed_point_residual(ctx: &DiscContext, blocks: &Blocks, phi: &DVector<f64>) -> Result<f64, DiscError> {
    let nz = blocks.u2.nrows();
    let lhs = DMatrix::identity(nz, nz) - &blocks.u2;
    let z = lhs.lu().solve(&(&blocks.u1 * phi)).ok_or(DiscError::Singular {
        condition: f64::INFINITY,
    })?;
    // tied columns act on the canonical copy of every interface value
    let d = ctx.problem.dim;
    let mut phi_c = phi.clone();
    if ctx.problem.kind == ProblemKind::Rfde {
        for &(dup, canon) in &ctx.duplicates {
            for c in 0..d {
                phi_c[dup * d + c] = phi[canon * d + c];
            }
        }
    }
    let image = match &ctx.forward {
        ForwardBasis::Nodal(fwd) => {
            let mut out = DVector::zeros(nz);
            for (s, &t) in fwd.slot_nodes().iter().enumerate() {
                let r = ctx.fs_row(t)?;
                out.rows_mut(s * d, d).copy_from(&(&r.phi * &phi_c + &r.z * &z));
            }
            out
        }
        ForwardBasis::Legendre { degree, h } => {
            let mut out = DVector::zeros(nz);
            let kinks = assemble::residual_kinks(ctx);
            let mut nodes = Vec::new();
            for k in kinks.windows(2) {
                let rule = crate::grids::gauss_legendre(2 * degree + 4, k[0], k[1])?;
                nodes.extend(rule.points.into_iter().zip(rule.weights));
            }
            for &(t, w) in &nodes {
                let r = ctx.fs_row(t)?;
                let v = &r.phi * &phi_c + &r.z * &z;
                for (i, p) in crate::grids::legendre_orthonormal(*degree, 0.0, *h, t)
                    .into_iter()
                    .enumerate()
                {
                    let mut block = out.rows_mut(i * d, d);
                    block += &v * (w * p);
                }
            }
            out
        }
    };
    let scale = z.amax().max(f64::MIN_POSITIVE);
    Ok((image - &z).amax() / scale)
}

/// Builds, assembles and reduces in one call.
pub fn discretize(p: &ProblemSpec, cfg: &DiscConfig) -> Result<EvolutionMatrix, DiscError> {
    let ctx = build_context(p, cfg)?;
    solve_reduced(&ctx.assemble()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{validate, CoeffMatrix};
    use std::f64::consts::PI;

    fn hayes() -> ProblemSpec {
        validate(ProblemSpec::rfde(1, 1.0).with_discrete(1.0, CoeffMatrix::scalar(-PI / 2.0))).unwrap()
    }

    fn re_basic() -> ProblemSpec {
        validate(ProblemSpec::re(1, 3.0).with_kernel(-3.0, -1.0, CoeffMatrix::scalar(0.5))).unwrap()
    }

    #[test]
    fn context_grids() {
        let ctx = build_context(&hayes(), &DiscConfig::collocation(5, 1.0)).unwrap();
        assert_eq!(ctx.shift_pieces(), 1);
        assert_eq!(ctx.history().breakpoints(), vec![-1.0, 0.0]);

        let ctx = build_context(&hayes(), &DiscConfig::collocation(5, 0.4)).unwrap();
        assert_eq!(ctx.shift_pieces(), 3);
        let b = ctx.history().breakpoints();
        let want = [-1.0, -0.8, -0.4, 0.0];
        assert!(b.iter().zip(want).all(|(x, y)| (x - y).abs() < 1e-15), "{b:?}");
        assert_eq!(ctx.duplicate_slots().len(), 2);

        let ctx = build_context(&hayes(), &DiscConfig::collocation(10, 2.0)).unwrap();
        let ForwardBasis::Nodal(fwd) = ctx.forward() else {
            panic!()
        };
        assert_eq!(fwd.slot_count(), 11);
        assert!(fwd.slot_nodes().iter().all(|&t| t > 0.0 && t < 2.0));
    }

    #[test]
    fn shift_breakpoints_least_multiple() {
        assert_eq!(shift_breakpoints(1.0, 0.5), vec![0.0, -0.5, -1.0]);
        assert_eq!(shift_breakpoints(1.0, 1.0), vec![0.0, -1.0]);
        assert_eq!(shift_breakpoints(1.0, 0.3).len(), 5);
    }

    #[test]
    fn config_errors() {
        let p = hayes();
        assert!(matches!(
            build_context(&p, &DiscConfig::collocation(5, 0.0)),
            Err(DiscError::BadStep(_))
        ));
        let low_m = DiscConfig::collocation(5, 1.0).with_m(5);
        assert!(matches!(build_context(&p, &low_m), Err(DiscError::Indices { .. })));
        let wr_re = DiscConfig::collocation(5, 3.0).with_method(Method::WeightedResiduals);
        assert!(matches!(
            build_context(&re_basic(), &wr_re),
            Err(DiscError::MethodMismatch(_))
        ));
        // M = N is enough for REs
        assert!(build_context(&re_basic(), &DiscConfig::collocation(5, 3.0).with_m(5)).is_ok());
        let degenerate = DiscConfig::collocation(3, 1.0)
            .with_method(Method::PiecewiseCollocation)
            .with_pieces(vec![0.0, 0.5, 0.5, 1.0]);
        assert!(matches!(
            build_context(&p, &degenerate),
            Err(DiscError::DegeneratePiece(..))
        ));
    }

    #[test]
    fn v_row_examples() {
        let ctx = build_context(&hayes(), &DiscConfig::collocation(6, 1.0)).unwrap();
        let r = ctx.v_row(0.0).unwrap();
        assert_eq!(r.phi[(0, 0)], 1.0);
        assert!(r.phi.iter().skip(1).all(|&v| v == 0.0));
        assert!(r.z.iter().all(|&v| v == 0.0));

        let r = ctx.v_row(1.0).unwrap();
        assert_eq!(r.phi[(0, 0)], 1.0);
        assert!((r.z.sum() - 1.0).abs() < 1e-14);
        assert!(ctx.v_row(1.5).is_err());
        assert!(ctx.v_row(-1.5).is_err());

        let re = build_context(&re_basic(), &DiscConfig::collocation(6, 3.0)).unwrap();
        let r = re.v_row(0.0).unwrap();
        assert!(r.phi.iter().all(|&v| v == 0.0));
        let ForwardBasis::Nodal(fwd) = re.forward() else {
            panic!()
        };
        let card = fwd.pieces()[0].nodes.cardinal_values(0.0);
        for (a, b) in r.z.iter().zip(card) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn fs_row_examples() {
        let a = -0.8;
        let ode = validate(ProblemSpec::rfde(1, 1.0).with_a(CoeffMatrix::scalar(a))).unwrap();
        let ctx = build_context(&ode, &DiscConfig::collocation(5, 1.0)).unwrap();
        let f = ctx.fs_row(0.4).unwrap();
        let v = ctx.v_row(0.4).unwrap();
        assert_eq!(f.phi, v.phi * a);
        assert_eq!(f.z, v.z * a);

        let b = 1.3;
        let delayed = validate(ProblemSpec::rfde(1, 1.0).with_discrete(1.0, CoeffMatrix::scalar(b))).unwrap();
        let ctx = build_context(&delayed, &DiscConfig::collocation(5, 1.0)).unwrap();
        let f = ctx.fs_row(0.3).unwrap();
        assert!(f.z.iter().all(|&v| v == 0.0));
        let expect = ctx.v_row(0.3 - 1.0).unwrap().phi * b;
        assert!((f.phi - expect).abs().max() < 1e-15);

        let re = validate(ProblemSpec::re(1, 1.0).with_kernel(-1.0, 0.0, CoeffMatrix::scalar(0.5))).unwrap();
        let ctx = build_context(&re, &DiscConfig::collocation(5, 2.0)).unwrap();
        let f = ctx.fs_row(1.5).unwrap();
        assert!(f.phi.iter().all(|&v| v == 0.0));
        assert!(f.z.iter().any(|&v| v != 0.0));
    }

    #[test]
    fn distributed_term_integrates_exactly() {
        // x' = ∫_{-1}^0 x(t+θ) dθ with Φ ≡ 1, Z ≡ 0: F_s V(t) = ∫_{-1}^{0} V(t+θ) dθ = 1
        let p = validate(ProblemSpec::rfde(1, 1.0).with_kernel(-1.0, 0.0, CoeffMatrix::scalar(1.0))).unwrap();
        let ctx = build_context(&p, &DiscConfig::collocation(8, 1.0)).unwrap();
        for &t in &[0.0, 0.37, 1.0] {
            let f = ctx.fs_row(t).unwrap();
            assert!((f.phi.sum() - 1.0).abs() < 1e-13);
            // Z ≡ 1 adds ∫_{-1}^{0} max(t+θ, 0) dθ = t²/2
            assert!((f.z.sum() - t * t / 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn split_support_includes_kink() {
        let ctx = build_context(&hayes(), &DiscConfig::collocation(4, 1.0)).unwrap();
        let parts = ctx.split_support(0.3, -1.0, 0.0);
        assert_eq!(parts.len(), 2);
        assert!((parts[0].1 + 0.3).abs() < 1e-15);
    }
}
