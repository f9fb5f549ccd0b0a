use nalgebra::DMatrix;

use super::{DiscConfig, DiscContext, DiscError, ForwardBasis, RowPair};
use crate::grids::{gauss_legendre, legendre_orthonormal};
use crate::problems::ProblemKind;

/// The four blocks of the reduced operator.
///
/// `t1: d·X × d·X`, `t2: d·X × d·Z`, `u1: d·Z × d·X`, `u2: d·Z × d·Z`,
/// where `X` and `Z` are the history and forward slot counts. Block index is
/// `slot · d + component`.
#[derive(Debug, Clone)]
pub struct Blocks {
    pub t1: DMatrix<f64>,
    pub t2: DMatrix<f64>,
    pub u1: DMatrix<f64>,
    pub u2: DMatrix<f64>,
    pub config: DiscConfig,
    pub dim: usize,
    /// History slot coordinates in `[-τ, 0]`.
    pub history_nodes: Vec<f64>,
    /// Forward collocation nodes in `[0, h]` (empty for weighted residuals).
    pub forward_nodes: Vec<f64>,
}

impl Blocks {
    /// Size of the reduced matrix `T_{M,N}`.
    pub fn order(&self) -> usize {
        self.t1.nrows()
    }
}

fn set_rows(target: &mut DMatrix<f64>, row0: usize, src: &DMatrix<f64>) {
    target.rows_mut(row0, src.nrows()).copy_from(src);
}

/// History rows: `V(P_M Φ, P_N^+ Z)(θ_i + h)` for every history slot.
fn history_rows(ctx: &DiscContext, t1: &mut DMatrix<f64>, t2: &mut DMatrix<f64>) {
    let d = ctx.problem().dim;
    let h = ctx.config().h;
    let hist = ctx.history();
    for (s, &theta) in hist.slot_nodes().iter().enumerate() {
        // piece q ≥ 2 of the shifted layout is evaluated with piece q - 1
        let hint = hist.piece_midpoint(hist.slot_piece(s)) + h;
        let RowPair { phi, z } = ctx.v_row_hinted(theta + h, hint);
        set_rows(t1, s * d, &phi);
        set_rows(t2, s * d, &z);
    }
}

/// Column operator for the continuity constraint on interface copies:
/// contributions of a duplicate slot move onto its canonical slot.
fn tie_duplicates(ctx: &DiscContext, m: &mut DMatrix<f64>) {
    if ctx.problem().kind != ProblemKind::Rfde {
        return;
    }
    let d = ctx.problem().dim;
    for &(dup, canon) in ctx.duplicate_slots() {
        for c in 0..d {
            let moved = m.column(dup * d + c).clone_owned();
            let mut target = m.column_mut(canon * d + c);
            target += moved;
            m.column_mut(dup * d + c).fill(0.0);
        }
    }
}

fn empty_blocks(ctx: &DiscContext) -> Blocks {
    let nx = ctx.history_dim();
    let nz = ctx.forward_dim();
    Blocks {
        t1: DMatrix::zeros(nx, nx),
        t2: DMatrix::zeros(nx, nz),
        u1: DMatrix::zeros(nz, nx),
        u2: DMatrix::zeros(nz, nz),
        config: ctx.config().clone(),
        dim: ctx.problem().dim,
        history_nodes: ctx.history().slot_nodes().to_vec(),
        forward_nodes: Vec::new(),
    }
}

/// Collocation assembly (single or piecewise forward basis).
pub fn assemble_blocks(ctx: &DiscContext) -> Result<Blocks, DiscError> {
    let ForwardBasis::Nodal(forward) = ctx.forward() else {
        return assemble_weighted_residuals(ctx);
    };
    let d = ctx.problem().dim;
    let mut b = empty_blocks(ctx);
    history_rows(ctx, &mut b.t1, &mut b.t2);
    for (s, &t) in forward.slot_nodes().iter().enumerate() {
        let RowPair { phi, z } = ctx.fs_row(t)?;
        set_rows(&mut b.u1, s * d, &phi);
        set_rows(&mut b.u2, s * d, &z);
    }
    b.forward_nodes = forward.slot_nodes().to_vec();
    tie_duplicates(ctx, &mut b.t1);
    tie_duplicates(ctx, &mut b.u1);
    Ok(b)
}

/// Times in `[0, h]` where `t ↦ F_s V(t)` may lose smoothness.
pub(crate) fn residual_kinks(ctx: &DiscContext) -> Vec<f64> {
    let h = ctx.config().h;
    let mut kinks = vec![0.0, h];
    for &br in ctx.breakpoints() {
        for term in &ctx.problem().discrete {
            kinks.push(br + term.delay);
        }
        for k in &ctx.problem().kernels {
            kinks.push(br - k.support.0);
            kinks.push(br - k.support.1);
        }
    }
    kinks.retain(|&t| (0.0..=h).contains(&t));
    kinks.sort_by(f64::total_cmp);
    kinks.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * h);
    kinks
}

/// Weighted residuals: forward rows are `∫_0^h F_s V(t) p_i(t) dt` with
/// orthonormal Legendre `p_i`, integrated piecewise between the times where
/// `F_s V` can lose smoothness.
pub fn assemble_weighted_residuals(ctx: &DiscContext) -> Result<Blocks, DiscError> {
    let ForwardBasis::Legendre { degree, h } = *ctx.forward() else {
        return Err(DiscError::MethodMismatch(
            "weighted residuals need a Legendre forward basis".into(),
        ));
    };
    if ctx.problem().kind != ProblemKind::Rfde {
        return Err(DiscError::MethodMismatch(
            "weighted residuals are defined for RFDEs only".into(),
        ));
    }
    let d = ctx.problem().dim;
    let mut b = empty_blocks(ctx);
    history_rows(ctx, &mut b.t1, &mut b.t2);

    let points = 2 * degree + 2;
    for w in residual_kinks(ctx).windows(2) {
        let rule = gauss_legendre(points, w[0], w[1])?;
        for (&t, &qw) in rule.points.iter().zip(&rule.weights) {
            let RowPair { phi, z } = ctx.fs_row(t)?;
            for (i, p) in legendre_orthonormal(degree, 0.0, h, t).into_iter().enumerate() {
                let scale = qw * p;
                let mut u1 = b.u1.rows_mut(i * d, d);
                u1 += &phi * scale;
                let mut u2 = b.u2.rows_mut(i * d, d);
                u2 += &z * scale;
            }
        }
    }
    tie_duplicates(ctx, &mut b.t1);
    tie_duplicates(ctx, &mut b.u1);
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::super::{build_context, DiscConfig, Method};
    use crate::problems::{validate, CoeffMatrix, ProblemSpec};

    #[test]
    fn re_long_step_has_no_t1() {
        let p = validate(ProblemSpec::re(1, 3.0).with_kernel(-3.0, -1.0, CoeffMatrix::scalar(0.5))).unwrap();
        let ctx = build_context(&p, &DiscConfig::collocation(6, 3.0)).unwrap();
        let b = ctx.assemble().unwrap();
        assert!(b.t1.iter().all(|&v| v == 0.0));
        assert_eq!(b.t2.shape(), (8, 7));
        assert_eq!(b.u1.shape(), (7, 8));
    }

    #[test]
    fn block_shapes() {
        let p = validate(
            ProblemSpec::rfde(2, 1.0)
                .with_a(CoeffMatrix::constant(2, &[0.0, 1.0, -1.0, 0.0]))
                .with_discrete(1.0, CoeffMatrix::constant(2, &[0.1, 0.0, 0.0, 0.1])),
        )
        .unwrap();
        let ctx = build_context(&p, &DiscConfig::collocation(4, 1.0)).unwrap();
        let b = ctx.assemble().unwrap();
        assert_eq!(b.t1.shape(), (12, 12));
        assert_eq!(b.t2.shape(), (12, 10));
        assert_eq!(b.u2.shape(), (10, 10));

        let wr = DiscConfig::collocation(4, 1.0).with_method(Method::WeightedResiduals);
        let b = build_context(&p, &wr).unwrap().assemble().unwrap();
        assert_eq!(b.u1.shape(), (10, 12));
        assert!(b.forward_nodes.is_empty());
    }

    #[test]
    fn duplicate_columns_are_zero() {
        let p = validate(ProblemSpec::rfde(1, 1.0).with_discrete(1.0, CoeffMatrix::scalar(-1.0))).unwrap();
        let ctx = build_context(&p, &DiscConfig::collocation(4, 0.5)).unwrap();
        let b = ctx.assemble().unwrap();
        let (dup, _) = ctx.duplicate_slots()[0];
        assert!(b.t1.column(dup).iter().all(|&v| v == 0.0));
        assert!(b.u1.column(dup).iter().all(|&v| v == 0.0));
    }
}
