//! Piecewise polynomial bases used for the history space and the forward
//! space.

use crate::grids::{
    chebyshev_extrema, chebyshev_zeros, gauss_legendre, legendre_antiderivatives, legendre_orthonormal, GridError,
    NodeFamily, NodeSet,
};

/// One polynomial piece: its nodes and the global coefficient slot of each node.
#[derive(Debug, Clone)]
pub struct Piece {
    pub nodes: NodeSet,
    pub slots: Vec<usize>,
}

impl Piece {
    pub fn interval(&self) -> (f64, f64) {
        self.nodes.interval()
    }

    fn midpoint(&self) -> f64 {
        let (a, b) = self.interval();
        (a + b) / 2.0
    }
}

/// Nodal piecewise polynomials. Pieces are kept in ascending order of their
/// intervals; the slot layout is independent of that order, and adjacent
/// pieces may either share their interface slot (continuous functions) or
/// carry one slot each (duplicated interface values).
#[derive(Debug, Clone)]
pub struct PiecewiseBasis {
    pieces: Vec<Piece>,
    slot_count: usize,
    slot_nodes: Vec<f64>,
    slot_piece: Vec<usize>,
}

impl PiecewiseBasis {
    fn from_pieces(pieces: Vec<Piece>) -> PiecewiseBasis {
        let slot_count = pieces.iter().flat_map(|p| p.slots.iter()).max().map_or(0, |m| m + 1);
        let mut slot_nodes = vec![f64::NAN; slot_count];
        let mut slot_piece = vec![usize::MAX; slot_count];
        for (pi, p) in pieces.iter().enumerate() {
            for (&x, &s) in p.nodes.nodes().iter().zip(&p.slots) {
                if slot_piece[s] == usize::MAX {
                    slot_nodes[s] = x;
                    slot_piece[s] = pi;
                }
            }
        }
        PiecewiseBasis {
            pieces,
            slot_count,
            slot_nodes,
            slot_piece,
        }
    }

    /// History basis on `[breaks.last(), 0]` where `breaks` descends from `0`.
    /// Slots are numbered from `θ = 0` towards the past. With `shared`, interface
    /// nodes are one slot; otherwise each piece owns all its `degree + 1` slots.
    pub fn history(breaks: &[f64], degree: usize, shared: bool) -> Result<PiecewiseBasis, GridError> {
        let q_count = breaks.len() - 1;
        let mut pieces = Vec::with_capacity(q_count);
        for q in (1..=q_count).rev() {
            let nodes = chebyshev_extrema(degree, breaks[q], breaks[q - 1])?;
            let base = if shared {
                (q - 1) * degree
            } else {
                (q - 1) * (degree + 1)
            };
            let slots = (0..=degree).map(|j| base + degree - j).collect();
            pieces.push(Piece { nodes, slots });
        }
        Ok(PiecewiseBasis::from_pieces(pieces))
    }

    /// Forward basis on `[breaks[0], breaks.last()]`, ascending breaks.
    /// Several pieces always share interfaces and use Chebyshev extrema.
    pub fn forward(breaks: &[f64], degree: usize, family: NodeFamily) -> Result<PiecewiseBasis, GridError> {
        let count = breaks.len() - 1;
        let mut pieces = Vec::with_capacity(count);
        if count == 1 && family == NodeFamily::ChebyshevZeros {
            let nodes = chebyshev_zeros(degree, breaks[0], breaks[1])?;
            pieces.push(Piece {
                nodes,
                slots: (0..=degree).collect(),
            });
        } else {
            for p in 0..count {
                let nodes = chebyshev_extrema(degree, breaks[p], breaks[p + 1])?;
                pieces.push(Piece {
                    nodes,
                    slots: (0..=degree).map(|j| p * degree + j).collect(),
                });
            }
        }
        Ok(PiecewiseBasis::from_pieces(pieces))
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn slot_count(&self) -> usize {
        self.slot_count
    }

    /// Node coordinate of every slot.
    pub fn slot_nodes(&self) -> &[f64] {
        &self.slot_nodes
    }

    /// Index (into [`PiecewiseBasis::pieces`]) of a piece owning `slot`.
    pub fn slot_piece(&self, slot: usize) -> usize {
        self.slot_piece[slot]
    }

    pub fn piece_midpoint(&self, piece: usize) -> f64 {
        self.pieces[piece].midpoint()
    }

    /// Interval endpoints of all pieces, ascending.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.pieces.iter().map(|p| p.interval().0).collect();
        if let Some(last) = self.pieces.last() {
            out.push(last.interval().1);
        }
        out
    }

    /// Piece containing `x`, continuous from the right; points outside the
    /// covered interval go to the nearest piece.
    pub fn locate(&self, x: f64) -> usize {
        self.pieces
            .iter()
            .position(|p| x < p.interval().1)
            .unwrap_or(self.pieces.len() - 1)
    }

    /// Adds `weight * ℓ_j(x)` of piece `piece` into the slots of `out`.
    pub fn add_values(&self, piece: usize, x: f64, weight: f64, out: &mut [f64]) {
        let p = &self.pieces[piece];
        let (a, b) = p.interval();
        let card = p.nodes.cardinal_values(x.clamp(a, b));
        for (&s, c) in p.slots.iter().zip(card) {
            out[s] += weight * c;
        }
    }

    /// Adds `weight * ∫_{start}^{x}` of every basis function.
    pub fn add_integrals(&self, x: f64, weight: f64, out: &mut [f64]) {
        for p in &self.pieces {
            let (a, b) = p.interval();
            if x <= a {
                break;
            }
            let anti = p.nodes.cardinal_antiderivatives(x.min(b));
            for (&s, v) in p.slots.iter().zip(anti) {
                out[s] += weight * v;
            }
        }
    }

    /// Evaluates the prolongation of scalar coefficients at `x` inside `piece`.
    pub fn prolong(&self, coeffs: &[f64], piece: usize, x: f64) -> f64 {
        let mut w = vec![0.0; self.slot_count];
        self.add_values(piece, x, 1.0, &mut w);
        w.iter().zip(coeffs).map(|(a, b)| a * b).sum()
    }

    /// Restriction: samples `f` at every slot node.
    pub fn restrict(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.slot_nodes.iter().map(|&x| f(x)).collect()
    }
}

/// The forward space basis on `[0, h]`: nodal (collocation) or orthonormal
/// Legendre (weighted residuals).
#[derive(Debug, Clone)]
pub enum ForwardBasis {
    Nodal(PiecewiseBasis),
    Legendre { degree: usize, h: f64 },
}

impl ForwardBasis {
    pub fn slot_count(&self) -> usize {
        match self {
            ForwardBasis::Nodal(b) => b.slot_count(),
            ForwardBasis::Legendre { degree, .. } => degree + 1,
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            ForwardBasis::Nodal(b) => b.breakpoints(),
            ForwardBasis::Legendre { h, .. } => vec![0.0, *h],
        }
    }

    pub fn add_values(&self, x: f64, weight: f64, out: &mut [f64]) {
        match self {
            ForwardBasis::Nodal(b) => b.add_values(b.locate(x), x, weight, out),
            ForwardBasis::Legendre { degree, h } => {
                for (o, v) in out
                    .iter_mut()
                    .zip(legendre_orthonormal(*degree, 0.0, *h, x.clamp(0.0, *h)))
                {
                    *o += weight * v;
                }
            }
        }
    }

    /// Adds `weight * ∫_0^x` of every basis function.
    pub fn add_integrals(&self, x: f64, weight: f64, out: &mut [f64]) {
        match self {
            ForwardBasis::Nodal(b) => b.add_integrals(x, weight, out),
            ForwardBasis::Legendre { degree, h } => {
                if x <= 0.0 {
                    return;
                }
                for (o, v) in out
                    .iter_mut()
                    .zip(legendre_antiderivatives(*degree, 0.0, *h, x.min(*h)))
                {
                    *o += weight * v;
                }
            }
        }
    }

    pub fn prolong(&self, coeffs: &[f64], x: f64) -> f64 {
        let mut w = vec![0.0; self.slot_count()];
        self.add_values(x, 1.0, &mut w);
        w.iter().zip(coeffs).map(|(a, b)| a * b).sum()
    }

    /// Restriction of a scalar function: node samples, or inner products
    /// with `p_i` by Gauss–Legendre quadrature of order `2N + 2`.
    pub fn restrict(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        match self {
            ForwardBasis::Nodal(b) => b.restrict(f),
            ForwardBasis::Legendre { degree, h } => {
                let rule = gauss_legendre(2 * degree + 2, 0.0, *h).expect("positive step");
                let mut out = vec![0.0; degree + 1];
                for (&x, &w) in rule.points.iter().zip(&rule.weights) {
                    let fx = f(x);
                    for (o, p) in out.iter_mut().zip(legendre_orthonormal(*degree, 0.0, *h, x)) {
                        *o += w * fx * p;
                    }
                }
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn history_slot_layouts() {
        let single = PiecewiseBasis::history(&[0.0, -1.0], 4, true).unwrap();
        assert_eq!(single.slot_count(), 5);
        assert_eq!(single.slot_nodes()[0], 0.0);
        assert_eq!(single.slot_nodes()[4], -1.0);

        let dup = PiecewiseBasis::history(&[0.0, -0.4, -0.8, -1.0], 3, false).unwrap();
        assert_eq!(dup.slot_count(), 12);
        assert_eq!(dup.slot_nodes()[0], 0.0);
        assert_eq!(dup.slot_nodes()[3], -0.4);
        assert_eq!(dup.slot_nodes()[4], -0.4);
        assert_eq!(dup.slot_nodes()[11], -1.0);

        let shared = PiecewiseBasis::history(&[0.0, -0.5, -1.0], 3, true).unwrap();
        assert_eq!(shared.slot_count(), 7);
        assert_eq!(shared.slot_nodes()[3], -0.5);
    }

    #[test]
    fn hat_functions() {
        let hats = PiecewiseBasis::forward(&[0.0, 0.5, 1.0], 1, NodeFamily::ChebyshevExtrema).unwrap();
        assert_eq!(hats.slot_count(), 3);
        let coeffs = [1.0, 3.0, 2.0];
        let left = hats.prolong(&coeffs, 0, 0.5);
        let right = hats.prolong(&coeffs, 1, 0.5);
        assert!((left - right).abs() < 1e-13);
        assert!((hats.prolong(&coeffs, 0, 0.25) - 2.0).abs() < 1e-14);
        let mut integral = vec![0.0; 3];
        hats.add_integrals(1.0, 1.0, &mut integral);
        assert!((integral[0] - 0.25).abs() < 1e-15);
        assert!((integral[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn locate_is_right_continuous() {
        let b = PiecewiseBasis::forward(&[0.0, 0.5, 1.0], 2, NodeFamily::ChebyshevExtrema).unwrap();
        assert_eq!(b.locate(0.0), 0);
        assert_eq!(b.locate(0.5), 1);
        assert_eq!(b.locate(1.0), 1);
        assert_eq!(b.locate(-3.0), 0);
    }

    #[test]
    fn legendre_projection_identity() {
        let basis = ForwardBasis::Legendre { degree: 6, h: 1.3 };
        let z = [0.3, -1.0, 2.0, 0.5, 0.0, 0.1, -0.7];
        let back = basis.restrict(|x| basis.prolong(&z, x));
        for (a, b) in back.iter().zip(&z) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
