//! Interpolation nodes, barycentric Lagrange evaluation, exact antiderivatives
//! of cardinal functions, orthonormal Legendre polynomials and quadrature rules.
//!
//! Everything here works on a single real interval `[a, b]`. Piecewise
//! constructions are assembled on top of these primitives in
//! [`crate::discretize`].

use std::f64::consts::PI;

use thiserror::Error;

/// Relative distance (in units of `b - a`) below which a point is treated as
/// coinciding with a node.
const NODE_SNAP: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("invalid interval [{a}, {b}]: need a < b")]
    InvalidInterval { a: f64, b: f64 },
    #[error("Chebyshev extrema need M >= 1")]
    TooFewExtrema,
    #[error("quadrature rule needs at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("nodes must be strictly monotone and lie in [{a}, {b}]")]
    BadNodes { a: f64, b: f64 },
}

/// Origin of a [`NodeSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeFamily {
    ChebyshevZeros,
    ChebyshevExtrema,
    Custom,
}

/// Ordered interpolation nodes on `[a, b]` together with barycentric weights.
///
/// Construction also precomputes the Chebyshev coefficients of the
/// antiderivatives of all cardinal functions, so that
/// [`NodeSet::cardinal_antiderivatives`] is exact up to rounding.
#[derive(Debug, Clone)]
pub struct NodeSet {
    a: f64,
    b: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    family: NodeFamily,
    // (n + 2) x (n + 1), row k holds the T_k coefficient of every cardinal antiderivative
    antiderivative_coeffs: Vec<f64>,
}

fn check_interval(a: f64, b: f64) -> Result<(), GridError> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(GridError::InvalidInterval { a, b });
    }
    Ok(())
}

/// The `N + 1` zeros of the degree `N + 1` Chebyshev polynomial mapped to `[a, b]`,
/// in ascending order.
pub fn chebyshev_zeros(count_index: usize, a: f64, b: f64) -> Result<NodeSet, GridError> {
    check_interval(a, b)?;
    let n1 = count_index + 1;
    let mut nodes = Vec::with_capacity(n1);
    let mut weights = Vec::with_capacity(n1);
    for n in 0..n1 {
        let angle = (2 * n + 1) as f64 * PI / (2 * n1) as f64;
        nodes.push((b - a) / 2.0 * (1.0 - angle.cos()) + a);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        weights.push(sign * angle.sin());
    }
    Ok(NodeSet::assemble(a, b, nodes, weights, NodeFamily::ChebyshevZeros))
}

/// The `M + 1` Chebyshev extrema mapped to `[a, b]`, ascending, with both
/// endpoints included exactly.
pub fn chebyshev_extrema(count_index: usize, a: f64, b: f64) -> Result<NodeSet, GridError> {
    check_interval(a, b)?;
    if count_index == 0 {
        return Err(GridError::TooFewExtrema);
    }
    let m = count_index;
    let mut nodes = Vec::with_capacity(m + 1);
    let mut weights = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let x = if j == 0 {
            a
        } else if j == m {
            b
        } else {
            (b - a) / 2.0 * (1.0 - (j as f64 * PI / m as f64).cos()) + a
        };
        nodes.push(x);
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let half = if j == 0 || j == m { 0.5 } else { 1.0 };
        weights.push(sign * half);
    }
    Ok(NodeSet::assemble(a, b, nodes, weights, NodeFamily::ChebyshevExtrema))
}

/// Barycentric weights from the defining product, rescaled by the interval
/// capacity `(b - a) / 4` to stay in floating-point range.
pub fn barycentric_weights(nodes: &[f64], a: f64, b: f64) -> Vec<f64> {
    let scale = 4.0 / (b - a);
    let raw: Vec<f64> = (0..nodes.len())
        .map(|j| {
            let prod: f64 = nodes
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &xk)| (nodes[j] - xk) * scale)
                .product();
            1.0 / prod
        })
        .collect();
    let max = raw.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    raw.into_iter().map(|w| w / max).collect()
}

impl NodeSet {
    /// A node set with user-supplied nodes (ascending or descending).
    pub fn custom(nodes: Vec<f64>, a: f64, b: f64) -> Result<NodeSet, GridError> {
        check_interval(a, b)?;
        let inside = nodes.iter().all(|&x| x.is_finite() && a <= x && x <= b);
        let ascending = nodes.windows(2).all(|w| w[0] < w[1]);
        let descending = nodes.windows(2).all(|w| w[0] > w[1]);
        if nodes.is_empty() || !inside || !(ascending || descending) {
            return Err(GridError::BadNodes { a, b });
        }
        let weights = barycentric_weights(&nodes, a, b);
        Ok(NodeSet::assemble(a, b, nodes, weights, NodeFamily::Custom))
    }

    fn assemble(a: f64, b: f64, nodes: Vec<f64>, weights: Vec<f64>, family: NodeFamily) -> NodeSet {
        let mut set = NodeSet {
            a,
            b,
            nodes,
            weights,
            family,
            antiderivative_coeffs: Vec::new(),
        };
        set.antiderivative_coeffs = set.build_antiderivative_coeffs();
        set
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn bary_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn family(&self) -> NodeFamily {
        self.family
    }

    /// Number of nodes (`n + 1`).
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn to_reference(&self, x: f64) -> f64 {
        ((2.0 * x - self.a - self.b) / (self.b - self.a)).clamp(-1.0, 1.0)
    }

    /// Values `ℓ_0(x), …, ℓ_n(x)` of the cardinal (Lagrange basis) functions,
    /// evaluated in barycentric second form.
    pub fn cardinal_values(&self, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.nodes.len()];
        self.cardinal_values_into(x, &mut out);
        out
    }

    /// Same as [`NodeSet::cardinal_values`], writing into `out`.
    pub fn cardinal_values_into(&self, x: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.nodes.len());
        let snap = NODE_SNAP * (self.b - self.a);
        if let Some(j) = self.nodes.iter().position(|&xj| (x - xj).abs() <= snap) {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[j] = 1.0;
            return;
        }
        let mut denom = 0.0;
        for ((o, &xj), &wj) in out.iter_mut().zip(&self.nodes).zip(&self.weights) {
            *o = wj / (x - xj);
            denom += *o;
        }
        out.iter_mut().for_each(|v| *v /= denom);
    }

    /// Barycentric interpolation of vector-valued data: `values[j]` is the
    /// value at node `j`; all entries must have the same length.
    pub fn lagrange_eval(&self, values: &[Vec<f64>], x: f64) -> Vec<f64> {
        assert_eq!(values.len(), self.nodes.len(), "one value per node");
        let dim = values.first().map_or(0, Vec::len);
        let card = self.cardinal_values(x);
        let mut out = vec![0.0; dim];
        for (c, v) in card.iter().zip(values) {
            for (o, vi) in out.iter_mut().zip(v) {
                *o += c * vi;
            }
        }
        out
    }

    /// Scalar interpolation.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        assert_eq!(values.len(), self.nodes.len(), "one value per node");
        self.cardinal_values(x).iter().zip(values).map(|(c, v)| c * v).sum()
    }

    fn build_antiderivative_coeffs(&self) -> Vec<f64> {
        let n1 = self.nodes.len();
        // Chebyshev coefficients of every cardinal function, sampled on the
        // Chebyshev zeros of degree n1 (exact for polynomials of degree < n1).
        let samples: Vec<Vec<f64>> = (0..n1)
            .map(|j| {
                let eta = -((2 * j + 1) as f64 * PI / (2 * n1) as f64).cos();
                let x = self.a + (self.b - self.a) * (eta + 1.0) / 2.0;
                self.cardinal_values(x)
            })
            .collect();
        let mut coeffs = vec![0.0; n1 * n1];
        for k in 0..n1 {
            let scale = if k == 0 { 1.0 } else { 2.0 } / n1 as f64;
            for (j, row) in samples.iter().enumerate() {
                let eta_angle = (2 * j + 1) as f64 * PI / (2 * n1) as f64;
                // T_k(-cos φ) = (-1)^k cos(kφ)
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let tk = sign * (k as f64 * eta_angle).cos();
                for (n, &l) in row.iter().enumerate() {
                    coeffs[k * n1 + n] += scale * tk * l;
                }
            }
        }
        // Term-wise antiderivative in the reference variable.
        let rows = n1 + 1;
        let mut anti = vec![0.0; rows * n1];
        for n in 0..n1 {
            for k in 0..n1 {
                let ak = coeffs[k * n1 + n];
                match k {
                    0 => anti[n1 + n] += ak,
                    1 => anti[2 * n1 + n] += ak / 4.0,
                    _ => {
                        anti[(k + 1) * n1 + n] += ak / (2.0 * (k + 1) as f64);
                        anti[(k - 1) * n1 + n] -= ak / (2.0 * (k - 1) as f64);
                    }
                }
            }
            // vanish at the left endpoint, T_k(-1) = (-1)^k
            let at_left: f64 = (1..rows)
                .map(|k| {
                    if k % 2 == 0 {
                        anti[k * n1 + n]
                    } else {
                        -anti[k * n1 + n]
                    }
                })
                .sum();
            anti[n] = -at_left;
        }
        let jac = (self.b - self.a) / 2.0;
        anti.iter_mut().for_each(|v| *v *= jac);
        anti
    }

    /// `(∫_a^x ℓ_n(σ) dσ)_{n=0..N}`, exact for the polynomial cardinal basis.
    pub fn cardinal_antiderivatives(&self, x: f64) -> Vec<f64> {
        let n1 = self.nodes.len();
        let mut out = vec![0.0; n1];
        if x <= self.a {
            return out;
        }
        let xi = self.to_reference(x);
        let (mut t_prev, mut t_cur) = (1.0, xi);
        for k in 0..=n1 {
            let tk = match k {
                0 => 1.0,
                1 => xi,
                _ => {
                    let next = 2.0 * xi * t_cur - t_prev;
                    t_prev = t_cur;
                    t_cur = next;
                    next
                }
            };
            let row = &self.antiderivative_coeffs[k * n1..(k + 1) * n1];
            for (o, c) in out.iter_mut().zip(row) {
                *o += c * tk;
            }
        }
        out
    }

    /// Lower bound on the Lebesgue constant: the maximum of `Σ |ℓ_n(x)|` over a
    /// uniform probe grid of `probe_density * (n + 1) + 1` points.
    pub fn lebesgue_constant(&self, probe_density: usize) -> f64 {
        let probes = probe_density.max(1) * self.nodes.len() + 1;
        let mut card = vec![0.0; self.nodes.len()];
        (0..probes)
            .map(|i| {
                let x = self.a + (self.b - self.a) * i as f64 / (probes - 1) as f64;
                self.cardinal_values_into(x, &mut card);
                card.iter().map(|c| c.abs()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

/// Default probe density for [`NodeSet::lebesgue_constant`].
pub const DEFAULT_PROBE_DENSITY: usize = 30;

fn legendre_classical(n: usize, xi: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 2);
    p.push(1.0);
    if n + 1 >= 1 {
        p.push(xi);
    }
    for k in 1..=n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * xi * p[k] - kf * p[k - 1]) / (kf + 1.0);
        p.push(next);
    }
    p
}

/// Values `p_0(x), …, p_N(x)` of the Legendre polynomials shifted to `[a, b]`
/// and normalized so that `∫_a^b p_i p_j = δ_ij`.
pub fn legendre_orthonormal(n: usize, a: f64, b: f64, x: f64) -> Vec<f64> {
    let xi = ((2.0 * x - a - b) / (b - a)).clamp(-1.0, 1.0);
    let p = legendre_classical(n, xi);
    (0..=n).map(|k| ((2 * k + 1) as f64 / (b - a)).sqrt() * p[k]).collect()
}

/// `∫_a^x p_k(σ) dσ` for the orthonormal shifted Legendre polynomials,
/// `k = 0..=N`, from `(2k+1) P_k = P'_{k+1} - P'_{k-1}`.
pub fn legendre_antiderivatives(n: usize, a: f64, b: f64, x: f64) -> Vec<f64> {
    let xi = ((2.0 * x - a - b) / (b - a)).clamp(-1.0, 1.0);
    let p = legendre_classical(n + 1, xi);
    let jac = (b - a) / 2.0;
    (0..=n)
        .map(|k| {
            let norm = ((2 * k + 1) as f64 / (b - a)).sqrt();
            let raw = if k == 0 {
                xi + 1.0
            } else {
                (p[k + 1] - p[k - 1]) / (2 * k + 1) as f64
            };
            norm * jac * raw
        })
        .collect()
}

/// A quadrature rule on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: (f64, f64),
}

impl QuadRule {
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// The same rule affinely moved to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> QuadRule {
        let (a0, b0) = self.interval;
        let s = (b - a) / (b0 - a0);
        QuadRule {
            points: self.points.iter().map(|&x| a + (x - a0) * s).collect(),
            weights: self.weights.iter().map(|&w| w * s).collect(),
            interval: (a, b),
        }
    }
}

/// `K`-point Clenshaw–Curtis rule on `[a, b]` (Chebyshev extrema, exact for
/// polynomials of degree `K - 1`).
pub fn clenshaw_curtis(k: usize, a: f64, b: f64) -> Result<QuadRule, GridError> {
    if k < 2 {
        return Err(GridError::TooFewPoints { min: 2, got: k });
    }
    check_interval(a, b)?;
    let n = k - 1;
    let nf = n as f64;
    let mut w = vec![0.0; k];
    let theta: Vec<f64> = (0..k).map(|j| j as f64 * PI / nf).collect();
    if n.is_multiple_of(2) {
        w[0] = 1.0 / (nf * nf - 1.0);
        w[n] = w[0];
    } else {
        w[0] = 1.0 / (nf * nf);
        w[n] = w[0];
    }
    for j in 1..n {
        let mut v = 1.0;
        if n.is_multiple_of(2) {
            for m in 1..n / 2 {
                let mf = m as f64;
                v -= 2.0 * (2.0 * mf * theta[j]).cos() / (4.0 * mf * mf - 1.0);
            }
            v -= (nf * theta[j]).cos() / (nf * nf - 1.0);
        } else {
            for m in 1..=(n - 1) / 2 {
                let mf = m as f64;
                v -= 2.0 * (2.0 * mf * theta[j]).cos() / (4.0 * mf * mf - 1.0);
            }
        }
        w[j] = 2.0 * v / nf;
    }
    let half = (b - a) / 2.0;
    Ok(QuadRule {
        points: theta.iter().map(|t| a + half * (1.0 - t.cos())).collect(),
        weights: w.iter().map(|wi| wi * half).collect(),
        interval: (a, b),
    })
}

/// `K`-point Gauss–Legendre rule on `[a, b]` (exact for degree `2K - 1`),
/// nodes by Newton iteration on `P_K`.
pub fn gauss_legendre(k: usize, a: f64, b: f64) -> Result<QuadRule, GridError> {
    if k < 1 {
        return Err(GridError::TooFewPoints { min: 1, got: k });
    }
    check_interval(a, b)?;
    let kf = k as f64;
    let mut pts = vec![0.0; k];
    let mut wts = vec![0.0; k];
    for i in 0..k.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (kf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=k {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let pk = if k == 1 { x } else { p1 };
            let pkm1 = if k == 1 { 1.0 } else { p0 };
            dp = kf * (x * pk - pkm1) / (x * x - 1.0);
            let dx = pk / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        pts[i] = -x;
        pts[k - 1 - i] = x;
        wts[i] = w;
        wts[k - 1 - i] = w;
    }
    let half = (b - a) / 2.0;
    let mid = (a + b) / 2.0;
    Ok(QuadRule {
        points: pts.iter().map(|x| mid + half * x).collect(),
        weights: wts.iter().map(|w| w * half).collect(),
        interval: (a, b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn zeros_closed_form() {
        let ns = chebyshev_zeros(1, 0.0, 1.0).unwrap();
        assert!(close(ns.nodes()[0], 0.146446609406726, 1e-14));
        assert!(close(ns.nodes()[1], 0.853553390593274, 1e-14));

        let h = 0.7;
        let single = chebyshev_zeros(0, 0.0, h).unwrap();
        assert_eq!(single.len(), 1);
        assert!(close(single.nodes()[0], h / 2.0, 1e-15));

        let ns = chebyshev_zeros(3, 0.0, 2.0).unwrap();
        for n in 0..4 {
            assert!(close(ns.nodes()[n] + ns.nodes()[3 - n], 2.0, 1e-14));
        }
        assert!(matches!(
            chebyshev_zeros(3, 1.0, 1.0),
            Err(GridError::InvalidInterval { .. })
        ));
    }

    #[test]
    fn extrema_include_endpoints() {
        let ns = chebyshev_extrema(1, -1.0, 0.0).unwrap();
        assert_eq!(ns.nodes(), &[-1.0, 0.0]);
        let ns = chebyshev_extrema(2, -1.0, 0.0).unwrap();
        assert!(close(ns.nodes()[1], -0.5, 1e-15));
        let ns = chebyshev_extrema(4, -2.0, 0.0).unwrap();
        assert_eq!(ns.nodes()[0], -2.0);
        assert_eq!(ns.nodes()[4], 0.0);
        assert!(close(ns.nodes()[1] + ns.nodes()[3], -2.0, 1e-14));
        assert_eq!(chebyshev_extrema(0, -1.0, 0.0).unwrap_err(), GridError::TooFewExtrema);
        assert!(chebyshev_extrema(3, 0.0, -1.0).is_err());
    }

    #[test]
    fn closed_form_weights_match_product_formula() {
        for set in [
            chebyshev_zeros(9, -1.0, 3.0).unwrap(),
            chebyshev_extrema(9, -1.0, 3.0).unwrap(),
        ] {
            let direct = barycentric_weights(set.nodes(), -1.0, 3.0);
            let ratio = direct[0] / set.bary_weights()[0];
            for (d, w) in direct.iter().zip(set.bary_weights()) {
                assert!(close(d / ratio, *w, 1e-12), "{d} vs {w}");
            }
        }
    }

    #[test]
    fn interpolation_basics() {
        let ns = chebyshev_zeros(6, 0.0, 2.0).unwrap();
        let ones = vec![1.0; 7];
        let ident: Vec<f64> = ns.nodes().to_vec();
        for &x in &[0.0, 0.3, 1.234, 2.0] {
            assert!(close(ns.interpolate(&ones, x), 1.0, 1e-14));
            assert!(close(ns.interpolate(&ident, x), x, 1e-14));
        }
        // exact at a node
        let vals: Vec<f64> = ns.nodes().iter().map(|x| x.exp()).collect();
        assert_eq!(ns.interpolate(&vals, ns.nodes()[3]), vals[3]);

        let vec_vals: Vec<Vec<f64>> = ns.nodes().iter().map(|&x| vec![1.0, x]).collect();
        let out = ns.lagrange_eval(&vec_vals, 0.77);
        assert!(close(out[0], 1.0, 1e-14) && close(out[1], 0.77, 1e-14));
    }

    /// Monomial Vandermonde solve by Gaussian elimination with partial pivoting.
    fn vandermonde_interpolant(nodes: &[f64], values: &[f64], x: f64) -> f64 {
        let n = nodes.len();
        let mut m: Vec<Vec<f64>> = nodes
            .iter()
            .zip(values)
            .map(|(&xi, &v)| {
                let mut row: Vec<f64> = (0..n).map(|p| xi.powi(p as i32)).collect();
                row.push(v);
                row
            })
            .collect();
        for c in 0..n {
            let piv = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
            m.swap(c, piv);
            let pivot_row = m[c].clone();
            for row in m.iter_mut().skip(c + 1) {
                let f = row[c] / pivot_row[c];
                for (x, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                    *x -= f * p;
                }
            }
        }
        let mut coef = vec![0.0; n];
        for r in (0..n).rev() {
            let s: f64 = (r + 1..n).map(|k| m[r][k] * coef[k]).sum();
            coef[r] = (m[r][n] - s) / m[r][r];
        }
        coef.iter().enumerate().map(|(p, c)| c * x.powi(p as i32)).sum()
    }

    #[test]
    fn matches_vandermonde_oracle() {
        let ns = chebyshev_zeros(5, 0.0, 1.0).unwrap();
        let vals: Vec<f64> = ns.nodes().iter().map(|x| x.sin()).collect();
        let oracle = vandermonde_interpolant(ns.nodes(), &vals, 0.3);
        assert!(close(ns.interpolate(&vals, 0.3), oracle, 1e-13));
        // and the interpolant is a good approximation of sin
        assert!(close(oracle, 0.3f64.sin(), 1e-6));
    }

    #[test]
    fn antiderivative_examples() {
        let ns = chebyshev_extrema(5, -1.0, 2.0).unwrap();
        assert!(ns.cardinal_antiderivatives(-1.0).iter().all(|&v| v == 0.0));
        let total: f64 = ns.cardinal_antiderivatives(2.0).iter().sum();
        assert!(close(total, 3.0, 1e-13));

        let two = NodeSet::custom(vec![0.0, 1.0], 0.0, 1.0).unwrap();
        let v = two.cardinal_antiderivatives(1.0);
        assert!(close(v[0], 0.5, 1e-15) && close(v[1], 0.5, 1e-15));
    }

    #[test]
    fn antiderivatives_match_gauss_oracle() {
        // independent route: Gauss-Legendre quadrature of the cardinal values
        let ns = chebyshev_zeros(12, 0.0, 1.5).unwrap();
        for &x in &[0.1, 0.77, 1.5] {
            let rule = gauss_legendre(20, 0.0, x).unwrap();
            let mut expect = vec![0.0; ns.len()];
            for (&p, &w) in rule.points.iter().zip(&rule.weights) {
                for (e, c) in expect.iter_mut().zip(ns.cardinal_values(p)) {
                    *e += w * c;
                }
            }
            for (got, want) in ns.cardinal_antiderivatives(x).iter().zip(&expect) {
                assert!(close(*got, *want, 1e-13), "{got} vs {want}");
            }
        }
    }

    #[test]
    fn legendre_values() {
        let h = 2.5;
        let p = legendre_orthonormal(3, 0.0, h, 1.1);
        assert!(close(p[0], 1.0 / h.sqrt(), 1e-15));
        let p = legendre_orthonormal(2, -1.0, 1.0, 0.0);
        assert!(close(p[2], -0.790569415042095, 1e-14));

        let rule = gauss_legendre(8, 0.0, h).unwrap();
        for i in 0..=5 {
            for j in 0..=5 {
                let ip = rule.integrate(|x| {
                    let p = legendre_orthonormal(5, 0.0, h, x);
                    p[i] * p[j]
                });
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(close(ip, want, 1e-13));
            }
        }
    }

    #[test]
    fn legendre_antiderivatives_by_quadrature() {
        let (a, b) = (-0.5, 1.0);
        for &x in &[-0.5, 0.1, 1.0] {
            let got = legendre_antiderivatives(6, a, b, x);
            if x == a {
                assert!(got.iter().all(|v| v.abs() < 1e-15));
                continue;
            }
            let rule = gauss_legendre(10, a, x).unwrap();
            for (k, g) in got.iter().enumerate() {
                let want = rule.integrate(|s| legendre_orthonormal(6, a, b, s)[k]);
                assert!(close(*g, want, 1e-13));
            }
        }
    }

    #[test]
    fn clenshaw_curtis_examples() {
        let r = clenshaw_curtis(3, 0.0, 1.0).unwrap();
        assert!(close(r.integrate(|x| x * x), 1.0 / 3.0, 1e-15));
        for k in 2..12 {
            let r = clenshaw_curtis(k, 0.0, 1.0).unwrap();
            assert!(close(r.integrate(|_| 1.0), 1.0, 1e-14));
            assert!(r.weights.iter().all(|&w| w > 0.0));
        }
        let r = clenshaw_curtis(16, 0.0, PI).unwrap();
        assert!(close(r.integrate(f64::sin), 2.0, 1e-12));
        assert!(matches!(
            clenshaw_curtis(1, 0.0, 1.0),
            Err(GridError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn clenshaw_curtis_monomial_exactness() {
        for k in 2..=24 {
            let r = clenshaw_curtis(k, 0.0, 1.0).unwrap();
            for j in 0..k {
                let exact = 1.0 / (j + 1) as f64;
                let got = r.integrate(|x| x.powi(j as i32));
                assert!(((got - exact) / exact).abs() <= 1e-12, "K={k} j={j}");
            }
        }
    }

    #[test]
    fn gauss_legendre_exactness() {
        let r = gauss_legendre(5, -1.0, 2.0).unwrap();
        for j in 0..10 {
            let exact = (2f64.powi(j + 1) - (-1f64).powi(j + 1)) / (j + 1) as f64;
            assert!(close(r.integrate(|x| x.powi(j)), exact, 1e-12));
        }
    }

    #[test]
    fn lebesgue_examples() {
        let ns = chebyshev_zeros(1, -1.0, 1.0).unwrap();
        assert!(close(ns.lebesgue_constant(DEFAULT_PROBE_DENSITY), 2f64.sqrt(), 1e-3));
        let one = chebyshev_zeros(0, -1.0, 1.0).unwrap();
        assert!(close(one.lebesgue_constant(10), 1.0, 1e-15));
        let ns = chebyshev_zeros(20, 0.0, 1.0).unwrap();
        assert!(ns.lebesgue_constant(DEFAULT_PROBE_DENSITY) <= 2.0 / PI * 21f64.ln() + 1.0);
    }

    #[test]
    fn custom_nodes_validation() {
        assert!(NodeSet::custom(vec![0.0, 0.5, 0.4], 0.0, 1.0).is_err());
        assert!(NodeSet::custom(vec![0.0, 1.5], 0.0, 1.0).is_err());
        let desc = NodeSet::custom(vec![1.0, 0.5, 0.0], 0.0, 1.0).unwrap();
        assert!(close(desc.interpolate(&[1.0, 0.25, 0.0], 0.3), 0.09, 1e-14));
        assert_eq!(desc.family(), NodeFamily::Custom);
    }
}
