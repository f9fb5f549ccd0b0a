//! Dense eigenvalues with residuals, multiplicity clusters, and error-vs-N
//! convergence tables.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use thiserror::Error;

use crate::discretize::{discretize, DiscConfig};
use crate::problems::ProblemSpec;

/// Default relative tolerance of [`cluster`].
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;

/// Errors at or below this level are treated as rounding noise by
/// [`order_estimate`].
pub const ROUNDING_PLATEAU: f64 = 1e-14;

const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("eigenvalue iteration did not converge for a {0}x{0} matrix")]
    NoConvergence(usize),
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("order estimate needs at least 3 errors above {plateau:e}, found {found}")]
    TooFewPoints { found: usize, plateau: f64 },
}

/// Eigenvalues sorted by descending modulus, with relative residuals
/// `||Av - μv|| / ||A||_1` for unit `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub source_size: usize,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.first().map_or(0.0, |z| z.norm())
    }

    /// The eigenvalue closest to `target`.
    pub fn closest(&self, target: Complex64) -> Option<Complex64> {
        self.eigenvalues
            .iter()
            .copied()
            .min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Descending modulus, then descending real part, then descending imaginary part.
pub fn spectral_order(a: &Complex64, b: &Complex64) -> Ordering {
    b.norm()
        .total_cmp(&a.norm())
        .then(b.re.total_cmp(&a.re))
        .then(b.im.total_cmp(&a.im))
}

/// All eigenvalues of a dense real matrix (real Schur form by shifted QR),
/// each with the residual of an eigenvector from inverse iteration.
pub fn eig_dense(a: &DMatrix<f64>) -> Result<Spectrum, SpectraError> {
    let (n, c) = a.shape();
    if n != c {
        return Err(SpectraError::NotSquare(n, c));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(SpectraError::NonFinite);
    }
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            residuals: Vec::new(),
            source_size: 0,
        });
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, SCHUR_MAX_ITER).ok_or(SpectraError::NoConvergence(n))?;
    let mut eigenvalues: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(spectral_order);

    let norm = a
        .column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let ac: DMatrix<Complex64> = a.map(|v| Complex64::new(v, 0.0));
    let residuals = eigenvalues.iter().map(|&mu| eigen_residual(&ac, mu, norm)).collect();
    Ok(Spectrum {
        eigenvalues,
        residuals,
        source_size: n,
    })
}

/// Relative residual of the eigenvector found by inverse iteration at `mu`,
/// recomputed by explicit multiplication.
fn eigen_residual(a: &DMatrix<Complex64>, mu: Complex64, norm: f64) -> f64 {
    let n = a.nrows();
    let scale = if norm > 0.0 { norm } else { 1.0 };
    let mut v = DVector::from_fn(n, |i, _| {
        Complex64::new(1.0 + (i as f64 * 0.618).fract(), 0.1 * i as f64 / n as f64)
    });
    v /= Complex64::new(v.norm(), 0.0);
    let mut best = f64::INFINITY;
    let mut shift = mu;
    for attempt in 0..4 {
        let mut shifted = a.clone();
        for i in 0..n {
            shifted[(i, i)] -= shift;
        }
        let lu = shifted.lu();
        for _ in 0..3 {
            let Some(w) = lu.solve(&v) else { break };
            let wn = w.norm();
            if !(wn.is_finite() && wn > 0.0) {
                break;
            }
            v = w / Complex64::new(wn, 0.0);
            let r = (a * &v - &v * mu).norm() / scale;
            best = best.min(r);
        }
        if best.is_finite() {
            break;
        }
        // exactly singular shift: perturb and retry
        shift = mu + Complex64::new(1.0, 1.0) * (scale * f64::EPSILON * 10f64.powi(attempt));
    }
    best
}

/// Eigenvalues within `rel_tol · max(|center|, 1)` of a center, counted as
/// one eigenvalue of algebraic multiplicity `multiplicity`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub center: Complex64,
    pub members: Vec<usize>,
    pub multiplicity: usize,
}

/// Greedy clustering in spectrum order: each unassigned eigenvalue starts a
/// cluster and collects every unassigned eigenvalue close to it.
pub fn cluster(s: &Spectrum, rel_tol: f64) -> Vec<Cluster> {
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| spectral_order(&s.eigenvalues[i], &s.eigenvalues[j]));
    let mut taken = vec![false; s.len()];
    let mut out = Vec::new();
    for &i in &order {
        if taken[i] {
            continue;
        }
        let center = s.eigenvalues[i];
        let radius = rel_tol * center.norm().max(1.0);
        let members: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&j| !taken[j] && (s.eigenvalues[j] - center).norm() <= radius)
            .collect();
        for &j in &members {
            taken[j] = true;
        }
        out.push(Cluster {
            center,
            multiplicity: members.len(),
            members,
        });
    }
    out
}

/// Eigenvalues with modulus at least `fraction` of the largest modulus.
pub fn dominant(values: &[Complex64], fraction: f64) -> Vec<Complex64> {
    let rho = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut out: Vec<Complex64> = values.iter().copied().filter(|z| z.norm() >= fraction * rho).collect();
    out.sort_by(spectral_order);
    out
}

/// Pairs each dominant eigenvalue of `a` (modulus at least half the spectral
/// radius) with its nearest partner in `b`, greedily and without reuse.
/// Unmatched entries get `None`.
pub fn match_dominant(a: &[Complex64], b: &[Complex64]) -> Vec<(Complex64, Option<Complex64>)> {
    let mut pool: Vec<Complex64> = b.to_vec();
    dominant(a, 0.5)
        .into_iter()
        .map(|z| {
            let best = pool
                .iter()
                .enumerate()
                .min_by(|x, y| (x.1 - z).norm().total_cmp(&(y.1 - z).norm()))
                .map(|(k, _)| k);
            (z, best.map(|k| pool.swap_remove(k)))
        })
        .collect()
}

/// Largest distance in [`match_dominant`]; infinite if a partner is missing.
pub fn dominant_delta(a: &[Complex64], b: &[Complex64]) -> f64 {
    match_dominant(a, b)
        .into_iter()
        .map(|(z, w)| w.map_or(f64::INFINITY, |w| (w - z).norm()))
        .fold(0.0, f64::max)
}

/// Reference eigenvalue of a convergence sweep and where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub value: Complex64,
    pub provenance: String,
}

impl Reference {
    pub fn new(value: Complex64, provenance: impl Into<String>) -> Reference {
        Reference {
            value,
            provenance: provenance.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub m: usize,
    /// Eigenvalue closest to the reference; `None` when the build failed.
    pub eigenvalue: Option<Complex64>,
    pub error: Option<f64>,
    pub condition: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub reference: Reference,
}

impl ConvergenceTable {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.failure.is_some()).count()
    }

    /// Errors decrease strictly from row to row until the first error at or
    /// below `plateau`; later rows are not checked.
    pub fn decreasing_until(&self, plateau: f64) -> bool {
        let errs: Vec<f64> = self.rows.iter().map(|r| r.error.unwrap_or(f64::INFINITY)).collect();
        for w in errs.windows(2) {
            if w[0] <= plateau {
                return true;
            }
            if w[1] >= w[0] && w[1] > plateau {
                return false;
            }
        }
        true
    }
}

/// Sweep over `n_list` with `M = N + 1`.
pub fn convergence_sweep(
    p: &ProblemSpec,
    template: &DiscConfig,
    n_list: &[usize],
    reference: Reference,
) -> ConvergenceTable {
    convergence_sweep_with(p, template, n_list, reference, |n| n + 1)
}

/// Sweep over `n_list` with `M = m_of(N)`. Failures are recorded per row.
pub fn convergence_sweep_with(
    p: &ProblemSpec,
    template: &DiscConfig,
    n_list: &[usize],
    reference: Reference,
    m_of: impl Fn(usize) -> usize + Sync,
) -> ConvergenceTable {
    let rows = std::thread::scope(|scope| {
        let handles: Vec<_> = n_list
            .iter()
            .map(|&n| {
                let m_of = &m_of;
                let reference = &reference;
                scope.spawn(move || sweep_row(p, template, n, m_of(n), reference.value))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    ConvergenceTable { rows, reference }
}

fn sweep_row(p: &ProblemSpec, template: &DiscConfig, n: usize, m: usize, reference: Complex64) -> ConvergenceRow {
    let cfg = template.clone().with_n(n).with_m(m);
    let mut row = ConvergenceRow {
        n,
        m,
        eigenvalue: None,
        error: None,
        condition: None,
        failure: None,
    };
    let t = match discretize(p, &cfg) {
        Ok(t) => t,
        Err(e) => {
            row.failure = Some(e.to_string());
            return row;
        }
    };
    row.condition = Some(t.condition_estimate);
    match eig_dense(&t.data) {
        Ok(s) => {
            let mu = s.closest(reference);
            row.eigenvalue = mu;
            row.error = mu.map(|z| (z - reference).norm());
        }
        Err(e) => row.failure = Some(e.to_string()),
    }
    row
}

/// Least-squares slope of `log(error)` against `log(N)` over rows whose error
/// exceeds [`ROUNDING_PLATEAU`].
pub fn order_estimate(t: &ConvergenceTable) -> Result<f64, SpectraError> {
    let pts: Vec<(f64, f64)> = t
        .rows
        .iter()
        .filter_map(|r| {
            r.error
                .filter(|&e| e > ROUNDING_PLATEAU)
                .map(|e| ((r.n as f64).ln(), e.ln()))
        })
        .collect();
    if pts.len() < 3 {
        return Err(SpectraError::TooFewPoints {
            found: pts.len(),
            plateau: ROUNDING_PLATEAU,
        });
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rotation_and_diagonal() {
        let s = eig_dense(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.eigenvalues[0] - c(0.0, 1.0)).norm() < 1e-15);
        assert!((s.eigenvalues[1] - c(0.0, -1.0)).norm() < 1e-15);

        let s = eig_dense(&DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.5, -1.0]))).unwrap();
        assert_eq!(s.eigenvalues, vec![c(2.0, 0.0), c(-1.0, 0.0), c(0.5, 0.0)]);
        assert!(s.max_residual() < 1e-15);
    }

    #[test]
    fn random_matrix_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = DMatrix::from_fn(50, 50, |_, _| rng.random_range(-1.0..1.0));
        let s = eig_dense(&a).unwrap();
        assert_eq!(s.len(), 50);
        assert!(s.max_residual() <= 1e-10, "{}", s.max_residual());
        for z in &s.eigenvalues {
            assert!(s.eigenvalues.iter().any(|w| (w - z.conj()).norm() <= 1e-10));
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(eig_dense(&DMatrix::zeros(2, 3)), Err(SpectraError::NotSquare(2, 3)));
        let mut a = DMatrix::zeros(2, 2);
        a[(0, 1)] = f64::NAN;
        assert_eq!(eig_dense(&a), Err(SpectraError::NonFinite));
        assert!(eig_dense(&DMatrix::zeros(0, 0)).unwrap().is_empty());
    }

    #[test]
    fn sort_ties() {
        let mut v = vec![c(0.0, -1.0), c(-1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0), c(0.1, 0.0)];
        v.sort_by(spectral_order);
        assert_eq!(
            v,
            vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(-1.0, 0.0), c(0.1, 0.0)]
        );
    }

    fn spectrum(values: &[Complex64]) -> Spectrum {
        let mut eigenvalues = values.to_vec();
        eigenvalues.sort_by(spectral_order);
        Spectrum {
            residuals: vec![0.0; values.len()],
            source_size: values.len(),
            eigenvalues,
        }
    }

    #[test]
    fn cluster_examples() {
        let s = spectrum(&[c(1.0, 0.0), c(1.0 + 1e-9, 0.0), c(0.3, 0.0)]);
        let cl = cluster(&s, DEFAULT_CLUSTER_TOL);
        let sizes: Vec<usize> = cl.iter().map(|c| c.multiplicity).collect();
        assert_eq!(sizes, vec![2, 1]);

        let s = spectrum(&[c(0.0, 1.0), c(0.0, -1.0)]);
        assert_eq!(cluster(&s, DEFAULT_CLUSTER_TOL).len(), 2);
        assert!(cluster(&spectrum(&[]), DEFAULT_CLUSTER_TOL).is_empty());
    }

    #[test]
    fn dominant_matching() {
        let a = [c(0.0, 1.0), c(0.0, -1.0), c(0.1, 0.0)];
        let b = [c(0.0, -1.0 + 1e-7), c(1e-8, 1.0), c(0.2, 0.0)];
        let d = dominant_delta(&a, &b);
        assert!((d - 1e-7).abs() < 1e-12, "{d}");
        // no reuse: two equal dominant values need two partners
        let d = dominant_delta(&[c(1.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]);
        assert!((d - 1.0).abs() < 1e-15);
    }

    fn table(pairs: &[(usize, f64)]) -> ConvergenceTable {
        ConvergenceTable {
            rows: pairs
                .iter()
                .map(|&(n, e)| ConvergenceRow {
                    n,
                    m: n + 1,
                    eigenvalue: None,
                    error: Some(e),
                    condition: None,
                    failure: None,
                })
                .collect(),
            reference: Reference::new(c(0.0, 0.0), "synthetic"),
        }
    }

    #[test]
    fn order_examples() {
        let t = table(&[5, 10, 15, 20, 25].map(|n| (n, (n as f64).powi(-3))));
        assert!((order_estimate(&t).unwrap() + 3.0).abs() < 0.05);
        let t = table(&[5, 10, 15, 20, 25].map(|n| (n, 2f64.powi(-(n as i32)))));
        assert!(order_estimate(&t).unwrap() < -5.0);
        let t = table(&[(5, 1e-15), (10, 1e-16), (15, 0.0)]);
        assert!(matches!(
            order_estimate(&t),
            Err(SpectraError::TooFewPoints { found: 0, .. })
        ));
    }

    #[test]
    fn decreasing_until_plateau() {
        assert!(table(&[(5, 1e-3), (10, 1e-8), (15, 1e-15), (20, 3e-15)]).decreasing_until(1e-13));
        assert!(!table(&[(5, 1e-3), (10, 1e-2), (15, 1e-15)]).decreasing_until(1e-13));
    }
}
