use nalgebra::{DMatrix, DVector};

use super::{Blocks, DiscConfig, DiscError};

/// Relative pivot threshold below which `I - U2` is treated as singular.
pub const SINGULARITY_TOL: f64 = 1e-12;

const CONDITION_WARN: f64 = 1e10;

/// The reduced evolution matrix `T_{M,N}` with diagnostics.
#[derive(Debug, Clone)]
pub struct EvolutionMatrix {
    pub data: DMatrix<f64>,
    pub config: DiscConfig,
    pub dim: usize,
    /// Estimate of the 1-norm condition number of `I - U2`.
    pub condition_estimate: f64,
    pub warnings: Vec<String>,
}

/// `T_{M,N} = T1 + T2 (I - U2)^{-1} U1`.
pub fn solve_reduced(b: &Blocks) -> Result<EvolutionMatrix, DiscError> {
    let nz = b.u2.nrows();
    let mut warnings = Vec::new();
    if nz == 0 {
        return Ok(EvolutionMatrix {
            data: b.t1.clone(),
            config: b.config.clone(),
            dim: b.dim,
            condition_estimate: 1.0,
            warnings,
        });
    }
    let lhs = DMatrix::identity(nz, nz) - &b.u2;
    let norm1 = one_norm(&lhs);
    let lu = lhs.clone().lu();
    let min_pivot = lu.u().diagonal().iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if min_pivot.is_nan() || min_pivot <= SINGULARITY_TOL * norm1 {
        return Err(DiscError::Singular {
            condition: f64::INFINITY,
        });
    }
    let lu_t = lhs.transpose().lu();
    let inv_norm = inverse_norm_estimate(
        nz,
        |v| lu.solve(v).unwrap_or_else(|| DVector::from_element(nz, f64::INFINITY)),
        |v| {
            lu_t.solve(v)
                .unwrap_or_else(|| DVector::from_element(nz, f64::INFINITY))
        },
    );
    let condition = norm1 * inv_norm;
    if !condition.is_finite() {
        return Err(DiscError::Singular { condition });
    }
    if condition > CONDITION_WARN {
        let msg = format!("I - U2 is ill-conditioned (estimate {condition:.3e})");
        log::warn!("{msg}");
        warnings.push(msg);
    }
    if let Some(rho) = spectral_radius(&b.u2) {
        if rho >= 1.0 {
            let msg = format!("spectral radius of U2 is {rho:.3e} >= 1; the step h may be too large");
            log::warn!("{msg}");
            warnings.push(msg);
        }
    }
    let x = lu.solve(&b.u1).ok_or(DiscError::Singular { condition })?;
    let data = &b.t1 + &b.t2 * x;
    Ok(EvolutionMatrix {
        data,
        config: b.config.clone(),
        dim: b.dim,
        condition_estimate: condition,
        warnings,
    })
}

pub(crate) fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn spectral_radius(m: &DMatrix<f64>) -> Option<f64> {
    let schur = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, 1000)?;
    Some(schur.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Hager's estimate of `||B^{-1}||_1` with Higham's extra test vector.
fn inverse_norm_estimate(
    n: usize,
    solve: impl Fn(&DVector<f64>) -> DVector<f64>,
    solve_t: impl Fn(&DVector<f64>) -> DVector<f64>,
) -> f64 {
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut est = 0.0;
    let mut last = usize::MAX;
    for _ in 0..5 {
        let y = solve(&x);
        est = y.lp_norm(1);
        let xi = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
        let z = solve_t(&xi);
        let (j, zmax) = z
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
        if zmax <= z.dot(&x) || j == last {
            break;
        }
        x = DVector::zeros(n);
        x[j] = 1.0;
        last = j;
    }
    let alt = DVector::from_fn(n, |i, _| {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        sign * (1.0 + i as f64 / (n.max(2) - 1) as f64)
    });
    let extra = 2.0 * solve(&alt).lp_norm(1) / (3.0 * n as f64);
    f64::max(est, extra)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimator_matches_exact_norm_on_small_matrices() {
        let b = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
        let inv = b.clone().try_inverse().unwrap();
        let lu = b.clone().lu();
        let lu_t = b.transpose().lu();
        let est = inverse_norm_estimate(3, |v| lu.solve(v).unwrap(), |v| lu_t.solve(v).unwrap());
        let exact = one_norm(&inv);
        assert!(est <= exact * (1.0 + 1e-12));
        assert!(est >= exact / 3.0);
    }
}
