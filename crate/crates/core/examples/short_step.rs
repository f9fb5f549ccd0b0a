//! Steps shorter than the delay: T(τ/2)² reproduces T(τ) up to discretization
//! error.

use delay_spectra::discretize::{discretize, DiscConfig};
use delay_spectra::problems::{validate, CoeffMatrix, ProblemSpec};
use delay_spectra::spectra::{dominant_delta, eig_dense};

fn main() {
    let p = validate(
        ProblemSpec::rfde(1, 1.0)
            .with_a(CoeffMatrix::scalar(0.2))
            .with_discrete(0.4, CoeffMatrix::scalar(-0.8))
            .with_discrete(1.0, CoeffMatrix::scalar(-0.9)),
    )
    .unwrap();
    let full = eig_dense(&discretize(&p, &DiscConfig::collocation(24, 1.0)).unwrap().data).unwrap();
    for q in [2, 3, 4] {
        let short = discretize(&p, &DiscConfig::collocation(24, 1.0 / q as f64)).unwrap();
        let power = (1..q).fold(short.data.clone(), |acc, _| &acc * &short.data);
        let s = eig_dense(&power).unwrap();
        println!(
            "h = 1/{q}: order {}, delta {:.2e}",
            short.data.nrows(),
            dominant_delta(&full.eigenvalues, &s.eigenvalues)
        );
    }
}
