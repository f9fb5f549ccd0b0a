//! Piecewise collocation: several low-degree pieces on the forward step and the
//! translated partition on the history.

use delay_spectra::discretize::{discretize, DiscConfig, Method};
use delay_spectra::problems::{validate, CoeffMatrix, ProblemSpec};
use delay_spectra::spectra::eig_dense;
use num_complex::Complex64;

fn main() {
    let p = validate(ProblemSpec::rfde(1, 1.0).with_discrete(1.0, CoeffMatrix::scalar(-std::f64::consts::FRAC_PI_2)))
        .unwrap();
    for pieces in [1, 2, 4, 8] {
        for degree in [2, 4, 6] {
            let cfg = DiscConfig::collocation(degree, 1.0)
                .with_method(Method::PiecewiseCollocation)
                .with_pieces(DiscConfig::uniform_pieces(1.0, pieces));
            let t = discretize(&p, &cfg).unwrap();
            let mu = eig_dense(&t.data).unwrap().eigenvalues[0];
            println!(
                "{pieces} pieces, degree {degree}: order {:>3}, |mu - i| = {:.2e}",
                t.data.nrows(),
                (mu - Complex64::i()).norm()
            );
        }
    }
}
