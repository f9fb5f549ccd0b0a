//! x'(t) = -(π/2) x(t - 1): the characteristic roots ±iπ/2 give multipliers ±i.

use std::f64::consts::FRAC_PI_2;

use delay_spectra::discretize::{discretize, DiscConfig};
use delay_spectra::problems::{validate, CoeffMatrix, ProblemSpec};
use delay_spectra::spectra::eig_dense;

fn main() {
    let p = validate(ProblemSpec::rfde(1, 1.0).with_discrete(1.0, CoeffMatrix::scalar(-FRAC_PI_2))).unwrap();
    let t = discretize(&p, &DiscConfig::collocation(20, 1.0)).unwrap();
    let s = eig_dense(&t.data).unwrap();
    for (z, r) in s.eigenvalues.iter().zip(&s.residuals).take(6) {
        println!("{:>+.12} {:>+.12}i  |mu| {:.6}  residual {r:.1e}", z.re, z.im, z.norm());
    }
}
