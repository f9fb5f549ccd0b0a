//! Error of the dominant multiplier against N, with the fitted log-log slope.

use delay_spectra::cli::convergence_csv;
use delay_spectra::discretize::DiscConfig;
use delay_spectra::problems::{validate, CoeffMatrix, ProblemSpec};
use delay_spectra::spectra::{convergence_sweep, order_estimate, Reference};
use num_complex::Complex64;

fn main() {
    let p = validate(
        ProblemSpec::rfde(1, 1.0)
            .with_a(CoeffMatrix::scalar(-1.0))
            .with_discrete(1.0, CoeffMatrix::scalar(0.5)),
    )
    .unwrap();
    // reference from a large discretization
    let fine = convergence_sweep(
        &p,
        &DiscConfig::collocation(40, 1.0),
        &[40],
        Reference::new(Complex64::new(1.0, 0.0), "guess"),
    );
    let mu = fine.rows[0].eigenvalue.unwrap();
    let t = convergence_sweep(
        &p,
        &DiscConfig::collocation(2, 1.0),
        &[2, 3, 4, 5, 6, 8, 10],
        Reference::new(mu, "N = 40"),
    );
    print!("{}", convergence_csv(&t));
    println!("slope {:.2}", order_estimate(&t).unwrap());
}
