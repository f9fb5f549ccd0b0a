//! The ODE x' = -x seen as a delay equation: the reduced operator over one
//! unit step has the single nonzero eigenvalue e^{-1}.

use delay_spectra::discretize::{discretize, DiscConfig};
use delay_spectra::problems::{validate, CoeffMatrix, ProblemSpec};
use delay_spectra::spectra::eig_dense;

fn main() {
    let p = validate(
        ProblemSpec::rfde(1, 1.0)
            .with_a(CoeffMatrix::scalar(-1.0))
            .labeled("ode"),
    )
    .unwrap();
    let t = discretize(&p, &DiscConfig::collocation(10, 1.0)).unwrap();
    let s = eig_dense(&t.data).unwrap();
    println!(
        "order {}, condition estimate {:.3e}",
        t.data.nrows(),
        t.condition_estimate
    );
    println!("dominant {:.16}, exact {:.16}", s.eigenvalues[0].re, (-1f64).exp());
}
