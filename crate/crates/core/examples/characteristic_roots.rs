//! Roots of the characteristic equation by Newton's method and the multipliers
//! they predict.

use delay_spectra::discretize::{discretize, DiscConfig};
use delay_spectra::oracles::{char_roots, RootSearchRegion};
use delay_spectra::problems::{validate, CoeffMatrix, ProblemSpec};
use delay_spectra::spectra::eig_dense;

fn main() {
    let p = validate(
        ProblemSpec::rfde(1, 1.0)
            .with_a(CoeffMatrix::scalar(-0.5))
            .with_discrete(1.0, CoeffMatrix::scalar(-2.0)),
    )
    .unwrap();
    let region = RootSearchRegion::new((-3.0, 1.0), (-20.0, 20.0), (8, 41)).unwrap();
    let t = eig_dense(&discretize(&p, &DiscConfig::collocation(30, 1.0)).unwrap().data).unwrap();
    for r in char_roots(&p, &region).unwrap() {
        let mu = r.exp();
        let nearest = t.closest(mu).unwrap();
        println!(
            "lambda {r:.10}  e^lambda {mu:.8}  distance {:.1e}",
            (nearest - mu).norm()
        );
    }
}
