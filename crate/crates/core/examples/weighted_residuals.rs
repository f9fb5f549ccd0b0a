//! Collocation and weighted residuals on the same problem: the dominant
//! multipliers agree.

use delay_spectra::discretize::{discretize, DiscConfig, Method};
use delay_spectra::problems::{validate, CoeffMatrix, ProblemSpec};
use delay_spectra::spectra::{eig_dense, match_dominant};

fn main() {
    let p = validate(
        ProblemSpec::rfde(2, 1.0)
            .with_a(CoeffMatrix::constant(2, &[0.0, 1.0, -1.0, -0.2]))
            .with_discrete(1.0, CoeffMatrix::constant(2, &[0.0, 0.0, -0.4, 0.0]))
            .with_kernel(-1.0, -0.5, CoeffMatrix::constant(2, &[0.0, 0.0, 0.3, 0.0])),
    )
    .unwrap();
    let cfg = DiscConfig::collocation(16, 1.0);
    let col = eig_dense(&discretize(&p, &cfg).unwrap().data).unwrap();
    let wr = eig_dense(
        &discretize(&p, &cfg.clone().with_method(Method::WeightedResiduals))
            .unwrap()
            .data,
    )
    .unwrap();
    for (a, b) in match_dominant(&col.eigenvalues, &wr.eigenvalues) {
        let b = b.unwrap();
        println!("{a:.10}  {b:.10}  {:.1e}", (a - b).norm());
    }
}
