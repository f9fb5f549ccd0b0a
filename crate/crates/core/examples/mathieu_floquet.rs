//! Floquet multipliers of a delayed damped Mathieu equation against the
//! brute-force monodromy matrix.

use delay_spectra::discretize::{discretize, DiscConfig};
use delay_spectra::oracles::monodromy_bruteforce;
use delay_spectra::problems::{validate, CoeffMatrix, ProblemSpec, ScalarFn, TrigPoly};
use delay_spectra::spectra::{eig_dense, match_dominant};

fn main() {
    let omega = 2.0 * std::f64::consts::PI;
    let stiffness = ScalarFn::Trig(TrigPoly {
        omega,
        constant: -1.0,
        cos: vec![-0.8],
        sin: vec![],
    });
    let a = CoeffMatrix::from_rows(vec![
        vec![ScalarFn::Const(0.0), ScalarFn::Const(1.0)],
        vec![stiffness, ScalarFn::Const(-0.1)],
    ]);
    let p = validate(
        ProblemSpec::rfde(2, 1.0)
            .with_a(a)
            .with_discrete(1.0, CoeffMatrix::constant(2, &[0.0, 0.0, -0.3, 0.0]))
            .with_period(1.0),
    )
    .unwrap();
    let t = eig_dense(&discretize(&p, &DiscConfig::collocation(24, 1.0)).unwrap().data).unwrap();
    let bf = eig_dense(&monodromy_bruteforce(&p, 1.0, 24, 2048).unwrap()).unwrap();
    println!("spectral radius {:.10}", t.spectral_radius());
    for (a, b) in match_dominant(&t.eigenvalues, &bf.eigenvalues) {
        println!("{a:.10}  brute force {:.10}", b.unwrap());
    }
}
