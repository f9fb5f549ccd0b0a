//! A renewal equation x(t) = ∫_{-3}^{-1} x(t+θ)/2 dθ. Constants are invariant,
//! so 1 is a multiplier for every step length.

use delay_spectra::discretize::{build_context, solve_reduced, DiscConfig};
use delay_spectra::problems::{validate, CoeffMatrix, ProblemSpec};
use delay_spectra::spectra::eig_dense;
use num_complex::Complex64;

fn main() {
    let p = validate(ProblemSpec::re(1, 3.0).with_kernel(-3.0, -1.0, CoeffMatrix::scalar(0.5))).unwrap();
    for h in [1.0, 3.0, 4.5] {
        let ctx = build_context(&p, &DiscConfig::collocation(20, h)).unwrap();
        let blocks = ctx.assemble().unwrap();
        let t = solve_reduced(&blocks).unwrap();
        let s = eig_dense(&t.data).unwrap();
        let one = s.closest(Complex64::new(1.0, 0.0)).unwrap();
        println!(
            "h = {h}: |T1| = {:.1e}, closest to 1: {:.3e}",
            blocks.t1.amax(),
            (one - 1.0).norm()
        );
    }
}
