//! Chebyshev grids, barycentric interpolation and Lebesgue constants.

use std::f64::consts::PI;

use delay_spectra::grids::{chebyshev_extrema, chebyshev_zeros, NodeSet, DEFAULT_PROBE_DENSITY};

fn main() {
    let runge = |x: f64| 1.0 / (1.0 + 25.0 * x * x);
    for n in [4, 8, 16, 32, 64] {
        let zeros = chebyshev_zeros(n, -1.0, 1.0).unwrap();
        let extrema = chebyshev_extrema(n, -1.0, 1.0).unwrap();
        let uniform = NodeSet::custom((0..=n).map(|k| -1.0 + 2.0 * k as f64 / n as f64).collect(), -1.0, 1.0).unwrap();
        let err = |g: &NodeSet| {
            let v: Vec<f64> = g.nodes().iter().map(|&x| runge(x)).collect();
            (0..=1000)
                .map(|k| -1.0 + k as f64 / 500.0)
                .map(|x| (g.interpolate(&v, x) - runge(x)).abs())
                .fold(0.0, f64::max)
        };
        println!(
            "N = {n:>2}: Lebesgue zeros {:.3} (bound {:.3}), extrema {:.3}; Runge error zeros {:.1e}, uniform {:.1e}",
            zeros.lebesgue_constant(DEFAULT_PROBE_DENSITY),
            2.0 / PI * ((n + 1) as f64).ln() + 1.0,
            extrema.lebesgue_constant(DEFAULT_PROBE_DENSITY),
            err(&zeros),
            err(&uniform),
        );
    }
}
