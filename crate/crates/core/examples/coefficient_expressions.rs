//! Coefficient expressions in t and θ, as accepted in run documents.

use delay_spectra::cli::expr::parse_expr;

fn main() {
    for src in ["-0.5 + 0.5*cos(2*pi*t)", "exp(theta)/2", "-(pi/2)", "t^2 - abs(sin(t))"] {
        let e = parse_expr(src).unwrap();
        println!(
            "{src:<26} -> {e:<30} at (t, θ) = (0.25, -0.5): {:.6}",
            e.eval(0.25, -0.5).unwrap()
        );
    }
    println!("{}", parse_expr("1 + * 2").unwrap_err());
}
