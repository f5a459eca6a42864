//! Displacement factor, polaron shift and the tabulated phonon correlation
//! φ(τ) of an InAs/GaAs dot at a few temperatures.

use std::time::Instant;

use dressed_rf::phonon_bath::{build_correlation_table, displacement_b, polaron_shift, spectral_density, BathParams};
use dressed_rf::quadrature::QuadSettings;

fn main() {
    let s = QuadSettings::default();
    let bath = BathParams::inas_gaas(0.0);
    println!("J(ω) peaks near ω = ω_c·√(3/2) = {:.1} rad/ns", bath.omega_c * 1.5f64.sqrt());
    println!("J(2π·2.5) = {:.4e} rad/ns", spectral_density(&bath, 2.0 * std::f64::consts::PI * 2.5));
    println!("Δ_p = {:.6} rad/ns\n", polaron_shift(&bath, &s).unwrap());

    println!("{:>6} {:>9} {:>12} {:>8} {:>10} {:>9}", "T (K)", "B", "Re φ(0)", "points", "τ_max (ns)", "build");
    for t in [0.0, 4.2, 15.0, 30.0, 60.0] {
        let bath = BathParams::inas_gaas(t);
        let b = displacement_b(&bath, &s).unwrap();
        let start = Instant::now();
        let table = build_correlation_table(&bath, &s).unwrap();
        println!(
            "{t:>6} {b:>9.5} {:>12.6} {:>8} {:>10.3e} {:>8.0?}",
            table.phi_at_zero().re,
            table.len(),
            table.tau_max(),
            start.elapsed()
        );
    }
}
