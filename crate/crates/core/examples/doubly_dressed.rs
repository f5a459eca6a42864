//! A weak second field splits each sideband into a band of width ~4G while
//! the central line stays put.

use dressed_rf::dressed_spectrum::{
    coupling_g_n, detuning_grid, lambda_extent, spectrum_ld, weight_density, DriveConfig, LineshapeOptions,
};

fn main() {
    let drive = DriveConfig::reference_double();
    let (w, g, gamma) = (drive.omega_rabi_half, drive.g_half, drive.gamma_rad);
    println!("g_n = {:.4} rad/ns, λ support ±{:.2}", coupling_g_n(&drive).unwrap(), lambda_extent(40));

    let grid = detuning_grid(2.0 * w - 3.0 * g, 2.0 * w + 3.0 * g, 37);
    let opts = LineshapeOptions::default();
    let single = spectrum_ld(&drive, gamma, w, 0.0, &grid, &opts).unwrap();
    let double = spectrum_ld(&drive, gamma, w, g, &grid, &opts).unwrap();
    println!("\n{:>9} {:>10} {:>10}", "δ − 2Ω", "single", "double");
    for k in 0..grid.len() {
        let bar = "#".repeat((double.values[k] * 6000.0) as usize);
        println!("{:>9.2} {:>10.5} {:>10.5} {bar}", grid[k] - 2.0 * w, single.values[k], double.values[k]);
    }

    let centre = |g_eff: f64| spectrum_ld(&drive, gamma, w, g_eff, &[0.0], &opts).unwrap().values[0];
    println!("\ncentral height: single {:.6}, double {:.6}", centre(0.0), centre(g));
    println!("weight |φ_40(λ/√2)|² at λ = 0, 6, 12.7: {:.4} {:.4} {:.4}",
        weight_density(40, 0.0), weight_density(40, 6.0), weight_density(40, 12.7));
}
