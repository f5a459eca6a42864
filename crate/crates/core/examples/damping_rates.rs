//! Weak-coupling, single-phonon and full polaron damping rates from 0 to 60 K.

use dressed_rf::spectra_engine::{rate_table, MemoryTables, ScenarioConfig};

fn main() {
    let cfg = ScenarioConfig::reference().with_temperatures((0..=12).map(|k| 5.0 * k as f64).collect());
    let rows = rate_table(&cfg, &MemoryTables::new()).unwrap();
    println!("{:>5} {:>8} {:>8} {:>8} {:>8} {:>8} {:>7} {:>7}", "T", "Γ_W", "Γ_1ph", "Γ_p", "Γ_y", "Γ_z", "B", "Ω_r");
    for r in rows {
        println!(
            "{:>5} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>7.4} {:>7.3}",
            r.temperature_k, r.gamma_w, r.gamma_1ph, r.gamma_p, r.gamma_y, r.gamma_z, r.b_factor, r.omega_r
        );
    }
}
