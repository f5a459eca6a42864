//! Phonon-free, singly driven emitter: the Mollow triplet and its peak report.

use dressed_rf::damping_rates::RateModel;
use dressed_rf::dressed_spectrum::DriveMode;
use dressed_rf::spectra_engine::{peak_analysis, thermal_spectrum, MemoryTables, ScenarioConfig};

fn main() {
    let mut cfg = ScenarioConfig::reference();
    cfg.bath = cfg.bath.with_alpha(0.0);
    cfg.model = RateModel::WeakCoupling;
    cfg.mode = DriveMode::Single;

    let spectrum = thermal_spectrum(&cfg, 0.0, &MemoryTables::new()).unwrap();
    let report = peak_analysis(&spectrum).unwrap();
    let gamma = cfg.drive.gamma_rad;
    println!("2Ω = {:.4} rad/ns, Γ = {gamma}", 2.0 * cfg.drive.omega_rabi_half);
    for p in &report.peaks {
        println!(
            "peak at {:>9.4}: height {:.5}, HWHM {:.4} ({:.3} Γ), area {:.4}",
            p.center,
            p.height,
            p.hwhm,
            p.hwhm / gamma,
            p.area
        );
    }
    println!("central / sideband height = {:.4}", report.central().height / report.upper().height);
}
