//! Full polaron spectra from 0 to 60 K: sidebands move inward at 2ΩB(T) and
//! the normalised peak falls.

use dressed_rf::damping_rates::RateModel;
use dressed_rf::dressed_spectrum::DriveMode;
use dressed_rf::spectra_engine::{peak_analysis, temperature_sweep, MemoryTables, ScenarioConfig};

fn main() {
    let tables = MemoryTables::new();
    for mode in [DriveMode::Single, DriveMode::Double] {
        let mut cfg = ScenarioConfig::reference()
            .with_model(RateModel::FullPolaron)
            .with_mode(mode)
            .with_temperatures(vec![0.0, 15.0, 30.0, 45.0, 60.0]);
        cfg.normalize = true;
        println!("{mode} drive");
        for s in temperature_sweep(&cfg, &tables).unwrap() {
            let r = peak_analysis(&s).unwrap();
            let m = &s.metadata;
            println!(
                "  T = {:>4} K  Γ_T = {:.3}  2Ω_r = {:>6.3}  central {:.3}  sideband at {:>6.3} (height {:.3}, half-width {:.2})",
                m.temperature.unwrap(),
                m.gamma_total,
                2.0 * m.omega_eff,
                r.central().height,
                r.upper().center,
                r.upper().height,
                r.upper().hwhm
            );
        }
    }
}
