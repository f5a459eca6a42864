//! The on-disk correlation-table cache: a cold build, a warm read, identical
//! spectra either way.

use std::time::Instant;

use dressed_rf::cli::cache::DiskTables;
use dressed_rf::spectra_engine::{temperature_sweep, ScenarioConfig};

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ScenarioConfig::reference().with_temperatures(vec![0.0, 30.0, 60.0]);

    let cold = DiskTables::new(dir.path());
    let start = Instant::now();
    let a = temperature_sweep(&cfg, &cold).unwrap();
    println!("cold: {:?}, {} tables built", start.elapsed(), cold.builds());

    let warm = DiskTables::new(dir.path());
    let start = Instant::now();
    let b = temperature_sweep(&cfg, &warm).unwrap();
    println!("warm: {:?}, {} tables read back", start.elapsed(), warm.hits());
    println!("spectra identical: {}", a == b);
}
