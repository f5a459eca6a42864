use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use dressed_rf::cli::output::read_spectrum_json;
use dressed_rf::damping_rates::RateModel;
use dressed_rf::spectra_engine::{temperature_sweep, MemoryTables, ScenarioConfig};

struct Sandbox {
    dir: tempfile::TempDir,
}

impl Sandbox {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn config(&self, text: &str) -> String {
        let p = self.path("run.toml");
        std::fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_dressed-rf"))
            .args(args)
            .env("DRESSED_RF_CACHE", self.path("cache"))
            .current_dir(self.dir.path())
            .output()
            .unwrap()
    }
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn data_rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .find(|l| !l.starts_with('#'))
        .unwrap()
        .to_string()
}

#[test]
fn rates_over_a_temperature_range() {
    let sb = Sandbox::new();
    let out = sb.path("out");
    let o = sb.run(&["rates", "--temps", "0:60:15", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let file = out.join("rates.csv");
    assert_eq!(
        header(&file),
        "temperature_k,gamma_w,gamma_1ph,gamma_p,gamma_y,gamma_z,b_factor,omega_r,g_r"
    );
    let rows = data_rows(&file);
    let temps: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(temps, vec![0.0, 15.0, 30.0, 45.0, 60.0]);
}

#[test]
fn weak_coupling_rate_at_liquid_helium() {
    let sb = Sandbox::new();
    let out = sb.path("out");
    let o = sb.run(&["rates", "--temp", "4.2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let row = &data_rows(&out.join("rates.csv"))[0];
    // (π/2) α Ω³ e^{−(Ω/ω_c)²} coth(ħΩ/2k_BT)
    let (alpha, wc, w) = (2.535e-7, 493.33, PI * 5.0);
    let x = w * 7.63824e-3 / (2.0 * 4.2);
    let coth = (1.0 + (-2.0 * x).exp()) / -(-2.0 * x).exp_m1();
    let expect = PI / 2.0 * alpha * w.powi(3) * (-(w / wc).powi(2)).exp() * coth;
    assert!((row[1] - expect).abs() < 1e-9 * expect, "{} vs {expect}", row[1]);
    assert!((row[1] - 0.108).abs() < 5e-4);
}

#[test]
fn zero_coupling_config_gives_zero_rates() {
    let sb = Sandbox::new();
    let cfg = sb.config("[bath]\nalpha_ns2 = 0.0\n");
    let out = sb.path("out");
    let o = sb.run(&["rates", "--config", &cfg, "--temps", "0:30:10", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for r in data_rows(&out.join("rates.csv")) {
        assert_eq!(&r[1..6], &[0.0; 5]);
        assert_eq!(r[6], 1.0);
    }
}

#[test]
fn mollow_spectrum_from_the_command_line() {
    let sb = Sandbox::new();
    let cfg = sb.config("[bath]\nalpha_ns2 = 0.0\n");
    let out = sb.path("out");
    let o = sb.run(&[
        "spectrum", "--config", &cfg, "--mode", "single", "--model", "weak", "--temp", "0", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let file = out.join("spectrum_weak_single_T0K.csv");
    let text = std::fs::read_to_string(&file).unwrap();
    assert!(text.contains("# model = weak"));
    assert!(text.contains("# normalized = true"));
    let rows = data_rows(&file);
    let step = rows[1][0] - rows[0][0];
    let peak_in = |lo: f64, hi: f64| {
        rows.iter()
            .filter(|r| r[0] > lo && r[0] < hi)
            .max_by(|a, b| a[1].total_cmp(&b[1]))
            .unwrap()[0]
    };
    let two_omega = 2.0 * PI * 5.0 / 2.0 * 2.0;
    assert!((peak_in(10.0, 60.0) - two_omega).abs() <= step);
    assert!((peak_in(-60.0, -10.0) + two_omega).abs() <= step);
    assert!(peak_in(-5.0, 5.0).abs() <= step);
    assert_eq!(rows.iter().map(|r| r[1]).fold(0.0, f64::max), 1.0);
}

#[test]
fn warm_cache_reproduces_files_faster() {
    let sb = Sandbox::new();
    let args = |out: &str| {
        vec![
            "spectrum".to_string(),
            "--model".into(),
            "polaron".into(),
            "--temps".into(),
            "0:30:30".into(),
            "--out".into(),
            sb.path(out).to_string_lossy().into_owned(),
        ]
    };
    let cold_args = args("cold");
    let start = Instant::now();
    let cold = sb.run(&cold_args.iter().map(String::as_str).collect::<Vec<_>>());
    let cold_time = start.elapsed();
    assert_eq!(cold.status.code(), Some(0), "{}", stderr(&cold));
    assert!(stderr(&cold).contains("2 built, 0 from cache"), "{}", stderr(&cold));

    let warm_args = args("warm");
    let start = Instant::now();
    let warm = sb.run(&warm_args.iter().map(String::as_str).collect::<Vec<_>>());
    let warm_time = start.elapsed();
    assert!(stderr(&warm).contains("0 built, 2 from cache"), "{}", stderr(&warm));
    assert!(warm_time < cold_time, "{warm_time:?} vs {cold_time:?}");

    for name in ["spectrum_polaron_double_T0K.csv", "spectrum_polaron_double_T30K.csv"] {
        let a = std::fs::read(sb.path("cold").join(name)).unwrap();
        let b = std::fs::read(sb.path("warm").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }

    let cleared = sb.run(&["cache", "clear"]);
    assert_eq!(cleared.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&cleared.stdout).contains("removed 2"));
}

#[test]
fn model_comparison_sweep_with_plots() {
    let sb = Sandbox::new();
    let out = sb.path("out");
    let o = sb.run(&[
        "sweep", "--model", "weak", "--model", "onephonon", "--model", "polaron", "--temp", "15", "--out",
        out.to_str().unwrap(), "--plot",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = sb.run(&[
        "sweep", "--model", "weak", "--model", "onephonon", "--model", "polaron", "--temps", "15:60:45", "--out",
        out.to_str().unwrap(), "--plot",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let spectra: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with("spectrum_"))
        .collect();
    assert_eq!(spectra.len(), 6, "{spectra:?}");
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("sweep.json")).unwrap()).unwrap();
    assert_eq!(manifest["spectra"].as_array().unwrap().len(), 6);
    let svg = std::fs::read_to_string(out.join("comparison.svg")).unwrap();
    assert!(svg.contains("T = 15 K") && svg.contains("T = 60 K"));
}

#[test]
fn single_and_double_pairing_in_plot_metadata() {
    let sb = Sandbox::new();
    let out = sb.path("out");
    let o = sb.run(&[
        "sweep", "--model", "weak", "--mode", "single", "--mode", "double", "--temps", "0:30:30", "--out",
        out.to_str().unwrap(), "--plot",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let svg = std::fs::read_to_string(out.join("sweep_weak.svg")).unwrap();
    let start = svg.find("<metadata>").unwrap() + "<metadata>".len();
    let end = svg.find("</metadata>").unwrap();
    let meta: serde_json::Value = serde_json::from_str(&svg[start..end]).unwrap();
    assert_eq!(meta["line_styles"]["single"], "dashed");
    assert_eq!(meta["line_styles"]["double"], "solid");
    let curves = meta["panels"][0].as_array().unwrap();
    assert_eq!(curves.len(), 4);
    for c in curves {
        let want = if c["mode"] == "single" { "dashed" } else { "solid" };
        assert_eq!(c["style"], want);
    }
}

#[test]
fn json_output_round_trips_exactly() {
    let sb = Sandbox::new();
    let out = sb.path("out");
    let o = sb.run(&[
        "spectrum", "--model", "onephonon", "--temp", "30", "--format", "json", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let back = read_spectrum_json(&out.join("spectrum_onephonon_double_T30K.json")).unwrap();
    let mut cfg = ScenarioConfig::reference().with_model(RateModel::OnePhonon).with_temperatures(vec![30.0]);
    cfg.normalize = true;
    let direct = temperature_sweep(&cfg, &MemoryTables::new()).unwrap().remove(0);
    assert_eq!(back, direct);
}

#[test]
fn print_config_shows_internal_units() {
    let sb = Sandbox::new();
    let cfg = sb.config("[drive]\nrabi_2omega_ghz_linear = 5.0\nweak_2g_ghz_linear = 1.0\n");
    let o = sb.run(&["print-config", "--config", &cfg, "--phi-power", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["drive"]["omega_rabi_half"].as_f64().unwrap(), PI * 5.0);
    assert_eq!(v["drive"]["g_half"].as_f64().unwrap(), PI);
    assert_eq!(v["bath"]["phi_power"], "One");
    assert_eq!(v["grid"]["points"], 4001);
}

#[test]
fn config_errors_exit_with_two() {
    let sb = Sandbox::new();
    let typo = sb.config("[drive]\nrabi_2omega_ghz = 5.0\n");
    let o = sb.run(&["spectrum", "--config", &typo]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("rabi_2omega_ghz") && msg.contains("line 2"), "{msg}");

    let empty = sb.config("[scenario]\ntemperatures_k = []\n");
    assert_eq!(sb.run(&["sweep", "--config", &empty]).status.code(), Some(2));
    assert_eq!(sb.run(&["rates", "--temps", "10:0:5"]).status.code(), Some(2));
    assert_eq!(sb.run(&["rates", "--phi-power", "3"]).status.code(), Some(2));
    assert_eq!(sb.run(&["spectrum", "--model", "strong"]).status.code(), Some(2));
    assert_eq!(sb.run(&["rates", "--temp", "400"]).status.code(), Some(2));
    assert_eq!(sb.run(&["spectrum", "--config", "/nonexistent/run.toml"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_with_three() {
    let sb = Sandbox::new();
    let cfg = sb.config("[quadrature]\nrel_tol = 1e-15\nabs_tol = 0.0\nmax_subdivisions = 1\n");
    let o = sb.run(&["rates", "--config", &cfg, "--temp", "4.2", "--out", sb.path("out").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("integral `"), "{}", stderr(&o));
}
