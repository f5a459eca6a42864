//! TOML run configuration. Every physical quantity carries its unit in the
//! key name; conversion to internal angular units happens in [`RunConfig::resolve`].

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::damping_rates::RateModel;
use crate::dressed_spectrum::{DriveConfig, DriveMode, LineshapeOptions, Prefactor};
use crate::phonon_bath::{BathParams, PhiPower};
use crate::quadrature::QuadSettings;
use crate::spectra_engine::{GridSpec, ScenarioConfig};
use crate::units::linear_ghz_to_angular;

use super::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriveSection {
    /// Strong-field Rabi splitting 2Ω in linear GHz.
    pub rabi_2omega_ghz_linear: f64,
    /// Weak-field Rabi width 2G in linear GHz; 0 disables the weak field.
    pub weak_2g_ghz_linear: f64,
    pub photon_number: u32,
    pub mixing_angle_rad: f64,
    pub radiative_gamma_rad_per_ns: f64,
    pub laser_ghz_linear: f64,
}

impl Default for DriveSection {
    fn default() -> Self {
        Self {
            rabi_2omega_ghz_linear: 5.0,
            weak_2g_ghz_linear: 2.0,
            photon_number: 40,
            mixing_angle_rad: PI / 4.0,
            radiative_gamma_rad_per_ns: 2.35,
            laser_ghz_linear: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BathSection {
    pub alpha_ns2: f64,
    pub cutoff_rad_per_ns: f64,
    /// 1 or 2: power of ω dividing J(ω) in the phonon correlation.
    pub phi_power: u8,
}

impl Default for BathSection {
    fn default() -> Self {
        Self {
            alpha_ns2: BathParams::INAS_ALPHA,
            cutoff_rad_per_ns: BathParams::INAS_CUTOFF,
            phi_power: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    pub models: Vec<RateModel>,
    pub modes: Vec<DriveMode>,
    pub temperatures_k: Vec<f64>,
    pub normalize: bool,
    pub prefactor: Prefactor,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            models: vec![RateModel::FullPolaron],
            modes: vec![DriveMode::Double],
            temperatures_k: vec![0.0],
            normalize: true,
            prefactor: Prefactor::Radiative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    /// Defaults to ∓2.2·2Ω.
    pub min_detuning_rad_per_ns: Option<f64>,
    pub max_detuning_rad_per_ns: Option<f64>,
    pub points: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            min_detuning_rad_per_ns: None,
            max_detuning_rad_per_ns: None,
            points: 4001,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub format: Format,
    pub plot: bool,
    pub cache_dir: Option<PathBuf>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            format: Format::Csv,
            plot: false,
            cache_dir: None,
        }
    }
}

/// The configuration file as written by the user.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    pub drive: DriveSection,
    pub bath: BathSection,
    pub scenario: ScenarioSection,
    pub grid: GridSection,
    pub quadrature: QuadSettings,
    /// Quadrature for the λ-integral of the doubly dressed sidebands.
    pub lambda_quadrature: Option<QuadSettings>,
    pub output: OutputSection,
}

impl ConfigFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("{origin}: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }
}

/// Command-line values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub models: Vec<RateModel>,
    pub modes: Vec<DriveMode>,
    pub temperatures: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub plot: bool,
    pub normalize: Option<bool>,
    pub phi_power: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IoConfig {
    pub output_dir: PathBuf,
    pub format: Format,
    pub emit_plot: bool,
    pub cache_dir: PathBuf,
}

/// Fully resolved run, in internal units.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Model and mode of this template are replaced per output.
    pub scenario: ScenarioConfig,
    pub models: Vec<RateModel>,
    pub modes: Vec<DriveMode>,
    pub io: IoConfig,
}

/// What `print-config` shows.
#[derive(Debug, Serialize)]
pub struct ResolvedView<'a> {
    pub drive: &'a DriveConfig,
    pub bath: &'a BathParams,
    pub models: &'a [RateModel],
    pub modes: &'a [DriveMode],
    pub temperatures_k: &'a [f64],
    pub grid: &'a GridSpec,
    pub normalize: bool,
    pub prefactor: Prefactor,
    pub quadrature: &'a QuadSettings,
    pub lambda_quadrature: &'a QuadSettings,
    pub io: &'a IoConfig,
}

impl RunConfig {
    pub fn resolve(file: &ConfigFile, over: &Overrides, cache_dir: PathBuf) -> Result<Self, CliError> {
        let d = &file.drive;
        let drive = DriveConfig {
            omega_l: linear_ghz_to_angular(d.laser_ghz_linear),
            omega_rabi_half: linear_ghz_to_angular(d.rabi_2omega_ghz_linear) / 2.0,
            g_half: linear_ghz_to_angular(d.weak_2g_ghz_linear) / 2.0,
            photon_number: d.photon_number,
            theta: d.mixing_angle_rad,
            gamma_rad: d.radiative_gamma_rad_per_ns,
        };
        let power = over.phi_power.unwrap_or(file.bath.phi_power);
        let phi_power = PhiPower::from_exponent(power)
            .ok_or_else(|| CliError::Config(format!("bath.phi_power must be 1 or 2, got {power}")))?;
        let bath = BathParams {
            alpha: file.bath.alpha_ns2,
            omega_c: file.bath.cutoff_rad_per_ns,
            temperature: 0.0,
            phi_power,
        };
        let default_grid = GridSpec::default_for(&drive);
        let grid = GridSpec {
            min_detuning: file.grid.min_detuning_rad_per_ns.unwrap_or(default_grid.min_detuning),
            max_detuning: file.grid.max_detuning_rad_per_ns.unwrap_or(default_grid.max_detuning),
            points: file.grid.points,
        };
        let mut lineshape = LineshapeOptions {
            prefactor: file.scenario.prefactor,
            ..LineshapeOptions::default()
        };
        if let Some(q) = file.lambda_quadrature {
            lineshape.lambda_quad = q;
        }
        let models = if over.models.is_empty() { file.scenario.models.clone() } else { over.models.clone() };
        let modes = if over.modes.is_empty() { file.scenario.modes.clone() } else { over.modes.clone() };
        if models.is_empty() {
            return Err(CliError::Config("scenario.models is empty".into()));
        }
        if modes.is_empty() {
            return Err(CliError::Config("scenario.modes is empty".into()));
        }
        let temperatures = over.temperatures.clone().unwrap_or_else(|| file.scenario.temperatures_k.clone());
        let scenario = ScenarioConfig {
            drive,
            bath,
            model: models[0],
            mode: modes[0],
            temperatures,
            grid,
            normalize: over.normalize.unwrap_or(file.scenario.normalize),
            quad: file.quadrature,
            lineshape,
        };
        scenario.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Self {
            scenario,
            models,
            modes,
            io: IoConfig {
                output_dir: over.out.clone().unwrap_or_else(|| file.output.dir.clone()),
                format: over.format.unwrap_or(file.output.format),
                emit_plot: over.plot || file.output.plot,
                cache_dir,
            },
        })
    }

    pub fn view(&self) -> ResolvedView<'_> {
        let s = &self.scenario;
        ResolvedView {
            drive: &s.drive,
            bath: &s.bath,
            models: &self.models,
            modes: &self.modes,
            temperatures_k: &s.temperatures,
            grid: &s.grid,
            normalize: s.normalize,
            prefactor: s.lineshape.prefactor,
            quadrature: &s.quad,
            lambda_quadrature: &s.lineshape.lambda_quad,
            io: &self.io,
        }
    }
}

/// `start:stop:step`, inclusive of `stop` when it lies on the grid.
pub fn parse_temperature_range(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Config(format!("--temps expects start:stop:step, got `{spec}`"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(CliError::Config(format!(
            "--temps `{spec}` needs step > 0 and stop >= start"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_reference_scenario() {
        let f = ConfigFile::parse("", "test").unwrap();
        let r = RunConfig::resolve(&f, &Overrides::default(), PathBuf::from("c")).unwrap();
        let reference = DriveConfig::reference_double();
        assert!((r.scenario.drive.omega_rabi_half - reference.omega_rabi_half).abs() < 1e-15);
        assert!((r.scenario.drive.g_half - reference.g_half).abs() < 1e-15);
        assert_eq!(r.scenario.bath, BathParams::inas_gaas(0.0));
        assert_eq!(r.scenario.grid, GridSpec::default_for(&r.scenario.drive));
    }

    #[test]
    fn unit_conversion() {
        let f = ConfigFile::parse("[drive]\nrabi_2omega_ghz_linear = 5.0\n", "test").unwrap();
        let r = RunConfig::resolve(&f, &Overrides::default(), PathBuf::from("c")).unwrap();
        assert_eq!(r.scenario.drive.omega_rabi_half, PI * 5.0);
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let err = ConfigFile::parse("[drive]\nrabi_2omega_ghz = 5.0\n", "cfg.toml").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("rabi_2omega_ghz"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
        assert!(ConfigFile::parse("[nonsense]\n", "x").is_err());
        assert!(ConfigFile::parse("[quadrature]\nrel = 1e-3\n", "x").is_err());
    }

    #[test]
    fn temperature_ranges() {
        assert_eq!(parse_temperature_range("0:60:15").unwrap(), vec![0.0, 15.0, 30.0, 45.0, 60.0]);
        assert_eq!(parse_temperature_range("4.2:4.2:1").unwrap(), vec![4.2]);
        assert_eq!(parse_temperature_range("0:0.3:0.1").unwrap().len(), 4);
        assert!(parse_temperature_range("0:60").is_err());
        assert!(parse_temperature_range("10:0:5").is_err());
        assert!(parse_temperature_range("0:10:0").is_err());
    }

    #[test]
    fn overrides_win() {
        let f = ConfigFile::parse("[bath]\nphi_power = 2\n[scenario]\nnormalize = true\n", "x").unwrap();
        let over = Overrides {
            models: vec![RateModel::WeakCoupling],
            normalize: Some(false),
            phi_power: Some(1),
            temperatures: Some(vec![15.0, 60.0]),
            ..Overrides::default()
        };
        let r = RunConfig::resolve(&f, &over, PathBuf::from("c")).unwrap();
        assert_eq!(r.models, vec![RateModel::WeakCoupling]);
        assert!(!r.scenario.normalize);
        assert_eq!(r.scenario.bath.phi_power, PhiPower::One);
        assert_eq!(r.scenario.temperatures, vec![15.0, 60.0]);
        let bad = Overrides {
            phi_power: Some(3),
            ..Overrides::default()
        };
        assert!(RunConfig::resolve(&f, &bad, PathBuf::from("c")).is_err());
    }

    #[test]
    fn empty_temperature_list_is_a_config_error() {
        let f = ConfigFile::parse("[scenario]\ntemperatures_k = []\n", "x").unwrap();
        assert!(matches!(
            RunConfig::resolve(&f, &Overrides::default(), PathBuf::from("c")),
            Err(CliError::Config(_))
        ));
    }
}
