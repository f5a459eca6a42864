//! Command-line front end: `rates`, `spectrum`, `sweep`, `print-config` and
//! `cache clear`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numerical
//! failure.

pub mod cache;
pub mod config;
pub mod output;
pub mod plot;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::damping_rates::RateModel;
use crate::dressed_spectrum::{DriveMode, Spectrum};
use crate::error::Error;
use crate::spectra_engine::{rate_table, temperature_sweep, TableProvider};

use cache::{resolve_cache_dir, DiskTables};
use config::{parse_temperature_range, ConfigFile, Format, Overrides, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_IO,
        }
    }

    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e)
        } else {
            CliError::Config(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "dressed-rf", version, about = "Phonon-damped resonance fluorescence of singly and doubly driven quantum dots")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// TOML configuration file; an absent file means the built-in defaults.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Damping model (repeatable).
    #[arg(long = "model", global = true, value_name = "weak|onephonon|polaron")]
    pub models: Vec<RateModel>,
    /// Drive mode (repeatable).
    #[arg(long = "mode", global = true, value_name = "single|double")]
    pub modes: Vec<DriveMode>,
    /// Single temperature in K.
    #[arg(long, global = true, value_name = "K", conflicts_with = "temps")]
    pub temp: Option<f64>,
    /// Inclusive temperature range in K.
    #[arg(long, global = true, value_name = "START:STOP:STEP")]
    pub temps: Option<String>,
    /// Output directory (default `out`).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Output file format (default csv).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Also write SVG plots (sweep only).
    #[arg(long, global = true)]
    pub plot: bool,
    /// Scale spectra so the largest value is 1.
    #[arg(long, global = true, value_name = "true|false")]
    pub normalize: Option<bool>,
    /// Power of ω dividing J(ω) in the phonon correlation.
    #[arg(long = "phi-power", global = true, value_name = "1|2")]
    pub phi_power: Option<u8>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Phonon damping rates of all three models per temperature.
    Rates,
    /// One spectrum per (model, mode, temperature).
    Spectrum,
    /// Spectra for every temperature plus a manifest and optional plots.
    Sweep,
    /// Echo the resolved configuration in internal units.
    PrintConfig,
    /// Manage the correlation-table cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum CacheAction {
    /// Delete all cached tables.
    Clear,
}

impl CommonArgs {
    fn overrides(&self) -> Result<Overrides, CliError> {
        let temperatures = match (&self.temp, &self.temps) {
            (Some(t), _) => Some(vec![*t]),
            (None, Some(r)) => Some(parse_temperature_range(r)?),
            (None, None) => None,
        };
        Ok(Overrides {
            models: self.models.clone(),
            modes: self.modes.clone(),
            temperatures,
            out: self.out.clone(),
            format: self.format,
            plot: self.plot,
            normalize: self.normalize,
            phi_power: self.phi_power,
        })
    }

    fn config_file(&self) -> Result<ConfigFile, CliError> {
        match &self.config {
            Some(p) => ConfigFile::load(p),
            None => Ok(ConfigFile::default()),
        }
    }

    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = self.config_file()?;
        let cache_dir = resolve_cache_dir(file.output.cache_dir.as_deref());
        RunConfig::resolve(&file, &self.overrides()?, cache_dir)
    }
}

/// One written spectrum, as listed in a sweep manifest.
#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub model: RateModel,
    pub mode: DriveMode,
    pub temperature_k: f64,
    pub file: String,
    pub gamma_total: f64,
    pub omega_eff: f64,
    pub g_eff: f64,
    pub normalization: f64,
}

/// All spectra of a run, grouped by (model, mode) in configuration order.
pub fn compute_spectra(run: &RunConfig, tables: &dyn TableProvider) -> Result<Vec<Vec<Spectrum>>, CliError> {
    let mut groups = Vec::new();
    for &model in &run.models {
        for &mode in &run.modes {
            let cfg = run.scenario.with_model(model).with_mode(mode);
            groups.push(temperature_sweep(&cfg, tables)?);
        }
    }
    Ok(groups)
}

fn write_spectra(run: &RunConfig, groups: &[Vec<Spectrum>]) -> Result<Vec<ManifestEntry>, CliError> {
    let mut entries = Vec::new();
    for s in groups.iter().flatten() {
        let name = output::spectrum_filename(&s.metadata, run.io.format);
        output::write_file(&run.io.output_dir.join(&name), &output::render_spectrum(s, run.io.format))?;
        let m = &s.metadata;
        entries.push(ManifestEntry {
            model: m.model.expect("engine sets the model"),
            mode: m.mode,
            temperature_k: m.temperature.expect("engine sets the temperature"),
            file: name,
            gamma_total: m.gamma_total,
            omega_eff: m.omega_eff,
            g_eff: m.g_eff,
            normalization: m.normalization,
        });
    }
    Ok(entries)
}

fn write_plots(run: &RunConfig, groups: &[Vec<Spectrum>]) -> Result<Vec<String>, CliError> {
    let all: Vec<&Spectrum> = groups.iter().flatten().collect();
    let y_label = if run.scenario.normalize { "normalized intensity" } else { "intensity" };
    let temps = &run.scenario.temperatures;
    let temp_index = |t: Option<f64>| temps.iter().position(|x| Some(*x) == t).unwrap_or(0);
    let mut files = Vec::new();

    // One temperature family per model, single dashed and double solid.
    for &model in &run.models {
        let curves = all
            .iter()
            .filter(|s| s.metadata.model == Some(model))
            .map(|s| {
                let t = s.metadata.temperature.unwrap_or(0.0);
                plot::curve(s, format!("{t} K, {}", s.metadata.mode), temp_index(s.metadata.temperature))
            })
            .collect();
        let panel = plot::Panel {
            title: format!("{model} damping"),
            curves,
        };
        let name = format!("sweep_{model}.svg");
        output::write_file(&run.io.output_dir.join(&name), &plot::render(&[panel], y_label))?;
        files.push(name);
    }

    // Model comparison, one panel per temperature.
    let panels: Vec<plot::Panel<'_>> = temps
        .iter()
        .map(|&t| plot::Panel {
            title: format!("T = {t} K"),
            curves: all
                .iter()
                .filter(|s| s.metadata.temperature == Some(t))
                .map(|s| {
                    let model = s.metadata.model.expect("engine sets the model");
                    let idx = run.models.iter().position(|m| *m == model).unwrap_or(0);
                    plot::curve(s, format!("{model}, {}", s.metadata.mode), idx)
                })
                .collect(),
        })
        .collect();
    let name = "comparison.svg".to_string();
    output::write_file(&run.io.output_dir.join(&name), &plot::render(&panels, y_label))?;
    files.push(name);
    Ok(files)
}

fn report_warnings(run: &RunConfig) {
    if let Ok(warnings) = run.scenario.validate() {
        for w in warnings {
            eprintln!("warning: {w}");
        }
    }
}

pub fn cmd_rates(run: &RunConfig, tables: &dyn TableProvider) -> Result<PathBuf, CliError> {
    let rows = rate_table(&run.scenario, tables)?;
    let text = match run.io.format {
        Format::Csv => output::rates_csv(&rows),
        Format::Json => output::rates_json(&rows),
    };
    let path = run.io.output_dir.join(format!("rates.{}", run.io.format.extension()));
    output::write_file(&path, &text)?;
    Ok(path)
}

pub fn cmd_spectrum(run: &RunConfig, tables: &dyn TableProvider) -> Result<Vec<ManifestEntry>, CliError> {
    let groups = compute_spectra(run, tables)?;
    write_spectra(run, &groups)
}

#[derive(Debug, Serialize)]
pub struct SweepManifest {
    pub spectra: Vec<ManifestEntry>,
    pub plots: Vec<String>,
}

pub fn cmd_sweep(run: &RunConfig, tables: &dyn TableProvider) -> Result<SweepManifest, CliError> {
    let groups = compute_spectra(run, tables)?;
    let spectra = write_spectra(run, &groups)?;
    let plots = if run.io.emit_plot { write_plots(run, &groups)? } else { Vec::new() };
    let manifest = SweepManifest { spectra, plots };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    output::write_file(&run.io.output_dir.join("sweep.json"), &text)?;
    Ok(manifest)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    if let Command::Cache {
        action: CacheAction::Clear,
    } = cli.command
    {
        let file = cli.common.config_file()?;
        let dir = resolve_cache_dir(file.output.cache_dir.as_deref());
        let n = cache::clear(&dir).map_err(|e| CliError::io(&dir, e))?;
        println!("removed {n} cached table(s) from {}", dir.display());
        return Ok(());
    }
    let run = cli.common.resolve()?;
    report_warnings(&run);
    let tables = DiskTables::new(&run.io.cache_dir);
    match cli.command {
        Command::PrintConfig => {
            println!("{}", serde_json::to_string_pretty(&run.view()).expect("config serialises"));
        }
        Command::Rates => {
            let path = cmd_rates(&run, &tables)?;
            eprintln!("wrote {}", path.display());
        }
        Command::Spectrum => {
            let written = cmd_spectrum(&run, &tables)?;
            eprintln!("wrote {} spectra to {}", written.len(), run.io.output_dir.display());
        }
        Command::Sweep => {
            let m = cmd_sweep(&run, &tables)?;
            eprintln!(
                "wrote {} spectra and {} plot(s) to {}",
                m.spectra.len(),
                m.plots.len(),
                run.io.output_dir.display()
            );
        }
        Command::Cache { .. } => unreachable!("handled above"),
    }
    if tables.builds() + tables.hits() > 0 {
        eprintln!("correlation tables: {} built, {} from cache", tables.builds(), tables.hits());
    }
    Ok(())
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
