//! CSV and JSON emission. Floats are written in Rust's shortest round-trip
//! form, so re-reading a file gives back the exact values.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dressed_spectrum::{Spectrum, SpectrumMetadata};
use crate::spectra_engine::RateRow;

use super::config::Format;
use super::CliError;

/// `spectrum_{model}_{mode}_T{T}K.{ext}`
pub fn spectrum_filename(meta: &SpectrumMetadata, format: Format) -> String {
    let model = meta.model.map_or("lineshape", |m| m.as_str());
    let temp = meta.temperature.map_or_else(|| "none".to_string(), |t| format!("{t}"));
    format!("spectrum_{model}_{}_T{temp}K.{}", meta.mode, format.extension())
}

fn metadata_lines(meta: &SpectrumMetadata) -> Vec<(String, String)> {
    let value = serde_json::to_value(meta).expect("metadata serialises");
    let obj = value.as_object().expect("metadata is an object");
    obj.iter()
        .map(|(k, v)| {
            let text = match v {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            (k.clone(), text)
        })
        .collect()
}

pub fn spectrum_csv(s: &Spectrum) -> String {
    let mut out = String::with_capacity(40 * s.values.len() + 512);
    out.push_str("# dressed-rf spectrum; detuning = omega - omega_L in rad/ns\n");
    for (k, v) in metadata_lines(&s.metadata) {
        let _ = writeln!(out, "# {k} = {v}");
    }
    out.push_str("detuning,intensity\n");
    for (d, v) in s.detunings.iter().zip(s.values.iter()) {
        let _ = writeln!(out, "{d},{v}");
    }
    out
}

#[derive(Serialize)]
struct SpectrumFileRef<'a> {
    metadata: &'a SpectrumMetadata,
    detuning: &'a [f64],
    intensity: &'a [f64],
}

#[derive(Deserialize)]
struct SpectrumFile {
    metadata: SpectrumMetadata,
    detuning: Vec<f64>,
    intensity: Vec<f64>,
}

pub fn spectrum_json(s: &Spectrum) -> String {
    let file = SpectrumFileRef {
        metadata: &s.metadata,
        detuning: &s.detunings,
        intensity: &s.values,
    };
    serde_json::to_string_pretty(&file).expect("spectrum serialises")
}

pub fn parse_spectrum_json(text: &str) -> Result<Spectrum, CliError> {
    let f: SpectrumFile =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed spectrum file: {e}")))?;
    if f.detuning.len() != f.intensity.len() {
        return Err(CliError::Config("detuning and intensity lengths differ".into()));
    }
    Ok(Spectrum {
        detunings: f.detuning,
        values: f.intensity,
        metadata: f.metadata,
    })
}

pub fn read_spectrum_json(path: &Path) -> Result<Spectrum, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_spectrum_json(&text)
}

pub fn render_spectrum(s: &Spectrum, format: Format) -> String {
    match format {
        Format::Csv => spectrum_csv(s),
        Format::Json => spectrum_json(s),
    }
}

pub fn rates_csv(rows: &[RateRow]) -> String {
    let mut out = String::new();
    out.push_str("# dressed-rf phonon damping rates; rates and frequencies in rad/ns\n");
    out.push_str(&RateRow::COLUMNS.join(","));
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.values().iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn rates_json(rows: &[RateRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rate rows serialise")
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}
