//! Temperature-dependent spectra: rate model → total linewidth and
//! renormalised drive → lineshape, plus sweeps, rate tables and peak
//! diagnostics.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::damping_rates::{rate_set, RateModel, RateSet};
use crate::dressed_spectrum::{detuning_grid, spectrum_ld, DriveConfig, DriveMode, LineshapeOptions, Spectrum};
use crate::error::{Error, Result};
use crate::phonon_bath::{build_correlation_table, BathParams, CorrelationTable};
use crate::quadrature::QuadSettings;

pub const MAX_TEMPERATURE: f64 = 300.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min_detuning: f64,
    pub max_detuning: f64,
    pub points: usize,
}

impl GridSpec {
    /// `[−2.2·2Ω, 2.2·2Ω]` with 4001 points.
    pub fn default_for(drive: &DriveConfig) -> Self {
        let half = 2.2 * 2.0 * drive.omega_rabi_half;
        Self {
            min_detuning: -half,
            max_detuning: half,
            points: 4001,
        }
    }

    pub fn detunings(&self) -> Vec<f64> {
        detuning_grid(self.min_detuning, self.max_detuning, self.points)
    }

    pub fn step(&self) -> f64 {
        (self.max_detuning - self.min_detuning) / (self.points - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub drive: DriveConfig,
    /// Bath at a reference temperature; each sweep point overrides it.
    pub bath: BathParams,
    pub model: RateModel,
    pub mode: DriveMode,
    pub temperatures: Vec<f64>,
    pub grid: GridSpec,
    pub normalize: bool,
    pub quad: QuadSettings,
    pub lineshape: LineshapeOptions,
}

impl ScenarioConfig {
    /// Reference parameter point: InAs/GaAs bath, doubly driven, full polaron, T = 0.
    pub fn reference() -> Self {
        let drive = DriveConfig::reference_double();
        Self {
            drive,
            bath: BathParams::inas_gaas(0.0),
            model: RateModel::FullPolaron,
            mode: DriveMode::Double,
            temperatures: vec![0.0],
            grid: GridSpec::default_for(&drive),
            normalize: false,
            quad: QuadSettings::default(),
            lineshape: LineshapeOptions::default(),
        }
    }

    /// Hard preconditions; returns the drive's soft warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let warnings = self.drive.validate()?;
        self.bath.validate()?;
        self.quad.validate().map_err(|e| Error::InvalidParameter(e.to_string()))?;
        self.lineshape
            .lambda_quad
            .validate()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        if self.temperatures.is_empty() {
            return Err(Error::InvalidParameter("temperature list is empty".into()));
        }
        for &t in &self.temperatures {
            check_temperature(t)?;
        }
        let g = &self.grid;
        if g.points < 3 {
            return Err(Error::InvalidParameter(format!("grid needs at least 3 points, got {}", g.points)));
        }
        if !(g.min_detuning.is_finite() && g.max_detuning.is_finite() && g.min_detuning < g.max_detuning) {
            return Err(Error::InvalidParameter(format!(
                "grid range must satisfy min < max, got [{}, {}]",
                g.min_detuning, g.max_detuning
            )));
        }
        Ok(warnings)
    }

    pub fn with_model(&self, model: RateModel) -> Self {
        Self { model, ..self.clone() }
    }

    pub fn with_mode(&self, mode: DriveMode) -> Self {
        Self { mode, ..self.clone() }
    }

    pub fn with_temperatures(&self, temperatures: Vec<f64>) -> Self {
        Self {
            temperatures,
            ..self.clone()
        }
    }
}

fn check_temperature(t: f64) -> Result<()> {
    if !(0.0..=MAX_TEMPERATURE).contains(&t) {
        return Err(Error::InvalidParameter(format!(
            "temperature {t} K outside [0, {MAX_TEMPERATURE}] K"
        )));
    }
    Ok(())
}

/// Source of correlation tables. Implementations must be safe to call from
/// several sweep workers at once.
pub trait TableProvider: Sync {
    fn table(&self, bath: &BathParams, settings: &QuadSettings) -> Result<Arc<CorrelationTable>>;
}

/// Identity of a table: bath (including temperature and φ power) plus the
/// quadrature settings that built it.
pub fn table_fingerprint(bath: &BathParams, settings: &QuadSettings) -> String {
    serde_json::to_string(&(bath, settings)).expect("bath and settings serialise")
}

/// In-process memo of built tables.
#[derive(Default)]
pub struct MemoryTables {
    tables: Mutex<HashMap<String, Arc<CorrelationTable>>>,
}

impl MemoryTables {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.tables.lock().expect("table memo poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &str) -> Option<Arc<CorrelationTable>> {
        self.tables.lock().expect("table memo poisoned").get(key).cloned()
    }

    pub fn insert(&self, key: String, table: Arc<CorrelationTable>) -> Arc<CorrelationTable> {
        // Two workers may race to build the same table; both results are
        // identical, keep the first.
        self.tables
            .lock()
            .expect("table memo poisoned")
            .entry(key)
            .or_insert(table)
            .clone()
    }
}

impl TableProvider for MemoryTables {
    fn table(&self, bath: &BathParams, settings: &QuadSettings) -> Result<Arc<CorrelationTable>> {
        let key = table_fingerprint(bath, settings);
        if let Some(t) = self.get(&key) {
            return Ok(t);
        }
        let built = Arc::new(build_correlation_table(bath, settings)?);
        Ok(self.insert(key, built))
    }
}

fn rates_at(cfg: &ScenarioConfig, t: f64, tables: &dyn TableProvider) -> Result<RateSet> {
    let bath = cfg.bath.at_temperature(t);
    let table = match cfg.model {
        RateModel::FullPolaron => Some(tables.table(&bath, &cfg.quad)?),
        _ => None,
    };
    rate_set(cfg.model, &bath, &cfg.drive, table.as_deref(), &cfg.quad)
}

fn raw_spectrum(cfg: &ScenarioConfig, t: f64, tables: &dyn TableProvider) -> Result<Spectrum> {
    check_temperature(t)?;
    let rates = rates_at(cfg, t, tables)?;
    let gamma_total = cfg.drive.gamma_rad + rates.gamma_phonon;
    let g_eff = match cfg.mode {
        DriveMode::Single => 0.0,
        DriveMode::Double => rates.g_r,
    };
    let mut s = spectrum_ld(&cfg.drive, gamma_total, rates.omega_r, g_eff, &cfg.grid.detunings(), &cfg.lineshape)?;
    s.metadata.model = Some(cfg.model);
    s.metadata.mode = cfg.mode;
    s.metadata.temperature = Some(t);
    Ok(s)
}

/// Spectrum for `cfg.model` at temperature `t`: `Γ_T = Γ + Γ_phonon`, and the
/// polaron models replace `(Ω, G)` by `(ΩB, GB)`. Normalised to unit maximum
/// if `cfg.normalize`.
pub fn thermal_spectrum(cfg: &ScenarioConfig, t: f64, tables: &dyn TableProvider) -> Result<Spectrum> {
    cfg.validate()?;
    let mut s = raw_spectrum(cfg, t, tables)?;
    if cfg.normalize {
        s.normalize();
    }
    Ok(s)
}

/// One spectrum per entry of `cfg.temperatures`, in that order.
///
/// With `cfg.normalize` every spectrum of the sweep is divided by the same
/// factor, the largest maximum across the sweep, so heights stay comparable
/// between temperatures.
pub fn temperature_sweep(cfg: &ScenarioConfig, tables: &dyn TableProvider) -> Result<Vec<Spectrum>> {
    cfg.validate()?;
    let at = |t: f64, e: Error| Error::AtTemperature {
        temperature: t,
        source: Box::new(e),
    };
    if cfg.model == RateModel::FullPolaron {
        cfg.temperatures
            .par_iter()
            .try_for_each(|&t| tables.table(&cfg.bath.at_temperature(t), &cfg.quad).map(|_| ()).map_err(|e| at(t, e)))?;
    }
    let mut spectra = Vec::with_capacity(cfg.temperatures.len());
    for &t in &cfg.temperatures {
        spectra.push(raw_spectrum(cfg, t, tables).map_err(|e| at(t, e))?);
    }
    if cfg.normalize {
        let factor = spectra.iter().map(Spectrum::max_value).fold(0.0, f64::max);
        if factor > 0.0 {
            for s in &mut spectra {
                for v in &mut s.values {
                    *v /= factor;
                }
                s.metadata.normalized = true;
                s.metadata.normalization = factor;
            }
        }
    }
    Ok(spectra)
}

/// All three models' rates at one temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub temperature_k: f64,
    pub gamma_w: f64,
    pub gamma_1ph: f64,
    pub gamma_p: f64,
    pub gamma_y: f64,
    pub gamma_z: f64,
    pub b_factor: f64,
    pub omega_r: f64,
    pub g_r: f64,
}

impl RateRow {
    pub const COLUMNS: [&'static str; 9] = [
        "temperature_k",
        "gamma_w",
        "gamma_1ph",
        "gamma_p",
        "gamma_y",
        "gamma_z",
        "b_factor",
        "omega_r",
        "g_r",
    ];

    pub fn values(&self) -> [f64; 9] {
        [
            self.temperature_k,
            self.gamma_w,
            self.gamma_1ph,
            self.gamma_p,
            self.gamma_y,
            self.gamma_z,
            self.b_factor,
            self.omega_r,
            self.g_r,
        ]
    }
}

pub fn rate_table(cfg: &ScenarioConfig, tables: &dyn TableProvider) -> Result<Vec<RateRow>> {
    cfg.validate()?;
    cfg.temperatures
        .par_iter()
        .map(|&t| {
            let row = || -> Result<RateRow> {
                let w = rates_at(&cfg.with_model(RateModel::WeakCoupling), t, tables)?;
                let o = rates_at(&cfg.with_model(RateModel::OnePhonon), t, tables)?;
                let p = rates_at(&cfg.with_model(RateModel::FullPolaron), t, tables)?;
                Ok(RateRow {
                    temperature_k: t,
                    gamma_w: w.gamma_phonon,
                    gamma_1ph: o.gamma_phonon,
                    gamma_p: p.gamma_phonon,
                    gamma_y: p.gamma_y,
                    gamma_z: p.gamma_z,
                    b_factor: p.b,
                    omega_r: p.omega_r,
                    g_r: p.g_r,
                })
            };
            row().map_err(|e| Error::AtTemperature {
                temperature: t,
                source: Box::new(e),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// Position of the maximum for a single-maximum cluster; midpoint of the
    /// outermost maxima when the cluster has several.
    pub center: f64,
    pub height: f64,
    pub hwhm: f64,
    /// Trapezoid area between the cluster boundaries.
    pub area: f64,
    /// Local maxima merged into this cluster.
    pub maxima: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakReport {
    /// Ordered by center.
    pub peaks: Vec<Peak>,
}

impl PeakReport {
    pub fn central(&self) -> &Peak {
        &self.peaks[1]
    }

    pub fn lower(&self) -> &Peak {
        &self.peaks[0]
    }

    pub fn upper(&self) -> &Peak {
        &self.peaks[2]
    }
}

/// Locate the three peak clusters of a resonant spectrum.
///
/// Local maxima above 10⁻³ of the global maximum are merged when they are
/// closer than `Γ_T/4`, or when both fall inside the support of the same
/// doubly dressed sideband (`|δ ∓ 2Ω_eff| ≤ 2λ_t g_n + 3Γ_T/4`, `λ_t` the
/// classical turning point of the weight density). A sideband under a weak
/// field is horn-shaped, with maxima near both edges, and needs the second
/// rule to come out as one cluster.
pub fn peak_analysis(s: &Spectrum) -> Result<PeakReport> {
    let x = &s.detunings;
    let v = &s.values;
    let n = x.len();
    if n < 3 || v.len() != n {
        return Err(Error::InvalidParameter("spectrum needs at least 3 points".into()));
    }
    let meta = &s.metadata;
    let step = s.step();
    if meta.gamma_total / 2.0 < 20.0 * step {
        return Err(Error::InvalidParameter(format!(
            "grid step {step} resolves Γ_T/2 = {} with fewer than 20 points",
            meta.gamma_total / 2.0
        )));
    }
    let global = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = 1e-3 * global;
    let maxima: Vec<usize> = (1..n - 1)
        .filter(|&i| v[i] > floor && v[i] > v[i - 1] && v[i] >= v[i + 1])
        .collect();

    let turning = if meta.g_n != 0.0 {
        std::f64::consts::SQRT_2 * (2.0 * meta.photon_number as f64 + 1.0).sqrt()
    } else {
        0.0
    };
    let support = 2.0 * turning * meta.g_n.abs() + 0.75 * meta.gamma_total;
    let split = 2.0 * meta.omega_eff;
    let band = |d: f64| -> Option<i8> {
        if (d - split).abs() <= support {
            Some(1)
        } else if (d + split).abs() <= support {
            Some(-1)
        } else {
            None
        }
    };
    let merge_gap = meta.gamma_total / 4.0;

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &maxima {
        let join = clusters.last().is_some_and(|c| {
            let j = *c.last().unwrap();
            x[i] - x[j] <= merge_gap || (band(x[i]).is_some() && band(x[i]) == band(x[j]))
        });
        if join {
            clusters.last_mut().unwrap().push(i);
        } else {
            clusters.push(vec![i]);
        }
    }
    if clusters.len() != 3 {
        return Err(Error::PeakCountMismatch {
            expected: 3,
            found: clusters.len(),
        });
    }

    // Cluster boundaries: the minimum between neighbouring clusters.
    let mut bounds = vec![0usize];
    for w in clusters.windows(2) {
        let (a, b) = (*w[0].last().unwrap(), w[1][0]);
        let mut m = a;
        for k in a..=b {
            if v[k] < v[m] {
                m = k;
            }
        }
        bounds.push(m);
    }
    bounds.push(n - 1);

    let crossing = |from: usize, to: usize, level: f64| -> Option<f64> {
        // Walk from a maximum towards `to` until the value drops below `level`.
        if to < from {
            let mut k = from;
            while k > to {
                if v[k - 1] < level {
                    let t = (level - v[k - 1]) / (v[k] - v[k - 1]);
                    return Some(x[k - 1] + t * (x[k] - x[k - 1]));
                }
                k -= 1;
            }
        } else {
            let mut k = from;
            while k < to {
                if v[k + 1] < level {
                    let t = (v[k] - level) / (v[k] - v[k + 1]);
                    return Some(x[k] + t * (x[k + 1] - x[k]));
                }
                k += 1;
            }
        }
        None
    };

    let mut peaks = Vec::with_capacity(3);
    for (c, members) in clusters.iter().enumerate() {
        let (lo, hi) = (bounds[c], bounds[c + 1]);
        let top = members.iter().copied().fold(members[0], |m, i| if v[i] > v[m] { i } else { m });
        let height = v[top];
        let half = 0.5 * height;
        let left = crossing(members[0], lo, half);
        let right = crossing(*members.last().unwrap(), hi, half);
        let center = if members.len() == 1 {
            x[top]
        } else {
            0.5 * (x[members[0]] + x[*members.last().unwrap()])
        };
        // Without a crossing on one side (the flank runs into a neighbour)
        // the width comes from the other side alone.
        let hwhm = match (left, right) {
            (Some(l), Some(r)) => 0.5 * (r - l),
            (Some(l), None) => center - l,
            (None, Some(r)) => r - center,
            (None, None) => {
                return Err(Error::InvalidParameter(format!(
                    "peak near {} has no half-height crossing inside the grid",
                    x[top]
                )))
            }
        };
        let area = (lo..hi).map(|k| 0.5 * (v[k] + v[k + 1]) * (x[k + 1] - x[k])).sum();
        peaks.push(Peak {
            center,
            height,
            hwhm,
            area,
            maxima: members.len(),
        });
    }
    Ok(PeakReport { peaks })
}
