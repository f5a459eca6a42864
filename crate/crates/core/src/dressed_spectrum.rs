//! Doubly dressed two-level emitter and its fluorescence lineshape.
//!
//! The strong field (Rabi splitting 2Ω) dresses the emitter; the weak field
//! (2G, M photons) splits each dressed level into a continuum labelled by λ
//! whose amplitudes are harmonic-oscillator functions. The incoherent
//! spectrum keeps the central line untouched and smears each sideband over
//! `2λ g_n` with weight `|φ_M(λ/√2)|²`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::damping_rates::RateModel;
use crate::error::{Error, IntegralContext, Result};
use crate::quadrature::{gk15_from_values, gk15_nodes, refine_panels, QuadSettings, NODES_PER_PANEL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    /// Laser frequency, rad/ns. Spectra are reported against ω − ω_L.
    pub omega_l: f64,
    /// Ω: half the strong-field Rabi splitting, rad/ns.
    pub omega_rabi_half: f64,
    /// G: half the weak-field Rabi width, rad/ns. Zero means single drive.
    pub g_half: f64,
    /// Photon number M of the weak field.
    pub photon_number: u32,
    /// Dressing mixing angle θ, π/4 on resonance.
    pub theta: f64,
    /// Radiative decay rate Γ, rad/ns.
    pub gamma_rad: f64,
}

impl DriveConfig {
    /// 2Ω = 2π×5 GHz, 2G = 2π×2 GHz, M = 40, Γ = 2.35 rad/ns.
    pub fn reference_double() -> Self {
        Self {
            omega_l: 0.0,
            omega_rabi_half: 2.0 * PI * 2.5,
            g_half: 2.0 * PI,
            photon_number: 40,
            theta: PI / 4.0,
            gamma_rad: 2.35,
        }
    }

    pub fn reference_single() -> Self {
        Self {
            g_half: 0.0,
            ..Self::reference_double()
        }
    }

    pub fn single(self) -> Self {
        Self { g_half: 0.0, ..self }
    }

    pub fn is_double(&self) -> bool {
        self.g_half > 0.0
    }

    /// Hard preconditions. Returns the soft validity warnings
    /// (`2Ω > 2G > Γ`) that do not stop a computation.
    pub fn validate(&self) -> Result<Vec<String>> {
        let finite = [self.omega_l, self.omega_rabi_half, self.g_half, self.theta, self.gamma_rad]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("drive parameters must be finite".into()));
        }
        if !(self.omega_rabi_half > 0.0) {
            return Err(Error::InvalidParameter("Omega must be > 0".into()));
        }
        if self.g_half < 0.0 {
            return Err(Error::InvalidParameter("G must be >= 0".into()));
        }
        if !(self.gamma_rad > 0.0) {
            return Err(Error::InvalidParameter("Gamma must be > 0".into()));
        }
        if self.g_half > 0.0 && self.photon_number == 0 {
            return Err(Error::InvalidParameter("weak drive needs photon number M >= 1".into()));
        }
        let mut warnings = Vec::new();
        if self.g_half > 0.0 {
            if self.g_half >= self.omega_rabi_half {
                warnings.push(format!(
                    "weak field is not weak: 2G = {} >= 2Omega = {}",
                    2.0 * self.g_half,
                    2.0 * self.omega_rabi_half
                ));
            }
            if 2.0 * self.g_half <= self.gamma_rad {
                warnings.push(format!(
                    "2G = {} does not exceed Gamma = {}; doubly dressed picture is marginal",
                    2.0 * self.g_half,
                    self.gamma_rad
                ));
            }
        }
        Ok(warnings)
    }
}

/// `φ_n(x) = (√(2π) 2ⁿ n!)^{−1/2} H_n(x) e^{−x²/2}`.
///
/// Evaluated with the normalised three-term recurrence
/// `φ_{k+1} = √(2/(k+1)) x φ_k − √(k/(k+1)) φ_{k−1}`, carrying a running
/// exponent so neither `H_n`, `n!` nor `e^{−x²/2}` is formed on its own.
pub fn oscillator_phi(n: u32, x: f64) -> f64 {
    const RESCALE: f64 = 1e150;
    let mut prev = 0.0;
    let mut cur = (2.0 * PI).powf(-0.25);
    let mut log_scale = -0.5 * x * x;
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
    }
    if cur == 0.0 {
        return 0.0;
    }
    cur * log_scale.exp()
}

/// `|φ_M(λ/√2)|²`, normalised to unit area in λ.
pub fn weight_density(m: u32, lambda: f64) -> f64 {
    let v = oscillator_phi(m, lambda / SQRT_2);
    v * v
}

/// `g_n = sinθ cosθ · G / √M`.
pub fn coupling_g_n(drive: &DriveConfig) -> Result<f64> {
    coupling_for(drive, drive.g_half)
}

fn coupling_for(drive: &DriveConfig, g_half: f64) -> Result<f64> {
    if g_half == 0.0 {
        return Ok(0.0);
    }
    if drive.photon_number == 0 {
        return Err(Error::InvalidParameter("weak drive needs photon number M >= 1".into()));
    }
    Ok(drive.theta.sin() * drive.theta.cos() * g_half / (drive.photon_number as f64).sqrt())
}

/// Dressed manifold index, `i ∈ {1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Manifold {
    One,
    Two,
}

impl Manifold {
    /// `−(−1)^i`
    fn sign(self) -> f64 {
        match self {
            Manifold::One => 1.0,
            Manifold::Two => -1.0,
        }
    }
}

/// `V_nm^{(i)} = −(−1)^i g_n (√(n+1) δ_{n+1,m} + √n δ_{n−1,m})` with ħ = 1.
pub fn coupling_matrix_element(i: Manifold, n: usize, m: usize, g_n: f64) -> f64 {
    let amp = if m == n + 1 {
        ((n + 1) as f64).sqrt()
    } else if n >= 1 && m == n - 1 {
        (n as f64).sqrt()
    } else {
        return 0.0;
    };
    i.sign() * g_n * amp
}

/// Dense `size × size` truncation of the weak-field coupling, row-major.
pub fn truncated_coupling_matrix(i: Manifold, size: usize, g_n: f64) -> Vec<f64> {
    let mut m = vec![0.0; size * size];
    for r in 0..size {
        for c in r.saturating_sub(1)..(r + 2).min(size) {
            m[r * size + c] = coupling_matrix_element(i, r, c, g_n);
        }
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transition {
    Forbidden,
    /// Between manifolds, allowed for λ = −λ′.
    Sideband { sign: i8 },
    /// Within a manifold, allowed for λ = λ′.
    Central { sign: i8 },
}

/// Selection rules for `⟨N i λ| S₊ |(N−1) i′ λ′⟩`; the allowed amplitude is
/// `sign / 2`.
pub fn selection_rule(i: Manifold, lambda: f64, i_prime: Manifold, lambda_prime: f64) -> Transition {
    let same = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
    match (i, i_prime) {
        (Manifold::One, Manifold::Two) if same(lambda, -lambda_prime) => Transition::Sideband { sign: 1 },
        (Manifold::Two, Manifold::One) if same(lambda, -lambda_prime) => Transition::Sideband { sign: -1 },
        (a, b) if a == b && same(lambda, lambda_prime) => Transition::Central { sign: a.sign() as i8 },
        _ => Transition::Forbidden,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriveMode {
    Single,
    Double,
}

impl DriveMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DriveMode::Single => "single",
            DriveMode::Double => "double",
        }
    }
}

impl fmt::Display for DriveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DriveMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "single" => Ok(DriveMode::Single),
            "double" => Ok(DriveMode::Double),
            other => Err(format!("unknown drive mode `{other}` (expected single or double)")),
        }
    }
}

/// Rate multiplying the whole lineshape, `(rate/4π){…}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Prefactor {
    /// Radiative Γ: the emitted power stays fixed as phonons broaden the lines.
    #[default]
    Radiative,
    /// Total Γ_T = Γ + Γ_phonon.
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineshapeOptions {
    pub prefactor: Prefactor,
    /// Settings for the λ-integral over the weight density.
    pub lambda_quad: QuadSettings,
}

impl Default for LineshapeOptions {
    fn default() -> Self {
        Self {
            prefactor: Prefactor::Radiative,
            lambda_quad: QuadSettings {
                rel_tol: 1e-6,
                abs_tol: 1e-14,
                ..QuadSettings::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMetadata {
    pub model: Option<RateModel>,
    pub mode: DriveMode,
    pub temperature: Option<f64>,
    pub normalized: bool,
    /// Factor the raw lineshape was divided by when normalising.
    pub normalization: f64,
    pub prefactor: Prefactor,
    pub gamma_rad: f64,
    pub gamma_total: f64,
    pub omega_eff: f64,
    pub g_eff: f64,
    pub g_n: f64,
    pub photon_number: u32,
    pub omega_l: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub detunings: Vec<f64>,
    pub values: Vec<f64>,
    pub metadata: SpectrumMetadata,
}

impl Spectrum {
    /// Scale so that the maximum is exactly 1.
    pub fn normalize(&mut self) {
        let max = self.values.iter().copied().fold(0.0, f64::max);
        if max > 0.0 && !self.metadata.normalized {
            for v in &mut self.values {
                *v /= max;
            }
            self.metadata.normalized = true;
            self.metadata.normalization = max;
        }
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn step(&self) -> f64 {
        if self.detunings.len() < 2 {
            return 0.0;
        }
        (self.detunings[self.detunings.len() - 1] - self.detunings[0]) / (self.detunings.len() - 1) as f64
    }
}

/// Half-width of the λ domain, `√2 √(2M+1) + 6`.
pub fn lambda_extent(m: u32) -> f64 {
    SQRT_2 * (2.0 * m as f64 + 1.0).sqrt() + 6.0
}

/// Fixed panels on λ ≥ 0 with the weight density tabulated at their nodes.
/// The weight is even in λ, so the integral over the full line folds onto
/// the half line.
struct FoldedWeight {
    m: u32,
    panels: Vec<(f64, f64)>,
    nodes: Vec<[f64; NODES_PER_PANEL]>,
    weights: Vec<[f64; NODES_PER_PANEL]>,
}

impl FoldedWeight {
    fn new(m: u32) -> Self {
        let extent = lambda_extent(m);
        let max_panel = PI / (2.0 * m as f64 + 1.0).sqrt();
        let n = (extent / max_panel).ceil() as usize;
        let h = extent / n as f64;
        let panels: Vec<(f64, f64)> = (0..n)
            .map(|k| (k as f64 * h, if k + 1 == n { extent } else { (k + 1) as f64 * h }))
            .collect();
        let nodes: Vec<_> = panels.iter().map(|&(a, b)| gk15_nodes(a, b)).collect();
        let weights = nodes
            .iter()
            .map(|ns| {
                let mut w = [0.0; NODES_PER_PANEL];
                for (slot, &x) in w.iter_mut().zip(ns.iter()) {
                    *slot = weight_density(m, x);
                }
                w
            })
            .collect();
        Self {
            m,
            panels,
            nodes,
            weights,
        }
    }

    /// `∫ dλ w(λ) k(λ)` over the full line.
    fn integrate<K: Fn(f64) -> f64>(&self, kernel: K, settings: &QuadSettings) -> Result<f64> {
        let folded = |x: f64| kernel(x) + kernel(-x);
        let initial = self
            .panels
            .iter()
            .zip(self.nodes.iter().zip(self.weights.iter()))
            .map(|(&(a, b), (ns, ws))| {
                let mut fv = [0.0; NODES_PER_PANEL];
                for k in 0..NODES_PER_PANEL {
                    fv[k] = ws[k] * folded(ns[k]);
                }
                gk15_from_values(a, b, &fv)
            })
            .collect();
        let m = self.m;
        let f = |x: f64| weight_density(m, x) * folded(x);
        Ok(refine_panels(&f, initial, settings)
            .integral("doubly dressed sideband lambda-integral")?
            .value)
    }
}

fn lorentzian(x: f64, hwhm: f64) -> f64 {
    hwhm / (x * x + hwhm * hwhm)
}

/// Incoherent fluorescence lineshape of the doubly driven emitter,
///
/// `L(δ) = (Γ/4π){ (Γ_T/2)/(δ² + (Γ_T/2)²)
///   + ¼ ∫dλ |φ_M(λ/√2)|² [ (3Γ_T/4)/((δ − 2Ω − 2λg_n)² + (3Γ_T/4)²)
///                         + (3Γ_T/4)/((δ + 2Ω − 2λg_n)² + (3Γ_T/4)²) ] }`
///
/// evaluated at each detuning `δ = ω − ω_L` of `grid`, with `Ω_eff`, `G_eff`
/// in place of Ω, G. `g_eff = 0` gives the Mollow triplet.
pub fn spectrum_ld(
    drive: &DriveConfig,
    gamma_total: f64,
    omega_eff: f64,
    g_eff: f64,
    grid: &[f64],
    options: &LineshapeOptions,
) -> Result<Spectrum> {
    use rayon::prelude::*;

    if !(gamma_total > 0.0 && gamma_total.is_finite()) {
        return Err(Error::InvalidParameter(format!("total linewidth must be > 0, got {gamma_total}")));
    }
    if grid.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidParameter("detuning grid must be finite".into()));
    }
    let g_n = coupling_for(drive, g_eff)?;
    let rate = match options.prefactor {
        Prefactor::Radiative => drive.gamma_rad,
        Prefactor::Total => gamma_total,
    };
    let pref = rate / (4.0 * PI);
    let central_hw = 0.5 * gamma_total;
    let side_hw = 0.75 * gamma_total;
    let split = 2.0 * omega_eff;
    let weight = (g_n != 0.0).then(|| FoldedWeight::new(drive.photon_number));

    let point = |delta: f64| -> Result<f64> {
        let central = lorentzian(delta, central_hw);
        let (lo, hi) = (delta - split, delta + split);
        let sidebands = match &weight {
            // Unit-area weight: the sideband terms reduce to plain Lorentzians.
            None => lorentzian(lo, side_hw) + lorentzian(hi, side_hw),
            Some(w) => w.integrate(
                |lambda| {
                    let shift = 2.0 * lambda * g_n;
                    lorentzian(lo - shift, side_hw) + lorentzian(hi - shift, side_hw)
                },
                &options.lambda_quad,
            )?,
        };
        Ok(pref * (central + 0.25 * sidebands))
    };

    let values = grid.par_iter().map(|&d| point(d)).collect::<Result<Vec<_>>>()?;
    Ok(Spectrum {
        detunings: grid.to_vec(),
        values,
        metadata: SpectrumMetadata {
            model: None,
            mode: if g_eff > 0.0 { DriveMode::Double } else { DriveMode::Single },
            temperature: None,
            normalized: false,
            normalization: 1.0,
            prefactor: options.prefactor,
            gamma_rad: drive.gamma_rad,
            gamma_total,
            omega_eff,
            g_eff,
            g_n,
            photon_number: drive.photon_number,
            omega_l: drive.omega_l,
        },
    })
}

/// `points` equally spaced detunings on `[min, max]`. A range symmetric about
/// zero gives a grid whose points are exact negatives of each other.
pub fn detuning_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    let n = (points - 1) as f64;
    let last = points - 1;
    (0..points)
        .map(|k| match k {
            0 => min,
            _ if k == last => max,
            _ => {
                let k = k as f64;
                (min * (n - k) + max * k) / n
            }
        })
        .collect()
}
