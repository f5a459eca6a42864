//! Phonon-induced damping of the driven exciton.
//!
//! Three exchangeable models:
//! - weak coupling, `Γ_W = (π/2) J(Ω) coth(ħΩ/2k_BT)` at the bare Rabi frequency;
//! - single-phonon polaron, the same closed form at `Ω_r = ΩB`;
//! - full polaron, `Γ_p = Γ_y + Γ_z` built from the response functions
//!   `K_l(ω) = ∫₀^∞ e^{iωτ} Λ_l(τ) dτ` of the polaron kernels.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dressed_spectrum::DriveConfig;
use crate::error::{Error, IntegralContext, Result};
use crate::phonon_bath::{
    displacement_b, lambda_x_from_phi, lambda_y_from_phi, spectral_density, BathParams, CorrelationTable,
};
use crate::quadrature::{fourier_finite_transform, QuadSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateModel {
    #[serde(rename = "weak")]
    WeakCoupling,
    #[serde(rename = "onephonon")]
    OnePhonon,
    #[serde(rename = "polaron")]
    FullPolaron,
}

impl RateModel {
    pub const ALL: [RateModel; 3] = [RateModel::WeakCoupling, RateModel::OnePhonon, RateModel::FullPolaron];

    pub fn as_str(self) -> &'static str {
        match self {
            RateModel::WeakCoupling => "weak",
            RateModel::OnePhonon => "onephonon",
            RateModel::FullPolaron => "polaron",
        }
    }

    /// Polaron models renormalise the Rabi frequencies by `B`.
    pub fn renormalizes(self) -> bool {
        !matches!(self, RateModel::WeakCoupling)
    }
}

impl fmt::Display for RateModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RateModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "weak" => Ok(RateModel::WeakCoupling),
            "onephonon" => Ok(RateModel::OnePhonon),
            "polaron" => Ok(RateModel::FullPolaron),
            other => Err(format!("unknown rate model `{other}` (expected weak, onephonon or polaron)")),
        }
    }
}

/// Damping rates and renormalised drive at one temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSet {
    pub model: RateModel,
    pub temperature: f64,
    /// The model's phonon damping rate, rad/ns.
    pub gamma_phonon: f64,
    /// Full-polaron sub-rates; zero for the other models.
    pub gamma_y: f64,
    pub gamma_z: f64,
    pub omega_r: f64,
    pub g_r: f64,
    pub b: f64,
}

/// `Γ_W = (π/2) J(Ω) coth(ħΩ/2k_BT)`.
pub fn rate_weak_coupling(bath: &BathParams, omega_rabi: f64) -> f64 {
    0.5 * PI * spectral_density(bath, omega_rabi) * bath.thermal_factor(omega_rabi)
}

pub fn renormalized_rabi(bath: &BathParams, omega: f64, settings: &QuadSettings) -> Result<f64> {
    Ok(omega * displacement_b(bath, settings)?)
}

/// `Γ_1-ph = (π/2) J(Ω_r) coth(ħΩ_r/2k_BT)`.
pub fn rate_one_phonon(bath: &BathParams, omega_rabi: f64, settings: &QuadSettings) -> Result<f64> {
    let omega_r = renormalized_rabi(bath, omega_rabi, settings)?;
    Ok(one_phonon_closed_form(bath, omega_r))
}

/// Independent evaluation of the single-phonon closed form, kept apart from
/// [`rate_weak_coupling`] so the two can be cross-checked.
fn one_phonon_closed_form(bath: &BathParams, omega_r: f64) -> f64 {
    let j = bath.alpha * omega_r * omega_r * omega_r * (-(omega_r / bath.omega_c).powi(2)).exp();
    let coth = match crate::units::thermal_argument_scale(bath.temperature) {
        None => 1.0,
        Some(s) => (omega_r * s).cosh() / (omega_r * s).sinh(),
    };
    PI / 2.0 * j * coth
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    X,
    Y,
}

fn kernel_value(table: &CorrelationTable, kernel: Kernel, tau: f64) -> Complex64 {
    let phi = table.phi(tau).unwrap_or_default();
    match kernel {
        Kernel::X => lambda_x_from_phi(table.displacement, phi),
        Kernel::Y => lambda_y_from_phi(table.displacement, phi),
    }
}

/// Integrate `e^{iωτ} g(τ)` over the tabulated range of φ. Beyond the table
/// φ is below 10⁻⁸ |φ(0)|; the exponential tail bound `|g(τ_max)|·decay`
/// is folded into the reported error.
fn table_transform<G>(table: &CorrelationTable, g: G, omega: f64, settings: &QuadSettings, name: &'static str) -> Result<(Complex64, f64)>
where
    G: Fn(f64) -> Complex64,
{
    let tau_max = table.tau_max();
    let r = fourier_finite_transform(&g, omega, 0.0, tau_max, settings).integral(name)?;
    let tail = g(tau_max).norm() * table.decay_scale;
    Ok((r.value, r.error_estimate + tail))
}

/// Polaron response `K_l(ω) = ∫₀^∞ e^{iωτ} Λ_l(τ) dτ`.
pub fn response_k(table: &CorrelationTable, kernel: Kernel, omega: f64, settings: &QuadSettings) -> Result<Complex64> {
    if table.built_for.alpha == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let name = match kernel {
        Kernel::X => "polaron response K_x",
        Kernel::Y => "polaron response K_y",
    };
    Ok(table_transform(table, |t| kernel_value(table, kernel, t), omega, settings, name)?.0)
}

/// `γ_l(ω) = 2 Re K_l(ω)`.
pub fn gamma_l(table: &CorrelationTable, kernel: Kernel, omega: f64, settings: &QuadSettings) -> Result<f64> {
    Ok(2.0 * response_k(table, kernel, omega, settings)?.re)
}

/// `Γ_y = (Ω²/2) γ_x(0)` with the bare Ω; the kernels already carry `B²`.
pub fn rate_gamma_y(table: &CorrelationTable, omega_rabi: f64, settings: &QuadSettings) -> Result<f64> {
    Ok(0.5 * omega_rabi * omega_rabi * gamma_l(table, Kernel::X, 0.0, settings)?)
}

/// `Γ_z = (Ω²/4)(γ_y(Ω_r) + γ_y(−Ω_r) + 2γ_x(0))`.
pub fn rate_gamma_z(table: &CorrelationTable, omega_rabi: f64, settings: &QuadSettings) -> Result<f64> {
    let omega_r = omega_rabi * table.displacement;
    let gy_plus = gamma_l(table, Kernel::Y, omega_r, settings)?;
    let gy_minus = gamma_l(table, Kernel::Y, -omega_r, settings)?;
    let gx0 = gamma_l(table, Kernel::X, 0.0, settings)?;
    Ok(0.25 * omega_rabi * omega_rabi * (gy_plus + gy_minus + 2.0 * gx0))
}

/// Full polaron rate `Γ_p = Γ_y + Γ_z`.
pub fn rate_full_polaron(table: &CorrelationTable, drive: &DriveConfig, settings: &QuadSettings) -> Result<RateSet> {
    let bath = &table.built_for;
    let b = table.displacement;
    let omega = drive.omega_rabi_half;
    let (gamma_y, gamma_z) = if bath.alpha == 0.0 {
        (0.0, 0.0)
    } else {
        (rate_gamma_y(table, omega, settings)?, rate_gamma_z(table, omega, settings)?)
    };
    Ok(RateSet {
        model: RateModel::FullPolaron,
        temperature: bath.temperature,
        gamma_phonon: gamma_y + gamma_z,
        gamma_y,
        gamma_z,
        omega_r: omega * b,
        g_r: drive.g_half * b,
        b,
    })
}

/// The explicit `Ω_r²` form of the full polaron rate, written directly in
/// terms of `e^{±φ}` without the `B²`-carrying kernels:
///
/// `(Ω_r²/4)[Re∫e^{iΩ_rτ}(e^φ−e^{−φ}) + Re∫e^{−iΩ_rτ}(e^φ−e^{−φ}) + 4Re∫(e^φ+e^{−φ}−2)]`.
pub fn full_polaron_explicit(table: &CorrelationTable, omega_rabi: f64, settings: &QuadSettings) -> Result<f64> {
    if table.built_for.alpha == 0.0 {
        return Ok(0.0);
    }
    let omega_r = omega_rabi * table.displacement;
    let odd = |t: f64| {
        let phi = table.phi(t).unwrap_or_default();
        phi.exp() - (-phi).exp()
    };
    let even = |t: f64| {
        let phi = table.phi(t).unwrap_or_default();
        let s = (phi * 0.5).sinh();
        s * s * 4.0
    };
    let name = "explicit full polaron rate";
    let (plus, _) = table_transform(table, odd, omega_r, settings, name)?;
    let (minus, _) = table_transform(table, odd, -omega_r, settings, name)?;
    let (zero, _) = table_transform(table, even, 0.0, settings, name)?;
    Ok(0.25 * omega_r * omega_r * (plus.re + minus.re + 4.0 * zero.re))
}

/// Weak-coupling and single-phonon rates need no correlation table; the full
/// polaron model needs one built for `bath`.
pub fn rate_set(
    model: RateModel,
    bath: &BathParams,
    drive: &DriveConfig,
    table: Option<&CorrelationTable>,
    settings: &QuadSettings,
) -> Result<RateSet> {
    let omega = drive.omega_rabi_half;
    match model {
        RateModel::WeakCoupling => Ok(RateSet {
            model,
            temperature: bath.temperature,
            gamma_phonon: rate_weak_coupling(bath, omega),
            gamma_y: 0.0,
            gamma_z: 0.0,
            omega_r: omega,
            g_r: drive.g_half,
            b: displacement_b(bath, settings)?,
        }),
        RateModel::OnePhonon => {
            let b = displacement_b(bath, settings)?;
            Ok(RateSet {
                model,
                temperature: bath.temperature,
                gamma_phonon: one_phonon_closed_form(bath, omega * b),
                gamma_y: 0.0,
                gamma_z: 0.0,
                omega_r: omega * b,
                g_r: drive.g_half * b,
                b,
            })
        }
        RateModel::FullPolaron => {
            let table = table.ok_or_else(|| {
                Error::InvalidParameter("full polaron rate requires a correlation table".to_string())
            })?;
            if table.built_for != *bath {
                return Err(Error::InvalidParameter(
                    "correlation table was built for a different bath".to_string(),
                ));
            }
            rate_full_polaron(table, drive, settings)
        }
    }
}
