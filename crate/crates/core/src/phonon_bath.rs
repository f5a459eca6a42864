//! Longitudinal-acoustic phonon environment of the quantum dot.
//!
//! The bath is characterised by the super-ohmic spectral density
//! `J(ω) = α ω³ exp(−(ω/ω_c)²)`. From it follow the displacement factor `B`
//! that renormalises Rabi frequencies, the phonon correlation function
//! `φ(τ)`, and the polaron kernels `Λ_x`, `Λ_y` that enter the damping rates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, IntegralContext, Result};
use crate::quadrature::{integrate_oscillatory_semi_infinite, integrate_semi_infinite, QuadSettings};
use crate::units::thermal_argument_scale;

/// Power of ω dividing `J(ω)` inside `φ(τ)`.
///
/// `Two` makes `exp(−φ(0)) = B²` hold exactly; `One` reproduces the variant
/// with `J(ω)/ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum PhiPower {
    One,
    #[default]
    Two,
}

impl PhiPower {
    pub fn exponent(self) -> u8 {
        match self {
            PhiPower::One => 1,
            PhiPower::Two => 2,
        }
    }

    pub fn from_exponent(p: u8) -> Option<Self> {
        match p {
            1 => Some(PhiPower::One),
            2 => Some(PhiPower::Two),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathParams {
    /// Coupling strength in ns² (GHz⁻²).
    pub alpha: f64,
    /// Phonon cutoff, rad/ns.
    pub omega_c: f64,
    /// Kelvin.
    pub temperature: f64,
    pub phi_power: PhiPower,
}

impl BathParams {
    pub const INAS_ALPHA: f64 = 2.535e-7;
    pub const INAS_CUTOFF: f64 = 493.33;

    pub fn new(alpha: f64, omega_c: f64, temperature: f64) -> Result<Self> {
        let bath = Self {
            alpha,
            omega_c,
            temperature,
            phi_power: PhiPower::Two,
        };
        bath.validate()?;
        Ok(bath)
    }

    /// Self-assembled InAs/GaAs dot: α = 2.535×10⁻⁷ ns², ω_c = 493.33 rad/ns.
    pub fn inas_gaas(temperature: f64) -> Self {
        Self {
            alpha: Self::INAS_ALPHA,
            omega_c: Self::INAS_CUTOFF,
            temperature,
            phi_power: PhiPower::Two,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if !(self.omega_c > 0.0 && self.omega_c.is_finite()) {
            return Err(Error::InvalidParameter(format!("omega_c must be > 0, got {}", self.omega_c)));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "temperature must be >= 0 K, got {}",
                self.temperature
            )));
        }
        Ok(())
    }

    pub fn at_temperature(self, temperature: f64) -> Self {
        Self { temperature, ..self }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }

    pub fn with_phi_power(self, phi_power: PhiPower) -> Self {
        Self { phi_power, ..self }
    }

    /// `coth(ħω / 2k_BT)`, exactly 1 at T = 0.
    pub fn thermal_factor(&self, omega: f64) -> f64 {
        match thermal_argument_scale(self.temperature) {
            None => 1.0,
            Some(s) => 1.0 / (omega * s).tanh(),
        }
    }

    /// `ω · coth(ħω / 2k_BT)`, finite at ω → 0.
    fn omega_coth(&self, omega: f64) -> f64 {
        match thermal_argument_scale(self.temperature) {
            None => omega,
            Some(s) => {
                let x = omega * s;
                if x.abs() < 1e-4 {
                    (1.0 + x * x / 3.0) / s
                } else {
                    omega / x.tanh()
                }
            }
        }
    }

    fn cutoff(&self, omega: f64) -> f64 {
        let r = omega / self.omega_c;
        (-r * r).exp()
    }

    /// `J(ω)/ω^p · coth` and `J(ω)/ω^p`, the cosine and sine weights of φ(τ).
    fn phi_weights(&self, omega: f64) -> (f64, f64) {
        let c = self.alpha * self.cutoff(omega);
        match self.phi_power {
            PhiPower::Two => (c * self.omega_coth(omega), c * omega),
            PhiPower::One => (c * omega * self.omega_coth(omega), c * omega * omega),
        }
    }
}

/// `J(ω) = α ω³ exp(−(ω/ω_c)²)`.
pub fn spectral_density(bath: &BathParams, omega: f64) -> f64 {
    bath.alpha * omega.powi(3) * bath.cutoff(omega)
}

/// `φ(τ) = ∫₀^∞ dω J(ω)/ω^p [cos(ωτ) coth(ħω/2k_BT) − i sin(ωτ)]`.
pub fn correlation_phi(bath: &BathParams, tau: f64, settings: &QuadSettings) -> Result<Complex64> {
    if bath.alpha == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let f = |w: f64| {
        let (wc, ws) = bath.phi_weights(w);
        let (s, c) = (w * tau).sin_cos();
        Complex64::new(wc * c, -ws * s)
    };
    Ok(integrate_oscillatory_semi_infinite(f, tau, bath.omega_c, settings)
        .integral("phonon correlation phi(tau)")?
        .value)
}

/// `dφ/dτ`, used for Hermite interpolation of the correlation table.
///
/// The absolute tolerance is scaled by ω_c, the natural unit of `dφ/dτ`.
pub fn correlation_phi_derivative(bath: &BathParams, tau: f64, settings: &QuadSettings) -> Result<Complex64> {
    if bath.alpha == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let settings = &settings.with_abs_tol(settings.abs_tol * bath.omega_c);
    let f = |w: f64| {
        let (wc, ws) = bath.phi_weights(w);
        let (s, c) = (w * tau).sin_cos();
        Complex64::new(-wc * w * s, -ws * w * c)
    };
    Ok(integrate_oscillatory_semi_infinite(f, tau, bath.omega_c, settings)
        .integral("phonon correlation derivative")?
        .value)
}

/// Thermally averaged displacement `B = exp[−½ ∫ dω J(ω)/ω² coth(ħω/2k_BT)]`.
pub fn displacement_b(bath: &BathParams, settings: &QuadSettings) -> Result<f64> {
    if bath.alpha == 0.0 {
        return Ok(1.0);
    }
    let f = |w: f64| bath.alpha * bath.cutoff(w) * bath.omega_coth(w);
    let r = integrate_semi_infinite(f, bath.omega_c, settings).integral("displacement factor B")?;
    Ok((-0.5 * r.value).exp())
}

/// Polaron shift `Δ_p = ∫ dω J(ω)/ω`. Diagnostic only.
pub fn polaron_shift(bath: &BathParams, settings: &QuadSettings) -> Result<f64> {
    let f = |w: f64| bath.alpha * w * w * bath.cutoff(w);
    Ok(integrate_semi_infinite(f, bath.omega_c, settings)
        .integral("polaron shift")?
        .value)
}

/// `φ(τ)` sampled on an adaptive grid with cubic Hermite interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub tau_grid: Vec<f64>,
    pub phi_values: Vec<Complex64>,
    pub phi_derivatives: Vec<Complex64>,
    /// Time over which |φ| first drops by a factor e, ns.
    pub decay_scale: f64,
    /// Displacement factor `B` of the bath the table was built for.
    pub displacement: f64,
    pub built_for: BathParams,
}

/// Largest tolerated Hermite error at an interval midpoint.
const TABLE_INTERP_TOL: f64 = 1e-10;
/// The table ends once |φ| and |τ φ'| both drop below this fraction of |φ(0)|.
const TABLE_DECAY_FRACTION: f64 = 1e-8;
const TABLE_MAX_POINTS: usize = 200_000;
const TABLE_MAX_TAU: f64 = 1e4;

fn hermite(t0: f64, t1: f64, p0: Complex64, d0: Complex64, p1: Complex64, d1: Complex64, t: f64) -> Complex64 {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    p0 * h00 + d0 * (h10 * h) + p1 * h01 + d1 * (h11 * h)
}

impl CorrelationTable {
    pub fn tau_max(&self) -> f64 {
        *self.tau_grid.last().expect("table has at least two points")
    }

    pub fn len(&self) -> usize {
        self.tau_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau_grid.is_empty()
    }

    pub fn phi_at_zero(&self) -> Complex64 {
        self.phi_values[0]
    }

    /// Interpolated `φ(τ)`.
    pub fn phi(&self, tau: f64) -> Result<Complex64> {
        let tau_max = self.tau_max();
        if !(tau >= 0.0 && tau <= tau_max) {
            return Err(Error::TableRange { tau, tau_max });
        }
        Ok(self.phi_unchecked(tau))
    }

    fn phi_unchecked(&self, tau: f64) -> Complex64 {
        let k = self.tau_grid.partition_point(|&t| t <= tau);
        let i = k.saturating_sub(1).min(self.tau_grid.len() - 2);
        hermite(
            self.tau_grid[i],
            self.tau_grid[i + 1],
            self.phi_values[i],
            self.phi_derivatives[i],
            self.phi_values[i + 1],
            self.phi_derivatives[i + 1],
            tau,
        )
    }

    /// `Λ_x(τ) = (B²/2)(e^{φ} + e^{−φ} − 2)`.
    pub fn lambda_x(&self, tau: f64) -> Result<Complex64> {
        Ok(lambda_x_from_phi(self.displacement, self.phi(tau)?))
    }

    /// `Λ_y(τ) = (B²/2)(e^{φ} − e^{−φ})`.
    pub fn lambda_y(&self, tau: f64) -> Result<Complex64> {
        Ok(lambda_y_from_phi(self.displacement, self.phi(tau)?))
    }
}

pub(crate) fn lambda_x_from_phi(b: f64, phi: Complex64) -> Complex64 {
    // 2(cosh φ − 1) = 4 sinh²(φ/2), which keeps precision for small φ.
    let s = (phi * 0.5).sinh();
    s * s * (2.0 * b * b)
}

pub(crate) fn lambda_y_from_phi(b: f64, phi: Complex64) -> Complex64 {
    phi.sinh() * (b * b)
}

pub fn kernel_lambda_x(table: &CorrelationTable, tau: f64) -> Result<Complex64> {
    table.lambda_x(tau)
}

pub fn kernel_lambda_y(table: &CorrelationTable, tau: f64) -> Result<Complex64> {
    table.lambda_y(tau)
}

/// Sample `φ(τ)` from τ = 0 until it has decayed to
/// `10⁻⁸ |φ(0)|`, refining the step wherever the Hermite interpolant
/// misses a direct evaluation at the interval midpoint.
pub fn build_correlation_table(bath: &BathParams, settings: &QuadSettings) -> Result<CorrelationTable> {
    bath.validate()?;
    let displacement = displacement_b(bath, settings)?;
    let h0 = 0.05 / bath.omega_c;
    if bath.alpha == 0.0 {
        let zero = Complex64::new(0.0, 0.0);
        return Ok(CorrelationTable {
            tau_grid: vec![0.0, h0],
            phi_values: vec![zero; 2],
            phi_derivatives: vec![zero; 2],
            decay_scale: h0,
            displacement,
            built_for: *bath,
        });
    }

    let sample = |t: f64| -> Result<(Complex64, Complex64)> {
        Ok((correlation_phi(bath, t, settings)?, correlation_phi_derivative(bath, t, settings)?))
    };

    let (p0, d0) = sample(0.0)?;
    let threshold = TABLE_DECAY_FRACTION * p0.norm();
    let mut tau_grid = vec![0.0];
    let mut phi_values = vec![p0];
    let mut phi_derivatives = vec![d0];
    let mut decay_scale = None;
    let mut h = h0;

    loop {
        let t0 = *tau_grid.last().unwrap();
        let (q0, e0) = (*phi_values.last().unwrap(), *phi_derivatives.last().unwrap());
        if t0 > TABLE_MAX_TAU || tau_grid.len() > TABLE_MAX_POINTS {
            return Err(Error::TableNotDecayed { tau: t0 });
        }
        let t1 = t0 + h;
        let (q1, e1) = sample(t1)?;
        let mid = t0 + 0.5 * h;
        let direct = correlation_phi(bath, mid, settings)?;
        let err = (hermite(t0, t1, q0, e0, q1, e1, mid) - direct).norm();
        if err > TABLE_INTERP_TOL {
            h *= 0.5;
            continue;
        }
        tau_grid.push(t1);
        phi_values.push(q1);
        phi_derivatives.push(e1);
        if decay_scale.is_none() && q1.norm() < p0.norm() / std::f64::consts::E {
            decay_scale = Some(t1);
        }
        if q1.norm() + t1 * e1.norm() < threshold {
            break;
        }
        if err < 0.05 * TABLE_INTERP_TOL {
            h *= 1.5;
        }
    }

    let tau_max = *tau_grid.last().unwrap();
    Ok(CorrelationTable {
        tau_grid,
        phi_values,
        phi_derivatives,
        decay_scale: decay_scale.unwrap_or(tau_max),
        displacement,
        built_for: *bath,
    })
}
