//! Unit conventions.
//!
//! Frequencies are angular, in rad/ns (numerically "GHz" in the angular
//! sense), times are in ns and temperatures in kelvin. Conversion from linear
//! GHz happens only at the configuration boundary.

use std::f64::consts::PI;

/// ħ / k_B in K·ns.
pub const HBAR_OVER_KB: f64 = 7.638_24e-3;

/// Linear frequency in GHz to angular frequency in rad/ns.
pub fn linear_ghz_to_angular(f: f64) -> f64 {
    2.0 * PI * f
}

pub fn angular_to_linear_ghz(w: f64) -> f64 {
    w / (2.0 * PI)
}

/// Argument scale of the thermal factor: coth(ω · ħ / (2 k_B T)) = coth(ω · s).
/// `None` at zero temperature, where the factor is exactly 1.
pub fn thermal_argument_scale(temperature: f64) -> Option<f64> {
    (temperature > 0.0).then(|| HBAR_OVER_KB / (2.0 * temperature))
}
