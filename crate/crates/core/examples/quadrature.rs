//! Adaptive Gauss–Kronrod integration on finite, semi-infinite and
//! oscillatory domains.

use num_complex::Complex64;

use dressed_rf::quadrature::{
    fourier_half_transform, integrate_finite, integrate_oscillatory_finite, integrate_semi_infinite, QuadSettings,
};

fn main() {
    let s = QuadSettings::default();

    let r = integrate_finite(|x: f64| x.sin(), 0.0, std::f64::consts::PI, &s).unwrap();
    println!("∫₀^π sin x dx        = {:.15} (err {:.1e}, {} evals)", r.value, r.error_estimate, r.evaluations);

    let r = integrate_semi_infinite(|x: f64| (-x * x).exp(), 1.0, &s).unwrap();
    println!("∫₀^∞ e^(-x²) dx      = {:.15} (√π/2 = {:.15})", r.value, std::f64::consts::PI.sqrt() / 2.0);

    let r = integrate_oscillatory_finite(|x: f64| (200.0 * x).cos() * x, 200.0, 0.0, 1.0, &s).unwrap();
    println!("∫₀¹ x cos(200x) dx   = {:.15}", r.value);

    // ∫₀^∞ e^{iωτ} e^{-τ} dτ = 1 / (1 - iω)
    let w = 3.0;
    let r = fourier_half_transform(|t: f64| Complex64::new((-t).exp(), 0.0), w, 1.0, &s).unwrap();
    println!("∫₀^∞ e^(3iτ) e^(-τ)  = {:.12} (exact {:.12})", r.value, Complex64::new(1.0, 0.0) / Complex64::new(1.0, -w));
}
