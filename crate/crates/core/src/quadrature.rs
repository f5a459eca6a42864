//! Adaptive Gauss–Kronrod integration.
//!
//! Every integral in the crate goes through this module: finite intervals,
//! semi-infinite domains with a known decay scale, and one-sided Fourier
//! transforms `∫₀^∞ e^{iωτ} f(τ) dτ`.
//!
//! The engine is a global adaptive bisection (QUADPACK `qag` style) built on
//! the 7/15-point Gauss–Kronrod pair. Oscillatory integrands are pre-split
//! into panels no wider than half an oscillation period before adaptation
//! starts, so an `e^{iωτ}` factor can never be silently undersampled.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Kronrod abscissae on [-1, 1] (non-negative half, descending).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the 7-point rule embedded at the odd Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Number of integrand evaluations per panel.
pub const NODES_PER_PANEL: usize = 15;

/// Scalar types the integrator can accumulate.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + AddAssign + Default
{
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum QuadError {
    #[error("integration did not converge: estimate {value:e} with error {error:e} after {subdivisions} subdivisions")]
    NonConvergence {
        value: f64,
        error: f64,
        subdivisions: usize,
    },
    #[error("integrand returned a non-finite value at x = {at}")]
    NonFinite { at: f64 },
    #[error("integrand has not decayed at the truncation point {cutoff:e} (|f| = {magnitude:e})")]
    TailNotDecayed { cutoff: f64, magnitude: f64 },
    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("invalid quadrature settings: {0}")]
    InvalidSettings(&'static str),
}

/// Tolerances and limits shared by all integration routines.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Bisections allowed beyond the initial panel partition.
    pub max_subdivisions: usize,
    /// Semi-infinite domains are truncated at this multiple of the decay scale.
    pub tail_cutoff_factor: f64,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 20_000,
            tail_cutoff_factor: 12.0,
        }
    }
}

impl QuadSettings {
    pub fn validate(&self) -> Result<(), QuadError> {
        if !(self.rel_tol > 0.0) {
            return Err(QuadError::InvalidSettings("rel_tol must be > 0"));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(QuadError::InvalidSettings("abs_tol must be >= 0"));
        }
        if self.max_subdivisions < 1 {
            return Err(QuadError::InvalidSettings("max_subdivisions must be >= 1"));
        }
        if !(self.tail_cutoff_factor >= 1.0) {
            return Err(QuadError::InvalidSettings("tail_cutoff_factor must be >= 1"));
        }
        Ok(())
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        Self { rel_tol, ..self }
    }

    pub fn with_abs_tol(self, abs_tol: f64) -> Self {
        Self { abs_tol, ..self }
    }

    pub fn with_tail_cutoff(self, tail_cutoff_factor: f64) -> Self {
        Self {
            tail_cutoff_factor,
            ..self
        }
    }

    fn tolerance_for(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// One application of the Gauss–Kronrod pair on `[a, b]`.
#[derive(Debug, Clone, Copy)]
pub struct Panel<T> {
    pub a: f64,
    pub b: f64,
    pub value: T,
    pub error: f64,
}

/// QUADPACK error rescaling for the 7/15 pair.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// Abscissae of the 15-point Kronrod rule mapped onto `[a, b]`, in the order
/// expected by [`gk15_from_values`].
pub fn gk15_nodes(a: f64, b: f64) -> [f64; NODES_PER_PANEL] {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut nodes = [center; NODES_PER_PANEL];
    for j in 0..7 {
        nodes[2 * j + 1] = center - half * XGK[j];
        nodes[2 * j + 2] = center + half * XGK[j];
    }
    nodes
}

/// Combine integrand samples at [`gk15_nodes`] into a panel estimate.
pub fn gk15_from_values<T: QuadValue>(a: f64, b: f64, fv: &[T; NODES_PER_PANEL]) -> Panel<T> {
    let half = 0.5 * (b - a);
    let f_center = fv[0];
    let mut res_k = f_center * WGK[7];
    let mut res_g = f_center * WG[3];
    let mut res_abs = f_center.magnitude() * WGK[7];
    for j in 0..7 {
        let f1 = fv[2 * j + 1];
        let f2 = fv[2 * j + 2];
        let sum = f1 + f2;
        res_k += sum * WGK[j];
        res_abs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            res_g += sum * WG[j / 2];
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).magnitude();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[2 * j + 1] - mean).magnitude() + (fv[2 * j + 2] - mean).magnitude());
    }
    let width = half.abs();
    let err = ((res_k - res_g) * half).magnitude();
    Panel {
        a,
        b,
        value: res_k * half,
        error: rescale_error(err, res_abs * width, res_asc * width),
    }
}

fn gk15<T, F>(f: &F, a: f64, b: f64) -> Result<Panel<T>, QuadError>
where
    T: QuadValue,
    F: Fn(f64) -> T + ?Sized,
{
    let nodes = gk15_nodes(a, b);
    let mut fv = [T::default(); NODES_PER_PANEL];
    for (slot, &x) in fv.iter_mut().zip(nodes.iter()) {
        let y = f(x);
        if !y.is_finite_value() {
            return Err(QuadError::NonFinite { at: x });
        }
        *slot = y;
    }
    Ok(gk15_from_values(a, b, &fv))
}

struct Ranked<T>(Panel<T>);

impl<T> PartialEq for Ranked<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T> Eq for Ranked<T> {}
impl<T> PartialOrd for Ranked<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Ranked<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .error
            .total_cmp(&other.0.error)
            .then_with(|| other.0.a.total_cmp(&self.0.a))
    }
}

/// Adaptive refinement starting from an explicit set of already evaluated
/// panels. Panels must tile the integration range.
pub fn refine_panels<T, F>(
    f: &F,
    initial: Vec<Panel<T>>,
    settings: &QuadSettings,
) -> Result<QuadResult<T>, QuadError>
where
    T: QuadValue,
    F: Fn(f64) -> T + ?Sized,
{
    let mut evaluations = initial.len() * NODES_PER_PANEL;
    let mut heap: BinaryHeap<Ranked<T>> = initial.into_iter().map(Ranked).collect();
    let mut subdivisions = 0usize;

    loop {
        let (value, error) = totals(&heap);
        let tol = settings.tolerance_for(value.magnitude());
        if error <= tol {
            break;
        }
        if subdivisions >= settings.max_subdivisions {
            return Err(QuadError::NonConvergence {
                value: value.magnitude(),
                error,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("panel set is never empty").0;
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Panel has collapsed to adjacent floats; nothing left to refine.
            return Err(QuadError::NonConvergence {
                value: value.magnitude(),
                error,
                subdivisions,
            });
        }
        heap.push(Ranked(gk15(f, worst.a, mid)?));
        heap.push(Ranked(gk15(f, mid, worst.b)?));
        evaluations += 2 * NODES_PER_PANEL;
        subdivisions += 1;
    }

    let mut panels: Vec<Panel<T>> = heap.into_iter().map(|r| r.0).collect();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = T::default();
    let mut error = 0.0;
    for p in &panels {
        value += p.value;
        error += p.error;
    }
    Ok(QuadResult {
        value,
        error_estimate: error,
        evaluations,
    })
}

fn totals<T: QuadValue>(heap: &BinaryHeap<Ranked<T>>) -> (T, f64) {
    let mut value = T::default();
    let mut error = 0.0;
    for p in heap.iter() {
        value += p.0.value;
        error += p.0.error;
    }
    (value, error)
}

/// Split `[a, b]` into equal panels no wider than `max_panel`.
fn partition(a: f64, b: f64, max_panel: Option<f64>) -> Vec<(f64, f64)> {
    let n = match max_panel {
        Some(w) if w > 0.0 && w.is_finite() => ((b - a) / w).ceil().max(1.0) as usize,
        _ => 1,
    };
    let h = (b - a) / n as f64;
    (0..n)
        .map(|k| {
            let lo = a + k as f64 * h;
            let hi = if k + 1 == n { b } else { a + (k + 1) as f64 * h };
            (lo, hi)
        })
        .collect()
}

fn integrate_panels<T, F>(
    f: &F,
    a: f64,
    b: f64,
    max_panel: Option<f64>,
    settings: &QuadSettings,
) -> Result<QuadResult<T>, QuadError>
where
    T: QuadValue,
    F: Fn(f64) -> T + ?Sized,
{
    settings.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(QuadError::InvalidInterval { a, b });
    }
    let panels = partition(a, b, max_panel)
        .into_iter()
        .map(|(lo, hi)| gk15(f, lo, hi))
        .collect::<Result<Vec<_>, _>>()?;
    refine_panels(f, panels, settings)
}

/// `∫_a^b f(x) dx` by adaptive bisection.
pub fn integrate_finite<T, F>(f: F, a: f64, b: f64, settings: &QuadSettings) -> Result<QuadResult<T>, QuadError>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    integrate_panels(&f, a, b, None, settings)
}

/// `∫_a^b f(x) dx` where `f` oscillates at angular frequency up to
/// `frequency`; panels start no wider than `π / |frequency|`.
pub fn integrate_oscillatory_finite<T, F>(
    f: F,
    frequency: f64,
    a: f64,
    b: f64,
    settings: &QuadSettings,
) -> Result<QuadResult<T>, QuadError>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    integrate_panels(&f, a, b, oscillation_panel(frequency), settings)
}

fn oscillation_panel(frequency: f64) -> Option<f64> {
    (frequency != 0.0).then(|| PI / frequency.abs())
}

/// Largest `|f|` over a few points just inside the truncation point; a single
/// sample could land on a node of an oscillating integrand.
fn envelope_at<T, F>(f: &F, cutoff: f64, decay_scale: f64, max_panel: Option<f64>) -> Result<f64, QuadError>
where
    T: QuadValue,
    F: Fn(f64) -> T + ?Sized,
{
    let span = max_panel.map_or(0.25 * decay_scale, |w| w.min(0.25 * decay_scale));
    let mut peak: f64 = 0.0;
    for k in 0..5 {
        let x = cutoff - span * k as f64 / 4.0;
        let y = f(x);
        if !y.is_finite_value() {
            return Err(QuadError::NonFinite { at: x });
        }
        peak = peak.max(y.magnitude());
    }
    Ok(peak)
}

const MAX_TAIL_EXTENSIONS: usize = 8;

fn semi_infinite<T, F>(
    f: &F,
    decay_scale: f64,
    max_panel: Option<f64>,
    settings: &QuadSettings,
) -> Result<QuadResult<T>, QuadError>
where
    T: QuadValue,
    F: Fn(f64) -> T + ?Sized,
{
    settings.validate()?;
    if !(decay_scale > 0.0) || !decay_scale.is_finite() {
        return Err(QuadError::InvalidInterval {
            a: 0.0,
            b: decay_scale,
        });
    }
    let mut cutoff = settings.tail_cutoff_factor * decay_scale;
    let mut acc = integrate_panels(f, 0.0, cutoff, max_panel, settings)?;
    let mut extensions = 0;
    loop {
        let edge = envelope_at(f, cutoff, decay_scale, max_panel)?;
        acc.evaluations += 5;
        // Exponential tail with the stated decay scale beyond the cutoff.
        let tail = edge * decay_scale;
        if tail <= settings.tolerance_for(acc.value.magnitude()) {
            acc.error_estimate += tail;
            return Ok(acc);
        }
        if extensions == MAX_TAIL_EXTENSIONS {
            return Err(QuadError::TailNotDecayed {
                cutoff,
                magnitude: edge,
            });
        }
        let next = 2.0 * cutoff;
        let more = integrate_panels(f, cutoff, next, max_panel, settings)?;
        acc.value += more.value;
        acc.error_estimate += more.error_estimate;
        acc.evaluations += more.evaluations;
        cutoff = next;
        extensions += 1;
    }
}

/// `∫₀^∞ f(x) dx` for an integrand decaying on the scale `decay_scale`.
///
/// The domain is truncated at `tail_cutoff_factor · decay_scale`; if the
/// integrand is still significant there the cutoff is doubled a bounded
/// number of times. The exponential tail bound `|f(L)| · decay_scale` is
/// added to the error estimate.
pub fn integrate_semi_infinite<T, F>(f: F, decay_scale: f64, settings: &QuadSettings) -> Result<QuadResult<T>, QuadError>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    semi_infinite(&f, decay_scale, None, settings)
}

/// As [`integrate_semi_infinite`] for an integrand that carries its own
/// oscillation at angular frequency `frequency`.
pub fn integrate_oscillatory_semi_infinite<T, F>(
    f: F,
    frequency: f64,
    decay_scale: f64,
    settings: &QuadSettings,
) -> Result<QuadResult<T>, QuadError>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    semi_infinite(&f, decay_scale, oscillation_panel(frequency), settings)
}

/// One-sided Fourier transform `∫₀^∞ e^{iωτ} f(τ) dτ`.
///
/// At `omega == 0` this is exactly [`integrate_semi_infinite`].
pub fn fourier_half_transform<F>(
    f: F,
    omega: f64,
    decay_scale: f64,
    settings: &QuadSettings,
) -> Result<QuadResult<Complex64>, QuadError>
where
    F: Fn(f64) -> Complex64,
{
    if omega == 0.0 {
        return semi_infinite(&f, decay_scale, None, settings);
    }
    let g = |t: f64| Complex64::from_polar(1.0, omega * t) * f(t);
    semi_infinite(&g, decay_scale, oscillation_panel(omega), settings)
}

/// `∫_a^b e^{iωτ} f(τ) dτ` on a finite window.
pub fn fourier_finite_transform<F>(
    f: F,
    omega: f64,
    a: f64,
    b: f64,
    settings: &QuadSettings,
) -> Result<QuadResult<Complex64>, QuadError>
where
    F: Fn(f64) -> Complex64,
{
    if omega == 0.0 {
        return integrate_panels(&f, a, b, None, settings);
    }
    let g = |t: f64| Complex64::from_polar(1.0, omega * t) * f(t);
    integrate_panels(&g, a, b, oscillation_panel(omega), settings)
}
