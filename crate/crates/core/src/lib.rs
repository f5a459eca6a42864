//! Resonance fluorescence of a quantum dot driven by one or two fields, with
//! phonon damping from a super-ohmic acoustic bath.
//!
//! Angular frequencies are in rad/ns, times in ns, temperatures in K.

pub mod cli;
pub mod damping_rates;
pub mod dressed_spectrum;
pub mod error;
pub mod phonon_bath;
pub mod quadrature;
pub mod spectra_engine;
pub mod units;

pub use error::{Error, Result};
