use thiserror::Error;

use crate::quadrature::QuadError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("integral `{integral}` failed: {source}")]
    Integral {
        integral: &'static str,
        #[source]
        source: QuadError,
    },
    #[error("tau = {tau} ns lies outside the correlation table [0, {tau_max}] ns")]
    TableRange { tau: f64, tau_max: f64 },
    #[error("phonon correlation has not decayed by tau = {tau} ns")]
    TableNotDecayed { tau: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("expected {expected} peak clusters, found {found}")]
    PeakCountMismatch { expected: usize, found: usize },
    #[error("at T = {temperature} K: {source}")]
    AtTemperature {
        temperature: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True when the failure came from numerics rather than from bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Integral { .. } | Error::TableNotDecayed { .. } | Error::TableRange { .. } => true,
            Error::AtTemperature { source, .. } => source.is_numerical(),
            Error::InvalidParameter(_) | Error::PeakCountMismatch { .. } => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) trait IntegralContext<T> {
    fn integral(self, name: &'static str) -> Result<T>;
}

impl<T> IntegralContext<T> for std::result::Result<T, QuadError> {
    fn integral(self, name: &'static str) -> Result<T> {
        self.map_err(|source| Error::Integral { integral: name, source })
    }
}
