use thiserror::Error;

/// Errors raised by the signal, quantizer, spectral and error-model routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("tone at {frequency_hz} Hz is at or above the Nyquist frequency {nyquist_hz} Hz")]
    Aliasing { frequency_hz: f64, nyquist_hz: f64 },

    #[error("non-finite input sample {0}")]
    NonFinite(f64),

    #[error("bin {k} is outside the domain 1..{n} of the closed-form expression")]
    BinOutOfDomain { k: usize, n: usize },

    #[error("phase of bin {0} is undefined (zero-amplitude bin)")]
    UndefinedPhase(usize),

    #[error("closed-form expressions require {0}")]
    OutsideValidity(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
