//! Ideal ADC quantization and its effect on DFT amplitude and phase spectra.
//!
//! - [`signalgen`]: sine and polyharmonic test signals, sampling coherence.
//! - [`quantizer`]: mid-tread ADC, real and sign-model quantization error.
//! - [`spectral`]: `2/N`-scaled DFT, amplitude and phase spectra.
//! - [`errormodel`]: closed-form noise bounds and per-bin spectral errors.

pub mod error;
pub mod errormodel;
pub mod quantizer;
pub mod signalgen;
pub mod spectral;

pub use error::{Error, Result};
