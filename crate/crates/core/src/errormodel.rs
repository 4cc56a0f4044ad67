//! Closed-form quantization-noise bounds and the spectral error chain for a
//! coherently sampled sine under extreme-value ("sign-model") noise.
//!
//! The per-bin expressions hold for a record of exactly one period (`m = 1`)
//! of a zero-phase sine (`α = 0`) with an even sample count. They are
//! evaluated as written; trigonometric simplifications such as
//! `sin(π(N−1)/N) = sin(π/N)` are only used by the tests. Integer multiples of
//! `π` are reduced exactly before any sine or cosine is taken.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::spectral::{normalize_angle, phase_of};

/// Quantization-noise spectral density over the Nyquist band, `q/(2√3)`.
pub fn qnsd(q: f64) -> Result<f64> {
    check_step(q)?;
    Ok(q / (2.0 * 3f64.sqrt()))
}

/// Worst-case relative amplitude error when the whole quantization-noise
/// power lands in one bin: `√2·q/√12 = q/√6`, relative to a unit amplitude.
pub fn qnp_worst_case(q: f64) -> Result<f64> {
    check_step(q)?;
    Ok(q / 6f64.sqrt())
}

fn check_step(q: f64) -> Result<()> {
    if q.is_finite() && q > 0.0 {
        Ok(())
    } else {
        Err(invalid("q", "must be finite and > 0"))
    }
}

/// Parameters of the analytic model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticContext {
    /// Quantization step.
    pub q: f64,
    /// Samples per record, `N`.
    pub num_samples: usize,
    /// Fundamental amplitude `X_m`.
    pub amplitude: f64,
    /// Initial phase `α`.
    pub phase_rad: f64,
    /// Signal periods in the record, `m`.
    pub periods: u64,
}

impl AnalyticContext {
    pub fn new(
        q: f64,
        num_samples: usize,
        amplitude: f64,
        phase_rad: f64,
        periods: u64,
    ) -> Result<Self> {
        check_step(q)?;
        if num_samples < 2 {
            return Err(invalid("num_samples", "must be >= 2"));
        }
        if !(amplitude.is_finite() && amplitude > 0.0) {
            return Err(invalid("amplitude", "must be finite and > 0"));
        }
        if !phase_rad.is_finite() {
            return Err(invalid("phase_rad", "must be finite"));
        }
        if periods == 0 {
            return Err(invalid("periods", "must be >= 1"));
        }
        Ok(Self {
            q,
            num_samples,
            amplitude,
            phase_rad,
            periods,
        })
    }

    /// One period of a zero-phase sine: the case the closed forms cover.
    pub fn one_period(q: f64, num_samples: usize, amplitude: f64) -> Result<Self> {
        Self::new(q, num_samples, amplitude, 0.0, 1)
    }

    /// First violated validity condition, if any.
    pub fn violation(&self) -> Option<&'static str> {
        if self.periods != 1 {
            Some("exactly one signal period in the record (m = 1)")
        } else if self.phase_rad != 0.0 {
            Some("zero initial phase (alpha = 0)")
        } else if !self.num_samples.is_multiple_of(2) {
            Some("an even number of samples per period")
        } else {
            None
        }
    }

    pub fn is_valid(&self) -> bool {
        self.violation().is_none()
    }

    fn require_valid(&self) -> Result<()> {
        match self.violation() {
            Some(cond) => Err(Error::OutsideValidity(cond)),
            None => Ok(()),
        }
    }

    fn require_bin(&self, k: usize) -> Result<()> {
        if k == 0 || k >= self.num_samples {
            Err(Error::BinOutOfDomain {
                k,
                n: self.num_samples,
            })
        } else {
            Ok(())
        }
    }

    fn n(&self) -> f64 {
        self.num_samples as f64
    }

    /// `π·k(N−1)/N`, reduced modulo `2π` in integer arithmetic.
    fn harmonic_angle(&self, k: usize) -> f64 {
        let n = self.num_samples as u128;
        let turns = (k as u128 * (n - 1)) % (2 * n);
        PI * turns as f64 / self.n()
    }

    /// `2q / (N·sin(kπ/N))`.
    fn bin_gain(&self, k: usize) -> f64 {
        2.0 * self.q / (self.n() * (k as f64 * PI / self.n()).sin())
    }
}

/// `sin(kπ/2)` evaluated exactly.
fn sin_half_pi_multiple(k: usize) -> f64 {
    match k % 4 {
        1 => 1.0,
        3 => -1.0,
        _ => 0.0,
    }
}

/// Spectrum of the sign-model noise:
/// `ΔX[k] = 2q·sin²(kπ/2) / (N·sin(kπ/N)) · (sin(πk(N−1)/N) + j·cos(πk(N−1)/N))`.
pub fn sign_model_spectrum(ctx: &AnalyticContext, k: usize) -> Result<Complex64> {
    ctx.require_valid()?;
    ctx.require_bin(k)?;
    let s = sin_half_pi_multiple(k);
    let magnitude = ctx.bin_gain(k) * s * s;
    let (sin_a, cos_a) = ctx.harmonic_angle(k).sin_cos();
    Ok(Complex64::new(magnitude * sin_a, magnitude * cos_a))
}

/// Spectrum of the input sine: `X_m(sin α − j·cos α)` at `k = 1`, zero elsewhere.
pub fn sine_spectrum(ctx: &AnalyticContext, k: usize) -> Result<Complex64> {
    if ctx.periods != 1 {
        return Err(Error::OutsideValidity(
            "exactly one signal period in the record (m = 1)",
        ));
    }
    if k != 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (sin_a, cos_a) = ctx.phase_rad.sin_cos();
    Ok(Complex64::new(
        ctx.amplitude * sin_a,
        -ctx.amplitude * cos_a,
    ))
}

/// Output-signal bin `Y[k] = X[k] + ΔX[k]`, the exact complex sum of the two
/// closed forms.
pub fn output_spectrum(ctx: &AnalyticContext, k: usize) -> Result<Complex64> {
    Ok(sine_spectrum(ctx, k)? + sign_model_spectrum(ctx, k)?)
}

/// First-order output amplitude:
/// `X_m − 2q·cos(π(N−1)/N) / (N·sin(π/N))` at `k = 1`,
/// `2q·sin²(kπ/2) / (N·sin(kπ/N))` elsewhere.
pub fn combined_amplitude(ctx: &AnalyticContext, k: usize) -> Result<f64> {
    ctx.require_valid()?;
    ctx.require_bin(k)?;
    if k == 1 {
        let cos_a = ctx.harmonic_angle(1).cos();
        Ok(ctx.amplitude - ctx.bin_gain(1) * cos_a)
    } else {
        let s = sin_half_pi_multiple(k);
        Ok(ctx.bin_gain(k) * s * s)
    }
}

/// Amplitude error relative to `X_m`:
/// `−2q·cos(π(N−1)/N) / (N·X_m·sin(π/N))` at `k = 1`,
/// `2q·sin²(kπ/2) / (N·X_m·sin(kπ/N))` elsewhere.
pub fn amplitude_rel_error(ctx: &AnalyticContext, k: usize) -> Result<f64> {
    ctx.require_valid()?;
    ctx.require_bin(k)?;
    if k == 1 {
        let cos_a = ctx.harmonic_angle(1).cos();
        Ok(-ctx.bin_gain(1) * cos_a / ctx.amplitude)
    } else {
        let s = sin_half_pi_multiple(k);
        Ok(ctx.bin_gain(k) * s * s / ctx.amplitude)
    }
}

/// Exact fundamental phase,
/// `arccot((X_m·cos(−π/2) + c·sin(π(N−1)/N)) / (X_m·sin(−π/2) + c·cos(π(N−1)/N)))`
/// with `c = 2q/(N·sin(π/N))`, taken as a four-quadrant angle whose real part
/// is the numerator and imaginary part the denominator.
pub fn phase_fundamental_exact(ctx: &AnalyticContext) -> Result<f64> {
    ctx.require_valid()?;
    let c = ctx.bin_gain(1);
    let (sin_a, cos_a) = ctx.harmonic_angle(1).sin_cos();
    let re = ctx.amplitude * (-FRAC_PI_2).cos() + c * sin_a;
    let im = ctx.amplitude * (-FRAC_PI_2).sin() + c * cos_a;
    Ok(phase_of(Complex64::new(re, im)))
}

/// Linearised fundamental phase, `−π/2 + Δφ`.
pub fn phase_fundamental(ctx: &AnalyticContext) -> Result<f64> {
    Ok(-FRAC_PI_2 + phase_error_fundamental(ctx)?)
}

/// Fundamental phase error `2q·sin(π(N−1)/N) / (X_m·N·sin(π/N))`.
pub fn phase_error_fundamental(ctx: &AnalyticContext) -> Result<f64> {
    ctx.require_valid()?;
    let sin_a = ctx.harmonic_angle(1).sin();
    let sin_b = (PI / ctx.n()).sin();
    Ok(2.0 * ctx.q * sin_a / (ctx.amplitude * ctx.n() * sin_b))
}

/// Phase of an odd harmonic of the sign-model noise, `−π/2 − πk(N−1)/N`.
///
/// That expression fixes the angle modulo `π` (it comes from an `arccot`);
/// the branch returned is the one in the quadrant of
/// `(Re, Im) ∝ (sin(πk(N−1)/N), cos(πk(N−1)/N))`, normalised to `(−π, π]`.
pub fn phase_harmonics(ctx: &AnalyticContext, k: usize) -> Result<f64> {
    ctx.require_valid()?;
    ctx.require_bin(k)?;
    if k == 1 {
        return Err(invalid(
            "k",
            "the fundamental is handled by phase_fundamental",
        ));
    }
    if k.is_multiple_of(2) {
        return Err(Error::UndefinedPhase(k));
    }
    let a = ctx.harmonic_angle(k);
    let printed = -FRAC_PI_2 - a;
    // Projection of the unit phasor at `θ` onto (sin a, cos a) is sin(θ + a).
    let branch = if (printed + a).sin() >= 0.0 {
        printed
    } else {
        printed + PI
    };
    Ok(normalize_angle(branch))
}

/// Analytic prediction for one bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumErrorPrediction {
    pub k: usize,
    pub amplitude_abs: f64,
    pub amplitude_rel_error: f64,
    /// `None` for bins with zero amplitude.
    pub phase_rad: Option<f64>,
    pub phase_abs_error: Option<f64>,
}

pub fn predict(ctx: &AnalyticContext, k: usize) -> Result<SpectrumErrorPrediction> {
    let amplitude_abs = combined_amplitude(ctx, k)?;
    let amplitude_rel_error = amplitude_rel_error(ctx, k)?;
    let (phase_rad, phase_abs_error) = if k == 1 {
        (
            Some(phase_fundamental(ctx)?),
            Some(phase_error_fundamental(ctx)?),
        )
    } else if k % 2 == 1 {
        let p = phase_harmonics(ctx, k)?;
        (Some(p), Some(p))
    } else {
        (None, None)
    };
    Ok(SpectrumErrorPrediction {
        k,
        amplitude_abs,
        amplitude_rel_error,
        phase_rad,
        phase_abs_error,
    })
}
