//! Ideal mid-tread ADC and quantization-error sequences.
//!
//! The converter maps an input `x` to the code `D(x) = round((x − offset)/q)`
//! (ties away from zero), clamped to the representable code range. The error
//! referred to the input is `Δx_q = D(x)·q + offset − x`, which stays inside
//! `[−q/2, q/2]` for every sample that does not touch a rail.

use crate::error::{invalid, Error, Result};
use crate::signalgen::SampledSignal;

/// Transfer polarity of the converter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transfer {
    /// Signed codes `[−2^(B−1), 2^(B−1) − 1]`, zero input maps to code 0.
    Bipolar,
    /// Codes `[0, 2^B − 1]`, code 0 sits at `v_min`.
    Unipolar,
}

/// Polarity of the signal being measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalPolarity {
    Bipolar,
    Unipolar,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdcConfig {
    pub bits: u32,
    pub v_min: f64,
    pub v_max: f64,
    pub transfer: Transfer,
}

impl AdcConfig {
    pub fn new(bits: u32, v_min: f64, v_max: f64, transfer: Transfer) -> Result<Self> {
        let cfg = Self {
            bits,
            v_min,
            v_max,
            transfer,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Bipolar converter over `[−1, 1)`, so `q = 2^(1−B)`.
    pub fn bipolar_unit(bits: u32) -> Result<Self> {
        Self::new(bits, -1.0, 1.0, Transfer::Bipolar)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=32).contains(&self.bits) {
            return Err(invalid("bits", format!("{} not in 2..=32", self.bits)));
        }
        if !(self.v_min.is_finite() && self.v_max.is_finite()) {
            return Err(invalid("v_min/v_max", "must be finite"));
        }
        if self.v_max <= self.v_min {
            return Err(invalid("v_max", "must exceed v_min"));
        }
        if self.step().is_nan() || self.step() <= 0.0 {
            return Err(invalid(
                "v_max",
                "full-scale range too small for the bit depth",
            ));
        }
        Ok(())
    }

    /// Quantization step (one LSB).
    pub fn step(&self) -> f64 {
        (self.v_max - self.v_min) / 2f64.powi(self.bits as i32)
    }

    pub fn offset(&self) -> f64 {
        match self.transfer {
            Transfer::Bipolar => 0.0,
            Transfer::Unipolar => self.v_min,
        }
    }

    pub fn code_range(&self) -> (i64, i64) {
        match self.transfer {
            Transfer::Bipolar => {
                let half = 1i64 << (self.bits - 1);
                (-half, half - 1)
            }
            Transfer::Unipolar => (0, (1i64 << self.bits) - 1),
        }
    }

    /// Open interval of inputs that never clip; its end points round onto
    /// the first code outside the range.
    pub fn unclipped_range(&self) -> (f64, f64) {
        let (lo, hi) = self.code_range();
        let q = self.step();
        (
            self.offset() + (lo as f64 - 0.5) * q,
            self.offset() + (hi as f64 + 0.5) * q,
        )
    }

    fn code_and_clip(&self, x: f64) -> Result<(i64, bool)> {
        if !x.is_finite() {
            return Err(Error::NonFinite(x));
        }
        let (lo, hi) = self.code_range();
        let raw = ((x - self.offset()) / self.step()).round();
        if raw < lo as f64 {
            Ok((lo, true))
        } else if raw > hi as f64 {
            Ok((hi, true))
        } else {
            Ok((raw as i64, false))
        }
    }

    pub fn reconstruct(&self, code: i64) -> f64 {
        code as f64 * self.step() + self.offset()
    }
}

/// Digital code `D(x)` for a single input.
pub fn code(x: f64, cfg: &AdcConfig) -> Result<i64> {
    cfg.validate()?;
    cfg.code_and_clip(x).map(|(c, _)| c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedRecord {
    pub codes: Vec<i64>,
    /// ADC output referred to its input, `y[n]`.
    pub reconstructed: Vec<f64>,
    /// `Δx_q[n] = y[n] − x[n]`.
    pub error: Vec<f64>,
    /// Samples clamped at either rail.
    pub clipped_count: usize,
}

impl QuantizedRecord {
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

pub fn quantize(signal: &SampledSignal, cfg: &AdcConfig) -> Result<QuantizedRecord> {
    cfg.validate()?;
    if signal.is_empty() {
        return Err(invalid("signal", "must not be empty"));
    }
    let n = signal.len();
    let mut record = QuantizedRecord {
        codes: Vec::with_capacity(n),
        reconstructed: Vec::with_capacity(n),
        error: Vec::with_capacity(n),
        clipped_count: 0,
    };
    for &x in &signal.samples {
        let (c, clipped) = cfg.code_and_clip(x)?;
        let y = cfg.reconstruct(c);
        record.codes.push(c);
        record.reconstructed.push(y);
        record.error.push(y - x);
        record.clipped_count += usize::from(clipped);
    }
    Ok(record)
}

/// How the sign model treats samples that are numerically zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroSampleRule {
    /// A zero sample takes the sign of the next nonzero sample, i.e. the sign
    /// the signal has just after the crossing. Falls back to `+q/2` when no
    /// nonzero sample follows. With this rule the noise of a one-period sine
    /// is `+q/2` on the first half-record and `−q/2` on the second, which is
    /// the sequence whose spectrum the closed-form sign-model expression gives.
    #[default]
    FollowSignal,
    /// `x ≥ 0 → +q/2` applied to the stored value as is.
    NonNegativeIsPositive,
}

/// Samples with `|x| ≤ ZERO_REL_TOL · max|x|` count as zero crossings.
pub const ZERO_REL_TOL: f64 = 1e-12;

/// Extreme-value ("sign-model") quantization noise: `+q/2` where the signal is
/// nonnegative, `−q/2` where it is negative.
pub fn sign_model_noise(signal: &SampledSignal, q: f64) -> Result<Vec<f64>> {
    sign_model_noise_with(signal, q, ZeroSampleRule::default())
}

pub fn sign_model_noise_with(
    signal: &SampledSignal,
    q: f64,
    rule: ZeroSampleRule,
) -> Result<Vec<f64>> {
    if !(q.is_finite() && q > 0.0) {
        return Err(invalid("q", "must be finite and > 0"));
    }
    let half = 0.5 * q;
    let xs = &signal.samples;
    let out = match rule {
        ZeroSampleRule::NonNegativeIsPositive => xs
            .iter()
            .map(|&x| if x >= 0.0 { half } else { -half })
            .collect(),
        ZeroSampleRule::FollowSignal => {
            let peak = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let zero_tol = ZERO_REL_TOL * peak;
            let is_zero = |x: f64| x.abs() <= zero_tol;
            let mut out = vec![half; xs.len()];
            // Walk backwards so each zero run inherits the sign that follows
            // it; a trailing run keeps +q/2.
            let mut following = half;
            for (n, &x) in xs.iter().enumerate().rev() {
                if !is_zero(x) {
                    following = if x > 0.0 { half } else { -half };
                }
                out[n] = following;
            }
            out
        }
    };
    Ok(out)
}

/// Effective resolution when a signal of the given polarity is measured.
///
/// A bipolar signal on a unipolar converter only uses half of the codes, one
/// bit fewer.
pub fn effective_bits(cfg: &AdcConfig, signal_polarity: SignalPolarity) -> f64 {
    match (cfg.transfer, signal_polarity) {
        (Transfer::Unipolar, SignalPolarity::Bipolar) => f64::from(cfg.bits) - 1.0,
        _ => f64::from(cfg.bits),
    }
}
