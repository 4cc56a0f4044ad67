//! Test-signal synthesis and sampling-coherence classification.
//!
//! Signals are sums of sines, `x[n] = dc + Σ A·sin(2π·f·n/fs + φ)`. The sine
//! convention puts the fundamental bin of a zero-phase tone at `−π/2`.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// One sinusoidal component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToneSpec {
    pub amplitude: f64,
    pub frequency_hz: f64,
    pub phase_rad: f64,
}

impl ToneSpec {
    pub fn new(amplitude: f64, frequency_hz: f64, phase_rad: f64) -> Result<Self> {
        let tone = Self {
            amplitude,
            frequency_hz,
            phase_rad,
        };
        tone.validate()?;
        Ok(tone)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(invalid("amplitude", "must be finite and >= 0"));
        }
        if !(self.frequency_hz.is_finite() && self.frequency_hz > 0.0) {
            return Err(invalid("frequency_hz", "must be finite and > 0"));
        }
        if !self.phase_rad.is_finite() {
            return Err(invalid("phase_rad", "must be finite"));
        }
        Ok(())
    }
}

/// A sinusoidal or polyharmonic input signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec {
    pub tones: Vec<ToneSpec>,
    pub dc_offset: f64,
}

impl SignalSpec {
    pub fn new(tones: Vec<ToneSpec>, dc_offset: f64) -> Result<Self> {
        let spec = Self { tones, dc_offset };
        spec.validate()?;
        Ok(spec)
    }

    pub fn single(tone: ToneSpec) -> Self {
        Self {
            tones: vec![tone],
            dc_offset: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tones.is_empty() {
            return Err(invalid("tones", "at least one tone is required"));
        }
        if !self.dc_offset.is_finite() {
            return Err(invalid("dc_offset", "must be finite"));
        }
        self.tones.iter().try_for_each(ToneSpec::validate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingSpec {
    pub sample_rate_hz: f64,
    pub num_samples: usize,
}

impl SamplingSpec {
    pub fn new(sample_rate_hz: f64, num_samples: usize) -> Result<Self> {
        let spec = Self {
            sample_rate_hz,
            num_samples,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(invalid("sample_rate_hz", "must be finite and > 0"));
        }
        if self.num_samples < 2 {
            return Err(invalid("num_samples", "must be >= 2"));
        }
        Ok(())
    }

    pub fn nyquist_hz(&self) -> f64 {
        self.sample_rate_hz / 2.0
    }
}

/// Uniformly sampled real sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub samples: Vec<f64>,
    pub sample_rate_hz: f64,
}

impl SampledSignal {
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64) -> Self {
        Self {
            samples,
            sample_rate_hz,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time stamp of sample `n` in seconds.
    pub fn time(&self, n: usize) -> f64 {
        n as f64 / self.sample_rate_hz
    }
}

/// Samples `spec` on the grid described by `sampling`.
///
/// The cycle count `f·n/fs` is reduced modulo one period with an exact
/// floating-point remainder before the sine is evaluated, so coherent records
/// repeat bit-for-bit and zero crossings land on exact table points.
pub fn synthesize(spec: &SignalSpec, sampling: &SamplingSpec) -> Result<SampledSignal> {
    spec.validate()?;
    sampling.validate()?;
    let fs = sampling.sample_rate_hz;
    let nyquist = sampling.nyquist_hz();
    if let Some(tone) = spec.tones.iter().find(|t| t.frequency_hz >= nyquist) {
        return Err(Error::Aliasing {
            frequency_hz: tone.frequency_hz,
            nyquist_hz: nyquist,
        });
    }

    let samples = (0..sampling.num_samples)
        .map(|n| {
            spec.tones.iter().fold(spec.dc_offset, |acc, tone| {
                let cycles = (tone.frequency_hz * n as f64) % fs / fs;
                acc + tone.amplitude * (2.0 * PI * cycles + tone.phase_rad).sin()
            })
        })
        .collect();
    Ok(SampledSignal::new(samples, fs))
}

/// Number of samples covering `interval_s` at `sample_rate_hz`.
///
/// Rounds down, except that a product within `1e-9` (relative, floored at an
/// absolute `1e-9`) of an integer snaps to that integer; `10000 × 0.0201`
/// evaluates to `200.99999999999997` and must yield 201.
pub fn num_samples_for_interval(sample_rate_hz: f64, interval_s: f64) -> Result<usize> {
    if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
        return Err(invalid("sample_rate_hz", "must be finite and > 0"));
    }
    if !(interval_s.is_finite() && interval_s > 0.0) {
        return Err(invalid("interval_s", "must be finite and > 0"));
    }
    let product = sample_rate_hz * interval_s;
    let nearest = product.round();
    let count = if (product - nearest).abs() <= 1e-9 * product.max(1.0) {
        nearest
    } else {
        product.floor()
    };
    if count < 2.0 {
        return Err(invalid(
            "interval_s",
            format!("covers {count} samples at {sample_rate_hz} Hz, need at least 2"),
        ));
    }
    Ok(count as usize)
}

/// Relationship between a tone and the sampling grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceReport {
    /// `fs / f`.
    pub samples_per_period: f64,
    pub samples_per_period_is_integer: bool,
    /// `N·f / fs`.
    pub periods_in_record: f64,
    pub periods_in_record_is_integer: bool,
}

impl CoherenceReport {
    /// Both integer tests hold: the record is periodic and sampling repeats
    /// on the same phase grid every period.
    pub fn is_coherent(&self) -> bool {
        self.samples_per_period_is_integer && self.periods_in_record_is_integer
    }

    /// Rounded period count, when the record holds an integer number of periods.
    pub fn whole_periods(&self) -> Option<u64> {
        self.periods_in_record_is_integer
            .then(|| self.periods_in_record.round() as u64)
    }
}

fn near_integer(value: f64, tol: f64) -> bool {
    (value - value.round()).abs() <= tol
}

pub fn coherence_check(
    signal_freq_hz: f64,
    sample_rate_hz: f64,
    num_samples: usize,
    tol: f64,
) -> CoherenceReport {
    let samples_per_period = sample_rate_hz / signal_freq_hz;
    let periods_in_record = num_samples as f64 * signal_freq_hz / sample_rate_hz;
    CoherenceReport {
        samples_per_period,
        samples_per_period_is_integer: near_integer(samples_per_period, tol),
        periods_in_record,
        periods_in_record_is_integer: near_integer(periods_in_record, tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_tone(freq: f64, phase: f64) -> SignalSpec {
        SignalSpec::single(ToneSpec::new(1.0, freq, phase).unwrap())
    }

    #[test]
    fn sine_identity_points() {
        let s = synthesize(
            &unit_tone(50.0, 0.0),
            &SamplingSpec::new(10000.0, 200).unwrap(),
        )
        .unwrap();
        assert_eq!(s.len(), 200);
        assert_eq!(s.samples[0], 0.0);
        assert_eq!(s.samples[50], 1.0);
        assert!(s.samples[100].abs() < 1e-12);
    }

    #[test]
    fn incoherent_record_length() {
        let n = num_samples_for_interval(10240.0, 0.0201).unwrap();
        assert_eq!(n, 205);
        let s = synthesize(
            &unit_tone(50.0, 0.0),
            &SamplingSpec::new(10240.0, n).unwrap(),
        )
        .unwrap();
        assert_eq!(s.len(), 205);
        assert_eq!(s.sample_rate_hz, 10240.0);
    }

    #[test]
    fn two_tones_add() {
        let sampling = SamplingSpec::new(10000.0, 300).unwrap();
        let a = ToneSpec::new(0.7, 50.0, 0.3).unwrap();
        let b = ToneSpec::new(0.2, 730.0, -1.1).unwrap();
        let both = synthesize(&SignalSpec::new(vec![a, b], 0.0).unwrap(), &sampling).unwrap();
        let sa = synthesize(&SignalSpec::single(a), &sampling).unwrap();
        let sb = synthesize(&SignalSpec::single(b), &sampling).unwrap();
        for n in 0..300 {
            assert!((both.samples[n] - (sa.samples[n] + sb.samples[n])).abs() < 1e-12);
        }
    }

    #[test]
    fn nyquist_is_rejected() {
        let sampling = SamplingSpec::new(100.0, 10).unwrap();
        let err = synthesize(&unit_tone(50.0, 0.0), &sampling).unwrap_err();
        assert!(matches!(err, Error::Aliasing { .. }));
        assert!(synthesize(&unit_tone(49.9, 0.0), &sampling).is_ok());
    }

    #[test]
    fn invalid_specs() {
        assert!(ToneSpec::new(-1.0, 50.0, 0.0).is_err());
        assert!(ToneSpec::new(1.0, 0.0, 0.0).is_err());
        assert!(SignalSpec::new(vec![], 0.0).is_err());
        assert!(SamplingSpec::new(1000.0, 1).is_err());
        assert!(SamplingSpec::new(0.0, 10).is_err());
    }

    #[test]
    fn interval_rounding() {
        assert_eq!(num_samples_for_interval(10000.0, 0.0201).unwrap(), 201);
        assert_eq!(num_samples_for_interval(10000.0, 0.02).unwrap(), 200);
        assert!(num_samples_for_interval(10.0, 0.15).is_err());
        assert!(num_samples_for_interval(-1.0, 0.1).is_err());
    }

    #[test]
    fn coherence_examples() {
        let b = coherence_check(50.0, 10000.0, 200, 1e-9);
        assert_eq!(b.samples_per_period, 200.0);
        assert!(b.samples_per_period_is_integer && b.periods_in_record_is_integer);
        assert_eq!(b.whole_periods(), Some(1));

        let a = coherence_check(50.0, 10240.0, 205, 1e-9);
        assert!((a.samples_per_period - 204.8).abs() < 1e-12);
        assert!(!a.samples_per_period_is_integer);

        let c = coherence_check(50.0, 10000.0, 201, 1e-9);
        assert!(c.samples_per_period_is_integer);
        assert!((c.periods_in_record - 1.005).abs() < 1e-12);
        assert!(!c.periods_in_record_is_integer);
        assert!(!c.is_coherent());
    }
}
