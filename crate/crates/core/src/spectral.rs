//! DFT with the `2/N` amplitude scaling, plus amplitude and phase spectra.
//!
//! `bins[k] = (2/N) Σ x[n]·e^{−j2πnk/N}`. A sine of amplitude `A` that fits
//! the record an integer number of times shows up with `|bins[k]| = A`. The
//! same factor is applied to every bin, so the DC bin (and the Nyquist bin
//! for even `N`) read twice the corresponding time-domain level: a constant
//! `c` gives `bins[0] = 2c`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::signalgen::SampledSignal;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub bins: Vec<Complex64>,
    pub sample_rate_hz: f64,
    pub num_samples: usize,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// Frequency of bin `k`, `k·fs/N`.
    pub fn frequency(&self, k: usize) -> f64 {
        k as f64 * self.sample_rate_hz / self.num_samples as f64
    }

    pub fn max_magnitude(&self) -> f64 {
        self.bins.iter().fold(0.0f64, |m, b| m.max(b.norm()))
    }
}

/// `e^{−j2πm/N}` for `m in 0..N`.
fn twiddles(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|m| {
            let (s, c) = (2.0 * PI * m as f64 / n as f64).sin_cos();
            Complex64::new(c, -s)
        })
        .collect()
}

/// Direct O(N²) summation for any record length.
///
/// The exponent index `n·k` is reduced modulo `N` before the table lookup and
/// every bin sums in increasing `n`, so the result is deterministic.
pub fn dft(signal: &SampledSignal) -> Spectrum {
    let xs = &signal.samples;
    let n = xs.len();
    let table = twiddles(n);
    let scale = 2.0 / n as f64;
    let bins = (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut idx = 0usize;
            for &x in xs {
                acc += table[idx] * x;
                idx += k;
                if idx >= n {
                    idx -= n;
                }
            }
            acc * scale
        })
        .collect();
    Spectrum {
        bins,
        sample_rate_hz: signal.sample_rate_hz,
        num_samples: n,
    }
}

/// Same transform through a planned FFT.
pub fn dft_fast(signal: &SampledSignal) -> Spectrum {
    let n = signal.len();
    let mut buffer: Vec<Complex64> = signal
        .samples
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .collect();
    if n > 0 {
        FftPlanner::new().plan_fft_forward(n).process(&mut buffer);
    }
    let scale = 2.0 / n as f64;
    buffer.iter_mut().for_each(|b| *b *= scale);
    Spectrum {
        bins: buffer,
        sample_rate_hz: signal.sample_rate_hz,
        num_samples: n,
    }
}

/// Inverse of [`dft`], returning the real part. Used to check the transform.
pub fn inverse_dft(sp: &Spectrum) -> SampledSignal {
    let n = sp.bins.len();
    let table = twiddles(n);
    let samples = (0..n)
        .map(|t| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut idx = 0usize;
            for b in &sp.bins {
                acc += b * table[idx].conj();
                idx += t;
                if idx >= n {
                    idx -= n;
                }
            }
            0.5 * acc.re
        })
        .collect();
    SampledSignal::new(samples, sp.sample_rate_hz)
}

pub fn amplitude_spectrum(sp: &Spectrum) -> Vec<f64> {
    sp.bins.iter().map(|b| b.norm()).collect()
}

/// Maps an angle into `(−π, π]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Four-quadrant phase of one complex value, in `(−π, π]`.
///
/// This is the `arccot(Re/Im)` angle with its branch chosen by the signs of
/// both components, so `−j` reads `−π/2`.
pub fn phase_of(z: Complex64) -> f64 {
    let theta = z.im.atan2(z.re);
    if theta <= -PI {
        PI
    } else {
        theta
    }
}

/// `1e3·ε·max|bins|`: bins below this carry no meaningful phase.
pub fn default_amplitude_floor(sp: &Spectrum) -> f64 {
    1e3 * f64::EPSILON * sp.max_magnitude()
}

/// Per-bin phase; `None` marks bins whose magnitude is below `amplitude_floor`.
pub fn phase_spectrum(sp: &Spectrum, amplitude_floor: f64) -> Vec<Option<f64>> {
    sp.bins
        .iter()
        .map(|&b| (b.norm() >= amplitude_floor).then(|| phase_of(b)))
        .collect()
}
