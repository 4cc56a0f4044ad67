//! Thresholded proxies for the qualitative claims about error traces and spectra.
//!
//! These are measurement conventions of this tool, not derived results:
//! "periodic" means a normalized autocorrelation near one at the period lag,
//! "uniform" means no bin stands far above the median, and "zero even
//! harmonics" means a large dB margin to the neighbouring odd harmonics.

/// Normalized autocorrelation of `x` at `lag` over the overlapping part,
/// `Σ x[n]x[n+lag] / sqrt(Σ x[n]² · Σ x[n+lag]²)`.
///
/// `None` when the overlap is empty or carries no energy.
pub fn normalized_autocorrelation(x: &[f64], lag: usize) -> Option<f64> {
    if lag >= x.len() {
        return None;
    }
    let (head, tail) = (&x[..x.len() - lag], &x[lag..]);
    let cross: f64 = head.iter().zip(tail).map(|(a, b)| a * b).sum();
    let ea: f64 = head.iter().map(|a| a * a).sum();
    let eb: f64 = tail.iter().map(|b| b * b).sum();
    let denom = (ea * eb).sqrt();
    (denom > 0.0).then(|| cross / denom)
}

/// `max / median` of the amplitudes over `bins`.
pub fn peak_to_median(amplitudes: &[f64], bins: std::ops::RangeInclusive<usize>) -> f64 {
    let mut band: Vec<f64> = amplitudes[bins].to_vec();
    band.sort_by(f64::total_cmp);
    let peak = band.last().copied().unwrap_or(0.0);
    let median = if band.len() % 2 == 1 {
        band[band.len() / 2]
    } else {
        0.5 * (band[band.len() / 2 - 1] + band[band.len() / 2])
    };
    peak / median
}

/// Smallest margin, in dB, by which each even harmonic sits below the weaker
/// of its two neighbouring odd harmonics.
///
/// Harmonic `h` lives in bin `h·periods`; harmonics whose upper neighbour
/// passes `N/2` are skipped. Returns `None` when no even harmonic qualifies.
pub fn even_harmonic_margin_db(amplitudes: &[f64], periods: usize) -> Option<f64> {
    let half = amplitudes.len() / 2;
    (2..)
        .step_by(2)
        .take_while(|h| (h + 1) * periods <= half)
        .map(|h| {
            let even = amplitudes[h * periods];
            let odd = amplitudes[(h - 1) * periods].min(amplitudes[(h + 1) * periods]);
            if even == 0.0 {
                f64::INFINITY
            } else {
                20.0 * (odd / even).log10()
            }
        })
        .reduce(f64::min)
}
