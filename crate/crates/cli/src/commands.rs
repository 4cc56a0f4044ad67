//! The four subcommands. Each has a pure part that returns the computed tables
//! and a `cmd_*` wrapper that also writes the requested artifacts.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use clap::ValueEnum;
use qnoise_core::errormodel::{
    amplitude_rel_error, output_spectrum, phase_error_fundamental, phase_fundamental_exact,
    phase_harmonics, AnalyticContext,
};
use qnoise_core::quantizer::{quantize, sign_model_noise};
use qnoise_core::signalgen::{coherence_check, synthesize, SampledSignal, SamplingSpec};
use qnoise_core::spectral::{
    amplitude_spectrum, default_amplitude_floor, dft, normalize_angle, phase_spectrum,
};
use rayon::prelude::*;

use crate::config::{NoiseSource, OutputSpec, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{csv_text, num, opt_num, plot, write_atomic, PlotStyle, Series};

pub const SIMULATE_HEADER: [&str; 5] = ["n", "t_s", "x", "y", "err"];
pub const SPECTRUM_HEADER: [&str; 4] = ["k", "freq_hz", "amplitude", "phase_or_sentinel"];
pub const COMPARE_HEADER: [&str; 8] = [
    "k",
    "freq_hz",
    "simulated_amplitude",
    "analytic_amplitude",
    "amplitude_abs_dev",
    "simulated_phase",
    "analytic_phase",
    "phase_abs_dev",
];
pub const FIG3_HEADER: [&str; 6] = [
    "k",
    "freq_hz",
    "simulated_amplitude_rel_error",
    "analytic_amplitude_rel_error",
    "simulated_phase_error",
    "analytic_phase_error",
];
pub const SWEEP_HEADER: [&str; 10] = [
    "parameter",
    "value",
    "q",
    "num_samples",
    "sample_rate_hz",
    "simulated_amplitude_rel_error",
    "analytic_amplitude_rel_error",
    "simulated_phase_error",
    "analytic_phase_error",
    "max_abs_dev",
];

/// Input, ADC output referred to the input, and their difference.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeTrace {
    pub sample_rate_hz: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub err: Vec<f64>,
    pub clipped_count: usize,
}

impl TimeTrace {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

pub fn simulate(cfg: &RunConfig) -> Result<TimeTrace> {
    let x = synthesize(&cfg.signal, &cfg.sampling)?;
    let (y, err, clipped_count) = match cfg.noise {
        NoiseSource::Real => {
            let rec = quantize(&x, &cfg.adc)?;
            (rec.reconstructed, rec.error, rec.clipped_count)
        }
        NoiseSource::SignModel => {
            let noise = sign_model_noise(&x, cfg.adc.step())?;
            let y = x.samples.iter().zip(&noise).map(|(a, b)| a + b).collect();
            (y, noise, 0)
        }
    };
    Ok(TimeTrace {
        sample_rate_hz: x.sample_rate_hz,
        x: x.samples,
        y,
        err,
        clipped_count,
    })
}

pub fn simulate_csv(trace: &TimeTrace) -> String {
    let rows: Vec<Vec<String>> = (0..trace.len())
        .map(|n| {
            vec![
                n.to_string(),
                num(n as f64 / trace.sample_rate_hz),
                num(trace.x[n]),
                num(trace.y[n]),
                num(trace.err[n]),
            ]
        })
        .collect();
    csv_text(&SIMULATE_HEADER, &rows)
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<TimeTrace> {
    let trace = simulate(cfg)?;
    let out = &cfg.output;
    if out.csv {
        write_atomic(&out.dir.join("simulate.csv"), &simulate_csv(&trace))?;
    }
    if out.svg {
        let points = (0..trace.len())
            .map(|n| (n as f64 / trace.sample_rate_hz, trace.err[n]))
            .collect();
        let svg = plot(
            "Quantization error over time",
            "t, s",
            "error",
            &[Series {
                label: "err",
                points,
                style: PlotStyle::Line,
            }],
        );
        write_atomic(&out.dir.join("simulate_err.svg"), &svg)?;
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub k: usize,
    pub freq_hz: f64,
    pub amplitude: f64,
    pub phase: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTables {
    /// Spectrum of the quantization-error sequence.
    pub error: Vec<SpectrumRow>,
    /// Spectrum of the ADC output referred to its input.
    pub output: Vec<SpectrumRow>,
}

/// One-sided rows, `k = 0..=N/2`.
fn spectrum_rows(samples: &[f64], sample_rate_hz: f64) -> Vec<SpectrumRow> {
    let sp = dft(&SampledSignal::new(samples.to_vec(), sample_rate_hz));
    let amp = amplitude_spectrum(&sp);
    let phase = phase_spectrum(&sp, default_amplitude_floor(&sp));
    (0..=sp.num_samples / 2)
        .map(|k| SpectrumRow {
            k,
            freq_hz: sp.frequency(k),
            amplitude: amp[k],
            phase: phase[k],
        })
        .collect()
}

pub fn spectrum(cfg: &RunConfig) -> Result<SpectrumTables> {
    let trace = simulate(cfg)?;
    Ok(SpectrumTables {
        error: spectrum_rows(&trace.err, trace.sample_rate_hz),
        output: spectrum_rows(&trace.y, trace.sample_rate_hz),
    })
}

pub fn spectrum_csv(rows: &[SpectrumRow]) -> String {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.k.to_string(),
                num(r.freq_hz),
                num(r.amplitude),
                opt_num(r.phase),
            ]
        })
        .collect();
    csv_text(&SPECTRUM_HEADER, &rows)
}

fn spectrum_svg(title: &str, rows: &[SpectrumRow]) -> String {
    plot(
        title,
        "f, Hz",
        "amplitude",
        &[Series {
            label: "|Y[k]|",
            points: rows.iter().map(|r| (r.freq_hz, r.amplitude)).collect(),
            style: PlotStyle::Stem,
        }],
    )
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<SpectrumTables> {
    let tables = spectrum(cfg)?;
    let out = &cfg.output;
    if out.csv {
        write_atomic(
            &out.dir.join("spectrum_error.csv"),
            &spectrum_csv(&tables.error),
        )?;
        write_atomic(
            &out.dir.join("spectrum_output.csv"),
            &spectrum_csv(&tables.output),
        )?;
    }
    if out.svg {
        write_atomic(
            &out.dir.join("spectrum_error.svg"),
            &spectrum_svg("Quantization error spectrum", &tables.error),
        )?;
        write_atomic(
            &out.dir.join("spectrum_output.svg"),
            &spectrum_svg("ADC output spectrum", &tables.output),
        )?;
    }
    Ok(tables)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub k: usize,
    pub freq_hz: f64,
    pub simulated_amplitude: f64,
    pub analytic_amplitude: f64,
    pub amplitude_abs_dev: f64,
    pub simulated_phase: Option<f64>,
    pub analytic_phase: Option<f64>,
    /// Zero when both phases are undefined, infinite when only one is.
    pub phase_abs_dev: f64,
}

/// First-order spectral errors next to their simulated counterparts.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Row {
    pub k: usize,
    pub freq_hz: f64,
    pub simulated_amplitude_rel_error: f64,
    pub analytic_amplitude_rel_error: f64,
    pub simulated_phase_error: Option<f64>,
    pub analytic_phase_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorComparison {
    pub rows: Vec<ComparisonRow>,
    pub fig3: Vec<Fig3Row>,
}

impl ErrorComparison {
    pub fn max_amplitude_dev(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.amplitude_abs_dev)
            .fold(0.0, f64::max)
    }

    pub fn max_phase_dev(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.phase_abs_dev)
            .fold(0.0, f64::max)
    }

    pub fn max_abs_dev(&self) -> f64 {
        self.max_amplitude_dev().max(self.max_phase_dev())
    }

    pub fn fundamental(&self) -> &Fig3Row {
        &self.fig3[0]
    }
}

/// Analytic context for a run, or the first condition the run violates.
pub fn analytic_context(cfg: &RunConfig) -> Result<AnalyticContext> {
    let reject = |why: String| CliError::Config(format!("outside analytic validity: {why}"));
    if cfg.noise != NoiseSource::SignModel {
        return Err(reject(
            "compare requires the sign-model noise source (--noise sign-model)".into(),
        ));
    }
    if cfg.signal.tones.len() != 1 {
        return Err(reject(format!(
            "requires a single tone, got {}",
            cfg.signal.tones.len()
        )));
    }
    if cfg.signal.dc_offset != 0.0 {
        return Err(reject("requires dc_offset = 0".into()));
    }
    let tone = cfg.fundamental();
    let n = cfg.sampling.num_samples;
    let report = coherence_check(tone.frequency_hz, cfg.sampling.sample_rate_hz, n, 1e-9);
    if !report.samples_per_period_is_integer {
        return Err(reject(format!(
            "requires an integer number of samples per period, got {}",
            report.samples_per_period
        )));
    }
    let periods = report.whole_periods().ok_or_else(|| {
        reject(format!(
            "requires a whole number of periods in the record, got {}",
            report.periods_in_record
        ))
    })?;
    let ctx = AnalyticContext::new(cfg.adc.step(), n, tone.amplitude, tone.phase_rad, periods)?;
    match ctx.violation() {
        Some(cond) => Err(reject(format!("requires {cond}"))),
        None => Ok(ctx),
    }
}

/// Sign-model simulation against the closed forms, bins `1..=N/2`.
pub fn compare(cfg: &RunConfig) -> Result<ErrorComparison> {
    let ctx = analytic_context(cfg)?;
    let trace = simulate(cfg)?;
    let sp = dft(&SampledSignal::new(trace.y, trace.sample_rate_hz));
    let sim_amp = amplitude_spectrum(&sp);
    let sim_phase = phase_spectrum(&sp, default_amplitude_floor(&sp));
    let x_m = ctx.amplitude;

    let mut rows = Vec::with_capacity(ctx.num_samples / 2);
    let mut fig3 = Vec::with_capacity(ctx.num_samples / 2);
    for k in 1..=ctx.num_samples / 2 {
        let analytic_bin = output_spectrum(&ctx, k)?;
        let analytic_amplitude = analytic_bin.norm();
        let analytic_phase = match k {
            1 => Some(phase_fundamental_exact(&ctx)?),
            _ if k % 2 == 1 => Some(phase_harmonics(&ctx, k)?),
            _ => None,
        };
        let phase_abs_dev = match (sim_phase[k], analytic_phase) {
            (Some(s), Some(a)) => normalize_angle(s - a).abs(),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        };
        rows.push(ComparisonRow {
            k,
            freq_hz: sp.frequency(k),
            simulated_amplitude: sim_amp[k],
            analytic_amplitude,
            amplitude_abs_dev: (sim_amp[k] - analytic_amplitude).abs(),
            simulated_phase: sim_phase[k],
            analytic_phase,
            phase_abs_dev,
        });

        let input_amplitude = if k == 1 { x_m } else { 0.0 };
        let (simulated_phase_error, analytic_phase_error) = if k == 1 {
            (
                sim_phase[k].map(|p| normalize_angle(p + FRAC_PI_2)),
                Some(phase_error_fundamental(&ctx)?),
            )
        } else {
            (sim_phase[k], analytic_phase)
        };
        fig3.push(Fig3Row {
            k,
            freq_hz: sp.frequency(k),
            simulated_amplitude_rel_error: (sim_amp[k] - input_amplitude) / x_m,
            analytic_amplitude_rel_error: amplitude_rel_error(&ctx, k)?,
            simulated_phase_error,
            analytic_phase_error,
        });
    }
    Ok(ErrorComparison { rows, fig3 })
}

pub fn compare_csv(cmp: &ErrorComparison) -> String {
    let rows: Vec<Vec<String>> = cmp
        .rows
        .iter()
        .map(|r| {
            vec![
                r.k.to_string(),
                num(r.freq_hz),
                num(r.simulated_amplitude),
                num(r.analytic_amplitude),
                num(r.amplitude_abs_dev),
                opt_num(r.simulated_phase),
                opt_num(r.analytic_phase),
                num(r.phase_abs_dev),
            ]
        })
        .collect();
    csv_text(&COMPARE_HEADER, &rows)
}

pub fn fig3_csv(cmp: &ErrorComparison) -> String {
    let rows: Vec<Vec<String>> = cmp
        .fig3
        .iter()
        .map(|r| {
            vec![
                r.k.to_string(),
                num(r.freq_hz),
                num(r.simulated_amplitude_rel_error),
                num(r.analytic_amplitude_rel_error),
                opt_num(r.simulated_phase_error),
                opt_num(r.analytic_phase_error),
            ]
        })
        .collect();
    csv_text(&FIG3_HEADER, &rows)
}

fn write_comparison(cmp: &ErrorComparison, out: &OutputSpec, dir: &Path) -> Result<()> {
    if out.csv {
        write_atomic(&dir.join("compare.csv"), &compare_csv(cmp))?;
        write_atomic(&dir.join("fig3_errors.csv"), &fig3_csv(cmp))?;
    }
    if out.svg {
        let amp = |f: fn(&Fig3Row) -> f64| cmp.fig3.iter().map(|r| (r.k as f64, f(r))).collect();
        let svg = plot(
            "Amplitude spectrum error",
            "k",
            "relative error",
            &[
                Series {
                    label: "simulated",
                    points: amp(|r| r.simulated_amplitude_rel_error),
                    style: PlotStyle::Stem,
                },
                Series {
                    label: "analytic",
                    points: amp(|r| r.analytic_amplitude_rel_error),
                    style: PlotStyle::Line,
                },
            ],
        );
        write_atomic(&dir.join("fig3a_amplitude_error.svg"), &svg)?;

        let phase = |f: fn(&Fig3Row) -> Option<f64>| {
            cmp.fig3
                .iter()
                .filter_map(|r| f(r).map(|p| (r.k as f64, p)))
                .collect()
        };
        let svg = plot(
            "Phase spectrum error",
            "k",
            "rad",
            &[
                Series {
                    label: "simulated",
                    points: phase(|r| r.simulated_phase_error),
                    style: PlotStyle::Stem,
                },
                Series {
                    label: "analytic",
                    points: phase(|r| r.analytic_phase_error),
                    style: PlotStyle::Line,
                },
            ],
        );
        write_atomic(&dir.join("fig3b_phase_error.svg"), &svg)?;
    }
    Ok(())
}

fn check_tolerance(max_dev: f64, tolerance: f64) -> Result<()> {
    if max_dev > tolerance {
        Err(CliError::Tolerance { max_dev, tolerance })
    } else {
        Ok(())
    }
}

/// Writes the comparison, then fails with [`CliError::Tolerance`] when the
/// largest deviation exceeds `cfg.tolerance`.
pub fn cmd_compare(cfg: &RunConfig) -> Result<ErrorComparison> {
    let cmp = compare(cfg)?;
    write_comparison(&cmp, &cfg.output, &cfg.output.dir)?;
    check_tolerance(cmp.max_abs_dev(), cfg.tolerance)?;
    Ok(cmp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Bits,
    NSamples,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Bits => "bits",
            SweepParam::NSamples => "n_samples",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: u64,
    pub config: RunConfig,
    pub comparison: ErrorComparison,
}

/// Config for one sweep point. Sweeping the sample count keeps exactly one
/// period in the record by moving the sample rate to `N·f`.
pub fn sweep_config(base: &RunConfig, param: SweepParam, value: u64) -> Result<RunConfig> {
    let named = |e: CliError| CliError::Config(format!("sweep value {value}: {e}"));
    let mut cfg = base.clone();
    match param {
        SweepParam::Bits => {
            cfg.adc.bits = u32::try_from(value).unwrap_or(u32::MAX);
            cfg.adc.validate().map_err(|e| named(e.into()))?;
        }
        SweepParam::NSamples => {
            let n = usize::try_from(value).unwrap_or(usize::MAX);
            let fs = n as f64 * cfg.fundamental().frequency_hz;
            cfg.sampling = SamplingSpec::new(fs, n).map_err(|e| named(e.into()))?;
        }
    }
    cfg.output.dir = base.output.dir.join(format!("{}_{value}", param.name()));
    analytic_context(&cfg).map_err(named)?;
    Ok(cfg)
}

pub fn sweep(base: &RunConfig, param: SweepParam, values: &[u64]) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        return Err(CliError::Config("sweep needs at least one value".into()));
    }
    let configs = values
        .iter()
        .map(|&v| sweep_config(base, param, v).map(|c| (v, c)))
        .collect::<Result<Vec<_>>>()?;
    configs
        .into_par_iter()
        .map(|(value, config)| {
            let comparison = compare(&config)?;
            write_comparison(&comparison, &config.output, &config.output.dir)?;
            Ok(SweepPoint {
                value,
                config,
                comparison,
            })
        })
        .collect()
}

pub fn sweep_csv(param: SweepParam, points: &[SweepPoint]) -> String {
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            let f = p.comparison.fundamental();
            vec![
                param.name().to_string(),
                p.value.to_string(),
                num(p.config.adc.step()),
                p.config.sampling.num_samples.to_string(),
                num(p.config.sampling.sample_rate_hz),
                num(f.simulated_amplitude_rel_error),
                num(f.analytic_amplitude_rel_error),
                opt_num(f.simulated_phase_error),
                opt_num(f.analytic_phase_error),
                num(p.comparison.max_abs_dev()),
            ]
        })
        .collect();
    csv_text(&SWEEP_HEADER, &rows)
}

pub fn cmd_sweep(base: &RunConfig, param: SweepParam, values: &[u64]) -> Result<Vec<SweepPoint>> {
    let points = sweep(base, param, values)?;
    if base.output.csv {
        write_atomic(
            &base.output.dir.join("sweep_summary.csv"),
            &sweep_csv(param, &points),
        )?;
    }
    let worst = points
        .iter()
        .map(|p| p.comparison.max_abs_dev())
        .fold(0.0, f64::max);
    check_tolerance(worst, base.tolerance)?;
    Ok(points)
}
