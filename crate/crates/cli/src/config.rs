//! Run configuration: TOML file, then command-line overrides, then defaults.
//!
//! ```toml
//! [signal]
//! dc_offset = 0.0
//! [[signal.tones]]
//! amplitude = 1.0
//! frequency_hz = 50.0
//! phase_rad = 0.0
//!
//! [sampling]
//! sample_rate_hz = 10240.0
//! interval_s = 0.0201      # or num_samples = 205
//!
//! [adc]
//! bits = 12
//! v_min = -1.0
//! v_max = 1.0
//! transfer = "bipolar"
//!
//! [run]
//! noise = "real"           # or "sign-model"
//! out = "out"
//! formats = ["csv", "svg"]
//! tolerance = 1e-9
//! ```

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use qnoise_core::quantizer::{AdcConfig, Transfer};
use qnoise_core::signalgen::{num_samples_for_interval, SamplingSpec, SignalSpec, ToneSpec};
use serde::Deserialize;

use crate::error::{CliError, Result};

pub const DEFAULT_FREQUENCY_HZ: f64 = 50.0;
pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 10240.0;
pub const DEFAULT_INTERVAL_S: f64 = 0.0201;
pub const DEFAULT_BITS: u32 = 12;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseSource {
    /// Ideal mid-tread quantizer.
    Real,
    /// Extreme-value noise, ±q/2 following the sign of the signal.
    SignModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TransferArg {
    Bipolar,
    Unipolar,
}

impl From<TransferArg> for Transfer {
    fn from(t: TransferArg) -> Self {
        match t {
            TransferArg::Bipolar => Transfer::Bipolar,
            TransferArg::Unipolar => Transfer::Unipolar,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Svg,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub csv: bool,
    pub svg: bool,
}

/// Fully resolved configuration for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub signal: SignalSpec,
    pub sampling: SamplingSpec,
    pub adc: AdcConfig,
    pub noise: NoiseSource,
    pub output: OutputSpec,
    pub tolerance: f64,
}

impl RunConfig {
    /// The paper-style default: 50 Hz unit sine, 10240 Hz, 0.0201 s, 12 bits.
    pub fn defaults() -> Result<Self> {
        FileConfig::default().resolve(&Overrides::default())
    }

    pub fn from_sources(path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let file = match path {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        file.resolve(overrides)
    }

    /// First tone; configs always hold at least one.
    pub fn fundamental(&self) -> &ToneSpec {
        &self.signal.tones[0]
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub signal: SignalSection,
    #[serde(default)]
    pub sampling: SamplingSection,
    #[serde(default)]
    pub adc: AdcSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSection {
    pub dc_offset: Option<f64>,
    #[serde(default)]
    pub tones: Vec<ToneSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToneSection {
    pub amplitude: Option<f64>,
    pub frequency_hz: Option<f64>,
    pub phase_rad: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSection {
    pub sample_rate_hz: Option<f64>,
    pub interval_s: Option<f64>,
    pub num_samples: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdcSection {
    pub bits: Option<u32>,
    pub v_min: Option<f64>,
    pub v_max: Option<f64>,
    pub transfer: Option<TransferArg>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub noise: Option<NoiseSource>,
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<Format>>,
    pub tolerance: Option<f64>,
}

/// Command-line flags shared by every subcommand. Flags win over the file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML configuration file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// ADC resolution in bits.
    #[arg(long)]
    pub bits: Option<u32>,
    /// Sample rate in Hz.
    #[arg(long)]
    pub fs: Option<f64>,
    /// Frequency of the first tone in Hz.
    #[arg(long)]
    pub freq: Option<f64>,
    /// Amplitude of the first tone.
    #[arg(long)]
    pub amp: Option<f64>,
    /// Initial phase of the first tone in radians.
    #[arg(long, allow_hyphen_values = true)]
    pub phase: Option<f64>,
    /// Measurement interval in seconds.
    #[arg(long)]
    pub interval: Option<f64>,
    /// Number of samples (takes precedence over --interval).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    pub transfer: Option<TransferArg>,
    #[arg(long, value_enum)]
    pub noise: Option<NoiseSource>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Output formats, comma separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub format: Option<Vec<Format>>,
    /// Maximum allowed deviation for compare and sweep.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn resolve(&self, flags: &Overrides) -> Result<RunConfig> {
        let mut tones: Vec<ToneSpec> = self
            .signal
            .tones
            .iter()
            .map(|t| ToneSpec {
                amplitude: t.amplitude.unwrap_or(1.0),
                frequency_hz: t.frequency_hz.unwrap_or(DEFAULT_FREQUENCY_HZ),
                phase_rad: t.phase_rad.unwrap_or(0.0),
            })
            .collect();
        if tones.is_empty() {
            tones.push(ToneSpec {
                amplitude: 1.0,
                frequency_hz: DEFAULT_FREQUENCY_HZ,
                phase_rad: 0.0,
            });
        }
        let first = &mut tones[0];
        if let Some(a) = flags.amp {
            first.amplitude = a;
        }
        if let Some(f) = flags.freq {
            first.frequency_hz = f;
        }
        if let Some(p) = flags.phase {
            first.phase_rad = p;
        }
        let signal = SignalSpec::new(tones, self.signal.dc_offset.unwrap_or(0.0))?;

        let fs = flags
            .fs
            .or(self.sampling.sample_rate_hz)
            .unwrap_or(DEFAULT_SAMPLE_RATE_HZ);
        let num_samples = match (flags.n, flags.interval) {
            (Some(n), _) => n,
            (None, Some(t)) => num_samples_for_interval(fs, t)?,
            (None, None) => match (self.sampling.num_samples, self.sampling.interval_s) {
                (Some(n), _) => n,
                (None, t) => num_samples_for_interval(fs, t.unwrap_or(DEFAULT_INTERVAL_S))?,
            },
        };
        let sampling = SamplingSpec::new(fs, num_samples)?;

        let adc = AdcConfig::new(
            flags.bits.or(self.adc.bits).unwrap_or(DEFAULT_BITS),
            self.adc.v_min.unwrap_or(-1.0),
            self.adc.v_max.unwrap_or(1.0),
            flags
                .transfer
                .or(self.adc.transfer)
                .unwrap_or(TransferArg::Bipolar)
                .into(),
        )?;

        let formats = flags
            .format
            .clone()
            .or_else(|| self.run.formats.clone())
            .unwrap_or_else(|| vec![Format::Csv]);
        let output = OutputSpec {
            dir: flags
                .out
                .clone()
                .or_else(|| self.run.out.clone())
                .unwrap_or_else(|| PathBuf::from("out")),
            csv: formats.contains(&Format::Csv),
            svg: formats.contains(&Format::Svg),
        };

        let tolerance = flags
            .tolerance
            .or(self.run.tolerance)
            .unwrap_or(DEFAULT_TOLERANCE);
        if !(tolerance.is_finite() && tolerance >= 0.0) {
            return Err(CliError::Config(format!(
                "invalid parameter `tolerance`: {tolerance} must be finite and >= 0"
            )));
        }

        Ok(RunConfig {
            signal,
            sampling,
            adc,
            noise: flags.noise.or(self.run.noise).unwrap_or(NoiseSource::Real),
            output,
            tolerance,
        })
    }
}
