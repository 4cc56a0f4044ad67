use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qnoise_cli::commands::{cmd_compare, cmd_simulate, cmd_spectrum, cmd_sweep, SweepParam};
use qnoise_cli::config::Overrides;
use qnoise_cli::{CliError, RunConfig};

#[derive(Parser)]
#[command(
    name = "qnoise",
    version,
    about = "ADC quantization noise in DFT amplitude and phase spectra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time-domain trace of input, ADC output and quantization error.
    Simulate(Overrides),
    /// Amplitude and phase spectra of the error and of the ADC output.
    Spectrum(Overrides),
    /// Sign-model simulation against the closed-form spectral errors.
    Compare(Overrides),
    /// Repeat `compare` over a list of bit depths or record lengths.
    Sweep {
        #[command(flatten)]
        flags: Overrides,
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Comma-separated parameter values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<u64>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let load = |flags: &Overrides| RunConfig::from_sources(flags.config.as_deref(), flags);
    match cli.command {
        Command::Simulate(flags) => {
            let trace = cmd_simulate(&load(&flags)?)?;
            println!("{} samples, {} clipped", trace.len(), trace.clipped_count);
        }
        Command::Spectrum(flags) => {
            let tables = cmd_spectrum(&load(&flags)?)?;
            println!("{} bins", tables.error.len());
        }
        Command::Compare(flags) => {
            let cfg = load(&flags)?;
            let outcome = cmd_compare(&cfg);
            if let Ok(cmp) = &outcome {
                println!(
                    "max amplitude deviation {:e}, max phase deviation {:e}",
                    cmp.max_amplitude_dev(),
                    cmp.max_phase_dev()
                );
            }
            outcome?;
        }
        Command::Sweep {
            flags,
            param,
            values,
        } => {
            let points = cmd_sweep(&load(&flags)?, param, &values)?;
            for p in &points {
                println!(
                    "{} = {}: max deviation {:e}",
                    param.name(),
                    p.value,
                    p.comparison.max_abs_dev()
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
