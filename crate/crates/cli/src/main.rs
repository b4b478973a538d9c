//! Command-line front end wiring the analysis pipeline: signal synthesis or
//! ingestion, transform, ridge extraction, track export and model fitting,
//! with plot-ready tabular outputs.
//!
//! Exit codes: 0 success (including empty results), 1 usage error, 2 I/O or
//! parse error, 3 numerical failure.

mod commands;
mod config;
mod util;

use clap::Parser;

use config::CommonOpts;

#[derive(Debug, Parser)]
#[command(name = "ridgeline", version, about = "Wavelet ridge analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Debug, clap::Subcommand)]
enum Command {
    /// Tabulate a mother wavelet, its envelope, spectrum and derived constants
    Wavelet(commands::WaveletArgs),
    /// Generate a synthetic test signal
    Synth(commands::SynthArgs),
    /// Compute the continuous wavelet transform of a signal
    Transform(commands::TransformArgs),
    /// Extract ridges and component tracks from a transform grid
    Extract(commands::ExtractArgs),
    /// Compute the Fourier power spectrum of a signal
    Spectrum(commands::SpectrumArgs),
    /// Invert a transform grid back to a signal
    Reconstruct(commands::ReconstructArgs),
}

fn exit_code(err: &anyhow::Error) -> i32 {
    use ridgeline::Error;
    if let Some(e) = err.downcast_ref::<Error>() {
        return match e {
            Error::Io(_) | Error::Parse { .. } | Error::BadFormat(_) => 2,
            Error::Contract(_)
            | Error::InsufficientData(_)
            | Error::Numerical(_)
            | Error::ReconstructionCoverage(_) => 3,
        };
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        return 2;
    }
    // remaining anyhow messages come from argument/config validation
    1
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = config::resolve(&cli.common)?;
    match &cli.command {
        Command::Wavelet(args) => commands::cmd_wavelet(&cfg, args),
        Command::Synth(args) => commands::cmd_synth(&cfg, args),
        Command::Transform(args) => commands::cmd_transform(&cfg, args),
        Command::Extract(args) => commands::cmd_extract(&cfg, args),
        Command::Spectrum(args) => commands::cmd_spectrum(&cfg, args),
        Command::Reconstruct(args) => commands::cmd_reconstruct(&cfg, args),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            eprint!("{e}");
            std::process::exit(1);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(exit_code(&err));
    }
}
