use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use raman_vortex::interferometry::CarrierHint;
use raman_vortex_cli::commands::{self, Report};
use raman_vortex_cli::{CliError, RunConfig};

#[derive(Parser)]
#[command(name = "raman-vortex", version, about = "Raman sideband vortex simulator")]
struct Cli {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Noise seed (overrides `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override one configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the sideband ladder with wavelengths, frequencies and charges.
    Comb,
    /// Simulate the sideband-order interferogram panel and read every charge.
    Figure3,
    /// Chirped-pulse beat signal and comb waveform.
    Pulse,
    /// Read the topological charge from an interferogram image.
    Analyze {
        image: PathBuf,
        /// Side of the spectrum holding the +K lobe: +x, -x, +y or -y.
        #[arg(long, value_parser = parse_hint)]
        carrier_hint: Option<CarrierHint>,
    },
}

fn parse_hint(s: &str) -> Result<CarrierHint, String> {
    s.parse().map_err(|e: raman_vortex::Error| e.to_string())
}

fn emit(report: &Report) {
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    print!("{}", report.stdout);
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut overrides = cli.set;
    if let Some(out) = &cli.out {
        overrides.push(format!("output_dir={}", out.display()));
    }
    if let Some(seed) = cli.seed {
        overrides.push(format!("seed={seed}"));
    }
    let cfg = RunConfig::load(cli.config.as_deref(), &overrides)?;
    match cli.command {
        Command::Comb => emit(&commands::comb(&cfg)?),
        Command::Figure3 => {
            let fig = commands::figure3(&cfg)?;
            emit(&fig.report);
            if fig.all_failed() {
                return Err(CliError::Failed("every order failed".into()));
            }
        }
        Command::Pulse => emit(&commands::pulse(&cfg)?.report),
        Command::Analyze {
            image,
            carrier_hint,
        } => emit(&commands::analyze(&image, carrier_hint)?.report),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
