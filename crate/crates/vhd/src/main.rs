use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vhd::app::{self, AppError};
use vhd::config::resolve;
use vhd_core::Target;

/// Zika vector-host model with larvivorous fish: simulation and analysis.
///
/// CONFIG is a scenario file or the name of a preset (see `vhd presets list`).
/// Output files go to $VHD_OUT_DIR, default ./out.
#[derive(Parser)]
#[command(name = "vhd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write its time series as CSV
    Simulate { config: String },
    /// Reproduction numbers, thresholds, equilibria and their stability
    Analyze { config: String },
    /// Normalized forward sensitivity indices
    Sensitivity {
        config: String,
        #[arg(long, value_parser = parse_target)]
        target: Target,
    },
    /// Built-in scenarios
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
    /// R0 with contact parameters factored out
    ReportFormulas {
        config: String,
        /// Comma-separated subset of a_v, c_vh, c_hv
        #[arg(long, default_value = "")]
        free: String,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    List,
    Show { name: String },
}

fn parse_target(s: &str) -> Result<Target, String> {
    Target::from_key(s).ok_or_else(|| format!("expected r0sq, o0 or o, got '{s}'"))
}

fn run(cli: Cli) -> Result<String, AppError> {
    let dir = app::out_dir();
    match cli.command {
        Command::Simulate { config } => app::simulate(&resolve(&config)?, &dir),
        Command::Analyze { config } => app::analyze(&resolve(&config)?, &dir),
        Command::Sensitivity { config, target } => app::sensitivity(&resolve(&config)?, target, &dir),
        Command::Presets { action } => match action {
            PresetAction::List => Ok(app::presets_list()),
            PresetAction::Show { name } => app::preset_show(&name),
        },
        Command::ReportFormulas { config, free } => app::formulas(&resolve(&config)?, &free),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
