use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use uavsim_cli::commands::{cmd_detection_compare, cmd_distance_curve, cmd_run, cmd_validate, CurveArgs, RunArgs};
use uavsim_cli::format::sig6;
use uavsim_cli::CliError;

/// Drone-to-ground 60 GHz uncompressed video link simulator.
#[derive(Debug, Parser)]
#[command(name = "uavsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario and write summary.json and steps.csv.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Use this MCS table instead of the one named in the scenario.
        #[arg(long)]
        mcs_table: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Sample detections per delivered frame (needs --seed).
        #[arg(long, requires = "seed")]
        monte_carlo: bool,
        /// Override the channel sample interval (s).
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Maximum range for each antenna gain and target SNR.
    DistanceCurve {
        /// Sweep file with the link template and optional default range.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Comma-separated gains (dBi), applied at both ends.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        gains: Option<Vec<f64>>,
        #[arg(long, allow_hyphen_values = true)]
        snr_start: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        snr_stop: Option<f64>,
        #[arg(long)]
        snr_step: Option<f64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Write distance_curve.csv here instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expected face detections under each camera of a scene.
    DetectionCompare {
        #[arg(long)]
        scenario: PathBuf,
        /// Also draw one Monte Carlo frame per camera.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a scenario or MCS table without running it.
    Validate {
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        mcs_table: Option<PathBuf>,
        #[arg(long)]
        dt: Option<f64>,
    },
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run { scenario, mcs_table, out, seed, monte_carlo, dt } => {
            let summary = cmd_run(&RunArgs { scenario, mcs_table, out: out.clone(), seed, monte_carlo, dt })?;
            println!(
                "{}: generated {} delivered {} dropped {} goodput {} bit/s -> {}",
                summary.scenario,
                summary.frames_generated,
                summary.frames_delivered,
                summary.frames_dropped,
                sig6(summary.goodput_bps),
                out.display()
            );
        }
        Command::DistanceCurve { scenario, gains, snr_start, snr_stop, snr_step, jobs, out } => {
            let output = cmd_distance_curve(&CurveArgs {
                scenario,
                gains,
                snr_start,
                snr_stop,
                snr_step,
                jobs,
                out: out.clone(),
            })?;
            if out.is_none() {
                print!("{}", output.csv);
            }
        }
        Command::DetectionCompare { scenario, seed, out } => {
            let output = cmd_detection_compare(&scenario, seed, out.as_deref())?;
            if out.is_none() {
                print!("{}", output.csv);
            }
        }
        Command::Validate { scenario, mcs_table, dt } => {
            println!("{}", cmd_validate(scenario.as_deref(), mcs_table.as_deref(), dt)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors count as validation failures; --help and --version succeed.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
