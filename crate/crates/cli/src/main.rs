//! `pvcsd` — estimate PVUSA plant parameters from generated power alone,
//! issue day-ahead/hour-ahead forecasts, and evaluate them.
//!
//! Exit codes are a stable contract for scripting:
//!   0  success
//!   1  input or configuration error (bad flags, unreadable/invalid files)
//!   2  numerical failure (singular update, non-positive-definite covariance)

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod svg;

use commands::{EstimateArgs, EvaluateArgs, ForecastArgs, SimulateArgs, SweepArgs};

#[derive(Parser)]
#[command(
    name = "pvcsd",
    version,
    about = "PV plant parameter estimation and power forecasting from generated power alone",
    after_help = "Config resolution: --config beats the PVCSD_CONFIG environment variable; \
                  flag values beat config-file values, which beat built-in defaults."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run clear-sky screening + recursive estimation over a power dataset
    Estimate {
        /// Input dataset CSV (timestamp, p_m_kw, t_c, optional channels)
        #[arg(long)]
        dataset: PathBuf,
        /// TOML config with [site] and [plant] (or set PVCSD_CONFIG)
        #[arg(long)]
        config: Option<PathBuf>,
        /// Attenuation threshold separating clear from cloudy peaks
        #[arg(long)]
        beta0: Option<f64>,
        /// Seed window length in samples
        #[arg(long)]
        l_min: Option<usize>,
        /// RLS forgetting factor in (0, 1]
        #[arg(long)]
        forgetting: Option<f64>,
        /// Directory for trajectory.csv, detection_log.csv, estimate.svg
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Issue forecasts from a saved parameter trajectory
    Forecast {
        /// Dataset CSV supplying the time grid, weather channels, and
        /// (for the persistence baseline) measured power
        #[arg(long)]
        dataset: PathBuf,
        /// Parameter trajectory CSV from `estimate`
        #[arg(long)]
        trajectory: PathBuf,
        /// Forecast kind: da, ha, cs, or odnp
        #[arg(long)]
        kind: String,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output file (default: <out-dir>/forecast_<kind>.csv)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Score a forecast file against measured power
    Evaluate {
        /// Forecast CSV from `forecast`
        #[arg(long)]
        forecast: PathBuf,
        /// Dataset CSV with the measured power
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// First day (1-based) included in the evaluation
        #[arg(long, default_value_t = 28)]
        start_day: usize,
        /// Directory for metrics.csv, daily_rmse.csv, evaluate.svg
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Generate a synthetic plant dataset from a [scenario] config
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the scenario seed
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for dataset_truth.csv, dataset_observed.csv,
        /// scenario_days.csv
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Re-run the estimator across a beta0 grid and tabulate selectivity
    SweepBeta0 {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Inclusive grid as start:end:step
        #[arg(long, default_value = "0.40:0.95:0.05")]
        grid: String,
        /// First day (1-based) for the per-day statistics and forecast score
        #[arg(long, default_value_t = 28)]
        start_day: usize,
        /// Directory for sweep.csv and sweep.svg
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

fn dispatch(cli: Cli) -> pvcsd::Result<()> {
    match cli.cmd {
        Command::Estimate {
            dataset,
            config,
            beta0,
            l_min,
            forgetting,
            out_dir,
        } => commands::cmd_estimate(EstimateArgs {
            dataset,
            config,
            beta0,
            l_min,
            forgetting,
            out_dir,
        }),
        Command::Forecast {
            dataset,
            trajectory,
            kind,
            config,
            out,
            out_dir,
        } => commands::cmd_forecast(ForecastArgs {
            dataset,
            trajectory,
            kind,
            config,
            out,
            out_dir,
        }),
        Command::Evaluate {
            forecast,
            dataset,
            config,
            start_day,
            out_dir,
        } => commands::cmd_evaluate(EvaluateArgs {
            forecast,
            dataset,
            config,
            start_day,
            out_dir,
        }),
        Command::Simulate {
            config,
            seed,
            out_dir,
        } => commands::cmd_simulate(SimulateArgs {
            config,
            seed,
            out_dir,
        }),
        Command::SweepBeta0 {
            dataset,
            config,
            grid,
            start_day,
            out_dir,
        } => commands::cmd_sweep_beta0(SweepArgs {
            dataset,
            config,
            grid,
            start_day,
            out_dir,
        }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                pvcsd::Error::Numerical(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
