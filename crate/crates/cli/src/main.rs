use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dephase::runner::{
    compare_reports, run_preset, run_scenario, run_sweep_to, worker_count, Preset, RunReport,
    ScenarioConfig,
};
use dephase::Error;

/// Exit status when a declared tolerance fails.
const TOLERANCE_FAILURE: u8 = 2;

#[derive(Parser)]
#[command(name = "dephase", version, about = "Pure-dephasing decoherence scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its curve CSV and report.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Also propagate the full density matrix.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Reproduce a figure's curves.
    Preset {
        #[arg(value_parser = ["fig1", "fig2", "fig4"])]
        name: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Evaluate every point of the config's sweep grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads; overrides DEPHASE_JOBS.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print the characteristic times as JSON.
    Times {
        #[arg(long)]
        config: PathBuf,
    },
    /// Tabulate reports and fail when a tolerance is exceeded.
    Compare {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        /// Tolerance in percent, replacing the declared ones.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Emit CSV instead of a table.
        #[arg(long)]
        csv: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Simulate { config, oracle, out } => {
            let mut config = ScenarioConfig::from_path(&config)?;
            config.outputs.include_oracle |= oracle;
            let report = run_scenario(&config, &out)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(caption_status(std::slice::from_ref(&report)))
        }
        Command::Preset { name, out } => {
            let reports = run_preset(name.parse::<Preset>()?, &out)?;
            let comparison = compare_reports(&reports, None);
            print!("{}", comparison.to_text());
            Ok(if comparison.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(TOLERANCE_FAILURE) })
        }
        Command::Sweep { config, jobs, out } => {
            let config = ScenarioConfig::from_path(&config)?;
            let (reports, path) = run_sweep_to(&config, worker_count(jobs)?, &out)?;
            let failed = reports.iter().filter(|r| r.error.is_some()).count();
            println!("{} points, {failed} failed, summary in {}", reports.len(), path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Times { config } => {
            let config = ScenarioConfig::from_path(&config)?;
            let resolved = config.resolve()?;
            let times = dephase::CharacteristicTimes::compute(&resolved.model, &resolved.system, &resolved.reservoir)?;
            let couplings = resolved.model.couplings();
            let recurrence = match couplings.windows(2).all(|w| w[0] == w[1]) {
                true => dephase::recurrence_time(resolved.model.g(), couplings[0], resolved.model.hbar(), 1)?.time(),
                false => None,
            };
            let out = serde_json::json!({
                "t_D": times.t_d,
                "t_R": times.t_r,
                "tau_R": times.tau_r,
                "t_r": recurrence,
                "Hs": times.hilbert_size,
                "lambda_ref": resolved.lambda_ref,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { reports, tolerance, csv } => {
            let reports = reports
                .iter()
                .map(|p| RunReport::from_path(p))
                .collect::<Result<Vec<_>, _>>()?;
            let comparison = compare_reports(&reports, tolerance.map(|pct| pct / 100.0));
            if csv {
                print!("{}", comparison.to_csv());
            } else {
                print!("{}", comparison.to_text());
            }
            Ok(if comparison.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(TOLERANCE_FAILURE) })
        }
    }
}

fn caption_status(reports: &[RunReport]) -> ExitCode {
    if reports.iter().any(|r| r.caption.as_ref().is_some_and(|c| !c.pass)) {
        ExitCode::from(TOLERANCE_FAILURE)
    } else {
        ExitCode::SUCCESS
    }
}
