use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use nfdm::framing::SystemConfig;
use nfdm::harness::{demo_causality, optimum_csv, run_experiment, run_selftest, ExperimentConfig};

#[derive(Parser)]
#[command(name = "nfdm", version, about = "NFDM fiber-link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a power / burst-length sweep and write CSV results.
    Run {
        /// Experiment configuration file.
        config: PathBuf,
        /// Override a configuration key, e.g. `--set run.seed=3`.
        #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
        overrides: Vec<String>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Write the 8-versus-6 symbol inverse-NFT causality example.
    CausalityDemo {
        /// Output CSV file.
        #[arg(long, default_value = "causality.csv")]
        out: PathBuf,
        /// Launch power (dBm) of the symbols.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        power_dbm: f64,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match dispatch(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<bool> {
    match command {
        Command::Run { config, overrides, out } => {
            let cfg = ExperimentConfig::from_file(&config, &overrides)?;
            let output = run_experiment(&cfg)?;
            output.write(&out).with_context(|| format!("writing results to {}", out.display()))?;
            print!("{}", optimum_csv(&output.summary));
            Ok(true)
        }
        Command::CausalityDemo { out, power_dbm } => {
            let cfg = SystemConfig { power_dbm, ..SystemConfig::desk_scale() };
            let demo = demo_causality(&cfg)?;
            std::fs::write(&out, demo.to_csv()).with_context(|| format!("writing {}", out.display()))?;
            println!("boundary -t6 = {:.2} T_s", demo.boundary);
            println!("max relative deviation after boundary:  {:.3e}", demo.deviation_after);
            println!("max relative deviation before boundary: {:.3e}", demo.deviation_before);
            Ok(true)
        }
        Command::Selftest => {
            let results = run_selftest();
            for r in &results {
                println!(
                    "{} {:<36} {:>7.2}s  {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.seconds,
                    r.detail
                );
            }
            Ok(results.iter().all(|r| r.passed))
        }
    }
}
