use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spinchain_cli::config::seed_from_env;
use spinchain_cli::{run_scenario, sweep, validate_config, CliError, ExperimentConfig, SweepParam};

/// Excitation transport and clocked CNOT computation on disordered spin chains.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario ensemble.
    Run {
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run the ensemble once per value of a parameter.
    Sweep {
        config: PathBuf,
        /// One of s, sigma, g, zeta, beta.
        #[arg(long)]
        vary: String,
        /// Comma-separated values.
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_negative_numbers = true
        )]
        values: Vec<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a config and print the resolved parameters.
    Validate { config: PathBuf },
}

fn load(path: &Path, output: Option<PathBuf>) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut config = validate_config(&text, seed_from_env()?)?;
    if let Some(o) = output {
        config.output = o;
    }
    Ok(config)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            output,
            threads,
        } => {
            let config = load(&config, output)?;
            let out = run_scenario(&config, threads)?;
            println!(
                "{}: {} realization(s), {} file(s) in {}",
                config.scenario,
                out.realizations.len(),
                out.manifest.files.len(),
                out.directory.display()
            );
        }
        Command::Sweep {
            config,
            vary,
            values,
            output,
            threads,
        } => {
            let param: SweepParam = vary.parse()?;
            let config = load(&config, output)?;
            let out = sweep(&config, param, &values, threads)?;
            print!("{}", spinchain::series::to_csv(&out.table));
            eprintln!(
                "wrote {} file(s) in {}",
                out.manifest.files.len(),
                out.directory.display()
            );
        }
        Command::Validate { config } => {
            let config = load(&config, None)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&config).expect("config serializes")
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
