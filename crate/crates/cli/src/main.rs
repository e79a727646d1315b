use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hypstab_cli::{catalogue, execute, output, CliError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "hypstab", version, about = "Bayesian search for stabilizing boundary-feedback gains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file or a bundled config name.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for the node sweep.
        #[arg(long)]
        jobs: Option<usize>,
        /// Output directory (default: out/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        order: Option<u8>,
        /// Check the config and exit without running.
        #[arg(long)]
        validate_only: bool,
    },
    /// List bundled configs.
    List,
    /// Check a config without running it.
    Validate { config: PathBuf },
}

fn load_checked(path: &PathBuf) -> Result<ExperimentConfig, CliError> {
    let cfg = ExperimentConfig::load(path)?;
    cfg.build()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::List => {
            let mut stdout = std::io::stdout().lock();
            for b in catalogue::ALL {
                // a closed pipe just ends the listing
                if writeln!(stdout, "{:<22} {}", b.name, b.reproduces).is_err() {
                    break;
                }
            }
        }
        Command::Validate { config } => {
            let cfg = load_checked(&config)?;
            println!("{}: ok", cfg.name);
        }
        Command::Run {
            config,
            seed,
            jobs,
            out,
            order,
            validate_only,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(o) = order {
                cfg.order = o;
            }
            if let Some(o) = out {
                cfg.out = Some(o);
            }
            if validate_only {
                cfg.build()?;
                println!("{}: ok", cfg.name);
                return Ok(());
            }
            if let Some(n) = jobs {
                if n == 0 {
                    return Err(CliError::Config("--jobs must be at least 1".into()));
                }
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| CliError::Config(e.to_string()))?;
            }
            let outcome = execute(&cfg)?;
            let dir = cfg.output_dir();
            output::write_artifacts(&cfg, &outcome, &dir)?;
            let iv: Vec<String> = outcome
                .result
                .stability_interval
                .iter()
                .zip(&cfg.params)
                .map(|((lo, hi), p)| format!("{p} in [{lo}, {hi}]"))
                .collect();
            println!("{}: {} ({})", cfg.name, iv.join(", "), dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
