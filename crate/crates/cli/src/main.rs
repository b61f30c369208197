use std::process::ExitCode;

use bitension_cli::config::{env_threads, load_config_file};
use bitension_cli::{catalog_listing, describe_entry, render, run, run_scan, RunError, EXIT_CONFIG};
use bitension_core::catalog;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bitension", version, about = "Bitension fields and biharmonic checks for submanifolds of spheres")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the enabled checks on the configured immersion.
    Verify {
        #[arg(long)]
        config: String,
        /// `section.key=value`, applied in order after the file is read.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run the `[scan]` section only.
    Scan {
        #[arg(long)]
        config: String,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Inspect the built-in example immersions.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Show { name: String },
}

fn execute(config: &str, overrides: &[String], scan: bool) -> Result<i32, RunError> {
    let cfg = load_config_file(config, overrides)?;
    let report = if scan { run_scan(&cfg)? } else { run(&cfg)? };
    let text = render(&report, cfg.output.format);
    match &cfg.output.path {
        Some(path) => std::fs::write(path, text).map_err(|source| {
            RunError::Config(bitension_cli::ConfigError::Io { path: path.clone(), source })
        })?,
        None => print!("{text}"),
    }
    Ok(report.summary.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match env_threads() {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("error: thread pool: {e}");
                return ExitCode::from(EXIT_CONFIG as u8);
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    }
    let code = match cli.command {
        Command::Verify { config, overrides } => execute(&config, &overrides, false),
        Command::Scan { config, overrides } => execute(&config, &overrides, true),
        Command::Catalog { action: CatalogAction::List } => {
            print!("{}", catalog_listing());
            Ok(0)
        }
        Command::Catalog { action: CatalogAction::Show { name } } => match catalog::build(&name, &[]) {
            Ok(entry) => {
                print!("{}", describe_entry(&entry));
                Ok(0)
            }
            Err(e) => Err(RunError::Config(e.into())),
        },
    };
    match code {
        Ok(c) => ExitCode::from(c as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
