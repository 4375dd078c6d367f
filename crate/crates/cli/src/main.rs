use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use heod_cli::config::{preset, RunConfig, PRESETS};
use heod_cli::{commands, CliError};

#[derive(Parser)]
#[command(name = "heod", version, about = "Pathway amplitudes of driven open quantum systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate the density matrix and write trajectory.csv.
    Simulate(RunArgs),
    /// Run the encoded sweep and decode pathway amplitudes.
    Pathways(RunArgs),
    /// Decode pathways and compare each against the quadrature oracle.
    Compare(RunArgs),
    /// Check that the encoding separates every walk up to max_order.
    ValidateEncoding(RunArgs),
    /// Print or write a built-in configuration.
    Preset {
        /// Preset name; omit to list the available ones.
        name: Option<String>,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides run.out.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sweep worker threads.
    #[arg(long, env = "HEOD_WORKERS")]
    workers: Option<usize>,
}

struct Loaded {
    config: RunConfig,
    out: PathBuf,
    workers: usize,
}

impl RunArgs {
    fn load(&self) -> Result<Loaded, CliError> {
        let config = RunConfig::load(&self.config)?;
        let out = self
            .out
            .clone()
            .or_else(|| config.run.out.clone())
            .unwrap_or_else(|| PathBuf::from("out"));
        let workers = self
            .workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
            .max(1);
        Ok(Loaded { config, out, workers })
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(a) => {
            let l = a.load()?;
            let s = commands::simulate(&l.config.resolve()?, &l.out)?;
            println!(
                "{} samples, max |trace - 1| = {:.3e} -> {}",
                s.rows,
                s.max_trace_error,
                l.out.display()
            );
        }
        Command::Pathways(a) => {
            let l = a.load()?;
            let r = commands::pathways(&l.config.resolve()?, &l.out, l.workers)?;
            println!(
                "{} pathways above threshold, {} unassigned bins -> {}",
                r.entries.len(),
                r.unassigned.len(),
                l.out.display()
            );
        }
        Command::Compare(a) => {
            let l = a.load()?;
            let s = commands::compare(&l.config.resolve()?, &l.out, l.workers)?;
            println!(
                "{} pathways compared, max |R| = {:.4e} ({}) -> {}",
                s.rows.len(),
                s.max_r,
                s.max_r_pathway,
                l.out.display()
            );
        }
        Command::ValidateEncoding(a) => {
            let l = a.load()?;
            let c = commands::validate(&l.config.resolve()?, &l.out)?;
            println!(
                "{} walks, max composite {}, minimum N {}, {} colliding bins",
                c.report.pathways,
                c.report.max_composite,
                c.report.min_samples,
                c.report.collisions.len()
            );
            for p in &c.shared {
                println!("listed pathway shares a bin: {p}");
            }
        }
        Command::Preset { name: None, .. } => {
            for p in PRESETS {
                println!("{p}");
            }
        }
        Command::Preset { name: Some(name), out } => {
            let text = preset(&name)?.to_json();
            match out {
                Some(path) => write_file(&path, &text)?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
