//! `slan` — run convergence experiments, render the built-in figures, and
//! verify the library's accuracy claims.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 numerical failure.

use clap::{Parser, Subcommand};
use slan_cli::error::{CliError, Result};
use slan_cli::{config, csvout, experiment, figures, verify};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "slan",
    about = "Krylov approximation of matrix functions: experiments, figures, verification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a JSON config and write its convergence
    /// history as CSV.
    Run {
        /// Path to the experiment configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Directory for the output CSV (default: current directory). The
        /// file name is `<label>.csv` unless the config sets `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the configured number of iterations.
        #[arg(long)]
        m_max: Option<usize>,
        /// Override the starting-vector seed (Gaussian-type vectors only).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Render a built-in figure recipe (CSV + SVG per panel).
    Figure {
        /// One of: fig1, fig2, fig3, fig4.
        recipe: String,
        /// Output directory (default: `figures/`).
        #[arg(long, default_value = "figures")]
        out: PathBuf,
    },
    /// Run the verification suite and print one line per check.
    Verify {
        /// Only run checks whose id contains this substring.
        #[arg(long)]
        filter: Option<String>,
        /// Also write a JSON summary to this path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn cmd_run(
    config_path: &PathBuf,
    out: Option<PathBuf>,
    m_max: Option<usize>,
    seed: Option<u64>,
) -> Result<()> {
    let mut cfg = config::ExperimentConfig::from_file(config_path)?;
    if let Some(m) = m_max {
        cfg.m_max = m;
    }
    if let Some(s) = seed {
        match &mut cfg.b {
            config::VectorSpec::Gaussian { seed } => *seed = s,
            config::VectorSpec::GaussianSupported { seed, .. } => *seed = s,
            _ => {
                return Err(CliError::Config(
                    "--seed only applies to gaussian starting vectors".into(),
                ))
            }
        }
    }
    let exp = experiment::run_experiment(&cfg)?;
    let path = match (&cfg.output, out) {
        (Some(explicit), _) => explicit.clone(),
        (None, Some(dir)) => {
            std::fs::create_dir_all(&dir)?;
            dir.join(format!("{}.csv", exp.label()))
        }
        (None, None) => PathBuf::from(format!("{}.csv", exp.label())),
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(&path, csvout::to_string(&exp))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_figure(recipe: &str, out: &std::path::Path) -> Result<()> {
    let written = figures::figure(recipe, out)?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_verify(filter: Option<&str>, json: Option<&PathBuf>) -> Result<bool> {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let mut outcomes = Vec::new();
    for id in verify::CHECK_IDS {
        if filter.map_or(false, |f| !id.contains(f)) {
            continue;
        }
        let outcome = verify::run_check(id).expect("registered check");
        writeln!(lock, "{outcome}")?;
        lock.flush()?;
        outcomes.push(outcome);
    }
    let summary = verify::VerificationSummary::new(outcomes);
    writeln!(
        lock,
        "{} of {} checks passed",
        summary.passed, summary.total
    )?;
    if let Some(path) = json {
        std::fs::write(path, summary.to_json())?;
        writeln!(lock, "wrote {}", path.display())?;
    }
    Ok(summary.all_passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<bool> = match &cli.command {
        Command::Run {
            config,
            out,
            m_max,
            seed,
        } => cmd_run(config, out.clone(), *m_max, *seed).map(|()| true),
        Command::Figure { recipe, out } => cmd_figure(recipe, out).map(|()| true),
        Command::Verify { filter, json } => cmd_verify(filter.as_deref(), json.as_ref()),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
