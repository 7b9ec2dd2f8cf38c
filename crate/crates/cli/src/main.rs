use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ssrw_cli::config::Config;
use ssrw_cli::{commands, verify, CliError};

/// Experiments on self-switching random walks over Erdős–Rényi graphs.
///
/// Parameters come from a flat `key = value` config file; the flags below
/// override file values. Identical configuration and seed produce
/// byte-identical output for any `--threads` value.
#[derive(Parser)]
#[command(name = "ssrw", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat key-value config file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Master seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output path; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Grid override: comma list or lo:hi:count.
    #[arg(long, global = true, value_name = "SPEC")]
    grid: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate eta, zeta, R and the limit density f over a lambda grid.
    Analytic,
    /// Scaled return times E[tau]/(n-1) in the fixed-p regime.
    Dense,
    /// Scaled return times E[tau]/n against f(lambda) in the lambda/n regime.
    Sparse,
    /// One state-process run: empirical vs limit occupation masses.
    Occupation,
    /// Fluctuation statistics of the occupation measure with a KS summary.
    Clt,
    /// Largest-component concentration or the critical tail bound.
    Concentration,
    /// P(origin not in the giant | origin degree) against eta^m.
    #[command(name = "conditional-giant")]
    ConditionalGiant,
    /// Component-size moments against their analytic limits.
    Moments,
    /// Exact small-graph expectations by exhaustive enumeration.
    Oracle,
    /// Run every identity and cross-check suite; JSON report.
    Verify,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => Config::from_file(path)?,
        None => Config::empty(),
    };
    if let Some(seed) = cli.seed {
        cfg.set("seed", seed.to_string());
    }
    if let Some(threads) = cli.threads {
        cfg.set("threads", threads.to_string());
    }
    if let Some(grid) = &cli.grid {
        cfg.set("grid", grid.clone());
    }

    let output = match cli.command {
        Command::Analytic => commands::cmd_analytic(&cfg)?,
        Command::Dense => commands::cmd_dense(&cfg)?,
        Command::Sparse => commands::cmd_sparse(&cfg)?,
        Command::Occupation => commands::cmd_occupation(&cfg)?,
        Command::Clt => commands::cmd_clt(&cfg)?,
        Command::Concentration => commands::cmd_concentration(&cfg)?,
        Command::ConditionalGiant => commands::cmd_conditional_giant(&cfg)?,
        Command::Moments => commands::cmd_moments(&cfg)?,
        Command::Oracle => commands::cmd_oracle(&cfg)?,
        Command::Verify => {
            let report = verify::run_verify(&cfg)?;
            for suite in &report.suites {
                eprintln!(
                    "suite {}: {} ({} checks, {} failures)",
                    suite.name,
                    if suite.passed { "PASS" } else { "FAIL" },
                    suite.checks,
                    suite.failures.len()
                );
            }
            let json = verify::report_json(&report);
            write_output(cli.out.as_deref(), &json)?;
            if !report.passed {
                let failed: Vec<&str> = report
                    .suites
                    .iter()
                    .filter(|s| !s.passed)
                    .map(|s| s.name)
                    .collect();
                return Err(CliError::Verification(format!(
                    "suites failed: {}",
                    failed.join(", ")
                )));
            }
            return Ok(());
        }
    };
    write_output(cli.out.as_deref(), &output)
}

fn write_output(out: Option<&std::path::Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
