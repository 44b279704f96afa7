//! `logprim`: batch verification of closed forms for the iterated primitives
//! of `ln^j(1+x)`.

mod certify;
mod compute;
mod config;
mod oeis;
mod output;
mod table;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::{default_cache_dir, default_parallelism, OeisMode, OutputFormat, RunConfig};

/// How a command finished when it did not error out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Failed,
    Degraded,
}

/// Work refused because it exceeds a configured limit.
#[derive(Debug)]
pub struct BudgetError(pub String);

impl std::fmt::Display for BudgetError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "budget exceeded: {}", self.0)
    }
}

impl std::error::Error for BudgetError {}

/// Malformed input that clap could not catch.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Parser)]
#[command(
    name = "logprim",
    version,
    about = "Exact closed forms, denominators and log-concavity certificates for iterated primitives of ln(1+x)"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "plain")]
    format: OutputFormat,

    /// Worker threads for sweeps.
    #[arg(long, global = true, env = "LOGPRIM_JOBS")]
    jobs: Option<usize>,

    /// Directory for cached OEIS responses.
    #[arg(long, global = true, env = "LOGPRIM_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed form of f_{n,j}.
    Compute(compute::Args),
    /// Run one verification sweep.
    Verify(verify::Args),
    /// Certify infinite log-concavity over a range.
    Certify(certify::Args),
    /// Denominator table.
    Table(table::Args),
    /// Look a sequence up in the OEIS.
    Oeis(oeis::Args),
}

fn run(cli: Cli) -> Result<Outcome> {
    let mut config = RunConfig {
        max_n: 1,
        max_j: 1,
        max_iter: logprim_core::logconcave::DEFAULT_MAX_ITER,
        output_format: cli.format,
        oeis_mode: OeisMode::Online,
        cache_dir: cli.cache_dir.unwrap_or_else(default_cache_dir),
        parallelism: cli.jobs.unwrap_or_else(default_parallelism),
    };
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Compute(args) => {
            config.max_n = args.max_n;
            config.max_j = args.max_j;
            config.validate()?;
            compute::run(&args, &config, &mut out)
        }
        Command::Verify(args) => {
            config.max_n = args.max_n;
            config.max_j = args.max_j.unwrap_or(args.suite.default_max_j());
            config.validate()?;
            verify::run(&args, &config, &mut out)
        }
        Command::Certify(args) => {
            config.max_n = args.to.max(1);
            config.max_iter = args.max_iter;
            config.validate()?;
            certify::run(&args, &config, &mut out)
        }
        Command::Table(args) => {
            config.max_n = args.max_n;
            config.validate()?;
            table::run(&args, &config, &mut out)
        }
        Command::Oeis(args) => {
            if args.offline {
                config.oeis_mode = OeisMode::Offline;
            }
            config.validate()?;
            oeis::run(&args, &config, &mut out)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<BudgetError>() {
            return 3;
        }
        if let Some(logprim_core::Error::BudgetExceeded(_)) = cause.downcast_ref() {
            return 3;
        }
        if cause.is::<UsageError>() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Ok(Outcome::Degraded) => ExitCode::from(4),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
