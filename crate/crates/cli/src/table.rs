use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use rayon::prelude::*;

use logprim_core::denoms::{denominator_reports, DenominatorReport};

use crate::config::{OutputFormat, RunConfig};
use crate::output::{csv_writer, pretty_json};
use crate::Outcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    /// Rows from n = 0.
    Alpha,
    /// Rows from n = 2, where beta is defined.
    Beta,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long, value_enum)]
    pub which: Which,
    #[arg(long, default_value_t = 20)]
    pub max_n: u64,
}

/// Rows `from..=to`, split into contiguous chunks computed in parallel.
pub fn reports(from: u64, to: u64, workers: usize) -> Result<Vec<DenominatorReport>> {
    if from > to {
        return Ok(Vec::new());
    }
    let len = to - from + 1;
    let chunk = len.div_ceil(workers.max(1) as u64);
    let starts: Vec<u64> = (from..=to).step_by(chunk as usize).collect();
    let parts: Vec<Vec<DenominatorReport>> = starts
        .par_iter()
        .map(|&s| denominator_reports(s, to.min(s + chunk - 1)))
        .collect::<logprim_core::Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

pub fn run(args: &Args, config: &RunConfig, out: &mut impl Write) -> Result<Outcome> {
    let from = match args.which {
        Which::Alpha => 0,
        Which::Beta => 2,
    };
    let rows = config.install(|| reports(from, config.max_n, config.parallelism))??;
    match config.output_format {
        OutputFormat::Json => pretty_json(out, &rows)?,
        OutputFormat::Csv => write_csv(out, &rows)?,
        OutputFormat::Plain => write_plain(out, &rows)?,
    }
    let consistent = rows.iter().all(|r| r.matches && r.beta == r.mangoldt);
    Ok(if consistent { Outcome::Pass } else { Outcome::Failed })
}

fn opt(v: Option<u64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn write_csv(out: &mut impl Write, rows: &[DenominatorReport]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["n", "alpha_measured", "alpha_closed", "beta", "mangoldt", "match"])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.alpha_measured.to_string(),
            r.alpha_closed.to_string(),
            opt(r.beta),
            opt(r.mangoldt),
            r.matches.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_plain(out: &mut impl Write, rows: &[DenominatorReport]) -> Result<()> {
    let width = rows.iter().map(|r| r.alpha_measured.to_string().len()).max().unwrap_or(5).max(5);
    writeln!(out, "{:>5}  {:>width$}  {:>5}  {:>8}  match", "n", "alpha", "beta", "mangoldt")?;
    for r in rows {
        let beta = r.beta.map_or("-".to_string(), |b| b.to_string());
        let m = r.mangoldt.map_or("-".to_string(), |b| b.to_string());
        writeln!(out, "{:>5}  {:>width$}  {:>5}  {:>8}  {}", r.n, r.alpha_measured.to_string(), beta, m, r.matches)?;
    }
    Ok(())
}
