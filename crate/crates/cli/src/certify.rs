use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use rayon::prelude::*;

use logprim_core::logconcave::{a_n_sequence, binomial_row, certify, dlm_row, Certificate, Family, Status};

use crate::config::{OutputFormat, RunConfig};
use crate::output::{csv_writer, json_line};
use crate::{Outcome, UsageError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    /// Coefficients of A_n(x).
    #[value(name = "An", alias = "an")]
    An,
    /// Row n of Pascal's triangle.
    Binomial,
    /// d_{0,m}, ..., d_{m,m}.
    Dlm,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::An => Family::An,
            FamilyArg::Binomial => Family::BinomialRow,
            FamilyArg::Dlm => Family::Dlm,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 1)]
    pub from: u64,
    #[arg(long)]
    pub to: u64,
    /// Applications of the operator before giving up.
    #[arg(long, default_value_t = logprim_core::logconcave::DEFAULT_MAX_ITER)]
    pub max_iter: u32,
}

pub fn certify_one(family: FamilyArg, n: u64, max_iter: u32) -> Result<Certificate> {
    let seq = match family {
        FamilyArg::An => a_n_sequence(n)?,
        FamilyArg::Binomial => binomial_row(n),
        FamilyArg::Dlm => dlm_row(n),
    };
    Ok(certify(&seq, family.into(), n, max_iter)?)
}

pub fn run(args: &Args, config: &RunConfig, out: &mut impl Write) -> Result<Outcome> {
    if args.from > args.to {
        return Err(UsageError(format!("empty range {}..={}", args.from, args.to)).into());
    }
    if args.family == FamilyArg::An && args.from == 0 {
        return Err(UsageError("A_n is defined for n >= 1".into()).into());
    }
    let mut emitter = match config.output_format {
        OutputFormat::Json => Emitter::Json(&mut *out),
        OutputFormat::Plain => Emitter::Plain(&mut *out),
        OutputFormat::Csv => {
            let mut w = csv_writer(&mut *out);
            w.write_record(["family", "n", "iterations_used", "status", "witness_index"])?;
            Emitter::Csv(Box::new(w))
        }
    };
    let (mut certified, mut total) = (0usize, 0usize);
    // batches keep the output streaming while each batch runs in parallel
    let batch = (config.parallelism * 4) as u64;
    let mut start = args.from;
    loop {
        let end = args.to.min(start.saturating_add(batch - 1));
        let certs: Vec<Certificate> = config.install(|| {
            (start..=end).into_par_iter().map(|n| certify_one(args.family, n, config.max_iter)).collect::<Result<_>>()
        })??;
        for c in &certs {
            total += 1;
            certified += usize::from(c.is_certified());
            emitter.emit(c)?;
        }
        emitter.flush()?;
        if end >= args.to {
            break;
        }
        start = end + 1;
    }
    drop(emitter);
    if config.output_format == OutputFormat::Plain {
        writeln!(out, "{certified} of {total} certified")?;
    }
    Ok(Outcome::Pass)
}

enum Emitter<'a, W: Write> {
    Json(&'a mut W),
    Plain(&'a mut W),
    Csv(Box<csv::Writer<&'a mut W>>),
}

impl<W: Write> Emitter<'_, W> {
    fn emit(&mut self, c: &Certificate) -> Result<()> {
        match self {
            Emitter::Json(out) => json_line(out, c)?,
            Emitter::Plain(out) => writeln!(out, "{c}")?,
            Emitter::Csv(w) => w.write_record(csv_row(c))?,
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        match self {
            Emitter::Json(out) | Emitter::Plain(out) => out.flush()?,
            Emitter::Csv(w) => w.flush()?,
        }
        Ok(())
    }
}

fn csv_row(c: &Certificate) -> [String; 5] {
    let (status, witness) = match c.status {
        Status::Certified => ("certified", String::new()),
        Status::Refuted { index, .. } => ("refuted", index.to_string()),
        Status::Inconclusive { .. } => ("inconclusive", String::new()),
    };
    [c.family.to_string(), c.n.to_string(), c.iterations_used.to_string(), status.into(), witness]
}
