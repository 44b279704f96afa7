use std::io::Write;

use anyhow::{Context, Result};
use logprim_core::iterated::{extract_b_coeffs, f_closed, f_oracle_with_budget, IteratedResult, OracleBudget};
use logprim_core::logpoly::format_rational;

use crate::config::{OutputFormat, RunConfig};
use crate::output::{csv_writer, pretty_json};
use crate::{BudgetError, Outcome};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Number of integrations.
    #[arg(long)]
    pub n: u64,
    /// Power of ln(1+x).
    #[arg(long, default_value_t = 1)]
    pub j: u64,
    /// Largest n accepted.
    #[arg(long, default_value_t = 1000)]
    pub max_n: u64,
    /// Largest j accepted.
    #[arg(long, default_value_t = 64)]
    pub max_j: u64,
    /// Integrate term by term instead of using the closed form.
    #[arg(long)]
    pub oracle: bool,
}

pub fn run(args: &Args, config: &RunConfig, out: &mut impl Write) -> Result<Outcome> {
    if args.n > config.max_n || args.j > config.max_j {
        return Err(BudgetError(format!(
            "f_{{{},{}}} is outside max-n {} / max-j {}",
            args.n, args.j, config.max_n, config.max_j
        ))
        .into());
    }
    let result = if args.oracle {
        let default = OracleBudget::default();
        let budget = OracleBudget { max_n: config.max_n.min(default.max_n), max_j: config.max_j.min(default.max_j) };
        let expr = f_oracle_with_budget(args.n, args.j, budget)?;
        let b_coeffs = extract_b_coeffs(&expr, args.n, args.j)?;
        IteratedResult { n: args.n, j: args.j, a_part: expr.term(0), b_coeffs, expr }
    } else {
        f_closed(args.n, args.j).with_context(|| format!("closed form of f_{{{},{}}}", args.n, args.j))?
    };
    match config.output_format {
        OutputFormat::Json => pretty_json(out, &result)?,
        OutputFormat::Csv => write_csv(out, &result)?,
        OutputFormat::Plain => write_plain(out, &result)?,
    }
    Ok(Outcome::Pass)
}

fn write_plain(out: &mut impl Write, r: &IteratedResult) -> Result<()> {
    writeln!(out, "n = {}, j = {}", r.n, r.j)?;
    writeln!(out, "A(x) = {}", r.a_part)?;
    for (k, b) in r.b_coeffs.iter().enumerate() {
        writeln!(out, "b[{}] = {}", k + 1, format_rational(b))?;
    }
    writeln!(out, "f(x) = {}", r.expr)?;
    Ok(())
}

fn write_csv(out: &mut impl Write, r: &IteratedResult) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["section", "log_power", "degree", "coefficient"])?;
    for (d, c) in r.a_part.coeffs().iter().enumerate() {
        w.write_record(["a_part", "0", &d.to_string(), &format_rational(c)])?;
    }
    for (k, b) in r.b_coeffs.iter().enumerate() {
        w.write_record(["b", &(k + 1).to_string(), "", &format_rational(b)])?;
    }
    for (k, p) in r.expr.terms() {
        for (d, c) in p.coeffs().iter().enumerate() {
            w.write_record(["expr", &k.to_string(), &d.to_string(), &format_rational(c)])?;
        }
    }
    w.flush()?;
    Ok(())
}
