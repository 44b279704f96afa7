use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use logprim_core::denoms::{alpha_closed, alpha_measured, cor58_check, lemma32_cases, lemma32_check};
use logprim_core::iterated::{a_poly, a_poly_alt, a_rec, b_coeff, b_coeff_rec, f_closed, f_oracle, identity_check};
use logprim_core::logpoly::{format_rational, int};
use logprim_core::numtheory::{binomial, kummer_borrows, mangoldt_exp, p_adic_valuation};

use crate::config::{OutputFormat, RunConfig};
use crate::output::{csv_writer, pretty_json};
use crate::Outcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    ClosedForms,
    Denominators,
    Lemma32,
    Identity,
    BCoeffs,
    Cor58,
}

impl Suite {
    pub fn default_max_j(self) -> u64 {
        match self {
            Suite::ClosedForms => 6,
            Suite::BCoeffs => 8,
            Suite::Cor58 => 20,
            _ => 1,
        }
    }

    fn uses_j(self) -> bool {
        matches!(self, Suite::ClosedForms | Suite::BCoeffs | Suite::Cor58)
    }
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long)]
    pub max_n: u64,
    #[arg(long)]
    pub max_j: Option<u64>,
}

/// One point of a sweep; unused coordinates stay `None`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Case {
    pub n: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "n={}", self.n)?;
        for (name, v) in [("j", self.j), ("k", self.k), ("p", self.p)] {
            if let Some(v) = v {
                write!(f, " {name}={v}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    #[serde(flatten)]
    pub case: Case,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub max_n: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_j: Option<u64>,
    pub checks: usize,
    pub failures: usize,
    pub passed: bool,
    /// `α_0, ..., α_max_n` (denominators suite only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<String>>,
    /// `β_2, ..., β_max_n` (denominators suite only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<u64>>,
    /// The smallest failing case in sweep order.
    pub counterexample: Option<Counterexample>,
}

type Check<T> = Result<(T, Option<String>)>;

/// Runs `check` on every case in parallel, keeping input order in the
/// returned values.
pub fn sweep<T, F>(cases: Vec<Case>, check: F) -> Result<(Vec<T>, usize, Option<Counterexample>)>
where
    T: Send,
    F: Fn(&Case) -> Check<T> + Sync,
{
    let results: Vec<(T, Option<String>)> = cases.par_iter().map(&check).collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(results.len());
    let mut failures = 0;
    let mut first = None;
    for (case, (value, failure)) in cases.into_iter().zip(results) {
        values.push(value);
        if let Some(detail) = failure {
            failures += 1;
            if first.is_none() {
                first = Some(Counterexample { case, detail });
            }
        }
    }
    Ok((values, failures, first))
}

fn failure(ok: bool, detail: impl FnOnce() -> String) -> Option<String> {
    (!ok).then(detail)
}

pub fn build_report(suite: Suite, max_n: u64, max_j: u64) -> Result<VerifyReport> {
    let mut alpha = None;
    let mut beta = None;
    let (checks, failures, counterexample) = match suite {
        Suite::ClosedForms => {
            let cases = grid(0..=max_n, 1..=max_j);
            let (v, f, c) = sweep(cases, |c| {
                let (n, j) = (c.n, c.j.unwrap_or(1));
                let closed = f_closed(n, j)?.expr;
                let oracle = f_oracle(n, j)?;
                if closed != oracle {
                    return Ok(((), Some(format!("closed form {closed} but oracle {oracle}"))));
                }
                if j == 1 && n >= 1 {
                    let a = a_poly(n)?;
                    let routes_agree = a_poly_alt(n)? == a && a_rec(n)? == a;
                    return Ok(((), failure(routes_agree, || format!("A_{n} routes disagree"))));
                }
                Ok(((), None))
            })?;
            (v.len(), f, c)
        }
        Suite::Denominators => {
            let cases = (0..=max_n).map(|n| Case { n, ..Case::default() }).collect();
            let (rows, f, c) = sweep(cases, |c| {
                let n = c.n;
                let measured = alpha_measured(n)?;
                let closed = if n == 0 { measured.clone() } else { alpha_closed(n) };
                if measured != closed {
                    let detail = format!("alpha measured {measured} but n! lcm(1..n) = {closed}");
                    return Ok(((measured.to_string(), None), Some(detail)));
                }
                if n < 2 {
                    return Ok(((measured.to_string(), None), None));
                }
                let prev = alpha_measured(n - 1)?;
                let q = int(measured.clone()) / int(prev * n);
                let expected = mangoldt_exp(n);
                let ok = q == int(expected);
                let b = q.is_integer().then(|| q.to_integer().try_into().ok()).flatten();
                let detail = || format!("beta = {} but exp(Lambda(n)) = {expected}", format_rational(&q));
                Ok(((measured.to_string(), b), failure(ok, detail)))
            })?;
            let checks = rows.len();
            beta = Some(rows.iter().skip(2).filter_map(|r| r.1).collect());
            alpha = Some(rows.into_iter().map(|r| r.0).collect());
            (checks, f, c)
        }
        Suite::Lemma32 => {
            let cases = (1..=max_n)
                .flat_map(|n| {
                    lemma32_cases(n).into_iter().map(move |(p, k)| Case {
                        n,
                        k: Some(k as u64),
                        p: Some(p),
                        ..Case::default()
                    })
                })
                .collect();
            let (v, f, c) = sweep(cases, |c| {
                let (n, p, k) = (c.n, c.p.unwrap_or(2), c.k.unwrap_or(0) as u32);
                if !lemma32_check(n, p, k)? {
                    return Ok(((), Some(format!("valuation at {p} is not -{k}"))));
                }
                let pk = p.pow(k);
                let direct = p_adic_valuation(&int(binomial(n, pk)), p)?;
                let borrows = kummer_borrows(n, pk, p)?;
                Ok(((), failure(direct == borrows as i64, || format!("valuation {direct} but {borrows} borrows"))))
            })?;
            (v.len(), f, c)
        }
        Suite::Identity => {
            let cases = (1..=max_n).map(|n| Case { n, ..Case::default() }).collect();
            let (v, f, c) = sweep(cases, |c| Ok(((), failure(identity_check(c.n), || "identity fails".into()))))?;
            (v.len(), f, c)
        }
        Suite::BCoeffs => {
            let cases = grid(0..=max_n, 1..=max_j);
            let (v, f, c) = sweep(cases, |c| {
                let (n, j) = (c.n, c.j.unwrap_or(1));
                for k in 1..=j {
                    let closed = b_coeff(n, k, j)?;
                    let rec = b_coeff_rec(n, k, j)?;
                    if closed != rec {
                        let detail = format!(
                            "k={k}: formula {} but recurrence {}",
                            format_rational(&closed),
                            format_rational(&rec)
                        );
                        return Ok(((), Some(detail)));
                    }
                }
                Ok(((), None))
            })?;
            (v.len(), f, c)
        }
        Suite::Cor58 => {
            let cases = (0..=max_n)
                .flat_map(|n| {
                    (1..=max_j).flat_map(move |j| (1..=j).map(move |k| Case { n, j: Some(j), k: Some(k), p: None }))
                })
                .collect();
            let (v, f, c) = sweep(cases, |c| {
                let (n, j, k) = (c.n, c.j.unwrap_or(1), c.k.unwrap_or(1));
                if cor58_check(n, k, j)? {
                    return Ok(((), None));
                }
                let b = b_coeff(n, k, j)?;
                Ok(((), Some(format!("b = {} has a prime factor above {}", format_rational(&b), n.max(k)))))
            })?;
            (v.len(), f, c)
        }
    };
    Ok(VerifyReport {
        suite,
        max_n,
        max_j: suite.uses_j().then_some(max_j),
        checks,
        failures,
        passed: failures == 0,
        alpha,
        beta,
        counterexample,
    })
}

fn grid(ns: std::ops::RangeInclusive<u64>, js: std::ops::RangeInclusive<u64>) -> Vec<Case> {
    ns.flat_map(|n| js.clone().map(move |j| Case { n, j: Some(j), ..Case::default() })).collect()
}

pub fn run(args: &Args, config: &RunConfig, out: &mut impl Write) -> Result<Outcome> {
    let report = config.install(|| build_report(args.suite, config.max_n, config.max_j))??;
    match config.output_format {
        OutputFormat::Json => pretty_json(out, &report)?,
        OutputFormat::Csv => write_csv(out, &report)?,
        OutputFormat::Plain => write_plain(out, &report)?,
    }
    Ok(if report.passed { Outcome::Pass } else { Outcome::Failed })
}

fn suite_name(s: Suite) -> String {
    s.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

fn write_plain(out: &mut impl Write, r: &VerifyReport) -> Result<()> {
    write!(out, "suite {} (max-n {}", suite_name(r.suite), r.max_n)?;
    if let Some(j) = r.max_j {
        write!(out, ", max-j {j}")?;
    }
    writeln!(out, ")")?;
    if let Some(alpha) = &r.alpha {
        writeln!(out, "alpha: {}", alpha.join(", "))?;
    }
    if let Some(beta) = &r.beta {
        let parts: Vec<String> = beta.iter().map(u64::to_string).collect();
        writeln!(out, "beta: {}", parts.join(", "))?;
    }
    match &r.counterexample {
        None => writeln!(out, "PASS: {} checks", r.checks)?,
        Some(c) => {
            writeln!(out, "FAIL: {} of {} checks failed", r.failures, r.checks)?;
            writeln!(out, "smallest counterexample: {}: {}", c.case, c.detail)?;
        }
    }
    Ok(())
}

fn write_csv(out: &mut impl Write, r: &VerifyReport) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["suite", "max_n", "max_j", "checks", "failures", "passed", "counterexample"])?;
    let max_j = r.max_j.map(|j| j.to_string()).unwrap_or_default();
    let cx = r.counterexample.as_ref().map(|c| format!("{}: {}", c.case, c.detail)).unwrap_or_default();
    w.write_record([
        suite_name(r.suite),
        r.max_n.to_string(),
        max_j,
        r.checks.to_string(),
        r.failures.to_string(),
        r.passed.to_string(),
        cx,
    ])?;
    w.flush()?;
    Ok(())
}
