use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::{OeisMode, OutputFormat, RunConfig};
use crate::output::{csv_writer, pretty_json};
use crate::{Outcome, UsageError};

pub const MAX_TERMS: usize = 64;
pub const REPORT_LIMIT: usize = 10;

macro_rules! fixture {
    ($key:literal) => {
        ($key, include_str!(concat!("../fixtures/oeis/", $key, ".json")))
    };
}

/// Recorded responses shipped with the binary, keyed like the cache.
static FIXTURES: &[(&str, &str)] = &[
    fixture!("6dd90e9b008c710bb9c07478f0eef2ffdb9405d92d75e1fa9b7ec42859fb7608"),
    fixture!("4381f23bb36d5a7224b02d5dbc400ac393b8c2504e0b19fa47b70fedacb1714d"),
    fixture!("6b86b273ff34fce19d6b804eff5a3f5747ada4eaa22f1d49c01e52ddb7875b4b"),
];

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Comma-separated terms, e.g. "1,2,3,2,5".
    #[arg(long)]
    pub seq: String,
    /// Use only the cache and the bundled fixtures.
    #[arg(long, env = "LOGPRIM_OEIS_OFFLINE", value_parser = clap::builder::FalseyValueParser::new())]
    pub offline: bool,
    /// Server root; the query goes to `<base-url>/search`.
    #[arg(long, env = "LOGPRIM_OEIS_URL", default_value = "https://oeis.org")]
    pub base_url: String,
    /// Request timeout in seconds.
    #[arg(long, default_value_t = 20)]
    pub timeout: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OeisMatch {
    pub sequence_id: String,
    pub matched_prefix_len: usize,
    pub name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Network,
    Cache,
    Fixture,
    None,
}

#[derive(Debug, Clone, Serialize)]
pub struct OeisReport {
    pub query: Vec<String>,
    pub source: Source,
    pub total: usize,
    pub truncated: bool,
    pub matches: Vec<OeisMatch>,
}

pub fn parse_terms(s: &str) -> Result<Vec<String>> {
    let terms: Vec<String> =
        s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).map(str::to_string).collect();
    for t in &terms {
        let digits = t.strip_prefix('-').unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(UsageError(format!("not an integer: {t:?}")).into());
        }
    }
    if terms.is_empty() || terms.len() > MAX_TERMS {
        return Err(UsageError(format!("need 1 to {MAX_TERMS} terms, got {}", terms.len())).into());
    }
    Ok(terms)
}

/// Hex SHA-256 of the first eight terms joined by commas.
pub fn cache_key(terms: &[String]) -> String {
    let prefix = terms[..terms.len().min(8)].join(",");
    Sha256::digest(prefix.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Deserialize)]
struct Entry {
    number: u64,
    #[serde(default)]
    name: String,
    #[serde(default)]
    data: String,
}

/// Accepts both the bare result array and the `{"results": [...]}` envelope;
/// `null` results mean no match.
fn parse_entries(body: &str) -> Result<Vec<Entry>> {
    let value: Value = serde_json::from_str(body).context("OEIS response is not JSON")?;
    let list = match value {
        Value::Null => return Ok(Vec::new()),
        Value::Array(_) => value,
        Value::Object(mut obj) => match obj.remove("results") {
            None | Some(Value::Null) => return Ok(Vec::new()),
            Some(v) => v,
        },
        _ => bail!("unexpected OEIS response shape"),
    };
    Ok(serde_json::from_value(list)?)
}

/// Longest prefix of `query` occurring as a contiguous run in `data`.
fn matched_prefix_len(query: &[String], data: &[&str]) -> usize {
    (1..=query.len())
        .rev()
        .find(|&len| data.windows(len).any(|w| w.iter().zip(&query[..len]).all(|(a, b)| *a == b)))
        .unwrap_or(0)
}

pub fn matches_from_body(body: &str, query: &[String]) -> Result<Vec<OeisMatch>> {
    Ok(parse_entries(body)?
        .into_iter()
        .filter_map(|e| {
            let data: Vec<&str> = e.data.split(',').map(str::trim).collect();
            let len = matched_prefix_len(query, &data);
            (len >= 1).then(|| OeisMatch {
                sequence_id: format!("A{:06}", e.number),
                matched_prefix_len: len,
                name: e.name,
            })
        })
        .collect())
}

fn cache_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{key}.json"))
}

fn write_cache(dir: &Path, key: &str, body: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(".{key}.{}.tmp", std::process::id()));
    std::fs::write(&tmp, body)?;
    std::fs::rename(&tmp, cache_path(dir, key))?;
    Ok(())
}

fn read_stored(dir: &Path, key: &str) -> Option<(Source, String)> {
    if let Ok(body) = std::fs::read_to_string(cache_path(dir, key)) {
        return Some((Source::Cache, body));
    }
    FIXTURES.iter().find(|(k, _)| *k == key).map(|(_, body)| (Source::Fixture, body.to_string()))
}

fn fetch(base_url: &str, terms: &[String], timeout: Duration) -> Result<String> {
    let agent: ureq::Agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).build().into();
    let url = format!("{}/search", base_url.trim_end_matches('/'));
    let mut resp = agent.get(&url).query("q", terms.join(",")).query("fmt", "json").call()?;
    Ok(resp.body_mut().read_to_string()?)
}

/// Runs the lookup; the second value is false when the answer is degraded
/// (network failure or an offline miss).
pub fn lookup(args: &Args, config: &RunConfig) -> Result<(OeisReport, bool)> {
    let query = parse_terms(&args.seq)?;
    let key = cache_key(&query);
    let (source, body, healthy) = match config.oeis_mode {
        OeisMode::Online => match fetch(&args.base_url, &query, Duration::from_secs(args.timeout)) {
            Ok(body) => {
                if let Err(e) = write_cache(&config.cache_dir, &key, &body) {
                    eprintln!("warning: could not write cache: {e:#}");
                }
                (Source::Network, Some(body), true)
            }
            Err(e) => {
                eprintln!("warning: OEIS request failed ({e:#}); falling back to cache");
                match read_stored(&config.cache_dir, &key) {
                    Some((s, b)) => (s, Some(b), false),
                    None => (Source::None, None, false),
                }
            }
        },
        OeisMode::Offline => match read_stored(&config.cache_dir, &key) {
            Some((s, b)) => (s, Some(b), true),
            None => {
                eprintln!("warning: no cached response for this query");
                (Source::None, None, false)
            }
        },
    };
    let mut matches = match &body {
        Some(b) => matches_from_body(b, &query)?,
        None => Vec::new(),
    };
    let total = matches.len();
    matches.truncate(REPORT_LIMIT);
    Ok((OeisReport { query, source, total, truncated: total > REPORT_LIMIT, matches }, healthy))
}

pub fn run(args: &Args, config: &RunConfig, out: &mut impl Write) -> Result<Outcome> {
    let (report, healthy) = lookup(args, config)?;
    match config.output_format {
        OutputFormat::Json => pretty_json(out, &report)?,
        OutputFormat::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["sequence_id", "matched_prefix_len", "name"])?;
            for m in &report.matches {
                w.write_record([m.sequence_id.as_str(), &m.matched_prefix_len.to_string(), m.name.as_str()])?;
            }
            w.flush()?;
        }
        OutputFormat::Plain => {
            if report.matches.is_empty() {
                writeln!(out, "no matches")?;
            }
            for m in &report.matches {
                writeln!(out, "{}  {:>2} terms  {}", m.sequence_id, m.matched_prefix_len, m.name)?;
            }
            if report.truncated {
                writeln!(out, "showing {} of {} matches", report.matches.len(), report.total)?;
            }
        }
    }
    Ok(if healthy { Outcome::Pass } else { Outcome::Degraded })
}
