use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::path::Path;
use std::process::{Command, Output};
use std::sync::mpsc;
use std::thread;

use logprim_core::iterated::IteratedResult;
use serde_json::Value;

fn logprim(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logprim"))
        .args(args)
        .env_remove("LOGPRIM_OEIS_OFFLINE")
        .env_remove("LOGPRIM_OEIS_URL")
        .env_remove("LOGPRIM_JOBS")
        .env("LOGPRIM_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn validate(schema_file: &str, instance: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(schema_file);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema_file}: {errors:?}\n{instance}");
}

/// Parses strictly and checks CRLF record endings.
fn csv_records(text: &str) -> Vec<csv::StringRecord> {
    assert!(text.ends_with("\r\n"), "records end in CRLF");
    assert_eq!(text.matches('\n').count(), text.matches("\r\n").count(), "bare LF");
    let mut r = csv::ReaderBuilder::new().has_headers(false).flexible(false).from_reader(text.as_bytes());
    r.records().collect::<Result<_, _>>().expect("well-formed CSV")
}

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

#[test]
fn compute_plain_log() {
    let dir = tmp();
    let o = logprim(&["compute", "--n", "0", "--j", "1"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().any(|l| l == "f(x) = ln(1+x)"));
}

#[test]
fn compute_plain_second_power() {
    let dir = tmp();
    let out = stdout(&logprim(&["compute", "--n", "2", "--j", "2"], dir.path()));
    assert!(out.contains("A(x) = 3/2*x + 7/4*x^2"), "{out}");
    assert!(out.contains("b[1] = -3/2") && out.contains("b[2] = 1/2"), "{out}");
}

#[test]
fn compute_json_round_trip_and_schema() {
    let dir = tmp();
    let o = logprim(&["compute", "--n", "4", "--j", "1", "--format", "json"], dir.path());
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let value: Value = serde_json::from_str(&text).unwrap();
    validate("iterated_result.schema.json", &value);
    validate("logpoly_expr.schema.json", &value["expr"]);
    let parsed: IteratedResult = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed, logprim_core::iterated::f_closed(4, 1).unwrap());
    assert_eq!(serde_json::to_value(&parsed).unwrap(), value);
    assert_eq!(value["a_part"], serde_json::json!(["0", "-1/24", "-7/48", "-13/72", "-25/288"]));
}

#[test]
fn compute_oracle_matches_closed_form() {
    let dir = tmp();
    let a = stdout(&logprim(&["compute", "--n", "5", "--j", "3", "--format", "json"], dir.path()));
    let b = stdout(&logprim(&["compute", "--n", "5", "--j", "3", "--format", "json", "--oracle"], dir.path()));
    assert_eq!(a, b);
}

#[test]
fn compute_csv() {
    let dir = tmp();
    let recs = csv_records(&stdout(&logprim(&["compute", "--n", "2", "--j", "1", "--format", "csv"], dir.path())));
    assert_eq!(&recs[0], &vec!["section", "log_power", "degree", "coefficient"][..]);
    assert!(recs.iter().any(|r| r == vec!["b", "1", "", "1/2"][..]));
}

#[test]
fn compute_budget_exit_code() {
    let dir = tmp();
    let o = logprim(&["compute", "--n", "70", "--oracle"], dir.path());
    assert_eq!(code(&o), 3);
    let o = logprim(&["compute", "--n", "20", "--max-n", "10"], dir.path());
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget exceeded"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tmp();
    assert_eq!(code(&logprim(&["verify", "--suite", "nope", "--max-n", "3"], dir.path())), 2);
    assert_eq!(code(&logprim(&["compute"], dir.path())), 2);
    assert_eq!(code(&logprim(&["oeis", "--seq", "1,two", "--offline"], dir.path())), 2);
    assert_eq!(code(&logprim(&["certify", "--family", "An", "--from", "5", "--to", "2"], dir.path())), 2);
    assert_eq!(code(&logprim(&["table", "--which", "alpha", "--max-n", "0"], dir.path())), 2);
    assert_eq!(code(&logprim(&["table", "--which", "alpha", "--jobs", "0"], dir.path())), 2);
}

#[test]
fn verify_denominators_prints_alpha_table() {
    let dir = tmp();
    let o = logprim(&["verify", "--suite", "denominators", "--max-n", "8"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("alpha: 1, 1, 4, 36, 288, 7200, 43200, 2116800, 33868800"));
}

#[test]
fn verify_sweeps_pass() {
    let dir = tmp();
    for (suite, n) in
        [("identity", "50"), ("lemma32", "100"), ("closed-forms", "8"), ("b-coeffs", "10"), ("cor58", "10")]
    {
        let o = logprim(&["verify", "--suite", suite, "--max-n", n, "--format", "json", "--jobs", "3"], dir.path());
        assert_eq!(code(&o), 0, "{suite}");
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        validate("verify_report.schema.json", &v);
        assert_eq!(v["passed"], true);
        assert!(v["counterexample"].is_null());
    }
}

#[test]
fn verify_csv() {
    let dir = tmp();
    let o = logprim(&["verify", "--suite", "cor58", "--max-n", "4", "--max-j", "3", "--format", "csv"], dir.path());
    let recs = csv_records(&stdout(&o));
    assert_eq!(recs.len(), 2);
    assert_eq!(&recs[1][0], "cor58");
    assert_eq!(&recs[1][5], "true");
}

#[test]
fn certify_stream_is_ordered_and_valid() {
    let dir = tmp();
    let o = logprim(
        &["certify", "--family", "An", "--from", "1", "--to", "40", "--format", "json", "--jobs", "4"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 40);
    for (i, v) in lines.iter().enumerate() {
        validate("certificate.schema.json", v);
        assert_eq!(v["n"], i as u64 + 1);
        assert_eq!(v["status"], "certified");
    }
}

#[test]
fn certify_families_csv() {
    let dir = tmp();
    for (family, to) in [("binomial", "30"), ("dlm", "12")] {
        let o = logprim(&["certify", "--family", family, "--from", "0", "--to", to, "--format", "csv"], dir.path());
        let recs = csv_records(&stdout(&o));
        assert_eq!(&recs[0], &vec!["family", "n", "iterations_used", "status", "witness_index"][..]);
        assert_eq!(recs.len(), to.parse::<usize>().unwrap() + 2);
        assert!(recs[1..].iter().all(|r| &r[3] == "certified"), "{family}");
    }
}

#[test]
fn certify_is_deterministic_across_worker_counts() {
    let dir = tmp();
    let one = stdout(&logprim(&["certify", "--family", "An", "--from", "1", "--to", "25", "--jobs", "1"], dir.path()));
    let many = stdout(&logprim(&["certify", "--family", "An", "--from", "1", "--to", "25", "--jobs", "7"], dir.path()));
    assert_eq!(one, many);
    assert!(one.ends_with("25 of 25 certified\n"));
}

#[test]
fn table_csv_and_json() {
    let dir = tmp();
    let o = logprim(&["table", "--which", "beta", "--max-n", "13", "--format", "csv"], dir.path());
    assert_eq!(code(&o), 0);
    let recs = csv_records(&stdout(&o));
    assert_eq!(&recs[0], &vec!["n", "alpha_measured", "alpha_closed", "beta", "mangoldt", "match"][..]);
    let beta: Vec<&str> = recs[1..].iter().map(|r| r.get(3).unwrap()).collect();
    assert_eq!(beta, ["2", "3", "2", "5", "1", "7", "2", "3", "1", "11", "1", "13"]);

    let o = logprim(&["table", "--which", "alpha", "--max-n", "30", "--format", "json", "--jobs", "4"], dir.path());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    validate("denominator_table.schema.json", &v);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 31);
    assert_eq!(rows[0]["beta"], Value::Null);
    assert!(rows.iter().enumerate().all(|(i, r)| r["n"] == i as u64 && r["match"] == true));
    assert_eq!(rows[8]["alpha_measured"], "33868800");
}

#[test]
fn oeis_offline_fixtures() {
    let dir = tmp();
    let o = logprim(&["oeis", "--seq", "1,2,3,2,5,1,7,2,3,1,11,1,13", "--offline", "--format", "json"], dir.path());
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    validate("oeis_report.schema.json", &v);
    assert_eq!(v["source"], "fixture");
    assert!(v["matches"].as_array().unwrap().iter().any(|m| m["sequence_id"] == "A014963"));

    let o = logprim(&["oeis", "--seq", "1,1,4,36,288,7200,43200", "--offline", "--format", "json"], dir.path());
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    validate("oeis_report.schema.json", &v);
    assert_eq!(v["total"], 0);
    assert_eq!(v["source"], "fixture");

    let o = logprim(&["oeis", "--seq", "1", "--offline", "--format", "json"], dir.path());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    validate("oeis_report.schema.json", &v);
    assert_eq!(v["matches"].as_array().unwrap().len(), 10);
    assert_eq!(v["truncated"], true);
    assert!(v["total"].as_u64().unwrap() > 10);
}

#[test]
fn oeis_offline_miss_is_degraded() {
    let dir = tmp();
    let o = Command::new(env!("CARGO_BIN_EXE_logprim"))
        .args(["oeis", "--seq", "5,6,7,8,9,10,11", "--format", "json"])
        .env("LOGPRIM_OEIS_OFFLINE", "1")
        .env("LOGPRIM_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 4);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    validate("oeis_report.schema.json", &v);
    assert_eq!(v["source"], "none");
    assert_eq!(v["total"], 0);
}

#[test]
fn oeis_csv_quotes_names() {
    let dir = tmp();
    let o = logprim(&["oeis", "--seq", "1", "--offline", "--format", "csv"], dir.path());
    let recs = csv_records(&stdout(&o));
    assert_eq!(recs.len(), 11);
    assert!(recs.iter().any(|r| r[2].contains("binomial(n+1,2)")));
}

/// Serves one canned HTTP response and hands back the request line.
fn serve_once(body: &'static str) -> (String, mpsc::Receiver<String>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let (mut stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut request_line = String::new();
        reader.read_line(&mut request_line).unwrap();
        loop {
            let mut line = String::new();
            if reader.read_line(&mut line).unwrap() == 0 || line == "\r\n" {
                break;
            }
        }
        write!(
            stream,
            "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        )
        .unwrap();
        tx.send(request_line).unwrap();
    });
    (url, rx)
}

fn unused_url() -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    format!("http://{}", listener.local_addr().unwrap())
}

#[test]
fn oeis_online_then_cached_fallback() {
    let dir = tmp();
    let body = r#"[{"number": 40, "name": "The prime numbers.", "data": "2,3,5,7,11,13,17,19,23,29"}]"#;
    let (url, requests) = serve_once(body);
    let o = logprim(&["oeis", "--seq", "2,3,5,7", "--base-url", &url, "--format", "json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let request = requests.recv().unwrap();
    assert!(request.starts_with("GET /search?"), "{request}");
    assert!(request.contains("q=2%2C3%2C5%2C7") || request.contains("q=2,3,5,7"), "{request}");
    assert!(request.contains("fmt=json"), "{request}");
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    validate("oeis_report.schema.json", &v);
    assert_eq!(v["source"], "network");
    assert_eq!(v["matches"][0]["sequence_id"], "A000040");
    assert_eq!(v["matches"][0]["matched_prefix_len"], 4);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);

    // the server is gone: the cached copy answers, flagged as degraded
    let o = logprim(&["oeis", "--seq", "2,3,5,7", "--base-url", &unused_url(), "--format", "json"], dir.path());
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["source"], "cache");
    assert_eq!(v["matches"][0]["sequence_id"], "A000040");

    // offline mode reads the same cache entry
    let o = logprim(&["oeis", "--seq", "2,3,5,7", "--offline"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("A000040"));
}

#[test]
fn oeis_network_failure_without_cache() {
    let dir = tmp();
    let o = logprim(&["oeis", "--seq", "4,8,15,16,23,42", "--base-url", &unused_url()], dir.path());
    assert_eq!(code(&o), 4);
    assert!(stdout(&o).contains("no matches"));
}
