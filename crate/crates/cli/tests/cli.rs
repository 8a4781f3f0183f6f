use std::path::Path;
use std::process::{Command, Output};

use floorsum::Rat;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    run_in(Path::new(env!("CARGO_TARGET_TMPDIR")), args)
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_floorsum"))
        .current_dir(dir)
        .env_remove("FLOORSUM_JOBS")
        .args(args)
        .output()
        .expect("spawn floorsum")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&run(&full))).unwrap()
}

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(format!("{name}.schema.json"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn is_rational(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    match body.split_once('/') {
        Some((p, q)) => {
            !p.is_empty()
                && !q.is_empty()
                && p.bytes().all(|b| b.is_ascii_digit())
                && q.bytes().all(|b| b.is_ascii_digit())
        }
        None => false,
    }
}

/// Checks `v` against the subset of JSON Schema the shipped schemas use.
fn validate(v: &Value, s: &Value, path: &str) -> Result<(), String> {
    let err = |msg: String| Err(format!("{path}: {msg}"));
    if let Some(any) = s.get("anyOf").and_then(Value::as_array) {
        if !any.iter().any(|alt| validate(v, alt, path).is_ok()) {
            return err(format!("{v} matches no alternative"));
        }
    }
    if let Some(c) = s.get("const") {
        if v != c {
            return err(format!("{v} != const {c}"));
        }
    }
    if let Some(e) = s.get("enum").and_then(Value::as_array) {
        if !e.contains(v) {
            return err(format!("{v} not in enum"));
        }
    }
    if let Some(t) = s.get("type").and_then(Value::as_str) {
        let ok = match t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "integer" => v.is_i64() || v.is_u64(),
            "number" => v.is_number(),
            "boolean" => v.is_boolean(),
            "null" => v.is_null(),
            other => panic!("unsupported type {other}"),
        };
        if !ok {
            return err(format!("{v} is not {t}"));
        }
    }
    if let Some(p) = s.get("pattern").and_then(Value::as_str) {
        assert_eq!(p, "^-?[0-9]+/[0-9]+$", "unsupported pattern");
        if !is_rational(v.as_str().unwrap_or_default()) {
            return err(format!("{v} is not p/q"));
        }
    }
    if let Some(min) = s.get("minimum").and_then(Value::as_f64) {
        if v.as_f64().is_some_and(|x| x < min) {
            return err(format!("{v} < {min}"));
        }
    }
    if let Some(obj) = v.as_object() {
        for key in s
            .get("required")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            if !obj.contains_key(key.as_str().unwrap()) {
                return err(format!("missing {key}"));
            }
        }
        let props = s.get("properties").and_then(Value::as_object);
        for (k, child) in obj {
            match props.and_then(|p| p.get(k)) {
                Some(cs) => validate(child, cs, &format!("{path}.{k}"))?,
                None => {
                    if let Some(extra) = s.get("additionalProperties") {
                        validate(child, extra, &format!("{path}.{k}"))?;
                    }
                }
            }
        }
    }
    if let Some(arr) = v.as_array() {
        if let Some(min) = s.get("minItems").and_then(Value::as_u64) {
            if (arr.len() as u64) < min {
                return err(format!("fewer than {min} items"));
            }
        }
        if let Some(items) = s.get("items") {
            for (i, item) in arr.iter().enumerate() {
                validate(item, items, &format!("{path}[{i}]"))?;
            }
        }
    }
    Ok(())
}

fn assert_valid(v: &Value, name: &str) {
    if let Err(e) = validate(v, &schema(name), "$") {
        panic!("{name} output does not match its schema: {e}\n{v:#}");
    }
}

#[test]
fn validator_rejects_bad_documents() {
    let s = schema("eval");
    let mut v = json(&["eval", "--n", "5", "--x", "1/2"]);
    assert!(validate(&v, &s, "$").is_ok());
    v["x"] = Value::from("0.5");
    assert!(validate(&v, &s, "$").is_err());
    v["x"] = Value::from("1/2");
    v["schema_version"] = Value::from(2);
    assert!(validate(&v, &s, "$").is_err());
    v.as_object_mut().unwrap().remove("schema_version");
    assert!(validate(&v, &s, "$").is_err());
}

#[test]
fn eval_examples() {
    let text = stdout(&run(&["eval", "--n", "5", "--x", "1/2"]));
    assert!(text.contains("f = 4/15\n"), "{text}");
    assert!(text.contains("d = 2\n"));
    let v = json(&["eval", "--n", "7", "--x", "3"]);
    assert_eq!(v["f"], "0/1");
    let v = json(&["eval", "--n", "3", "--x", "-1/2"]);
    assert_eq!(v["f"], "1/6");
    assert_valid(&v, "eval");
    let v = json(&["eval", "--n", "5", "--x", "0.5"]);
    assert_eq!(v["x"], "1/2");
}

#[test]
fn eval_errors_and_exit_codes() {
    assert_eq!(
        run(&["eval", "--n", "3", "--x", "abc"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["eval", "--n", "3", "--x", "1/0"]).status.code(),
        Some(3)
    );
    assert_eq!(
        run(&["eval", "--n", "0", "--x", "1/2"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["eval", "--x", "1/2"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn decimal_rendering_sits_next_to_exact_value() {
    let text = stdout(&run(&["eval", "--n", "5", "--x", "1/2", "--decimal", "4"]));
    assert!(text.contains("f = 4/15 (0.2667)"), "{text}");
    let v = json(&["eval", "--n", "5", "--x", "1/2", "--decimal", "4"]);
    assert_eq!(v["f"], "4/15");
    assert_eq!(v["decimal"]["f"], "0.2667");
    assert_valid(&v, "eval");
    let csv = stdout(&run(&[
        "range",
        "--n",
        "3",
        "--format",
        "csv",
        "--decimal",
        "3",
    ]));
    assert_eq!(csv.lines().next(), Some("left,right,value,value_decimal"));
    assert!(csv.contains("2/3,1/1,5/6,0.833"));
}

#[test]
fn range_examples() {
    let v = json(&["range", "--n", "3"]);
    assert_valid(&v, "range");
    let values: Vec<&str> = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["value"].as_str().unwrap())
        .collect();
    assert_eq!(values, ["0/1", "1/6", "2/3", "5/6"]);
    let v = json(&["range", "--n", "1"]);
    assert_eq!(v["entries"].as_array().unwrap().len(), 1);
    assert_eq!(v["entries"][0]["value"], "0/1");
    assert!(v["min_nonzero"].is_null());
    assert_valid(&v, "range");
}

fn totient(q: u64) -> u64 {
    (1..=q).filter(|&p| gcd(p, q) == 1).count() as u64
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn range_csv_is_plot_ready() {
    let text = stdout(&run(&["range", "--n", "100", "--format", "csv"]));
    let expected_rows: u64 = (1..=100).map(totient).sum::<u64>() + 1;
    assert_eq!(text.lines().count() as u64, expected_rows);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(reader.headers().unwrap(), vec!["left", "right", "value"]);
    let mut prev_right: Option<Rat> = None;
    for rec in reader.records() {
        let rec = rec.unwrap();
        let left: Rat = rec[0].parse().unwrap();
        let right: Rat = rec[1].parse().unwrap();
        let value: Rat = rec[2].parse().unwrap();
        assert!(left < right);
        assert!(!value.is_negative());
        if let Some(p) = prev_right {
            assert_eq!(p, left, "rows tile [0, 1)");
        }
        prev_right = Some(right);
    }
    assert_eq!(prev_right, Some(Rat::one()));
}

#[test]
fn printed_rationals_round_trip() {
    fn walk(v: &Value, seen: &mut usize) {
        match v {
            Value::String(s) if is_rational(s) => {
                let r: Rat = s.parse().unwrap();
                assert_eq!(&r.to_string(), s);
                *seen += 1;
            }
            Value::Array(a) => a.iter().for_each(|x| walk(x, seen)),
            Value::Object(o) => o.values().for_each(|x| walk(x, seen)),
            _ => {}
        }
    }
    let mut seen = 0;
    walk(&json(&["range", "--n", "12"]), &mut seen);
    walk(&json(&["approx", "--u", "7/10", "--t", "9"]), &mut seen);
    assert!(seen > 100);
}

#[test]
fn classify_examples() {
    let v = json(&["classify", "--n", "7", "--x", "1/4"]);
    assert_eq!(
        (v["tag"].as_str(), v["m"].as_u64()),
        (Some("PartialSum"), Some(3))
    );
    assert_valid(&v, "classify");
    let v = json(&["classify", "--n", "10", "--x", "1/2"]);
    assert_eq!(v["tag"], "AboveLambda");
    let v = json(&["classify", "--n", "4", "--x", "9"]);
    assert_eq!(v["tag"], "Zero");
    assert!(v.get("m").is_none());
    assert_valid(&v, "classify");
    let text = stdout(&run(&["classify", "--n", "5", "--x", "1/2"]));
    assert!(text.starts_with("tag = FourFifteenths\n"));
}

#[test]
fn approx_examples() {
    let v = json(&["approx", "--u", "1/3", "--t", "3"]);
    assert_eq!(
        (v["n_hat"].as_u64(), v["s"].as_str()),
        (Some(4), Some("5/12"))
    );
    assert_valid(&v, "approx");
    let v = json(&["approx", "--u", "1/2", "--eps", "1/1000"]);
    let err: Rat = v["err"].as_str().unwrap().parse().unwrap();
    assert!(err < Rat::of(1, 1000));
    assert_valid(&v, "approx");
    let out = run(&["approx", "--u", "1/4", "--eps", "1/10"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("below lambda"));
    assert_eq!(run(&["approx", "--u", "1/2"]).status.code(), Some(1));
    assert_eq!(
        run(&["approx", "--u", "1/2", "--t", "3", "--eps", "1/10"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn verify_writes_a_valid_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["verify", "--max-n", "40"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let cert: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("floorsum-certificate.json")).unwrap(),
    )
    .unwrap();
    assert_valid(&cert, "certificate");
    assert_eq!(cert.as_array().unwrap().len(), 12);
    assert!(cert.as_array().unwrap().iter().all(|c| c["passed"] == true));

    let path = dir.path().join("small.json");
    let v = json(&[
        "verify",
        "--max-n",
        "10",
        "--check",
        "usamo,gap",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_valid(&v, "verify");
    let names: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["usamo", "gap"]);
    assert!(path.exists());
}

#[test]
fn verify_rejects_unknown_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["verify", "--check", "nonsense"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonsense"));
    assert!(!dir.path().join("floorsum-certificate.json").exists());
}

#[test]
fn bench_reports_both_methods() {
    let v = json(&["bench", "--n", "1"]);
    assert_valid(&v, "bench");
    let v = json(&["bench", "--n", "50,100,200"]);
    assert_valid(&v, "bench");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let last = &rows[2];
    assert_eq!(last["n"], 200);
    assert!(last["delta_walk_ms"].as_f64().unwrap() < last["naive_ms"].as_f64().unwrap());
    let text = stdout(&run(&["bench", "--n", "20", "--sequential"]));
    assert!(text.contains("naive ms") && text.contains("delta ms"));
}

#[test]
fn jobs_flag_and_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_floorsum"))
        .env("FLOORSUM_JOBS", "2")
        .args(["range", "--n", "20", "--format", "csv"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        stdout(&run(&[
            "range", "--n", "20", "--format", "csv", "--jobs", "1"
        ]))
    );
    assert_eq!(
        run(&["range", "--n", "3", "--jobs", "0"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["range", "--n", "3", "--jobs", "many"]).status.code(),
        Some(1)
    );
}
