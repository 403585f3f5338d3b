use std::collections::BTreeMap;
use std::process::{Command, Output};

use serde::de::DeserializeOwned;
use serde_json::Value;
use sqrex_core::cfrac::{Expansion, NaturalExtensionReport, Status};
use sqrex_core::fractal::{DimensionReport, SelfSimilar};
use sqrex_core::lyapunov::{CocycleEstimate, SeriesValue};
use sqrex_core::pet::{Cell, Segment};
use sqrex_core::renorm::{CoverPiece, InductionReport};
use sqrex_core::symbolic::TowerStats;

fn sqrex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqrex"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = sqrex(args);
    assert!(
        out.status.success(),
        "{args:?}: {}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Parse into the emitting type and check that re-serialising gives the same JSON.
fn round_trip<T: DeserializeOwned + serde::Serialize>(args: &[&str]) -> T {
    let text = ok(args);
    let raw: Value = serde_json::from_str(&text).unwrap();
    let typed: T = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    assert_eq!(serde_json::to_value(&typed).unwrap(), raw, "{args:?}");
    typed
}

#[test]
fn expand_example() {
    let e: Expansion = round_trip(&["expand", "--param", "3/8,-1"]);
    assert_eq!(e.status, Status::Finite);
    assert_eq!(e.digits.len(), 3);
    let e: Expansion = round_trip(&["expand", "--param", "x=sqrt(2)/2"]);
    assert_eq!((e.status, e.preperiod, e.period), (Status::Periodic, Some(1), Some(2)));
}

#[test]
fn dimension_example() {
    let s: SelfSimilar = round_trip(&["dimension", "--family", "minus", "--n", "1"]);
    assert!((s.value - 1.637938).abs() < 1e-6);
    assert_eq!(ok(&["dimension", "--family", "minus", "--n", "1", "--format", "text"]), "1.637938\n");
    let r: DimensionReport = round_trip(&["dimension", "--param", "sqrt(3)-1,1", "--l", "50"]);
    assert!((r.value - 1.338499).abs() < 2e-2);
}

#[test]
fn lyapunov_example() {
    let args = ["lyapunov", "--trials", "1000", "--l", "10000", "--seed", "24029"];
    let e: CocycleEstimate = round_trip(&args);
    assert!((1.07..=1.55).contains(&e.s_hat), "{e:?}");
    assert_eq!(e.seed, 24029);
    let single = ok(&[&args[..], &["--threads", "1"]].concat());
    assert_eq!(serde_json::from_str::<CocycleEstimate>(&single).unwrap(), e);
}

#[test]
fn every_json_output_round_trips() {
    let _: Vec<Cell> = round_trip(&["islands", "--param", "sqrt(2)-1,-1", "--max-period", "5"]);
    let r: InductionReport = round_trip(&["induction-check", "--param", "sqrt(2)-1,-1", "--samples", "200"]);
    assert!(r.pass && r.max_error == 0.0);
    let _: TowerStats = round_trip(&["tower", "--param", "sqrt(2)-1,-1", "--l", "2"]);
    let i: BTreeMap<String, SeriesValue> = round_trip(&["integrals", "--terms", "1000"]);
    assert_eq!(i.len(), 3);
    let _: NaturalExtensionReport = round_trip(&["natext-check", "--samples", "2000"]);
    let s: Vec<Segment> = round_trip(&["segments", "--param", "3/5,-1", "--depth", "2"]);
    assert!(!s.is_empty());
    let c: Vec<CoverPiece> = round_trip(&["cover", "--param", "sqrt(2)-1,-1", "--l", "1"]);
    assert_eq!(c.len(), 8);
    let o: Value = round_trip(&["orbit", "--param", "sqrt(2)-1,-1", "--point", "1/2,1/3", "--n", "10"]);
    assert_eq!(o["points"].as_array().unwrap().len(), 11);
    let t: Value = round_trip(&["sturmian", "--param", "sqrt(2)-1,-1", "--n", "20", "--len", "2000"]);
    assert_eq!(t["sturmian"], Value::Bool(true));
}

fn csv_rows(text: &str) -> Vec<BTreeMap<String, String>> {
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
    lines
        .map(|l| header.iter().cloned().zip(l.split(',').map(str::to_string)).collect())
        .collect()
}

fn same_number(csv: &str, json: &Value) -> bool {
    match json {
        Value::Number(n) => csv.parse::<f64>().ok() == n.as_f64(),
        Value::String(s) => csv == s,
        _ => false,
    }
}

#[test]
fn csv_matches_json() {
    let args = ["lyapunov", "--trials", "50", "--l", "500"];
    let j: Value = serde_json::from_str(&ok(&args)).unwrap();
    for row in csv_rows(&ok(&[&args[..], &["--format", "csv"]].concat())) {
        let q = &row["quantity"];
        let err = q.replace("_hat", "_stderr");
        assert!(same_number(&row["value"], &j[q]), "{q}");
        assert!(same_number(&row["stderr"], &j[&err]), "{err}");
        for k in ["l", "trials", "seed", "restarts"] {
            assert!(same_number(&row[k], &j[k]), "{k}");
        }
    }

    let args = ["tower", "--param", "sqrt(3)-1,1", "--l", "2"];
    let j: Value = serde_json::from_str(&ok(&args)).unwrap();
    let row = &csv_rows(&ok(&[&args[..], &["--format", "csv"]].concat()))[0];
    for (c, k) in [("l", "l"), ("Na", "n_a"), ("Nb", "n_b"), ("N", "n"), ("alpha", "alpha"), ("beta", "beta"), ("blocks", "blocks"), ("prefix_len", "prefix_len")] {
        assert!(same_number(&row[c], &j[k]), "{c}: {} vs {}", row[c], j[k]);
    }

    let j: Value = serde_json::from_str(&ok(&["integrals", "--terms", "500"])).unwrap();
    for row in csv_rows(&ok(&["integrals", "--terms", "500", "--format", "csv"])) {
        let v = &j[&row["integral"]];
        for k in ["value", "tail_bound", "terms"] {
            assert!(same_number(&row[k], &v[k]));
        }
    }

    let j: Value = serde_json::from_str(&ok(&["dimension", "--table", "5"])).unwrap();
    for (row, v) in csv_rows(&ok(&["dimension", "--table", "5", "--format", "csv"])).iter().zip(j.as_array().unwrap()) {
        for k in ["n", "minus", "plus"] {
            assert!(same_number(&row[k], &v[k]));
        }
    }

    // generic key,value flattening
    let args = ["expand", "--param", "sqrt(7)-2,1", "--depth", "30"];
    let j: Value = serde_json::from_str(&ok(&args)).unwrap();
    let csv = ok(&[&args[..], &["--format", "csv"]].concat());
    for line in csv.lines().skip(1) {
        let (k, v) = line.split_once(',').unwrap();
        let ptr = format!("/{}", k.replace('.', "/"));
        match j.pointer(&ptr).unwrap() {
            Value::Null => assert_eq!(v, ""),
            Value::String(s) => assert_eq!(v, s),
            other => assert_eq!(v, other.to_string()),
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(sqrex(&["--help"]).status.code(), Some(0));
    assert_eq!(sqrex(&["--version"]).status.code(), Some(0));
    assert_eq!(sqrex(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(sqrex(&["expand", "--param", "nonsense"]).status.code(), Some(1));
    assert_eq!(sqrex(&["dimension"]).status.code(), Some(1));
    assert_eq!(sqrex(&["render", "--kind", "cover", "--param", "sqrt(2)-1,-1"]).status.code(), Some(1));

    let out = sqrex(&["tower", "--param", "3/8,-1"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(err["error"], "Terminal");
    assert!(err["message"].is_string());
    let out = sqrex(&["induction-check", "--param", "0,1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = sqrex(&["expand", "--param", "1/3,1", "--out", "/nonexistent/dir/x.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn render_is_deterministic_with_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.ppm");
    let b = dir.path().join("b.ppm");
    for path in [&a, &b] {
        ok(&["render", "--kind", "islands", "--param", "sqrt(2)-1,-1", "--px", "300", "--out", path.to_str().unwrap()]);
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(x.starts_with(b"P6\n300 "));
    assert_eq!(x, y);
    let manifest: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("a.ppm.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "render");
    assert_eq!(manifest["seed"], 0x5EED);
    assert!(manifest["argv"].as_array().unwrap().iter().any(|v| v == "islands"));

    let report = dir.path().join("dim.csv");
    ok(&["dimension", "--table", "3", "--format", "csv", "--out", report.to_str().unwrap()]);
    assert!(std::fs::read_to_string(&report).unwrap().starts_with("n,minus,plus\n1,"));
    assert!(dir.path().join("dim.csv.manifest.json").exists());
}
