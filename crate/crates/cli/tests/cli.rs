use std::io::Write;
use std::process::{Command, Output};

use conjcomb_core::io::StateJson;
use conjcomb_core::random::{random_state, rng_from_seed};
use serde_json::Value;

fn conjcomb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conjcomb"))
        .args(args)
        .env_remove("CONJCOMB_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn batch(lines: &[String]) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    for l in lines {
        writeln!(f, "{l}").unwrap();
    }
    f
}

#[test]
fn verify_conjugation_examples() {
    let out = conjcomb(&[
        "verify-conjugation",
        "--dim",
        "3",
        "--trials",
        "100",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["maxDistance"].as_f64().unwrap() < 1e-10);
    assert_eq!(v["pass"], true);

    let out = conjcomb(&["verify-conjugation", "--dim", "2", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["witness"]["feasible"], true);

    assert_eq!(
        conjcomb(&["verify-conjugation", "--dim", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        conjcomb(&["verify-conjugation", "--dim", "7"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        conjcomb(&["verify-conjugation", "--trials", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        conjcomb(&["verify-conjugation", "--tolerance", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(conjcomb(&["bogus-command"]).status.code(), Some(2));
}

#[test]
fn verify_reports_check_failure() {
    // no circuit reaches a zero distance bound
    let out = conjcomb(&[
        "verify-conjugation",
        "--dim",
        "3",
        "--trials",
        "3",
        "--tolerance",
        "1e-300",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn d6_skips_channel_route() {
    let out = conjcomb(&["verify-conjugation", "--dim", "6", "--trials", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["maxChannelDistance"].is_null());
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = conjcomb(&[
            "verify-conjugation",
            "--dim",
            "4",
            "--trials",
            "5",
            "--seed",
            "11",
            "--format",
            "csv",
            "--output",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let threads1 = conjcomb(&[
        "twirl-witness",
        "--dim",
        "2",
        "--mc-samples",
        "600",
        "--seed",
        "3",
        "--threads",
        "1",
    ]);
    let threads2 = conjcomb(&[
        "twirl-witness",
        "--dim",
        "2",
        "--mc-samples",
        "600",
        "--seed",
        "3",
        "--threads",
        "2",
    ]);
    assert_eq!(threads1.stdout, threads2.stdout);
}

#[test]
fn seed_env_fallback() {
    let run = |env: Option<&str>, args: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_conjcomb"));
        c.args(args).env_remove("CONJCOMB_SEED");
        if let Some(s) = env {
            c.env("CONJCOMB_SEED", s);
        }
        c.output().unwrap()
    };
    let from_env = run(Some("5"), &["nogo", "--epsilon", "0.3"]);
    let from_flag = run(None, &["nogo", "--epsilon", "0.3", "--seed", "5"]);
    assert_eq!(from_env.stdout, from_flag.stdout);
    assert_eq!(json(&from_env)["seed"], 5);
}

#[test]
fn concurrence_bell_and_product() {
    let s = 0.5f64.sqrt();
    let f = batch(&[
        format!(r#"{{"dims":[2,2],"re":[{s},0,0,{s}],"im":[0,0,0,0]}}"#),
        r#"{"dims":[2,2],"re":[0,0,0,0],"im":[0,1,0,0]}"#.to_string(),
    ]);
    let out = conjcomb(&["concurrence", "--input", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    let bell = rows[0]["values"].as_object().unwrap();
    assert_eq!(bell.len(), 5);
    for (name, x) in bell {
        assert!((x.as_f64().unwrap() - 1.0).abs() < 1e-10, "{name}");
    }
    for (name, x) in rows[1]["values"].as_object().unwrap() {
        assert!(x.as_f64().unwrap().abs() < 1e-10, "{name}");
    }
    assert!(rows[1]["ratio"].is_null());
}

#[test]
fn concurrence_ratio_column() {
    let mut rng = rng_from_seed(21);
    let lines: Vec<String> = (0..100)
        .map(|_| {
            serde_json::to_string(&StateJson::from(&random_state(&[3, 3], &mut rng).unwrap()))
                .unwrap()
        })
        .collect();
    let f = batch(&lines);
    let out = conjcomb(&[
        "concurrence",
        "--input",
        f.path().to_str().unwrap(),
        "--measures",
        "cg,monotone:3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let summary = &v["ratioSummary"];
    assert_eq!(summary["count"], 100);
    assert_eq!(summary["expected"], 9.0);
    assert!((summary["mean"].as_f64().unwrap() - 9.0).abs() < 1e-8);
    assert!(summary["std"].as_f64().unwrap() < 1e-8);
    for r in v["rows"].as_array().unwrap() {
        assert!((r["ratio"].as_f64().unwrap() - 9.0).abs() < 1e-8);
    }

    let csv = conjcomb(&[
        "concurrence",
        "--input",
        f.path().to_str().unwrap(),
        "--measures",
        "cg,f:1:1",
        "--format",
        "csv",
    ]);
    let text = String::from_utf8(csv.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("line,d,cg,f:1:1,ratio"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 101);
    assert!(text
        .lines()
        .last()
        .unwrap()
        .starts_with("# ratio count=100"));
}

#[test]
fn concurrence_reports_bad_lines() {
    let f = batch(&[
        r#"{"dims":[2,2],"re":[1,0,0,0],"im":[0,0,0,0]}"#.to_string(),
        "{not json".to_string(),
        r#"{"dims":[2,2],"re":[1,1,0,0],"im":[0,0,0,0]}"#.to_string(),
        r#"{"dims":[4],"re":[1,0,0,0],"im":[0,0,0,0]}"#.to_string(),
    ]);
    let out = conjcomb(&["concurrence", "--input", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    for n in [2, 3, 4] {
        assert!(err.contains(&format!("line {n}:")), "{err}");
    }
    assert!(!err.contains("line 1:"));
    assert!(out.stdout.is_empty());

    let missing = conjcomb(&["concurrence", "--input", "/nonexistent/rows.jsonl"]);
    assert_eq!(missing.status.code(), Some(2));
    let bad_measure = conjcomb(&[
        "concurrence",
        "--input",
        f.path().to_str().unwrap(),
        "--measures",
        "nope",
    ]);
    assert_eq!(bad_measure.status.code(), Some(2));
}

#[test]
fn nogo_examples() {
    let out = conjcomb(&["nogo", "--epsilon", "0.5", "--m", "1", "--l", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["successWeight"], 0.75);
    assert_eq!(v["crossingN"], 7);

    let v = json(&conjcomb(&["nogo", "--epsilon", "1", "--m", "1"]));
    assert_eq!(v["crossingN"], 1);

    for eps in ["0", "-0.2", "1.5", "nan"] {
        assert_eq!(
            conjcomb(&["nogo", "--epsilon", eps]).status.code(),
            Some(2),
            "{eps}"
        );
    }
    assert_eq!(
        conjcomb(&["nogo", "--epsilon", "0.5", "--l", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        conjcomb(&["nogo", "--epsilon", "0.5", "--m", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn twirl_witness_examples() {
    let v = json(&conjcomb(&["twirl-witness", "--dim", "2"]));
    assert_eq!(v["feasible"], true);

    let v = json(&conjcomb(&["twirl-witness", "--dim", "3"]));
    assert_eq!(v["rankSymmetric"], 6);
    assert_eq!(v["rankAntisymmetric"], 3);
    assert_eq!(v["feasible"], false);
    assert!(v.get("mcDistance").is_none());

    let v = json(&conjcomb(&[
        "twirl-witness",
        "--dim",
        "3",
        "--mc-samples",
        "10000",
    ]));
    assert!(v["mcDistance"].as_f64().unwrap() < 0.05);

    assert_eq!(
        conjcomb(&["twirl-witness", "--dim", "9"]).status.code(),
        Some(2)
    );
    assert_eq!(
        conjcomb(&["twirl-witness", "--dim", "5", "--mc-samples", "10"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn antisym_dump_outputs() {
    let v = json(&conjcomb(&["antisym-dump", "--dim", "2", "--n", "1"]));
    assert_eq!((v["rows"].as_u64(), v["cols"].as_u64()), (Some(2), Some(2)));
    let im: Vec<f64> = v["im"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    let re: Vec<f64> = v["re"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    // σ_y up to a global phase: real antisymmetric with entries ±1
    assert_eq!(im, [0.0; 4]);
    assert_eq!(re[0], 0.0);
    assert_eq!(re[3], 0.0);
    assert_eq!(re[1] * re[2], -1.0);

    let out = conjcomb(&["antisym-dump", "--dim", "3", "--n", "1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("row,col,re,im"));
    // each of the 3 input columns maps to one wedge with 2 nonzero entries
    assert_eq!(text.lines().count(), 1 + 6);

    let v = json(&conjcomb(&[
        "antisym-dump",
        "--dim",
        "4",
        "--n",
        "1",
        "--indices",
        "0,2,3",
    ]));
    assert_eq!(v["m"], 2);
    assert_eq!(v["indices"], serde_json::json!([0, 2, 3]));

    assert_eq!(
        conjcomb(&["antisym-dump", "--dim", "3", "--n", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        conjcomb(&["antisym-dump", "--dim", "3", "--indices", "2,1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        conjcomb(&["antisym-dump", "--dim", "3", "--n", "1", "--m", "1"])
            .status
            .code(),
        Some(2)
    );
}
