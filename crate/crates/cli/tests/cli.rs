use std::process::{Command, Output};

use serde_json::Value;

fn primword(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_primword"))
        .args(args)
        .env_remove("PRIMWORD_BUDGET")
        .output()
        .expect("spawn primword")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = primword(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout(&out)
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn json_lines(text: &str) -> Vec<Value> {
    text.lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn pi_examples() {
    assert_eq!(ok(&["pi", "-n", "2", "-l", "6"]), "54\n");
    assert_eq!(ok(&["pi", "-n", "2", "-l", "1"]), "2\n");
    assert_eq!(ok(&["pi", "-n", "3", "-l", "4"]), "72\n");
    assert_eq!(
        ok(&["pi", "-n", "2", "-l", "1..4"]),
        "1 2\n2 2\n3 6\n4 12\n"
    );
    let v = json(&["pi", "-n", "2", "-l", "30", "--format", "json"]);
    assert_eq!(v["pi"], "1073708010");
    assert_eq!(
        ok(&["pi", "-n", "2", "-l", "2", "--format", "csv"]),
        "n,l,pi\n2,2,2\n"
    );
}

#[test]
fn mobius_values() {
    assert_eq!(ok(&["mobius", "30"]), "-1\n");
    assert_eq!(ok(&["mobius", "12"]), "0\n");
    assert_eq!(ok(&["mobius", "1..3"]), "1 1\n2 -1\n3 -1\n");
}

#[test]
fn count_with_oracle() {
    let v = json(&["count", "-n", "2", "-l", "4", "--oracle"]);
    assert_eq!(v["variants"]["eps1"]["divisor_sum"], "42");
    assert_eq!(v["variants"]["eps1"]["closed_form"], "42");
    assert_eq!(v["variants"]["eps2"]["divisor_sum"], "6");
    assert_eq!(v["oracle"]["eps1"], "42");
    assert_eq!(v["oracle"]["eps2"], "6");
    // the eps1 subset-sum form is the only disagreeing variant here
    let disagreeing: Vec<&Value> = v["agreements"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|a| a["equal"] == false)
        .collect();
    assert!(!disagreeing.is_empty());
    assert!(disagreeing
        .iter()
        .all(|a| a["left"] == "combinatorial" || a["right"] == "combinatorial"));
}

#[test]
fn count_strict_exit_codes() {
    let out = primword(&["count", "-n", "2", "-l", "12", "--strict"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["variants"]["eps1"]["divisor_sum"], "256776");
    assert_eq!(v["variants"]["eps1"]["combinatorial"], "257280");
    assert_eq!(
        primword(&["count", "-n", "2", "-l", "10", "--strict"])
            .status
            .code(),
        Some(0)
    );
    let v = json(&["count", "-n", "2", "-l", "1"]);
    assert_eq!(v["variants"]["eps"]["divisor_sum"], "0");
}

#[test]
fn count_csv_and_ranges() {
    let csv = ok(&["count", "-n", "2", "-l", "2..3", "--format", "csv"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,l,quantity,source,value"));
    assert!(csv.contains("2,2,eps1,divisor_sum,4\n"));
    assert!(csv.contains("2,3,eps1,odd_length,0\n"));
    let v = json(&["count", "-n", "3", "-l", "1..4"]);
    assert_eq!(v.as_array().unwrap().len(), 4);
}

#[test]
fn enumerate_examples() {
    let lines = json_lines(&ok(&["enumerate", "-n", "2", "-l", "2", "--set", "e1"]));
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0]["p"], "aaba");
    assert_eq!(lines[0]["case"], "I");
    assert_eq!(lines[4]["summary"]["total"], 4);

    let lines = json_lines(&ok(&["enumerate", "-n", "2", "-l", "4", "--set", "e2"]));
    assert_eq!(lines.len(), 7);
    assert!(lines[..6]
        .iter()
        .all(|w| w["case"] == "II" || w["case"] == "III"));
    assert_eq!(lines[6]["summary"]["e2"], 6);

    let lines = json_lines(&ok(&["enumerate", "-n", "2", "-l", "3", "--set", "both"]));
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["summary"]["total"], 0);

    let lines = json_lines(&ok(&["enumerate", "-n", "2", "-l", "4"]));
    assert_eq!(lines.last().unwrap()["summary"]["total"], 48);
}

#[test]
fn enumerate_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.jsonl");
    let printed = ok(&[
        "enumerate",
        "-n",
        "3",
        "-l",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(printed.is_empty());
    let lines = json_lines(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(lines.last().unwrap()["summary"]["e1"], 18);
}

#[test]
fn enumerate_budget() {
    let out = primword(&["enumerate", "-n", "2", "-l", "8", "--budget", "100"]);
    assert_eq!(out.status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("never.jsonl");
    let out = primword(&[
        "enumerate",
        "-n",
        "2",
        "-l",
        "8",
        "--budget",
        "100",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!path.exists());
    let out = Command::new(env!("CARGO_BIN_EXE_primword"))
        .args(["enumerate", "-n", "2", "-l", "8"])
        .env("PRIMWORD_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn classify_examples() {
    let v = json(&["classify", "-n", "2", "-p", "aaba", "-q", "ab"]);
    assert_eq!(
        (v["case"].as_str(), v["x"].as_str(), v["k"].as_u64()),
        (Some("I"), Some("a"), Some(2))
    );
    let v = json(&["classify", "-n", "2", "-p", "bbabbabb", "-q", "abba"]);
    assert_eq!(v["case"], "II");
    assert_eq!(v["s"], 1);
    let v = json(&["classify", "-n", "2", "-p", "baabaabaab", "-q", "aabaa"]);
    assert_eq!(
        (v["case"].as_str(), v["alpha"].as_str(), v["beta"].as_str()),
        (Some("III"), Some("aa"), Some("b"))
    );
    let v = json(&["classify", "-n", "2", "-p", "[0,0,1,0]", "-q", "[0,1]"]);
    assert_eq!(v["case"], "I");
}

#[test]
fn classify_preconditions() {
    for (p, q, reason) in [
        ("aaaa", "ab", "p not primitive"),
        ("aaba", "aa", "q not primitive"),
        ("aab", "ab", "|p| != 2|q|"),
        ("aabb", "ab", "pq is primitive"),
    ] {
        let out = primword(&["classify", "-n", "2", "-p", p, "-q", q]);
        assert_eq!(out.status.code(), Some(4), "{p} {q}");
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["reason"], reason);
    }
    assert_eq!(
        primword(&["classify", "-n", "2", "-p", "abc", "-q", "ab"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn asymptote_examples() {
    let csv = ok(&[
        "asymptote",
        "--regime",
        "n-to-inf-eps2",
        "-l",
        "4",
        "--n-values",
        "2,5,10,100",
        "--format",
        "csv",
    ]);
    let ratios: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap())
        .collect();
    assert_eq!(
        ratios,
        [
            "0.750000000000",
            "0.960000000000",
            "0.990000000000",
            "0.999900000000"
        ]
    );

    let v = json(&[
        "asymptote",
        "--regime",
        "bound",
        "--n",
        "2",
        "--l-max",
        "40",
        "--format",
        "json",
    ]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 40);
    assert!(rows.iter().all(|r| r["verdict"] == true));
    assert_eq!(v["flagged"], false);

    let v = json(&[
        "asymptote",
        "--regime",
        "prime-product",
        "--n",
        "2",
        "--k",
        "3,4,5",
        "--format",
        "json",
    ]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows[0]["numerator"], "2129754");
    assert!(rows
        .iter()
        .all(|r| r["verdict"] == true && r["numerator"] == r["reference"]));

    let plain = ok(&[
        "asymptote",
        "--regime",
        "l-to-inf-eps1",
        "-n",
        "2",
        "--l-max",
        "8",
    ]);
    assert!(plain.contains("0.656250000000"));
}

#[test]
fn asymptote_domain_errors() {
    assert_eq!(
        primword(&["asymptote", "--regime", "n-to-inf-eps2", "-l", "9"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        primword(&[
            "asymptote",
            "--regime",
            "prime-product",
            "-n",
            "2",
            "--k",
            "2"
        ])
        .status
        .code(),
        Some(4)
    );
    assert_eq!(
        primword(&[
            "asymptote",
            "--regime",
            "l-to-inf-eps1",
            "-n",
            "2",
            "--l-values",
            "3"
        ])
        .status
        .code(),
        Some(4)
    );
    assert_eq!(
        primword(&["asymptote", "--regime", "bound"]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_passes() {
    let out = primword(&["verify", "--seed", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 8);
    assert!(text.lines().all(|l| l.starts_with("[PASS]")));
}

#[test]
fn usage_errors() {
    assert_eq!(
        primword(&["pi", "-n", "1", "-l", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(primword(&["pi", "-n", "2"]).status.code(), Some(2));
    assert_eq!(
        primword(&["pi", "-n", "2", "-l", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        primword(&["count", "-n", "2", "-l", "4", "--format", "xml"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        primword(&["enumerate", "-n", "2", "-l", "2", "--budget", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["enumerate", "-n", "2", "-l", "6"][..],
        &["count", "-n", "3", "-l", "1..12", "--format", "csv"],
        &["verify", "--format", "json"],
    ] {
        assert_eq!(primword(args).stdout, primword(args).stdout, "{args:?}");
    }
}
