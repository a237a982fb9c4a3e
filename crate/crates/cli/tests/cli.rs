mod common;

use std::fs;
use std::path::Path;

use serde_json::Value;

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(out: &std::process::Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &std::process::Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(common::ltg(&["--help"]).status.code(), Some(0));
    assert_eq!(common::ltg(&["--version"]).status.code(), Some(0));
    assert_eq!(common::ltg(&["analyze", "--help"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let table = common::write_synthetic_table(dir.path());
    let text = dir.path().join("t.txt");
    fs::write(&text, common::submission_text(2_000, 1, 0.9)).unwrap();

    assert_eq!(common::ltg(&[]).status.code(), Some(1));
    assert_eq!(common::ltg(&["analyze", s(&text), "--nope"]).status.code(), Some(1));
    // No embeddings given and none in the environment.
    assert_eq!(common::ltg(&["analyze", s(&text)]).status.code(), Some(1));
    let out = common::ltg(&["analyze", s(&text), "--embeddings", s(&table), "--grid", "sparse"]);
    assert_eq!(out.status.code(), Some(1));
    let out = common::ltg(&["analyze", s(&text), "--embeddings", s(&table), "--tau-min", "10", "--tau-max", "50"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error: "), "{}", stderr(&out));
}

#[test]
fn missing_text_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let table = common::write_synthetic_table(dir.path());
    let missing = dir.path().join("absent.txt");
    let out = common::ltg(&["analyze", s(&missing), "--embeddings", s(&table)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("absent.txt"));
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_embeddings_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("bad.txt");
    fs::write(&table, "w1 1.0 0.5\nw2 1.0\n").unwrap();
    let text = dir.path().join("t.txt");
    fs::write(&text, "w1 w2 ".repeat(500)).unwrap();
    let out = common::ltg(&["analyze", s(&text), "--embeddings", s(&table)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn short_text_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let table = common::write_synthetic_table(dir.path());
    let text = dir.path().join("short.txt");
    fs::write(&text, "w1 w2 w3 ".repeat(50)).unwrap();
    let out = common::ltg(&["analyze", s(&text), "--embeddings", s(&table)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("text too short"), "{}", stderr(&out));
}

#[test]
fn no_vocabulary_overlap_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let table = common::write_synthetic_table(dir.path());
    let text = dir.path().join("foreign.txt");
    fs::write(&text, "zzz yyy ".repeat(500)).unwrap();
    let out = common::ltg(&["analyze", s(&text), "--embeddings", s(&table)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analyze_formats_agree() {
    let dir = tempfile::tempdir().unwrap();
    let table = common::write_synthetic_table(dir.path());
    let text = dir.path().join("t.txt");
    fs::write(&text, common::submission_text(30_000, 5, 0.97)).unwrap();

    let out = common::ltg(&["analyze", s(&text), "--embeddings", s(&table)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let json: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["embedding_name"], "synthetic16");
    assert_eq!(json["tau_max"], 10_000);
    assert_eq!(json["grid_mode"], "geometric20");
    let value = json["gapelmaper"].as_f64().unwrap();
    let expected = json["mape_power"].as_f64().unwrap() / json["mape_exp"].as_f64().unwrap();
    assert_eq!(value, expected);

    let out = common::ltg(&["analyze", s(&text), "--embeddings", s(&table), "--format", "csv"]);
    let csv = stdout(&out);
    let mut lines = csv.lines();
    let header: Vec<_> = lines.next().unwrap().split(',').collect();
    let row: Vec<_> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "gapelmaper").unwrap();
    assert_eq!(row[col].parse::<f64>().unwrap(), value);

    let out = common::ltg(&["analyze", s(&text), "--embeddings", s(&table), "--format", "table"]);
    assert!(stdout(&out).contains(&format!("{value:.2}")));
}

#[test]
fn embeddings_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let table = common::write_synthetic_table(dir.path());
    let text = dir.path().join("t.txt");
    fs::write(&text, common::submission_text(5_000, 2, 0.9)).unwrap();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_ltg"))
        .args(["analyze", s(&text)])
        .env("LTG_EMBEDDINGS", &table)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn empty_corpus_directory_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let table = common::write_synthetic_table(dir.path());
    let corpus = dir.path().join("corpus");
    fs::create_dir(&corpus).unwrap();
    fs::write(corpus.join(".hidden"), "w1 ".repeat(1000)).unwrap();
    let out = common::ltg(&["corpus", s(&corpus), "--embeddings", s(&table)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn corpus_reports_each_file() {
    let dir = tempfile::tempdir().unwrap();
    let table = common::write_synthetic_table(dir.path());
    let corpus = dir.path().join("corpus");
    fs::create_dir(&corpus).unwrap();
    let long = corpus.join("b_long.txt");
    fs::write(&long, common::submission_text(25_000, 3, 0.95)).unwrap();
    fs::write(corpus.join("a_tiny.txt"), "w1 w2 w3 ".repeat(50)).unwrap();

    let out = common::ltg(&["corpus", s(&corpus), "--embeddings", s(&table), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = stdout(&out);
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "name,mape_power,mape_exp,gapelmaper,error");
    assert!(lines[1].starts_with("a_tiny.txt,,,,\"text too short"), "{}", lines[1]);
    let fields: Vec<_> = lines[2].split(',').collect();
    assert_eq!(fields[0], "b_long.txt");
    assert_eq!(fields[4], "");

    let single = common::ltg(&["analyze", s(&long), "--embeddings", s(&table)]);
    let json: Value = serde_json::from_str(&stdout(&single)).unwrap();
    assert_eq!(fields[1].parse::<f64>().unwrap(), json["mape_power"].as_f64().unwrap());
    assert_eq!(fields[2].parse::<f64>().unwrap(), json["mape_exp"].as_f64().unwrap());
    assert_eq!(fields[3].parse::<f64>().unwrap(), json["gapelmaper"].as_f64().unwrap());

    let out = common::ltg(&["corpus", s(&corpus), "--embeddings", s(&table)]);
    let table_out = stdout(&out);
    assert!(table_out.lines().nth(1).unwrap().contains("text too short"));
}

#[test]
fn constant_text_curve() {
    let dir = tempfile::tempdir().unwrap();
    let table = common::write_synthetic_table(dir.path());
    let text = dir.path().join("same.txt");
    fs::write(&text, "w7 ".repeat(1000)).unwrap();
    let out = common::ltg(&["curve", s(&text), "--embeddings", s(&table)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = stdout(&out);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("tau,c"));
    let rows: Vec<(usize, f64)> = lines
        .map(|l| {
            let (tau, c) = l.split_once(',').unwrap();
            (tau.parse().unwrap(), c.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 500);
    for (i, (tau, c)) in rows.iter().enumerate() {
        assert_eq!(*tau, i + 1);
        assert!((c - 1.0).abs() < 1e-12, "C({tau}) = {c}");
    }

    let out = common::ltg(&["analyze", s(&text), "--embeddings", s(&table)]);
    let json: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["gapelmaper"], 1.0);
    assert_eq!(json["degenerate"], true);
}
