use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn flrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flrank")).args(args).output().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn version_and_usage_exit_codes() {
    let out = flrank(&["--version"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("0.1.0 (format 1)"));
    assert_eq!(flrank(&["sbfl", "--bogus"]).status.code(), Some(1));
    assert_eq!(flrank(&[]).status.code(), Some(1));
}

#[test]
fn missing_bundle_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = flrank(&["sbfl", "--bundle", path_str(&dir.path().join("nope"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn sbir_is_reproducible_and_logs() {
    let bundle = fixtures().join("corpus/bank-1");
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let log = dir.path().join("log.json");
    let out = flrank(&[
        "sbir",
        "--bundle",
        path_str(&bundle),
        "--out",
        path_str(&a),
        "--log",
        path_str(&log),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = flrank(&["sbir", "--bundle", path_str(&bundle)]);
    assert_eq!(std::fs::read(&a).unwrap(), stdout.stdout);
    let log: serde_json::Value = serde_json::from_slice(&std::fs::read(&log).unwrap()).unwrap();
    assert!(log["iterations"].as_u64().unwrap() >= 1);
}

#[test]
fn rafl_on_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let empty = dir.path().join("empty.json");
    std::fs::write(
        &a,
        r#"[{"item_id":"x","score":1.0,"rank":1},{"item_id":"y","score":0.5,"rank":2}]"#,
    )
    .unwrap();
    std::fs::write(
        &b,
        r#"[{"item_id":"x","score":1.0,"rank":1},{"item_id":"z","score":0.5,"rank":2}]"#,
    )
    .unwrap();
    std::fs::write(&empty, "[]").unwrap();

    let out = flrank(&["rafl", path_str(&a), path_str(&a), "--k", "2"]);
    assert!(out.status.success());
    let list: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(list[0]["item_id"], "x");
    assert_eq!(list[1]["item_id"], "y");

    let out = flrank(&["rafl", path_str(&empty), path_str(&empty)]);
    assert!(out.status.success());
    assert_eq!(
        serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap(),
        serde_json::json!([])
    );

    let out = flrank(&["rafl", path_str(&a), path_str(&b), "--weights", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn blues_writes_every_config() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = fixtures().join("corpus/calc-1");
    let out = flrank(&[
        "blues",
        "--bundle",
        path_str(&bundle),
        "--configs-dir",
        path_str(dir.path()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["high-m1", "high-m25", "high-m50", "high-m100", "high-mall", "wt-mall"] {
        assert!(dir.path().join(format!("{name}.json")).is_file(), "{name}");
    }
}

#[test]
fn extract_emits_jsonl() {
    let out = flrank(&["extract", "--src", path_str(&fixtures().join("extract"))]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["statement_id"], "Calculator.java:7:0");
}

#[test]
fn eval_reproduces_golden_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.txt");
    let out = flrank(&[
        "eval",
        "--corpus",
        path_str(&fixtures().join("corpus")),
        "--union",
        "--table",
        path_str(&table),
        "--out",
        path_str(&dir.path().join("report.json")),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let golden = std::fs::read_to_string(fixtures().join("golden_table.txt")).unwrap();
    assert_eq!(std::fs::read_to_string(&table).unwrap(), golden);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
}
