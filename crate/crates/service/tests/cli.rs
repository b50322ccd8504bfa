use std::path::Path;
use std::process::{Command, Output};

fn typespace(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_typespace"))
        .args(args)
        .current_dir(dir)
        .env_remove("TYPESPACE_DATA_DIR")
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

#[test]
fn render_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = typespace(dir.path(), &["render", "--coords", "0.5,0.5,0.5", "--glyph", "o", "--out", "i.svg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("i.svg")).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    assert_eq!(doc.root_element().tag_name().name(), "svg");
}

#[test]
fn render_text_and_specimen_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = typespace(dir.path(), &["render", "--text", "viz", "--size", "40"]);
    assert!(out.status.success());
    roxmltree::Document::parse(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    let out = typespace(dir.path(), &["render", "--specimen", "1", "--glyphs", "i,l"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("data-kind=\"specimen-cell\"").count(), 16);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| typespace(dir.path(), args).status.code().unwrap();
    assert_eq!(code(&["render", "--glyph", "q"]), 2);
    assert_eq!(code(&["render", "--specimen", "0.3"]), 2);
    assert_eq!(code(&["render", "--coords", "1.5,0,0"]), 2);
    assert_eq!(code(&["render", "--space", "missing.json"]), 1);
    assert_eq!(code(&["analyze", "--data-dir", "missing"]), 1);
    assert_eq!(code(&["render", "--glyph", "o", "--out", "no/such/dir/x.svg"]), 1);
    std::fs::write(dir.path().join("bad.json"), "{}").unwrap();
    assert_eq!(code(&["render", "--space", "bad.json"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
}

#[test]
fn audit_flows() {
    let dir = tempfile::tempdir().unwrap();
    let out = typespace(dir.path(), &["audit", "--flow", "demo"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["report"]["checks"].as_array().unwrap().len(), 6);
    let out = typespace(dir.path(), &["audit", "--flow", "preselected"]);
    assert_eq!(out.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let failed: Vec<_> = report["report"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["ruleId"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(failed, ["R1"]);
}

#[test]
fn simulate_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let out = typespace(dir.path(), &["simulate", "--seed", "7", "--users", "21", "--tasks", "6", "--data-dir", "d"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = typespace(
        dir.path(),
        &["analyze", "--data-dir", "d", "--out", "report.json", "--overlay", "grid.svg"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = std::fs::read_to_string(dir.path().join("grid.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let kind = |k: &str| doc.descendants().filter(|n| n.attribute("data-kind") == Some(k)).count();
    assert_eq!((kind("cell"), kind("user-margin"), kind("task-margin")), (126, 21, 6));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["v"], 1);
    assert_eq!(report["perTrace"].as_array().unwrap().len(), 126);

    // Re-running the same simulation is a no-op on the store.
    let again = typespace(dir.path(), &["simulate", "--seed", "7", "--users", "21", "--tasks", "6", "--data-dir", "d"]);
    assert!(again.status.success(), "{}", String::from_utf8_lossy(&again.stderr));
}

#[test]
fn data_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_typespace"))
        .args(["simulate", "--users", "2", "--tasks", "1"])
        .current_dir(dir.path())
        .env("TYPESPACE_DATA_DIR", "from-env")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("from-env").join("index.ndjson").exists());
}
