use std::path::Path;
use std::process::{Command, Output};

use qcvine::model::CircuitModel;

const BIN: &str = env!("CARGO_BIN_EXE_qcvine");

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("QCVINE_THEME")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn compile_ghz(dir: &Path) -> String {
    let out = dir.join("m.json");
    let o = run(&[
        "compile",
        &fixture("ghz.qv"),
        "--param",
        "n=3",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    out.to_str().unwrap().to_string()
}

#[test]
fn compile_writes_model() {
    let dir = tempfile::tempdir().unwrap();
    let path = compile_ghz(dir.path());
    let m = CircuitModel::from_json(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(m.gates.len(), 3);
    assert!(m.validate().is_empty());
}

#[test]
fn compile_errors_exit_1_with_location() {
    let o = run(&["compile", &fixture("ghz.qv")]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("parameter unbound: n"), "{err}");
    assert!(err.contains("ghz.qv:2:"), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.qv");
    std::fs::write(&bad, "circuit main(2) {\n  h q[0]\n}\n").unwrap();
    let o = run(&["compile", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.qv:3:1: syntax error"), "{}", stderr(&o));

    let o = run(&["compile", "/nonexistent/x.qv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("No such file"));

    let o = run(&["compile", &fixture("ghz.qv"), "--param", "n=three"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn render_views() {
    let dir = tempfile::tempdir().unwrap();
    let model = compile_ghz(dir.path());
    let svg = dir.path().join("a.svg");
    let o = run(&[
        "render",
        &model,
        "--view",
        "abstraction",
        "--fold-depth",
        "1",
        "-o",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&svg).unwrap();
    roxmltree::Document::parse(&text).unwrap();

    let o = run(&["render", &model, "--view", "provenance", "--qubit", "0"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("class=\"event\""));

    let o = run(&["render", &model, "--view", "placement", "--threshold", "2", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["threshold"], 2);

    let o = run(&["render", &model, "--view", "component", "--unfold", "0,1", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["superGates"].as_array().unwrap().len(), 2);
}

#[test]
fn render_errors() {
    let dir = tempfile::tempdir().unwrap();
    let model = compile_ghz(dir.path());
    let o = run(&["render", &model, "--view", "connectivity", "--node", "7"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown tree node: 7"));
    let o = run(&["render", &model, "--view", "bogus"]);
    assert_ne!(o.status.code(), Some(0));
    let o = run(&["render", &model, "--view", "component", "--unfold", "0,9"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["render", &model, "--view", "provenance"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn render_is_deterministic_across_processes() {
    let args = [
        "render",
        &fixture("qugan.qv"),
        "--param",
        "n=9",
        "--view",
        "abstraction",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn flat_json_import() {
    let dir = tempfile::tempdir().unwrap();
    let flat = dir.path().join("flat.json");
    std::fs::write(
        &flat,
        r#"{"qubits":2,"gates":[{"gate":"h","qubits":[0]},{"gate":"cx","qubits":[0,1]}]}"#,
    )
    .unwrap();
    let o = run(&["compile", "--from-json", flat.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = CircuitModel::from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert_eq!((m.gates.len(), m.tree.nodes.len()), (2, 1));
}

#[test]
fn theme_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let model = compile_ghz(dir.path());
    let theme = dir.path().join("theme.json");
    std::fs::write(&theme, r##"{"background": "#000000"}"##).unwrap();
    let o = Command::new(BIN)
        .args(["render", &model, "--view", "component"])
        .env("QCVINE_THEME", &theme)
        .output()
        .unwrap();
    assert!(String::from_utf8(o.stdout).unwrap().contains("fill=\"#000000\""));

    std::fs::write(&theme, r#"{"unit": 2}"#).unwrap();
    let o = Command::new(BIN)
        .args(["render", &model, "--view", "component"])
        .env("QCVINE_THEME", &theme)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unit must be at least 8"));
}

#[test]
fn analyze_reports() {
    let o = run(&["analyze", &fixture("multiplier.qv"), "--json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["qubits"], 15);
}
