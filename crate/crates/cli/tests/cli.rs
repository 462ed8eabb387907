use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prompt-pricing"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const PAIR: &str = r#"
[[models]]
id = "L"
utility = 1.0
cost = 0.02
price = 0.2

[[models]]
id = "H"
utility = 1.8
cost = 0.04
price = 0.5

[distribution]
kind = "uniform"
min = 0.0
max = 1.0

[quadrature]
nodes = 201

[opp]
alpha = 0.01
"#;

#[test]
fn user_strategy_default_grid() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.toml", PAIR);
    let out = bin(&["user-strategy", "--scenario", &s]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "eps,n_L,payoff_L,shape_L,n_H,payoff_H,shape_H,selected,n_selected,payoff"
    );
    assert_eq!(lines.count(), 99);
}

#[test]
fn json_is_written_next_to_csv() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.toml", PAIR);
    let out_csv = dir.path().join("h.csv");
    let out = bin(&[
        "homog-price",
        "--scenario",
        &s,
        "--json",
        "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("h.json")).unwrap()).unwrap();
    assert_eq!(json["columns"][0], "eps");
    assert_eq!(json["rows"].as_array().unwrap().len(), 99);
    assert!(std::fs::read_to_string(out_csv)
        .unwrap()
        .starts_with("eps,best_model"));
}

#[test]
fn opp_trace_has_one_row_per_low_price() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.toml", PAIR);
    let trace = dir.path().join("trace.csv");
    let out = bin(&["opp", "--scenario", &s, "--trace", trace.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.starts_with("method,p_L,p_H,N_L,N_H,payoff\nopp,"));
    // p_L from C_L = 0.02 to U_L = 1 in steps of 0.01
    let rows = std::fs::read_to_string(trace).unwrap().lines().count() - 1;
    assert_eq!(rows, 99);
}

#[test]
fn invalid_scenario_exits_2_with_every_violation() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "bad.toml",
        "[[models]]\nid = \"m\"\nutility = -1.0\ncost = -1.0\n\n[distribution]\nkind = \"uniform\"\nmin = 0.5\nmax = 0.1\n",
    );
    let out = bin(&["homog-price", "--scenario", &s]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    for field in ["models[0].utility", "models[0].cost", "distribution"] {
        assert!(err.contains(field), "{field} missing from {err}");
    }
}

#[test]
fn wrong_model_count_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let one = PAIR
        .split("[[models]]\nid = \"H\"")
        .next()
        .unwrap()
        .to_string()
        + "[distribution]\nkind = \"uniform\"\nmin = 0.0\nmax = 1.0\n";
    let s = write(dir.path(), "one.toml", &one);
    let out = bin(&["opp", "--scenario", &s]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_4() {
    assert_eq!(bin(&["no-such-verb"]).status.code(), Some(4));
    assert_eq!(bin(&["opp"]).status.code(), Some(4));
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.toml", PAIR);
    let out = bin(&["homog-price", "--scenario", &s, "--oracle"]);
    assert_eq!(out.status.code(), Some(4));
    let out = bin(&["compare", "--scenario", &s, "--trace", "t.csv"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn missing_scenario_file_exits_1() {
    let out = bin(&["homog-price", "--scenario", "/nonexistent/s.toml"]);
    assert_eq!(out.status.code(), Some(1));
}
