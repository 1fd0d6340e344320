use std::path::Path;
use std::process::{Command, Output};

use clap::Parser;
use qsense_cli::config::ScenarioConfig;
use qsense_cli::{run, Cli};

fn qsense(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsense")).args(args).output().expect("the qsense binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("scenario.cfg");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn missing_config_file_names_the_path() {
    let out = qsense(&["sweep-ph", "--config", "/nonexistent/qsense.cfg"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("/nonexistent/qsense.cfg"), "{}", stderr(&out));
}

#[test]
fn unknown_key_is_rejected_with_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "# sensor\nscenario.pseudo-hermitian.epsilon=0.1\nscenario.pseudo-hermitian.eps=0.2\n");
    let out = qsense(&["sweep-ph", "--config", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains(&format!("{path}:3: unknown key 'scenario.pseudo-hermitian.eps'")), "{}", stderr(&out));
}

#[test]
fn invalid_grid_is_a_config_error() {
    let out = qsense(&["sweep-ph", "--count", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("grid.count"));
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "scenario.pseudo-hermitian.epsilon=0.05\ngrid.count=5\nnu=3\n");
    let out = qsense(&["sweep-ph", "--config", &path, "--epsilon", "0.2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# scenario.pseudo-hermitian.epsilon=0.2\n"), "{text}");
    assert!(text.contains("# nu=3\n") && text.contains("# grid.count=5\n"));
    let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines[0], "lam,S,chi,P1,dP1_dlam,sensitivity,qfi_closed,qfi_numeric,rate_closed,hermitian_bound");
    assert_eq!(lines.len(), 6);
}

#[test]
fn metadata_header_reparses_to_the_same_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "scenario=pt-ep\ntol=1e-9\nscenario.pt-ep.delta=0.04\ngrid.count=4\n");
    let cli = Cli::try_parse_from(["qsense", "scan-ep", "--config", &path, "--start", "1.7", "--nu", "5"]).unwrap();
    let config = cli.config().unwrap();
    let artifact = run(&cli.command, &config).unwrap();
    let back = ScenarioConfig::from_metadata(&artifact.text).unwrap();
    assert_eq!(back, config);
    assert!(artifact.text.contains("# resolved.Gamma=1.1180061625"), "{}", artifact.text);
}

#[test]
fn scan_writes_declared_columns_and_json_records() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("scan.csv");
    let out = qsense(&["scan-ep", "--count", "3", "--out", csv_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "omega_delta,PJ,PGamma,E_res,var_E,chi_E,sensitivity,hermitian_bound,excluded_reason");

    let out = qsense(&["scan-ep", "--count", "3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["metadata"]["format"], "json");
    assert_eq!(v["metadata"]["artifact"], qsense_cli::config::ARTIFACT);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert_eq!(v["rows"][0]["omega_delta"], 1.5);
}

#[test]
fn find_ep_reports_the_first_exceptional_point() {
    let out = qsense(&["find-ep", "--J", "1", "--omega", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().last().unwrap();
    let gamma: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((gamma - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-11, "{row}");
}

#[test]
fn empty_bracket_is_a_numerical_failure() {
    let out = qsense(&["find-ep", "--ep-lo", "0.01", "--ep-hi", "0.02"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no sign change"), "{}", stderr(&out));
}

#[test]
fn failed_check_sets_exit_status_three() {
    // Two Monte Carlo trials cannot pin a variance to 10 %.
    let out = qsense(&["verify", "--trials", "2", "--families", "2", "--instances", "10", "--repeats", "1000"]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("response_variance_monte_carlo") && text.ends_with("overall,,NaN,NaN,NaN,false\n"), "{text}");
}

#[test]
fn verify_is_byte_identical_for_a_seed() {
    let args = |seed| ["verify", "--seed", seed, "--families", "10", "--instances", "200", "--trials", "20000", "--repeats", "20000"];
    let a = qsense(&args("3"));
    let b = qsense(&args("3"));
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, qsense(&args("4")).stdout);
}
