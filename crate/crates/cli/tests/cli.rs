use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use slopecert_cli::{Outcome, Report};
use slopecert_core::criteria::Conclusion;
use slopecert_core::rational::q;

fn slopecert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slopecert"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn write_scenario(text: &str) -> tempfile::NamedTempFile {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    std::io::Write::write_all(&mut file, text.as_bytes()).unwrap();
    file
}

fn run_json(text: &str) -> Report {
    let file = write_scenario(text);
    let out = slopecert(&["--scenario", file.path().to_str().unwrap(), "--json"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    Report::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn no_arguments_prints_usage() {
    let out = slopecert(&[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = slopecert(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("Usage"));
}

#[test]
fn help_exits_zero() {
    assert_eq!(slopecert(&["--help"]).status.code(), Some(0));
    assert_eq!(slopecert(&["region", "--help"]).status.code(), Some(0));
}

#[test]
fn empty_scenario_gives_empty_report() {
    let report = run_json("");
    assert!(report.results.is_empty());
    let file = write_scenario("# nothing here\n");
    let out = slopecert(&["--scenario", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn double_sextic_stable_with_value_twelve() {
    let report =
        run_json("[surface]\npreset = p2\n[cover]\nn = 2\nline = 3h\n[queries]\ncertify thm3.6\n");
    match &report.results[0].outcome {
        Outcome::Certificate { certificate } => {
            assert_eq!(certificate.conclusion, Conclusion::Stable);
            assert_eq!(certificate.value("criterion_value"), Some(&q(12)));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn quartic_cover_is_k3() {
    let report = run_json("[surface]\npreset = p2\n[cover]\nL = h\nn = 4\n[queries]\nk3\n");
    match &report.results[0].outcome {
        Outcome::K3 { report } => assert!(report.is_k3),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn hn_of_declared_split_bundle() {
    let report =
        run_json("[surface]\npreset = p2\n[bundles]\nE = split 2h; 2h; 0; -h\n[queries]\nhn E\n");
    match &report.results[0].outcome {
        Outcome::Hn { filtration, .. } => {
            assert_eq!(filtration.levels.len(), 3);
            assert_eq!(filtration.instability, q(3));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn invariants_of_double_sextic() {
    let out = slopecert(&[
        "--scenario",
        scenario_dir().join("double_sextic.scn").to_str().unwrap(),
        "invariants",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text
        .lines()
        .find(|l| l.trim_start().starts_with("deg K_X "))
        .unwrap();
    assert!(line.trim_end().ends_with(" 0"), "{line}");
}

#[test]
fn parse_errors_report_line_and_column() {
    let file = write_scenario("[surface]\npreset = p2\n[cover]\nline = 3q\nn = 2\n");
    let out = slopecert(&["--scenario", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains(":4:8:"), "{err}");
    assert!(err.contains("unknown generator `q`"), "{err}");
}

#[test]
fn unresolved_names_are_reported() {
    let file = write_scenario("[surface]\npreset = p2\n[queries]\nhn missing\n");
    let out = slopecert(&["--scenario", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("`missing` (line 4)"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn invariant_violations_exit_two() {
    // char 2 divides the cover degree.
    let file = write_scenario("[surface]\npreset = p2\n[cover]\nline = 3h\nn = 2\nchar = 2\n");
    let out = slopecert(&["--scenario", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cover on line 3"), "{}", stderr(&out));
    // n does not divide d.
    let out = slopecert(&["certify", "cor3.8", "--n", "4", "--d", "6"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_file_is_reported() {
    let out = slopecert(&["--scenario", "/nonexistent/scenario.scn"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("cannot read"));
}

#[test]
fn quiet_suppresses_output() {
    let out = slopecert(&["--quiet", "region", "cor3.8"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn bundled_scenarios_run_and_are_deterministic() {
    for entry in std::fs::read_dir(scenario_dir()).unwrap() {
        let path = entry.unwrap().path();
        let args = ["--scenario", path.to_str().unwrap(), "--json"];
        let first = slopecert(&args);
        assert!(
            first.status.success(),
            "{}: {}",
            path.display(),
            stderr(&first)
        );
        assert_eq!(first.stdout, slopecert(&args).stdout, "{}", path.display());
        let report = Report::from_json(std::str::from_utf8(&first.stdout).unwrap()).unwrap();
        assert!(!report.results.is_empty());
        assert_eq!(Report::from_json(&report.to_json()).unwrap(), report);
    }
}

#[test]
fn json_field_names_are_stable() {
    let out = slopecert(&[
        "certify", "cor4.5", "--p", "5", "--n", "2", "--d", "6", "--json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let outcome = &value["results"][0]["outcome"];
    assert_eq!(outcome["kind"], "certificate");
    let cert = &outcome["certificate"];
    assert_eq!(cert["theorem"], "cor4.5");
    assert_eq!(cert["conclusion"], "semistable");
    assert_eq!(cert["values"]["k_x_h"], "0");
    assert!(cert["hypotheses"]
        .as_array()
        .unwrap()
        .iter()
        .all(|h| h["satisfied"].is_boolean()));
    assert!(cert["notes"][0].as_str().unwrap().starts_with("erratum"));
    assert_eq!(
        value["results"][0]["query"],
        "certify cor4.5 --p 5 --n 2 --d 6"
    );
}

#[test]
fn rationals_serialize_as_fractions() {
    let out = slopecert(&[
        "--scenario",
        scenario_dir().join("double_sextic.scn").to_str().unwrap(),
        "pushforward",
        "--json",
    ]);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["results"][0]["outcome"]["slope"], "-3/2");
}

#[test]
fn selftest_passes() {
    let out = slopecert(&["selftest"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("overall: pass"));
}
