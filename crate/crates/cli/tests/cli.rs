use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spc-timescale"));
    for (k, _) in std::env::vars() {
        if k.starts_with("SPCTS_") {
            c.env_remove(k);
        }
    }
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn synth(dir: &Path, name: &str, extra: &[&str]) -> String {
    let path = dir.join(name);
    let p = path.to_str().unwrap().to_string();
    let out = run(&[&["synth", "--out", &p], extra].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p
}

#[test]
fn report_twice_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let input = synth(dir.path(), "demo.csv", &["--seed", "5"]);
    let outs: Vec<String> = ["a", "b"].iter().map(|n| dir.path().join(n).to_str().unwrap().to_string()).collect();
    for o in &outs {
        let r =
            run(&["report", "--input", &input, "--out", o, "--bootstrap", "100", "--validation", "20", "--seed", "9"]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
        assert!(String::from_utf8_lossy(&r.stdout).contains("timescale"));
    }
    for name in ["report.txt", "report.json", "curves.csv", "residuals.csv", "growth_window.csv"] {
        let a = fs::read(Path::new(&outs[0]).join(name)).unwrap();
        let b = fs::read(Path::new(&outs[1]).join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
    let text = fs::read_to_string(Path::new(&outs[0]).join("report.txt")).unwrap();
    assert!(text.contains("seed = 9"));
    assert!(text.contains("[continuity.cultural]"));
}

#[test]
fn fit_stage_skips_the_bootstrap() {
    let dir = tempfile::tempdir().unwrap();
    let input = synth(dir.path(), "demo.csv", &[]);
    let out = dir.path().join("fit");
    let r = run(&["fit", "--input", &input, "--out", out.to_str().unwrap(), "--validation", "10"]);
    assert!(r.status.success());
    assert!(out.join("report.txt").exists());
    assert!(!out.join("bootstrap_params.csv").exists());
}

#[test]
fn environment_supplies_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let input = synth(dir.path(), "demo.csv", &[]);
    let out = dir.path().join("env");
    let r = bin()
        .args(["fit", "--validation", "5"])
        .env("SPCTS_INPUT", &input)
        .env("SPCTS_OUT", &out)
        .env("SPCTS_SEED", "31")
        .output()
        .unwrap();
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(text.contains("seed = 31"));
}

#[test]
fn missing_input_exits_with_data_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let r = run(&["report", "--input", "/nonexistent.csv", "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(!out.exists());
    assert!(String::from_utf8_lossy(&r.stderr).contains("nonexistent.csv"));
}

#[test]
fn malformed_input_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "NGA,PolID,AbsTime,RelTime,SPC1,Culture.Sequence,Institutions.Sequence\nA,p,x,0,0.1,,\n").unwrap();
    let r = run(&["fit", "--input", path.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn unimodal_density_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let input = synth(dir.path(), "demo.csv", &[]);
    let r = run(&["fit", "--input", &input, "--bandwidth", "5", "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&r.stderr).contains("SPC1 threshold"));
}

#[test]
fn bad_flags_are_rejected() {
    assert_eq!(run(&["report", "--input", "x.csv", "--modes", "religious"]).status.code(), Some(2));
    assert_eq!(run(&["report", "--input", "x.csv", "--bandwidth", "wide"]).status.code(), Some(2));
    assert_eq!(run(&["report", "--input", "x.csv", "--bootstrap", "0"]).status.code(), Some(2));
}

#[test]
fn check_against_a_previous_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = synth(dir.path(), "demo.csv", &[]);
    let out = dir.path().join("out");
    let r = run(&["fit", "--input", &input, "--out", out.to_str().unwrap(), "--validation", "5"]);
    assert!(r.status.success());

    let series = synth(dir.path(), "new.csv", &["--preset", "uniform", "--regions", "2", "--seed", "77"]);
    let result = dir.path().join("check.txt");
    let r = run(&[
        "check",
        "--report",
        out.join("report.json").to_str().unwrap(),
        "--series",
        &series,
        "--out",
        result.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = fs::read_to_string(&result).unwrap();
    assert_eq!(text, String::from_utf8_lossy(&r.stdout));
    assert_eq!(text.matches("status = anchored").count(), 2);

    let r = run(&["check", "--report", &input, "--series", &series]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn synth_to_stdout_is_deterministic() {
    let a = run(&["synth", "--seed", "4", "--regions", "3"]);
    let b = run(&["synth", "--seed", "4", "--regions", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("NGA,PolID,AbsTime,RelTime,SPC1,"));
    assert_eq!(run(&["synth", "--noise=-1"]).status.code(), Some(2));
}
