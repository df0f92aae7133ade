use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const PRESETS: [&str; 4] = ["flat3d", "hyperboloid", "p1", "cosymplectic"];

fn paracr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paracr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn repo(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"))
}

/// Report JSON with the wall-clock line removed.
fn body(out: &Output) -> String {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    assert!(lines[1].trim_start().starts_with("\"wall_clock_seconds\""), "{}", lines[1]);
    lines.remove(1);
    lines.join("\n") + "\n"
}

#[test]
fn preset_reports_match_goldens() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for name in PRESETS {
        let out = paracr(&["example", "--name", name]);
        assert_eq!(out.status.code(), Some(1), "{name}: `all` includes failing conditions");
        let got = body(&out);
        if update {
            std::fs::write(golden(name), &got).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(golden(name)).unwrap();
        assert!(got == want, "{name}: report differs from golden (UPDATE_GOLDEN=1 to refresh)");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let spec = repo("specs/p1_frame.json");
    let args = ["verify", "--spec", spec.to_str().unwrap(), "--seed", "11", "--points", "24"];
    let a = paracr(&args);
    let b = paracr(&args);
    assert_eq!(body(&a), body(&b));
}

#[test]
fn emitted_spec_reproduces_the_example_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hyperboloid.json");
    let out = paracr(&["example", "--name", "hyperboloid", "--emit-spec", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let verified = paracr(&["verify", "--spec", path.to_str().unwrap()]);
    let direct = paracr(&["example", "--name", "hyperboloid"]);
    assert_eq!(body(&verified), body(&direct));
}

#[test]
fn exit_status_reflects_requested_checks() {
    let pass = paracr(&["example", "--name", "hyperboloid", "--checks", "para-sasakian,para-cr", "--points", "8"]);
    assert_eq!(pass.status.code(), Some(0));
    let fail = paracr(&["example", "--name", "flat3d", "--checks", "sas", "--points", "8"]);
    assert_eq!(fail.status.code(), Some(1));
    let neg = repo("specs/p1_negative.json");
    let fail = paracr(&["verify", "--spec", neg.to_str().unwrap(), "--points", "8"]);
    assert_eq!(fail.status.code(), Some(1));
}

#[test]
fn errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let even = dir.path().join("even.json");
    std::fs::write(
        &even,
        r#"{"chart": {"dimension": 4, "coordinates": ["a", "b", "c", "d"], "box": [[0,1],[0,1],[0,1],[0,1]]},
            "structure": {"preset": {"example": "flat3d"}}}"#,
    )
    .unwrap();
    let out = paracr(&["verify", "--spec", even.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("chart"));

    let missing = paracr(&["verify", "--spec", "/nonexistent/spec.json"]);
    assert_eq!(missing.status.code(), Some(2));

    let wrong_dim = paracr(&["example", "--name", "p1", "--checks", "jw3d"]);
    assert_eq!(wrong_dim.status.code(), Some(2));

    let unknown = paracr(&["example", "--name", "flat3d", "--checks", "nope"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn sampling_exhaustion_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("outside.json");
    // the whole box lies outside the graph patch
    std::fs::write(
        &path,
        r#"{"chart": {"dimension": 3, "coordinates": ["x1", "x2", "x3"], "box": [[-1,1],[-1,1],[3,4]]},
            "structure": {"preset": {"example": "hyperboloid", "n": 1}}}"#,
    )
    .unwrap();
    let out = paracr(&["verify", "--spec", path.to_str().unwrap(), "--points", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sampling exhausted"));
}

#[test]
fn text_format_summarizes_the_run() {
    let out = paracr(&["example", "--name", "hyperboloid", "--format", "text", "--points", "8"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("fingerprint {paracontact metric, normal, para-Sasakian, para-CR}"));
    assert!(text.contains("expected    match"));
}

#[test]
fn list_checks_names_every_condition() {
    let out = paracr(&["list-checks"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for id in paracr_core::paracontact::ConditionId::ALL {
        assert!(text.lines().any(|l| l.starts_with(id.id())), "missing {id}");
    }
    assert!(text.contains("para-cr"));
}
