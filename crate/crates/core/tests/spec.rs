use std::path::PathBuf;

use paracr_core::presets::Preset;
use paracr_core::verify::spec::{resolve, SpecFile};
use paracr_core::verify::{load_spec, parse_spec, run_body, RunFlags};
use paracr_core::Error;

fn repo(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

const P1_CHART: &str = r#""chart": {"dimension": 5, "coordinates": ["x1", "x2", "y1", "y2", "z"],
    "box": [[-1, 1], [-1, 1], [-1, 1], [-1, 1], [0.5, 1.5]]}"#;

fn block(e: &Error) -> &str {
    match e {
        Error::Validation { block, .. } => block,
        other => panic!("expected a validation error, got {other}"),
    }
}

#[test]
fn preset_spec_loads() {
    let spec = parse_spec(r#"{"structure": {"preset": {"example": "hyperboloid", "n": 1}}}"#).unwrap();
    assert_eq!(spec.dim(), 3);
    assert_eq!(spec.label, "hyperboloid");
    assert!(spec.expected_fingerprint.is_some());
    assert_eq!(spec.numeric.points, 64);
}

#[test]
fn frame_transcription_matches_the_preset() {
    let file = load_spec(repo("specs/p1_frame.json")).unwrap();
    let preset = resolve(SpecFile::for_preset(Preset::P1 { n: 2, f: None, c: None })).unwrap();
    let flags = RunFlags {
        points: Some(16),
        seed: Some(3),
        ..Default::default()
    };
    let a = run_body(&file, &flags).unwrap();
    let b = run_body(&preset, &flags).unwrap();
    assert_eq!(a.checks.len(), b.checks.len());
    for (x, y) in a.checks.iter().zip(&b.checks) {
        assert_eq!(x.id, y.id);
        assert!((x.max_raw - y.max_raw).abs() <= 1e-9, "{}: {} vs {}", x.id, x.max_raw, y.max_raw);
        assert_eq!(x.verdict, y.verdict);
    }
    assert_eq!(a.classification.fingerprint, b.classification.fingerprint);
}

#[test]
fn shipped_specs_load() {
    for name in ["p1_frame", "flat3d_coordinate", "hyperboloid", "p1_negative"] {
        load_spec(repo(&format!("specs/{name}.json"))).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn even_dimension_is_rejected() {
    let e = parse_spec(
        r#"{"chart": {"dimension": 4, "coordinates": ["a", "b", "c", "d"], "box": [[0,1],[0,1],[0,1],[0,1]]},
            "structure": {"coordinate": {"g": [], "phi": [], "xi": [], "eta": []}}}"#,
    )
    .unwrap_err();
    assert_eq!(block(&e), "chart");
}

#[test]
fn expression_errors_carry_their_location() {
    let text = format!(
        r#"{{{P1_CHART}, "structure": {{"frame": {{
            "e": [[1,0,"x1 +",0,0],[0,1,0,0,0],[0,0,1,0,0],[0,0,0,1,0],[0,0,0,0,1]],
            "g_hat": [[0,0,1,0,0],[0,0,0,1,0],[1,0,0,0,0],[0,1,0,0,0],[0,0,0,0,1]],
            "phi_hat": [[-1,0,0,0,0],[0,-1,0,0,0],[0,0,1,0,0],[0,0,0,1,0],[0,0,0,0,0]],
            "xi_hat": [0,0,0,0,1], "eta_hat": [0,0,0,0,1]}}}}}}"#
    );
    match parse_spec(&text).unwrap_err() {
        Error::SpecExpr { location, .. } => assert_eq!(location, "structure.frame.e[0][2]"),
        other => panic!("{other}"),
    }
    let unknown = text.replace("x1 +", "w + 1");
    assert!(matches!(parse_spec(&unknown).unwrap_err(), Error::SpecExpr { .. }));
}

#[test]
fn exactly_one_structure_source() {
    let both = r#"{"structure": {"preset": {"example": "flat3d"},
        "coordinate": {"g": [], "phi": [], "xi": [], "eta": []}}}"#;
    assert_eq!(block(&parse_spec(both).unwrap_err()), "structure");
    assert_eq!(block(&parse_spec(r#"{"structure": {}}"#).unwrap_err()), "structure");
}

#[test]
fn unknown_fields_and_misplaced_constants_are_rejected() {
    let typo = r#"{"structure": {"preset": {"example": "flat3d"}}, "numerics": {}}"#;
    assert!(matches!(parse_spec(typo).unwrap_err(), Error::Json(_)));
    let consts = r#"{"constants": {"c": 2}, "structure": {"preset": {"example": "flat3d"}}}"#;
    assert_eq!(block(&parse_spec(consts).unwrap_err()), "constants");
}

#[test]
fn bad_checks_and_numeric_settings() {
    let unknown = r#"{"structure": {"preset": {"example": "flat3d"}}, "checks": ["nope"]}"#;
    assert_eq!(block(&parse_spec(unknown).unwrap_err()), "checks");
    let zero = r#"{"structure": {"preset": {"example": "flat3d"}}, "numeric": {"points": 0}}"#;
    assert_eq!(block(&parse_spec(zero).unwrap_err()), "numeric");
    let vacuous = r#"{"structure": {"preset": {"example": "flat3d"}}, "numeric": {"tolerance": 1, "separation": 1}}"#;
    assert_eq!(block(&parse_spec(vacuous).unwrap_err()), "numeric");
}

#[test]
fn emitted_preset_spec_round_trips() {
    let file = SpecFile::for_preset(Preset::Cosymplectic { n: 2, h: None });
    let text = file.to_json().unwrap();
    let back = parse_spec(&text).unwrap();
    assert_eq!(back.digest, file.digest().unwrap());
    assert_eq!(back.dim(), 5);
}
