mod common;

use common::golden::{self, CASES};
use ltikit::cli::ModelFile;

#[test]
fn golden_reports() {
    let failures: Vec<String> = CASES.iter().filter_map(|case| golden::check(case).err()).collect();
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn bundled_models_round_trip() {
    let dir = golden::manifest_dir().join("examples");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let file = ModelFile::parse(&text).unwrap();
        file.to_model().unwrap();
        assert_eq!(file.to_json(), text, "{}", path.display());
        assert!(
            CASES.iter().any(|c| c.args.iter().any(|a| a.ends_with(path.file_name().unwrap().to_str().unwrap()))),
            "{} is not exercised by a golden case",
            path.display()
        );
        seen += 1;
    }
    assert_eq!(seen, 5);
}

#[test]
fn usage_errors_write_nothing_to_stdout() {
    for case in CASES.iter().filter(|c| c.exit == 1) {
        let out = golden::run(case);
        assert_eq!(out.code, 1);
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn out_flag_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_ltikit"))
        .args(["design-deadbeat", "--model", "examples/digital_position.json", "--reproducible", "--out"])
        .arg(&target)
        .current_dir(golden::manifest_dir())
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    assert!(status.stdout.is_empty());
    let written = std::fs::read(&target).unwrap();
    let expected = std::fs::read(golden::manifest_dir().join("tests/golden/digital_position_deadbeat.json")).unwrap();
    let report: serde_json::Value = serde_json::from_slice(&written).unwrap();
    assert_eq!(report["status"], "ok");
    // `--out` itself is not echoed into the args block
    assert_eq!(written, expected);
}
