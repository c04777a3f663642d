use std::path::{Path, PathBuf};
use std::process::Command;

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub exit: i32,
}

const PI: &str = "3.141592653589793";
const THREE_PI: &str = "9.42477796076938";

/// Every case runs with `--reproducible` appended (unless it is a usage error).
pub const CASES: &[Case] = &[
    Case { name: "rotation_simulate", args: &["simulate", "--model", "examples/rotation.json", "--x0", "1,0", "--input", "constant:1", "--t1", "5", "--steps", "10"], exit: 0 },
    Case { name: "rotation_simulate_samples", args: &["simulate", "--model", "examples/rotation.json", "--input", "samples:tests/data/hold_samples.csv", "--t1", "3", "--steps", "6"], exit: 0 },
    Case { name: "rotation_stability", args: &["stability", "--model", "examples/rotation.json"], exit: 0 },
    Case { name: "rotation_ctrb_gramian", args: &["ctrb-gramian", "--model", "examples/rotation.json", "--t1", PI], exit: 0 },
    Case { name: "rotation_obsv_gramian", args: &["obsv-gramian", "--model", "examples/rotation.json", "--t1", PI], exit: 0 },
    Case { name: "rotation_steer", args: &["steer", "--model", "examples/rotation.json", "--x0", "1,0", "--x1", "0,0", "--t1", PI, "--grid", "8"], exit: 0 },
    Case { name: "rotation_w2_simulate", args: &["simulate", "--model", "examples/rotation_w2.json", "--x0", "1,0", "--input", "constant:1", "--t1", "1", "--steps", "4"], exit: 0 },
    Case { name: "rotation_w2_stability", args: &["stability", "--model", "examples/rotation_w2.json", "--u-eq", "1", "--lyapunov-p", "1,0;0,1", "--bibo-t-end", THREE_PI, "--bibo-samples", "3"], exit: 0 },
    Case { name: "double_integrator_simulate", args: &["simulate", "--model", "examples/double_integrator.json", "--x0", "1,0", "--input", "constant:1", "--t1", "4"], exit: 0 },
    Case { name: "double_integrator_stability", args: &["stability", "--model", "examples/double_integrator.json"], exit: 0 },
    Case { name: "double_integrator_ctrb_gramian", args: &["ctrb-gramian", "--model", "examples/double_integrator.json", "--t1", "3"], exit: 0 },
    Case { name: "double_integrator_steer", args: &["steer", "--model", "examples/double_integrator.json", "--x0", "1,0", "--x1", "0,0", "--t1", "2"], exit: 0 },
    Case { name: "double_integrator_obsv_gramian", args: &["obsv-gramian", "--model", "examples/double_integrator_obsv.json", "--t1", "2"], exit: 0 },
    Case { name: "double_integrator_obsv_singular", args: &["obsv-gramian", "--model", "examples/double_integrator_obsv.json", "--t1", "1"], exit: 2 },
    Case { name: "double_integrator_obsv_estimate", args: &["estimate-x0", "--model", "examples/double_integrator_obsv.json", "--measurements", "tests/data/di_measurements.csv", "--input", "constant:1", "--t1", "2"], exit: 0 },
    Case { name: "digital_position_deadbeat", args: &["design-deadbeat", "--model", "examples/digital_position.json"], exit: 0 },
    Case { name: "digital_position_place", args: &["design-place", "--model", "examples/digital_position.json", "--poly", "1,-1,0.25"], exit: 0 },
    Case { name: "digital_position_lqr", args: &["design-lqr", "--model", "examples/digital_position.json", "--i1", "4", "--r", "0.01", "--x0", "1,0"], exit: 0 },
    Case { name: "error_usage", args: &["frobnicate"], exit: 1 },
    Case { name: "error_bad_flag_value", args: &["ctrb-gramian", "--model", "examples/rotation.json", "--t1", "soon"], exit: 1 },
    Case { name: "error_missing_model", args: &["design-deadbeat", "--model", "tests/data/does_not_exist.json"], exit: 3 },
    Case { name: "error_bad_dimensions", args: &["stability", "--model", "tests/data/bad_dimensions.json"], exit: 3 },
    Case { name: "error_not_json", args: &["stability", "--model", "tests/data/not_json.json"], exit: 3 },
    Case { name: "error_domain_mismatch", args: &["design-lqr", "--model", "examples/rotation.json", "--i1", "3"], exit: 3 },
    Case { name: "error_uncontrollable", args: &["design-deadbeat", "--model", "tests/data/uncontrollable.json"], exit: 2 },
];

pub struct Outcome {
    pub code: i32,
    pub stdout: Vec<u8>,
}

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn golden_path(case: &Case) -> PathBuf {
    manifest_dir().join("tests/golden").join(format!("{}.json", case.name))
}

pub fn run(case: &Case) -> Outcome {
    let mut args: Vec<&str> = case.args.to_vec();
    if case.exit != 1 {
        args.push("--reproducible");
    }
    let out = Command::new(env!("CARGO_BIN_EXE_ltikit"))
        .args(&args)
        .current_dir(manifest_dir())
        .output()
        .expect("binary runs");
    Outcome { code: out.status.code().unwrap_or(-1), stdout: out.stdout }
}

/// Runs `case` twice and compares against its golden file. With
/// `UPDATE_GOLDENS=1` the golden file is rewritten instead.
pub fn check(case: &Case) -> Result<(), String> {
    let first = run(case);
    let second = run(case);
    if first.code != case.exit {
        return Err(format!("{}: exit {} (expected {})", case.name, first.code, case.exit));
    }
    if first.stdout != second.stdout {
        return Err(format!("{}: output differs between runs", case.name));
    }
    let path = golden_path(case);
    if std::env::var_os("UPDATE_GOLDENS").is_some() {
        std::fs::write(&path, &first.stdout).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = std::fs::read(&path).map_err(|e| format!("{}: {e}", display(&path)))?;
    if expected != first.stdout {
        return Err(format!("{}: report differs from {}", case.name, display(&path)));
    }
    Ok(())
}

fn display(path: &Path) -> String {
    path.strip_prefix(manifest_dir()).unwrap_or(path).display().to_string()
}
