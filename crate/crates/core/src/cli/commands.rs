use std::path::Path;

use serde_json::{json, Value};

use super::args::*;
use super::model_file::ModelFile;
use super::{CliError, InputsDigest};
use crate::design::{closed_loop, deadbeat_gain, lqr, state_feedback_gain, FeedbackGain};
use crate::error::Error;
use crate::gramian::{
    controllability_gramian_with, min_energy_input_with, observability_gramian_with,
    reconstruct_initial_state_with, GramianOptions, GramianReport, MIN_EIG_RTOL,
};
use crate::matrix::{eigenvalues, Matrix, PIVOT_RTOL};
use crate::simulate::{parse_table, simulate_continuous, simulate_discrete, InputSignal, SimOptions, Trajectory};
use crate::stability::{bibo_integral, classify, classify_with_certificate, equilibrium, EIGEN_TOL};
use crate::statespace::{CharPoly, StateSpaceModel, TimeDomain};

type CliResult<T> = Result<T, CliError>;

/// Runs `command`. A failure may still leave a partial result for the report.
pub(super) fn dispatch(command: &Command, digest: &mut InputsDigest, partial: &mut Option<Value>) -> CliResult<Value> {
    let common = command.common();
    let model = load_model(&common.model, digest)?;
    let options = GramianOptions { tol: common.quad_tol, cond_limit: common.sing_thresh, ..GramianOptions::default() };
    if !(options.tol > 0.0) || !(options.cond_limit > 1.0) {
        return Err(CliError::Usage("--quad-tol must be positive and --sing-thresh greater than 1".into()));
    }
    match command {
        Command::Simulate(a) => simulate(&model, a, digest),
        Command::Stability(a) => stability(&model, a),
        Command::CtrbGramian(a) => gramian_result(controllability_gramian_with(&model, a.t0, a.t1, options)?, partial),
        Command::ObsvGramian(a) => gramian_result(observability_gramian_with(&model, a.t1, options)?, partial),
        Command::Steer(a) => steer(&model, a, options),
        Command::EstimateX0(a) => estimate(&model, a, options, digest),
        Command::DesignDeadbeat(_) => {
            let gain = deadbeat_gain(&model)?;
            feedback_result(&model, gain)
        }
        Command::DesignPlace(a) => {
            let desired = CharPoly::new(a.poly.clone())?;
            let gain = state_feedback_gain(&model, &desired)?;
            feedback_result(&model, gain)
        }
        Command::DesignLqr(a) => design_lqr(&model, a),
    }
}

pub(super) fn diagnostics(common: &Common) -> Value {
    json!({
        "quad_tol": common.quad_tol,
        "sing_thresh": common.sing_thresh,
        "eigen_tol": EIGEN_TOL,
        "pivot_rtol": PIVOT_RTOL,
        "min_eig_rtol": MIN_EIG_RTOL,
        "simpson_subintervals": SimOptions::default().subintervals,
    })
}

fn gramian_result(report: GramianReport, partial: &mut Option<Value>) -> CliResult<Value> {
    let value = json!(report);
    if report.nonsingular {
        return Ok(value);
    }
    *partial = Some(value);
    Err(Error::SingularGramian(format!(
        "{:?} Gramian on [{}, {}]: min eigenvalue {:e}, det {:e}",
        report.kind, report.horizon.0, report.horizon.1, report.min_eigenvalue, report.det
    ))
    .into())
}

fn load_model(path: &Path, digest: &mut InputsDigest) -> CliResult<StateSpaceModel> {
    let bytes = digest.read(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    ModelFile::parse(text)?.to_model()
}

fn matrix(rows: &[Vec<f64>], name: &str) -> CliResult<Matrix> {
    Matrix::from_rows(rows).map_err(|e| CliError::Dimension(format!("{name}: {e}")))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn key_values(body: &str) -> CliResult<Vec<(&str, f64)>> {
    body.split(',')
        .filter(|s| !s.is_empty())
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Usage(format!("expected key=value, got '{kv}'")))?;
            let v: f64 = v.trim().parse().map_err(|e| CliError::Usage(format!("'{kv}': {e}")))?;
            if !v.is_finite() {
                return Err(CliError::Usage(format!("'{kv}': value must be finite")));
            }
            Ok((k.trim(), v))
        })
        .collect()
}

/// Resolves an `--input` specification for a model with `m` inputs.
pub(crate) fn parse_input(spec: &str, m: usize, digest: &mut InputsDigest) -> CliResult<InputSignal> {
    let (head, body) = spec.split_once(':').unwrap_or((spec, ""));
    let broadcast = |v: Vec<f64>| if v.len() == 1 { vec![v[0]; m] } else { v };
    let signal = match head {
        "zero" => InputSignal::Zero,
        "constant" => {
            let levels = parse_vector(body).map_err(|e| CliError::Usage(format!("--input constant: {e}")))?;
            InputSignal::Constant { levels: broadcast(levels) }
        }
        "step" => {
            let (mut at, mut level) = (0.0, 1.0);
            for (k, v) in key_values(body)? {
                match k {
                    "at" => at = v,
                    "level" => level = v,
                    _ => return Err(CliError::Usage(format!("--input step: unknown key '{k}'"))),
                }
            }
            InputSignal::Step { levels: vec![level; m], at }
        }
        "sin" => {
            let (mut omega, mut amp, mut phase) = (1.0, 1.0, 0.0);
            for (k, v) in key_values(body)? {
                match k {
                    "omega" => omega = v,
                    "amp" => amp = v,
                    "phase" => phase = v,
                    _ => return Err(CliError::Usage(format!("--input sin: unknown key '{k}'"))),
                }
            }
            InputSignal::Sinusoid { amplitude: vec![amp; m], omega, phase }
        }
        "samples" => {
            let bytes = digest.read(Path::new(body))?;
            let text = String::from_utf8(bytes).map_err(|e| CliError::Parse(format!("{body}: {e}")))?;
            InputSignal::samples_from_csv(&text)?
        }
        _ => return Err(CliError::Usage(format!("unknown input kind '{head}'"))),
    };
    signal.validate(m)?;
    Ok(signal)
}

fn state_or_zero(x: &Option<Vec<f64>>, n: usize) -> Vec<f64> {
    x.clone().unwrap_or_else(|| vec![0.0; n])
}

fn discrete_steps(t: f64, what: &str) -> CliResult<u64> {
    if !t.is_finite() || t < 0.0 || t.fract() != 0.0 {
        return Err(Error::InvalidTime(format!("discrete {what} must be a non-negative integer, got {t}")).into());
    }
    Ok(t as u64)
}

fn run_simulation(
    model: &StateSpaceModel,
    x0: &[f64],
    u: &InputSignal,
    t0: f64,
    t1: f64,
    steps: usize,
) -> CliResult<Trajectory> {
    Ok(match model.domain() {
        TimeDomain::Discrete => {
            if t0 != 0.0 {
                return Err(Error::InvalidTime(format!("discrete simulation starts at 0, got t0={t0}")).into());
            }
            simulate_discrete(model, x0, u, discrete_steps(t1, "t1")?)?
        }
        TimeDomain::Continuous => simulate_continuous(model, x0, u, t0, t1, steps)?,
    })
}

fn simulate(model: &StateSpaceModel, a: &SimulateArgs, digest: &mut InputsDigest) -> CliResult<Value> {
    let u = parse_input(&a.input, model.inputs(), digest)?;
    let x0 = state_or_zero(&a.x0, model.order());
    let traj = run_simulation(model, &x0, &u, a.t0, a.t1, a.steps)?;
    if let Some(path) = &a.csv {
        write_file(path, &traj.to_csv())?;
    }
    Ok(json!({
        "time_domain": model.domain(),
        "input": u,
        "samples": traj.len(),
        "final_state": traj.final_state(),
        "final_output": traj.outputs.last(),
        "trajectory": traj,
    }))
}

fn stability(model: &StateSpaceModel, a: &StabilityArgs) -> CliResult<Value> {
    let mut out = serde_json::Map::new();
    let continuous = model.domain() == TimeDomain::Continuous;
    let mut x_bar = vec![0.0; model.order()];
    if continuous {
        let u_eq = state_or_zero(&a.u_eq, model.inputs());
        match equilibrium(model, &u_eq) {
            Ok(x) => {
                x_bar = x.clone();
                out.insert("equilibrium".into(), json!(x));
            }
            Err(e) if a.u_eq.is_none() && matches!(e, Error::SingularMatrix(_)) => {
                out.insert("equilibrium".into(), Value::Null);
                out.insert("equilibrium_note".into(), json!(format!("A is singular: {e}")));
            }
            Err(e) => return Err(e.into()),
        }
    } else if a.u_eq.is_some() {
        return Err(Error::DomainMismatch { expected: "continuous" }.into());
    }
    let report = match &a.lyapunov_p {
        Some(rows) => classify_with_certificate(model, &x_bar, &matrix(rows, "--lyapunov-p")?)?,
        None => classify(model)?,
    };
    out.insert("report".into(), json!(report));
    if let Some(t_end) = a.bibo_t_end {
        let profile = bibo_integral(model, t_end, a.bibo_samples)?;
        if let Some(path) = &a.bibo_csv {
            write_file(path, &profile.to_csv())?;
        }
        out.insert("bibo".into(), json!(profile));
    }
    Ok(Value::Object(out))
}

fn steer(model: &StateSpaceModel, a: &SteerArgs, options: GramianOptions) -> CliResult<Value> {
    let x0 = state_or_zero(&a.x0, model.order());
    let steering = min_energy_input_with(model, &x0, &a.x1, a.t1, a.grid, options)?;
    let traj = run_simulation(model, &x0, &steering.input, 0.0, a.t1, a.grid)?;
    let reached = traj.final_state().to_vec();
    let endpoint_error = reached.iter().zip(&a.x1).map(|(r, t)| (r - t).abs()).fold(0.0, f64::max);
    if let Some(path) = &a.csv {
        write_file(path, &traj.to_csv())?;
    }
    Ok(json!({
        "input": steering.input,
        "energy": steering.energy,
        "reached_state": reached,
        "endpoint_error": endpoint_error,
    }))
}

fn estimate(
    model: &StateSpaceModel,
    a: &EstimateArgs,
    options: GramianOptions,
    digest: &mut InputsDigest,
) -> CliResult<Value> {
    let bytes = digest.read(&a.measurements)?;
    let text = String::from_utf8(bytes).map_err(|e| CliError::Parse(format!("{}: {e}", a.measurements.display())))?;
    let (times, outputs) = parse_table(&text)?;
    let u = parse_input(&a.input, model.inputs(), digest)?;
    let x0 = reconstruct_initial_state_with(model, &u, &times, &outputs, a.t1, options)?;

    // Output residual of the reconstructed trajectory at the measurement times.
    let traj = match model.domain() {
        TimeDomain::Discrete => simulate_discrete(model, &x0, &u, discrete_steps(a.t1, "t1")?.saturating_sub(1))?,
        TimeDomain::Continuous => simulate_continuous(model, &x0, &u, 0.0, a.t1, times.len() - 1)?,
    };
    let mut residual: f64 = 0.0;
    for (t, y) in times.iter().zip(&outputs) {
        if let Some(k) = traj.times.iter().position(|s| (s - t).abs() <= 1e-9 * a.t1.abs().max(1.0)) {
            for (p, q) in y.iter().zip(&traj.outputs[k]) {
                residual = residual.max((p - q).abs());
            }
        }
    }
    Ok(json!({ "x0": x0, "samples": times.len(), "max_output_residual": residual }))
}

fn feedback_result(model: &StateSpaceModel, gain: FeedbackGain) -> CliResult<Value> {
    let closed = closed_loop(model, &gain.f)?;
    let spectrum = eigenvalues(closed.a())?;
    let nilpotency_residual = closed.a().powi(model.order() as u64).max_abs();
    Ok(json!({
        "gain": gain,
        "closed_loop_A": closed.a(),
        "closed_loop_eigenvalues": spectrum,
        "closed_loop_power_n_max_abs": nilpotency_residual,
    }))
}

fn design_lqr(model: &StateSpaceModel, a: &LqrArgs) -> CliResult<Value> {
    let (n, m) = (model.order(), model.inputs());
    let r1 = a.r1.as_deref().map(|r| matrix(r, "--r1")).transpose()?.unwrap_or_else(|| Matrix::identity(n));
    let r = a.r.as_deref().map(|r| matrix(r, "--r")).transpose()?.unwrap_or_else(|| Matrix::identity(m));
    let p1 = a.p1.as_deref().map(|r| matrix(r, "--p1")).transpose()?.unwrap_or_else(|| Matrix::zeros(n, n));
    let solution = lqr(model, &r1, &r, &p1, a.i0, a.i1)?;
    let mut out = json!({ "solution": solution });
    if let Some(x0) = &a.x0 {
        model.check_state(x0, "initial state")?;
        let (states, inputs) = solution.rollout(model, x0);
        out["optimal_cost"] = json!(solution.cost_of(x0));
        out["rollout"] = json!({ "states": states, "inputs": inputs });
    }
    Ok(out)
}
