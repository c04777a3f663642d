use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::gramian::GramianOptions;
use crate::matrix::COND_LIMIT;

#[derive(Debug, Parser)]
#[command(name = "ltikit", version, about = "Batch analysis and controller design for LTI state-space models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Model file (JSON).
    #[arg(long)]
    pub model: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Omit the timestamp so identical runs produce identical bytes.
    #[arg(long)]
    #[serde(skip)]
    pub reproducible: bool,
    /// Convergence tolerance for Gramian quadrature refinement.
    #[arg(long, default_value_t = GramianOptions::default().tol)]
    pub quad_tol: f64,
    /// Condition-number limit above which Gramians are reported singular.
    #[arg(long, default_value_t = COND_LIMIT)]
    pub sing_thresh: f64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Simulate the model and report the trajectory.
    Simulate(SimulateArgs),
    /// Eigenvalues, stability class, equilibrium, Lyapunov and BIBO checks.
    Stability(StabilityArgs),
    /// Controllability Gramian W(t0, t1).
    #[command(name = "ctrb-gramian")]
    CtrbGramian(CtrbArgs),
    /// Observability Gramian M(0, t1).
    #[command(name = "obsv-gramian")]
    ObsvGramian(ObsvArgs),
    /// Minimum-energy input from x0 to x1.
    Steer(SteerArgs),
    /// Reconstruct the initial state from input/output records.
    #[command(name = "estimate-x0")]
    EstimateX0(EstimateArgs),
    /// Deadbeat state feedback (all poles at the origin).
    #[command(name = "design-deadbeat")]
    DesignDeadbeat(DeadbeatArgs),
    /// Single-input pole placement to a desired characteristic polynomial.
    #[command(name = "design-place")]
    DesignPlace(PlaceArgs),
    /// Finite-horizon discrete LQR by backward Riccati recursion.
    #[command(name = "design-lqr")]
    DesignLqr(LqrArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Stability(_) => "stability",
            Command::CtrbGramian(_) => "ctrb-gramian",
            Command::ObsvGramian(_) => "obsv-gramian",
            Command::Steer(_) => "steer",
            Command::EstimateX0(_) => "estimate-x0",
            Command::DesignDeadbeat(_) => "design-deadbeat",
            Command::DesignPlace(_) => "design-place",
            Command::DesignLqr(_) => "design-lqr",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Simulate(a) => &a.common,
            Command::Stability(a) => &a.common,
            Command::CtrbGramian(a) => &a.common,
            Command::ObsvGramian(a) => &a.common,
            Command::Steer(a) => &a.common,
            Command::EstimateX0(a) => &a.common,
            Command::DesignDeadbeat(a) => &a.common,
            Command::DesignPlace(a) => &a.common,
            Command::DesignLqr(a) => &a.common,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Initial state, comma separated (default: zeros).
    #[arg(long, value_parser = parse_vector)]
    pub x0: Option<::std::vec::Vec<f64>>,
    /// Input: zero | constant:V[,V…] | step[:at=T] | sin:omega=W,amp=A,phase=P | samples:PATH.csv
    #[arg(long, default_value = "zero")]
    pub input: String,
    #[arg(long, default_value_t = 0.0)]
    pub t0: f64,
    #[arg(long)]
    pub t1: f64,
    /// Grid intervals (continuous models).
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// Also write the trajectory CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct StabilityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Constant input for the equilibrium (default: zeros).
    #[arg(long, value_parser = parse_vector)]
    pub u_eq: Option<::std::vec::Vec<f64>>,
    /// Lyapunov candidate P, rows separated by ';'.
    #[arg(long, value_parser = parse_matrix_rows)]
    pub lyapunov_p: Option<::std::vec::Vec<Vec<f64>>>,
    /// Horizon for the impulse-response integral.
    #[arg(long)]
    pub bibo_t_end: Option<f64>,
    #[arg(long, default_value_t = 64)]
    pub bibo_samples: usize,
    #[arg(long)]
    pub bibo_csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CtrbArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 0.0)]
    pub t0: f64,
    #[arg(long)]
    pub t1: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ObsvArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    pub t1: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SteerArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_parser = parse_vector)]
    pub x0: Option<::std::vec::Vec<f64>>,
    #[arg(long, value_parser = parse_vector)]
    pub x1: ::std::vec::Vec<f64>,
    #[arg(long)]
    pub t1: f64,
    /// Hold intervals for continuous models.
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
    /// Write the steered trajectory CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Output record CSV with header t,y1..yp.
    #[arg(long)]
    pub measurements: PathBuf,
    #[arg(long, default_value = "zero")]
    pub input: String,
    #[arg(long)]
    pub t1: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct DeadbeatArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct PlaceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Desired characteristic polynomial, highest degree first.
    #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
    pub poly: ::std::vec::Vec<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct LqrArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// State weight R1 (default: identity).
    #[arg(long, value_parser = parse_matrix_rows)]
    pub r1: Option<::std::vec::Vec<Vec<f64>>>,
    /// Input weight R (default: identity).
    #[arg(long, value_parser = parse_matrix_rows)]
    pub r: Option<::std::vec::Vec<Vec<f64>>>,
    /// Terminal weight P1 (default: zero).
    #[arg(long, value_parser = parse_matrix_rows)]
    pub p1: Option<::std::vec::Vec<Vec<f64>>>,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub i0: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub i1: i64,
    /// Initial state for reporting the optimal cost and rollout.
    #[arg(long, value_parser = parse_vector)]
    pub x0: Option<::std::vec::Vec<f64>>,
}

pub(crate) fn parse_vector(s: &str) -> Result<Vec<f64>, String> {
    let values: Vec<f64> = s
        .split(',')
        .map(|f| f.trim().parse::<f64>().map_err(|e| format!("'{f}': {e}")))
        .collect::<Result<_, _>>()?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err("values must be finite".into());
    }
    Ok(values)
}

pub(crate) fn parse_matrix_rows(s: &str) -> Result<Vec<Vec<f64>>, String> {
    s.split(';').map(parse_vector).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn vector_flags_parse_as_single_values() {
        let cli = Cli::try_parse_from(["ltikit", "steer", "--model", "m.json", "--x1", "1,2", "--t1", "3"]).unwrap();
        match cli.command {
            Command::Steer(a) => assert_eq!(a.x1, vec![1.0, 2.0]),
            other => panic!("{other:?}"),
        }
        let cli = Cli::try_parse_from(["ltikit", "design-lqr", "--model", "m.json", "--i1", "3", "--r1", "1,0;0,2"]).unwrap();
        match cli.command {
            Command::DesignLqr(a) => assert_eq!(a.r1, Some(vec![vec![1.0, 0.0], vec![0.0, 2.0]])),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn vector_and_matrix_syntax() {
        assert_eq!(parse_vector("1, -2.5,3e-1").unwrap(), vec![1.0, -2.5, 0.3]);
        assert!(parse_vector("1,,2").is_err());
        assert!(parse_vector("nan").is_err());
        assert_eq!(parse_matrix_rows("1,0;0,1").unwrap(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }
}
