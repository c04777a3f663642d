//! Finite-horizon controllability and observability Gramians, minimum-energy
//! steering and initial-state reconstruction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{expm, symmetric_eigenvalues, vec_sub, Lu, Matrix, COND_LIMIT};
use crate::quad::refine_simpson;
use crate::simulate::{hold_discretization, simulate_continuous, simulate_discrete, InputSignal};
use crate::statespace::{transition_matrix, StateSpaceModel, TimeDomain};

/// A Gramian whose smallest eigenvalue is below this fraction of its norm is singular.
pub const MIN_EIG_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GramianKind {
    Controllability,
    Observability,
}

/// Quadrature settings for continuous-time Gramians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramianOptions {
    /// Refinement stops once successive Simpson estimates differ by less than
    /// `tol · max(1, max|W|)` entrywise.
    pub tol: f64,
    pub max_panels: usize,
    /// Condition-number limit used for the nonsingularity verdict.
    pub cond_limit: f64,
}

impl Default for GramianOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_panels: 1 << 14, cond_limit: COND_LIMIT }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramianReport {
    pub kind: GramianKind,
    pub horizon: (f64, f64),
    pub w: Matrix,
    pub det: f64,
    pub nonsingular: bool,
    pub min_eigenvalue: f64,
    /// Simpson panels used (continuous time only).
    pub panels: Option<usize>,
    pub quadrature_converged: bool,
}

impl GramianReport {
    fn build(
        kind: GramianKind,
        horizon: (f64, f64),
        w: Matrix,
        panels: Option<usize>,
        converged: bool,
        cond_limit: f64,
    ) -> Result<Self> {
        let w = w.symmetrize();
        let det = crate::matrix::determinant(&w)?;
        let min_eigenvalue = symmetric_eigenvalues(&w)?[0];
        let norm = w.norm_inf();
        let nonsingular = det != 0.0
            && norm > 0.0
            && min_eigenvalue >= MIN_EIG_RTOL * norm
            && Lu::factor(&w)?.check_with(cond_limit).is_ok();
        Ok(Self { kind, horizon, w, det, nonsingular, min_eigenvalue, panels, quadrature_converged: converged })
    }

    fn require_nonsingular(&self) -> Result<()> {
        if self.nonsingular {
            Ok(())
        } else {
            Err(Error::SingularGramian(format!(
                "{:?} Gramian on [{}, {}], min eigenvalue {:e}",
                self.kind, self.horizon.0, self.horizon.1, self.min_eigenvalue
            )))
        }
    }
}

fn discrete_horizon(t1: f64) -> Result<u64> {
    if !t1.is_finite() || t1 < 1.0 || t1.fract() != 0.0 {
        return Err(Error::InvalidHorizon(format!("discrete horizon must be an integer ≥ 1, got {t1}")));
    }
    Ok(t1 as u64)
}

pub fn controllability_gramian(model: &StateSpaceModel, t0: f64, t1: f64) -> Result<GramianReport> {
    controllability_gramian_with(model, t0, t1, GramianOptions::default())
}

/// `W(t0, t1) = ∫ φ(t1,τ) B Bᵀ φᵀ(t1,τ) dτ`, or in discrete time
/// `W(0, t1) = Σ_{τ=0}^{t1-1} φ(t1,τ+1) B Bᵀ φᵀ(t1,τ+1)`.
pub fn controllability_gramian_with(
    model: &StateSpaceModel,
    t0: f64,
    t1: f64,
    options: GramianOptions,
) -> Result<GramianReport> {
    let kind = GramianKind::Controllability;
    let (a, b) = (model.a(), model.b());
    let n = model.order();
    match model.domain() {
        TimeDomain::Discrete => {
            if t0 != 0.0 {
                return Err(Error::InvalidHorizon(format!("discrete Gramians start at 0, got t0={t0}")));
            }
            let steps = discrete_horizon(t1)?;
            let mut w = Matrix::zeros(n, n);
            let mut k = b.clone(); // A^j B
            for _ in 0..steps {
                w = &w + &(&k * &k.transpose());
                k = a * &k;
            }
            GramianReport::build(kind, (0.0, t1), w, None, true, options.cond_limit)
        }
        TimeDomain::Continuous => {
            if !(t0.is_finite() && t1.is_finite()) || t1 < t0 {
                return Err(Error::InvalidHorizon(format!("need t1 ≥ t0, got [{t0}, {t1}]")));
            }
            if t1 == t0 {
                return GramianReport::build(kind, (t0, t1), Matrix::zeros(n, n), Some(0), true, options.cond_limit);
            }
            let mut failure = None;
            let refined = refine_simpson(t1 - t0, options.tol, options.max_panels, |h, panels| {
                let step = match expm(a, h) {
                    Ok(e) => e,
                    Err(e) => {
                        failure.get_or_insert(e);
                        Matrix::identity(n)
                    }
                };
                let mut k = b.clone(); // e^{A s_j} B
                let mut nodes = Vec::with_capacity(panels + 1);
                for _ in 0..=panels {
                    nodes.push(&k * &k.transpose());
                    k = &step * &k;
                }
                nodes
            });
            if let Some(e) = failure {
                return Err(e);
            }
            GramianReport::build(kind, (t0, t1), refined.value, Some(refined.panels), refined.converged, options.cond_limit)
        }
    }
}

pub fn observability_gramian(model: &StateSpaceModel, t1: f64) -> Result<GramianReport> {
    observability_gramian_with(model, t1, GramianOptions::default())
}

/// `M(0, t1) = ∫₀^{t1} φᵀ(τ,0) Cᵀ C φ(τ,0) dτ`, or the sum over `τ = 0…t1-1`.
pub fn observability_gramian_with(model: &StateSpaceModel, t1: f64, options: GramianOptions) -> Result<GramianReport> {
    let kind = GramianKind::Observability;
    let (a, c) = (model.a(), model.c());
    let n = model.order();
    match model.domain() {
        TimeDomain::Discrete => {
            let steps = discrete_horizon(t1)?;
            let mut m = Matrix::zeros(n, n);
            let mut row = c.clone(); // C A^τ
            for _ in 0..steps {
                m = &m + &(&row.transpose() * &row);
                row = &row * a;
            }
            GramianReport::build(kind, (0.0, t1), m, None, true, options.cond_limit)
        }
        TimeDomain::Continuous => {
            if !t1.is_finite() || t1 <= 0.0 {
                return Err(Error::InvalidHorizon(format!("need t1 > 0, got {t1}")));
            }
            let mut failure = None;
            let refined = refine_simpson(t1, options.tol, options.max_panels, |h, panels| {
                let step = match expm(a, h) {
                    Ok(e) => e,
                    Err(e) => {
                        failure.get_or_insert(e);
                        Matrix::identity(n)
                    }
                };
                let mut row = c.clone(); // C e^{A τ_j}
                let mut nodes = Vec::with_capacity(panels + 1);
                for _ in 0..=panels {
                    nodes.push(&row.transpose() * &row);
                    row = &row * &step;
                }
                nodes
            });
            if let Some(e) = failure {
                return Err(e);
            }
            GramianReport::build(kind, (0.0, t1), refined.value, Some(refined.panels), refined.converged, options.cond_limit)
        }
    }
}

/// A steering input together with its energy `∫‖u‖²` (or `Σ‖u‖²`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteeringInput {
    pub input: InputSignal,
    pub energy: f64,
}

/// Minimum-energy input taking `x0` at time 0 to `x1` at `t1`.
///
/// Discrete time: `u(τ) = Bᵀ φᵀ(t1, τ+1) W⁻¹ (x1 - φ(t1,0) x0)`.
/// Continuous time: the minimum-energy input among signals held constant on
/// `grid` equal intervals, `u_k = G_kᵀ W_h⁻¹ (x1 - φ(t1,0) x0)` with
/// `G_k = φ(t1, t_{k+1}) ∫₀^h e^{As} ds B` and `W_h = Σ G_k G_kᵀ`. It hits the
/// target exactly under zero-order-hold simulation and converges to the
/// continuous minimum-energy input as the grid is refined.
pub fn min_energy_input(
    model: &StateSpaceModel,
    x0: &[f64],
    x1: &[f64],
    t1: f64,
    grid: usize,
) -> Result<SteeringInput> {
    min_energy_input_with(model, x0, x1, t1, grid, GramianOptions::default())
}

pub fn min_energy_input_with(
    model: &StateSpaceModel,
    x0: &[f64],
    x1: &[f64],
    t1: f64,
    grid: usize,
    options: GramianOptions,
) -> Result<SteeringInput> {
    let cond_limit = options.cond_limit;
    model.check_state(x0, "initial state")?;
    model.check_state(x1, "target state")?;
    let m = model.inputs();
    match model.domain() {
        TimeDomain::Discrete => {
            let report = controllability_gramian_with(model, 0.0, t1, options)?;
            report.require_nonsingular()?;
            let steps = t1 as u64;
            let free = transition_matrix(model, t1, 0.0)?.mul_vec(x0);
            let lambda = solve_gramian(&report.w, &vec_sub(x1, &free), cond_limit)?;
            let mut values = Vec::with_capacity(steps as usize);
            let mut energy = 0.0;
            for tau in 0..steps {
                let g = &transition_matrix(model, t1, (tau + 1) as f64)? * model.b();
                let u = g.transpose().mul_vec(&lambda);
                energy += u.iter().map(|v| v * v).sum::<f64>();
                values.push(u);
            }
            let times = (0..steps).map(|t| t as f64).collect();
            Ok(SteeringInput { input: InputSignal::Samples { times, values }, energy })
        }
        TimeDomain::Continuous => {
            if grid == 0 {
                return Err(Error::InvalidGrid("grid must be at least 1".into()));
            }
            let report = controllability_gramian_with(model, 0.0, t1, options)?;
            report.require_nonsingular()?;
            let h = t1 / grid as f64;
            let (step, gamma) = hold_discretization(model.a(), model.b(), h)?;
            let n = model.order();
            let mut kernels = vec![gamma; grid];
            for k in (0..grid - 1).rev() {
                kernels[k] = &step * &kernels[k + 1];
            }
            let mut w = Matrix::zeros(n, n);
            for g in &kernels {
                w = &w + &(g * &g.transpose());
            }
            let sampled = GramianReport::build(GramianKind::Controllability, (0.0, t1), w, Some(grid), true, cond_limit)?;
            sampled.require_nonsingular()?;
            let free = step.powi(grid as u64).mul_vec(x0);
            let lambda = solve_gramian(&sampled.w, &vec_sub(x1, &free), cond_limit)?;
            let values: Vec<Vec<f64>> = kernels.iter().map(|g| g.transpose().mul_vec(&lambda)).collect();
            let energy = h * values.iter().flatten().map(|v| v * v).sum::<f64>();
            let times = (0..grid).map(|k| k as f64 * h).collect();
            debug_assert!(values.iter().all(|v| v.len() == m));
            Ok(SteeringInput { input: InputSignal::Samples { times, values }, energy })
        }
    }
}

fn solve_gramian(w: &Matrix, rhs: &[f64], cond_limit: f64) -> Result<Vec<f64>> {
    Lu::factor(w)?
        .solve_with(&Matrix::column(rhs), cond_limit)
        .map(|x| x.col(0))
        .map_err(|e| match e {
            Error::SingularMatrix(msg) => Error::SingularGramian(msg),
            other => other,
        })
}

/// Least-squares estimate of `x0` from an input record and output samples.
///
/// Discrete time uses the samples at `t = 0…t1-1`; continuous time expects
/// a uniform grid from 0 to `t1` (both endpoints) and weights the residuals
/// with trapezoid weights. The forced response is subtracted before solving
/// the normal equations, whose matrix is the (sampled) observability Gramian.
pub fn reconstruct_initial_state(
    model: &StateSpaceModel,
    u: &InputSignal,
    times: &[f64],
    outputs: &[Vec<f64>],
    t1: f64,
) -> Result<Vec<f64>> {
    reconstruct_initial_state_with(model, u, times, outputs, t1, GramianOptions::default())
}

pub fn reconstruct_initial_state_with(
    model: &StateSpaceModel,
    u: &InputSignal,
    times: &[f64],
    outputs: &[Vec<f64>],
    t1: f64,
    options: GramianOptions,
) -> Result<Vec<f64>> {
    let cond_limit = options.cond_limit;
    let p = model.outputs();
    if times.len() != outputs.len() {
        return Err(Error::GridMismatch(format!("{} times but {} output samples", times.len(), outputs.len())));
    }
    if outputs.iter().any(|y| y.len() != p) {
        return Err(Error::DimensionMismatch(format!("output samples must have {p} entries")));
    }
    let n = model.order();
    match model.domain() {
        TimeDomain::Discrete => {
            let report = observability_gramian_with(model, t1, options)?;
            let steps = t1 as u64;
            let record: Vec<&Vec<f64>> = (0..steps)
                .map(|k| {
                    times
                        .iter()
                        .position(|&t| t == k as f64)
                        .map(|i| &outputs[i])
                        .ok_or_else(|| Error::GridMismatch(format!("missing output sample at t={k}")))
                })
                .collect::<Result<_>>()?;
            report.require_nonsingular()?;
            let forced = simulate_discrete(model, &vec![0.0; n], u, steps - 1)?;
            let mut rhs = vec![0.0; n];
            let mut row = model.c().clone();
            for (k, y) in record.iter().enumerate() {
                let resid = vec_sub(y, &forced.outputs[k]);
                for (r, v) in rhs.iter_mut().zip(row.transpose().mul_vec(&resid)) {
                    *r += v;
                }
                row = &row * model.a();
            }
            solve_gramian(&report.w, &rhs, cond_limit)
        }
        TimeDomain::Continuous => {
            if !t1.is_finite() || t1 <= 0.0 {
                return Err(Error::InvalidHorizon(format!("need t1 > 0, got {t1}")));
            }
            let steps = times.len().saturating_sub(1);
            if steps == 0 {
                return Err(Error::GridMismatch("need at least two samples".into()));
            }
            let h = t1 / steps as f64;
            let uniform = times.iter().enumerate().all(|(k, &t)| (t - k as f64 * h).abs() <= 1e-9 * t1);
            if !uniform {
                return Err(Error::GridMismatch(format!("samples must lie on a uniform grid over [0, {t1}]")));
            }
            observability_gramian_with(model, t1, options)?.require_nonsingular()?;
            let forced = simulate_continuous(model, &vec![0.0; n], u, 0.0, t1, steps)?;
            let step = expm(model.a(), h)?;
            let mut normal = Matrix::zeros(n, n);
            let mut rhs = vec![0.0; n];
            let mut row = model.c().clone(); // C φ(t_k, 0)
            for (k, y) in outputs.iter().enumerate() {
                let weight = if k == 0 || k == steps { 0.5 * h } else { h };
                let rt = row.transpose();
                normal = &normal + &(&rt * &row).scale(weight);
                let resid = vec_sub(y, &forced.outputs[k]);
                for (r, v) in rhs.iter_mut().zip(rt.mul_vec(&resid)) {
                    *r += weight * v;
                }
                row = &row * &step;
            }
            let sampled = GramianReport::build(GramianKind::Observability, (0.0, t1), normal, Some(steps), true, cond_limit)?;
            sampled.require_nonsingular()?;
            solve_gramian(&sampled.w, &rhs, cond_limit)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rotation(omega: f64) -> StateSpaceModel {
        StateSpaceModel::continuous(
            Matrix::from_rows(&[[0.0, omega], [-omega, 0.0]]).unwrap(),
            Matrix::column(&[0.0, 1.0]),
            Matrix::row_vector(&[1.0, 1.0]),
        )
        .unwrap()
    }

    fn double_integrator() -> StateSpaceModel {
        StateSpaceModel::discrete(
            Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap(),
            Matrix::column(&[0.0, 1.0]),
            Matrix::row_vector(&[1.0, 1.0]),
        )
        .unwrap()
    }

    #[test]
    fn rotation_controllability_half_period() {
        let r = controllability_gramian(&rotation(1.0), 0.0, PI).unwrap();
        let want = Matrix::diag(&[PI / 2.0, PI / 2.0]);
        assert!(r.w.max_abs_diff(&want) < 1e-9, "{:?}", r.w);
        assert!(r.nonsingular);
    }

    #[test]
    fn double_integrator_controllability() {
        let r = controllability_gramian(&double_integrator(), 0.0, 3.0).unwrap();
        assert_eq!(r.w, Matrix::from_rows(&[[5.0, 3.0], [3.0, 3.0]]).unwrap());
        assert!((r.det - 6.0).abs() < 1e-12);
        assert!(r.nonsingular);
    }

    #[test]
    fn degenerate_horizon() {
        let r = controllability_gramian(&rotation(1.0), 2.0, 2.0).unwrap();
        assert_eq!(r.w, Matrix::zeros(2, 2));
        assert!(!r.nonsingular);
        assert!(matches!(controllability_gramian(&rotation(1.0), 2.0, 1.0), Err(Error::InvalidHorizon(_))));
        assert!(matches!(controllability_gramian(&double_integrator(), 0.0, 2.5), Err(Error::InvalidHorizon(_))));
        assert!(matches!(controllability_gramian(&double_integrator(), 1.0, 3.0), Err(Error::InvalidHorizon(_))));
    }

    #[test]
    fn observability_examples() {
        let r = observability_gramian(&rotation(1.0), PI).unwrap();
        assert!(r.w.max_abs_diff(&Matrix::diag(&[PI, PI])) < 1e-9);
        let r = observability_gramian(&double_integrator(), 2.0).unwrap();
        assert_eq!(r.w, Matrix::from_rows(&[[2.0, 3.0], [3.0, 5.0]]).unwrap());
        assert!((r.det - 1.0).abs() < 1e-12 && r.nonsingular);
        let r = observability_gramian(&double_integrator(), 1.0).unwrap();
        assert_eq!(r.w, Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap());
        assert!(!r.nonsingular);
    }

    #[test]
    fn zero_input_when_target_is_free_motion() {
        let m = rotation(1.0);
        let x0 = [0.3, -0.2];
        let x1 = transition_matrix(&m, 2.0, 0.0).unwrap().mul_vec(&x0);
        let s = min_energy_input(&m, &x0, &x1, 2.0, 50).unwrap();
        assert!(s.energy <= 1e-12, "{}", s.energy);
    }

    #[test]
    fn steer_rotation_to_origin() {
        let m = rotation(1.0);
        let s = min_energy_input(&m, &[1.0, 0.0], &[0.0, 0.0], PI, 200).unwrap();
        let tr = simulate_continuous(&m, &[1.0, 0.0], &s.input, 0.0, PI, 200).unwrap();
        assert!(crate::matrix::vec_norm(tr.final_state()) < 1e-6);
    }

    #[test]
    fn no_actuation_is_singular() {
        let m = StateSpaceModel::continuous(Matrix::identity(2), Matrix::zeros(2, 1), Matrix::identity(2)).unwrap();
        assert!(matches!(min_energy_input(&m, &[1.0, 0.0], &[0.0, 0.0], 1.0, 10), Err(Error::SingularGramian(_))));
    }

    #[test]
    fn discrete_reconstruction() {
        let m = double_integrator();
        let tr = simulate_discrete(&m, &[3.0, -2.0], &InputSignal::Zero, 2).unwrap();
        let x0 = reconstruct_initial_state(&m, &InputSignal::Zero, &tr.times, &tr.outputs, 2.0).unwrap();
        assert!((x0[0] - 3.0).abs() < 1e-10 && (x0[1] + 2.0).abs() < 1e-10);
        assert!(matches!(
            reconstruct_initial_state(&m, &InputSignal::Zero, &tr.times, &tr.outputs, 1.0),
            Err(Error::SingularGramian(_))
        ));
        assert!(matches!(
            reconstruct_initial_state(&m, &InputSignal::Zero, &tr.times[1..], &tr.outputs[1..], 2.0),
            Err(Error::GridMismatch(_))
        ));
    }
}
