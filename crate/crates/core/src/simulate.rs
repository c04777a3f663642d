//! Trajectories of LTI systems from the variation-of-constants formula
//! (continuous time) and the convolution sum (discrete time).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{expm, vec_add, Matrix};
use crate::quad::simpson_weights;
use crate::statespace::{transition_matrix, StateSpaceModel, TimeDomain};

/// Declarative input signal `u(t)`.
///
/// `Step` and `Samples` are piecewise constant and are integrated exactly;
/// the other kinds are smooth and go through Simpson quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InputSignal {
    Zero,
    Constant { levels: Vec<f64> },
    /// `levels` for `t ≥ at`, zero before.
    Step { levels: Vec<f64>, at: f64 },
    /// `amplitude · sin(ω t + phase)` per channel.
    Sinusoid { amplitude: Vec<f64>, omega: f64, phase: f64 },
    /// Zero-order hold: `values[k]` on `[times[k], times[k+1])`, the last
    /// value held afterwards, zero before the first sample.
    Samples { times: Vec<f64>, values: Vec<Vec<f64>> },
}

impl InputSignal {
    pub fn constant(levels: &[f64]) -> Self {
        InputSignal::Constant { levels: levels.to_vec() }
    }

    /// Channel count, or `None` for `Zero` (which fits any model).
    pub fn channels(&self) -> Option<usize> {
        match self {
            InputSignal::Zero => None,
            InputSignal::Constant { levels } | InputSignal::Step { levels, .. } => Some(levels.len()),
            InputSignal::Sinusoid { amplitude, .. } => Some(amplitude.len()),
            InputSignal::Samples { values, .. } => values.first().map(Vec::len),
        }
    }

    pub fn validate(&self, inputs: usize) -> Result<()> {
        if let Some(ch) = self.channels() {
            if ch != inputs {
                return Err(Error::DimensionMismatch(format!(
                    "input signal has {ch} channels, model has {inputs} inputs"
                )));
            }
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        let ok = match self {
            InputSignal::Zero => true,
            InputSignal::Constant { levels } => finite(levels),
            InputSignal::Step { levels, at } => finite(levels) && at.is_finite(),
            InputSignal::Sinusoid { amplitude, omega, phase } => {
                finite(amplitude) && omega.is_finite() && phase.is_finite()
            }
            InputSignal::Samples { times, values } => {
                if times.is_empty() || times.len() != values.len() {
                    return Err(Error::InvalidGrid("sample table needs one value row per time".into()));
                }
                if times.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidGrid("sample times must be strictly increasing".into()));
                }
                if values.iter().any(|v| v.len() != inputs) {
                    return Err(Error::DimensionMismatch("ragged sample table".into()));
                }
                finite(times) && values.iter().all(|v| finite(v))
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::NonFinite("input signal".into()))
        }
    }

    /// `u(t)` for a model with `inputs` channels.
    pub fn value_at(&self, t: f64, inputs: usize) -> Vec<f64> {
        match self {
            InputSignal::Zero => vec![0.0; inputs],
            InputSignal::Constant { levels } => levels.clone(),
            InputSignal::Step { levels, at } => {
                if t >= *at {
                    levels.clone()
                } else {
                    vec![0.0; inputs]
                }
            }
            InputSignal::Sinusoid { amplitude, omega, phase } => {
                let s = (omega * t + phase).sin();
                amplitude.iter().map(|a| a * s).collect()
            }
            InputSignal::Samples { times, values } => {
                // index of the last sample time ≤ t
                match times.partition_point(|&s| s <= t) {
                    0 => vec![0.0; inputs],
                    k => values[k - 1].clone(),
                }
            }
        }
    }

    fn is_piecewise_constant(&self) -> bool {
        matches!(self, InputSignal::Constant { .. } | InputSignal::Step { .. } | InputSignal::Samples { .. })
    }

    /// Switching instants strictly inside `(a, b)`.
    fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let inside = |t: &f64| *t > a && *t < b;
        match self {
            InputSignal::Step { at, .. } => std::iter::once(*at).filter(inside).collect(),
            InputSignal::Samples { times, .. } => times.iter().copied().filter(inside).collect(),
            _ => Vec::new(),
        }
    }

    /// Parses a `t,u1,…,um` CSV table (header line required) into `Samples`.
    pub fn samples_from_csv(text: &str) -> Result<Self> {
        let (times, values) = parse_table(text)?;
        Ok(InputSignal::Samples { times, values })
    }
}

/// Parses a numeric CSV table with a header line; first column is time.
pub(crate) fn parse_table(text: &str) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::InvalidGrid("empty CSV table".into()))?;
    let width = header.split(',').count();
    if width < 2 {
        return Err(Error::InvalidGrid("CSV table needs a time column and at least one value column".into()));
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidGrid(format!("CSV row {}: {e}", lineno + 2)))?;
        if fields.len() != width {
            return Err(Error::InvalidGrid(format!("CSV row {} has {} fields, expected {width}", lineno + 2, fields.len())));
        }
        times.push(fields[0]);
        values.push(fields[1..].to_vec());
    }
    if times.is_empty() {
        return Err(Error::InvalidGrid("CSV table has no rows".into()));
    }
    Ok((times, values))
}

/// Sampled states and outputs on an ascending time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub outputs: Vec<Vec<f64>>,
}

impl Trajectory {
    fn from_states(model: &StateSpaceModel, times: Vec<f64>, states: Vec<Vec<f64>>) -> Self {
        let outputs = states.iter().map(|x| model.c().mul_vec(x)).collect();
        Self { times, states, outputs }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory is never empty")
    }

    /// CSV with header `t,x1..xn,y1..yp`, LF line endings, shortest
    /// round-trip decimal formatting.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map_or(0, Vec::len);
        let p = self.outputs.first().map_or(0, Vec::len);
        let mut out = String::from("t");
        for i in 1..=n {
            write!(out, ",x{i}").unwrap();
        }
        for i in 1..=p {
            write!(out, ",y{i}").unwrap();
        }
        out.push('\n');
        for ((t, x), y) in self.times.iter().zip(&self.states).zip(&self.outputs) {
            write!(out, "{t}").unwrap();
            for v in x.iter().chain(y) {
                write!(out, ",{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Knobs for continuous simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    /// Simpson subintervals per grid step (even, ≥ 2).
    pub subintervals: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { subintervals: 8 }
    }
}

/// `exp(Aδ)` and `∫₀^δ exp(As) ds · B` from one augmented exponential.
pub(crate) fn hold_discretization(a: &Matrix, b: &Matrix, delta: f64) -> Result<(Matrix, Matrix)> {
    let n = a.rows();
    let m = b.cols();
    let mut aug = Matrix::zeros(n + m, n + m);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)];
        }
        for j in 0..m {
            aug[(i, n + j)] = b[(i, j)];
        }
    }
    let e = expm(&aug, delta)?;
    Ok((e.submatrix(0, 0, n, n), e.submatrix(0, n, n, m)))
}

pub(crate) fn uniform_grid(t0: f64, t1: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::InvalidGrid("steps must be at least 1".into()));
    }
    if !(t0.is_finite() && t1.is_finite()) || t1 <= t0 {
        return Err(Error::InvalidGrid(format!("need finite t1 > t0, got t0={t0}, t1={t1}")));
    }
    let h = (t1 - t0) / steps as f64;
    let mut times: Vec<f64> = (0..steps).map(|k| t0 + k as f64 * h).collect();
    times.push(t1);
    Ok(times)
}

pub fn simulate_continuous(
    model: &StateSpaceModel,
    x0: &[f64],
    u: &InputSignal,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<Trajectory> {
    simulate_continuous_with(model, x0, u, t0, t1, steps, SimOptions::default())
}

/// Continuous-time trajectory on `steps` equal intervals of `[t0, t1]`.
///
/// Each interval propagates `x(t_{k+1}) = φ(h) x(t_k) + ∫ φ(t_{k+1}, τ) B u(τ) dτ`;
/// smooth inputs use composite Simpson on the integrand, constant and held
/// inputs are integrated exactly between switching instants.
pub fn simulate_continuous_with(
    model: &StateSpaceModel,
    x0: &[f64],
    u: &InputSignal,
    t0: f64,
    t1: f64,
    steps: usize,
    options: SimOptions,
) -> Result<Trajectory> {
    model.require(TimeDomain::Continuous)?;
    model.check_state(x0, "initial state")?;
    u.validate(model.inputs())?;
    if options.subintervals < 2 || options.subintervals % 2 != 0 {
        return Err(Error::InvalidGrid("Simpson subintervals must be even and ≥ 2".into()));
    }
    let times = uniform_grid(t0, t1, steps)?;
    let m = model.inputs();
    let h = (t1 - t0) / steps as f64;
    let (a, b) = (model.a(), model.b());
    let (step_map, step_gamma) = hold_discretization(a, b, h)?;

    let mut states = Vec::with_capacity(times.len());
    let mut x = x0.to_vec();
    states.push(x.clone());

    if u.is_piecewise_constant() {
        for w in times.windows(2) {
            let (ta, tb) = (w[0], w[1]);
            let cuts = u.breakpoints(ta, tb);
            if cuts.is_empty() {
                let forced = step_gamma.mul_vec(&u.value_at(ta, m));
                x = vec_add(&step_map.mul_vec(&x), &forced);
            } else {
                let mut edges = vec![ta];
                edges.extend(cuts);
                edges.push(tb);
                for piece in edges.windows(2) {
                    let (phi, gamma) = hold_discretization(a, b, piece[1] - piece[0])?;
                    let forced = gamma.mul_vec(&u.value_at(piece[0], m));
                    x = vec_add(&phi.mul_vec(&x), &forced);
                }
            }
            states.push(x.clone());
        }
    } else {
        let sub = options.subintervals;
        let weights = simpson_weights(sub, h / sub as f64);
        // kernels[j] = φ(t_{k+1}, t_k + j h/sub) B
        let kernels: Vec<Matrix> = (0..=sub)
            .map(|j| expm(a, h * (sub - j) as f64 / sub as f64).map(|phi| &phi * b))
            .collect::<Result<_>>()?;
        let forcing = !matches!(u, InputSignal::Zero);
        for (k, w) in times.windows(2).enumerate() {
            let mut next = step_map.mul_vec(&x);
            if forcing {
                let ta = t0 + k as f64 * h;
                for (j, (kernel, wt)) in kernels.iter().zip(&weights).enumerate() {
                    let tau = if j == sub { w[1] } else { ta + j as f64 * h / sub as f64 };
                    let contrib = kernel.mul_vec(&u.value_at(tau, m));
                    for (nx, c) in next.iter_mut().zip(contrib) {
                        *nx += wt * c;
                    }
                }
            }
            x = next;
            states.push(x.clone());
        }
    }
    if states.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("simulated state".into()));
    }
    Ok(Trajectory::from_states(model, times, states))
}

/// Discrete-time trajectory for `t = 0…t1` by the forward recursion
/// `x(t+1) = A x(t) + B u(t)`.
pub fn simulate_discrete(model: &StateSpaceModel, x0: &[f64], u: &InputSignal, t1: u64) -> Result<Trajectory> {
    model.require(TimeDomain::Discrete)?;
    model.check_state(x0, "initial state")?;
    u.validate(model.inputs())?;
    let m = model.inputs();
    let mut states = Vec::with_capacity(t1 as usize + 1);
    let mut x = x0.to_vec();
    states.push(x.clone());
    for t in 0..t1 {
        let forced = model.b().mul_vec(&u.value_at(t as f64, m));
        x = vec_add(&model.a().mul_vec(&x), &forced);
        states.push(x.clone());
    }
    if states.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("simulated state".into()));
    }
    let times = (0..=t1).map(|t| t as f64).collect();
    Ok(Trajectory::from_states(model, times, states))
}

/// Discrete-time trajectory from the closed-form convolution sum
/// `x(t) = φ(t,0) x0 + Σ_{τ=0}^{t-1} φ(t, τ+1) B u(τ)`.
pub fn simulate_discrete_convolution(
    model: &StateSpaceModel,
    x0: &[f64],
    u: &InputSignal,
    t1: u64,
) -> Result<Trajectory> {
    model.require(TimeDomain::Discrete)?;
    model.check_state(x0, "initial state")?;
    u.validate(model.inputs())?;
    let m = model.inputs();
    let mut states = Vec::with_capacity(t1 as usize + 1);
    for t in 0..=t1 {
        let mut x = transition_matrix(model, t as f64, 0.0)?.mul_vec(x0);
        for tau in 0..t {
            let kernel = &transition_matrix(model, t as f64, (tau + 1) as f64)? * model.b();
            x = vec_add(&x, &kernel.mul_vec(&u.value_at(tau as f64, m)));
        }
        states.push(x);
    }
    let times = (0..=t1).map(|t| t as f64).collect();
    Ok(Trajectory::from_states(model, times, states))
}
