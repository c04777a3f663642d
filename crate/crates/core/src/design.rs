//! Controller synthesis: single-input pole placement through the
//! phase-variable form (deadbeat being the all-zero-poles case) and the
//! finite-horizon discrete-time linear-quadratic regulator.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{symmetric_eigenvalues, Lu, Matrix};
use crate::statespace::{to_phase_variable, CharPoly, StateSpaceModel, TimeDomain};

/// Weights must be symmetric to this absolute tolerance.
pub const WEIGHT_SYMMETRY_TOL: f64 = 1e-10;

/// Relative eigenvalue threshold for definiteness of weights.
pub const WEIGHT_DEFINITENESS_RTOL: f64 = 1e-12;

/// State feedback `u = -F x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeedbackGain {
    pub f: Matrix,
    /// Gain acting on phase-variable coordinates `x′`, with `x = T x′`.
    pub canonical_gain: Option<Matrix>,
    pub transform: Option<Matrix>,
    pub desired_poly: CharPoly,
}

/// Places the closed-loop characteristic polynomial of a controllable
/// single-input model at `desired`.
///
/// In phase-variable coordinates the gain is the coefficient difference
/// `f′_j = d_j - a_j` (ascending order); the original-coordinate gain is
/// `F = F′ T⁻¹`.
pub fn state_feedback_gain(model: &StateSpaceModel, desired: &CharPoly) -> Result<FeedbackGain> {
    let n = model.order();
    if desired.degree() != n {
        return Err(Error::DimensionMismatch(format!(
            "desired polynomial has degree {}, model has order {n}",
            desired.degree()
        )));
    }
    let canon = to_phase_variable(model)?;
    let current = canon.char_poly.ascending_lower();
    let target = desired.ascending_lower();
    let f_canon: Vec<f64> = target.iter().zip(&current).map(|(d, a)| d - a).collect();
    let f_canon = Matrix::row_vector(&f_canon);
    // F T = F′  <=>  Tᵀ Fᵀ = F′ᵀ
    let f = Lu::factor(&canon.transform.transpose())?
        .solve(&f_canon.transpose())
        .map_err(|_| Error::Uncontrollable)?
        .transpose();
    Ok(FeedbackGain {
        f,
        canonical_gain: Some(f_canon),
        transform: Some(canon.transform),
        desired_poly: desired.clone(),
    })
}

/// Deadbeat gain: all closed-loop poles at the origin, so `(A - BF)ⁿ = 0`.
pub fn deadbeat_gain(model: &StateSpaceModel) -> Result<FeedbackGain> {
    state_feedback_gain(model, &CharPoly::monomial(model.order()))
}

/// The model with state map `A - B F`; B and C are unchanged.
pub fn closed_loop(model: &StateSpaceModel, f: &Matrix) -> Result<StateSpaceModel> {
    if f.rows() != model.inputs() || f.cols() != model.order() {
        return Err(Error::DimensionMismatch(format!(
            "gain must be {}x{}, got {}x{}",
            model.inputs(),
            model.order(),
            f.rows(),
            f.cols()
        )));
    }
    let a = model.a() - &(model.b() * f);
    model.with_state_matrix(a)
}

/// `R1 = Dᵀ R₃ D` for a controlled-output weight.
pub fn output_weight(d: &Matrix, r3: &Matrix) -> Result<Matrix> {
    if !r3.is_square() || r3.rows() != d.rows() {
        return Err(Error::DimensionMismatch("output weight R3 must be square with D's row count".into()));
    }
    Ok((&(&d.transpose() * r3) * d).symmetrize())
}

/// Finite-horizon LQR solution on `[i0, i1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LqrSolution {
    pub horizon: (i64, i64),
    /// `F(i)` for `i = i0…i1-1`.
    pub gains: Vec<Matrix>,
    /// `P(i)` for `i = i0…i1`; the last entry is the terminal weight.
    pub riccati: Vec<Matrix>,
}

impl LqrSolution {
    /// Optimal cost `x0ᵀ P(i0) x0`.
    pub fn cost_of(&self, x0: &[f64]) -> f64 {
        let p = &self.riccati[0];
        let px = p.mul_vec(x0);
        x0.iter().zip(&px).map(|(a, b)| a * b).sum()
    }

    pub fn gain_at(&self, i: i64) -> Option<&Matrix> {
        usize::try_from(i - self.horizon.0).ok().and_then(|k| self.gains.get(k))
    }

    /// Closed-loop states `x(i0…i1)` and inputs `u(i0…i1-1)` from `x0`.
    pub fn rollout(&self, model: &StateSpaceModel, x0: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut x = x0.to_vec();
        let mut states = vec![x.clone()];
        let mut inputs = Vec::with_capacity(self.gains.len());
        for f in &self.gains {
            let u: Vec<f64> = f.mul_vec(&x).iter().map(|v| -v).collect();
            let ax = model.a().mul_vec(&x);
            let bu = model.b().mul_vec(&u);
            x = ax.iter().zip(&bu).map(|(a, b)| a + b).collect();
            states.push(x.clone());
            inputs.push(u);
        }
        (states, inputs)
    }
}

/// Quadratic weights of the regulator criterion
/// `J = Σ_{i=i0}^{i1-1} [x(i+1)ᵀ R1 x(i+1) + u(i)ᵀ R u(i)] + x(i1)ᵀ P1 x(i1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LqrWeights {
    pub r1: Matrix,
    pub r: Matrix,
    pub p1: Matrix,
}

impl LqrWeights {
    /// Validates symmetry and definiteness, then symmetrizes.
    pub fn new(r1: &Matrix, r: &Matrix, p1: &Matrix, n: usize, m: usize) -> Result<Self> {
        let check = |w: &Matrix, name: &str, size: usize, strict: bool| -> Result<Matrix> {
            if w.rows() != size || w.cols() != size {
                return Err(Error::DimensionMismatch(format!("{name} must be {size}x{size}")));
            }
            if !w.is_symmetric(WEIGHT_SYMMETRY_TOL) {
                return Err(Error::NonSymmetricWeight(name.into()));
            }
            let w = w.symmetrize();
            let min = symmetric_eigenvalues(&w)?[0];
            let floor = WEIGHT_DEFINITENESS_RTOL * w.norm_inf();
            let ok = if strict { min > floor && w.norm_inf() > 0.0 } else { min >= -floor };
            if !ok {
                return Err(Error::IndefiniteWeight(name.into()));
            }
            Ok(w)
        };
        Ok(Self { r1: check(r1, "R1", n, false)?, r: check(r, "R", m, true)?, p1: check(p1, "P1", n, false)? })
    }

    /// Criterion value for an explicit input sequence starting from `x0`.
    pub fn cost(&self, model: &StateSpaceModel, x0: &[f64], inputs: &[Vec<f64>]) -> f64 {
        let quad = |w: &Matrix, v: &[f64]| -> f64 { v.iter().zip(w.mul_vec(v)).map(|(a, b)| a * b).sum() };
        let mut x = x0.to_vec();
        let mut j = 0.0;
        for u in inputs {
            let ax = model.a().mul_vec(&x);
            let bu = model.b().mul_vec(u);
            x = ax.iter().zip(&bu).map(|(a, b)| a + b).collect();
            j += quad(&self.r1, &x) + quad(&self.r, u);
        }
        j + quad(&self.p1, &x)
    }
}

/// Backward Riccati recursion for the finite-horizon discrete regulator:
///
/// ```text
/// F(i) = [R + Bᵀ(R1 + P(i+1))B]⁻¹ Bᵀ(R1 + P(i+1)) A
/// P(i) = Aᵀ(R1 + P(i+1))(A - B F(i)),   P(i1) = P1
/// ```
pub fn lqr(
    model: &StateSpaceModel,
    r1: &Matrix,
    r: &Matrix,
    p1: &Matrix,
    i0: i64,
    i1: i64,
) -> Result<LqrSolution> {
    model.require(TimeDomain::Discrete)?;
    if i1 <= i0 {
        return Err(Error::InvalidHorizon(format!("need i1 > i0, got i0={i0}, i1={i1}")));
    }
    let weights = LqrWeights::new(r1, r, p1, model.order(), model.inputs())?;
    lqr_with_weights(model, &weights, i0, i1)
}

pub fn lqr_with_weights(model: &StateSpaceModel, weights: &LqrWeights, i0: i64, i1: i64) -> Result<LqrSolution> {
    model.require(TimeDomain::Discrete)?;
    if i1 <= i0 {
        return Err(Error::InvalidHorizon(format!("need i1 > i0, got i0={i0}, i1={i1}")));
    }
    let (a, b) = (model.a(), model.b());
    let bt = b.transpose();
    let at = a.transpose();
    let len = (i1 - i0) as usize;
    let mut riccati = vec![weights.p1.clone()];
    let mut gains = Vec::with_capacity(len);
    for _ in 0..len {
        let next = riccati.last().expect("non-empty");
        let q = &weights.r1 + next;
        let bt_q = &bt * &q;
        let lhs = &weights.r + &(&bt_q * b);
        let f = Lu::factor(&lhs)?.solve(&(&bt_q * a))?;
        let closed = a - &(b * &f);
        let p = (&(&at * &q) * &closed).symmetrize();
        if !p.is_finite() {
            return Err(Error::NonFinite("Riccati iterate".into()));
        }
        gains.push(f);
        riccati.push(p);
    }
    gains.reverse();
    riccati.reverse();
    Ok(LqrSolution { horizon: (i0, i1), gains, riccati })
}
