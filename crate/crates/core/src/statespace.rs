//! State-space models, state-transition matrices, characteristic polynomials
//! and the phase-variable (controllable companion) canonical form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{eigenvalues, expm, Lu, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeDomain {
    Continuous,
    Discrete,
}

impl TimeDomain {
    pub fn as_str(self) -> &'static str {
        match self {
            TimeDomain::Continuous => "continuous",
            TimeDomain::Discrete => "discrete",
        }
    }
}

/// A linear time-invariant system `ẋ = Ax + Bu` (or `x⁺ = Ax + Bu`), `y = Cx`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceModel {
    domain: TimeDomain,
    a: Matrix,
    b: Matrix,
    c: Matrix,
}

impl StateSpaceModel {
    pub fn new(domain: TimeDomain, a: Matrix, b: Matrix, c: Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "state matrix A must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        if b.rows() != n {
            return Err(Error::DimensionMismatch(format!("B has {} rows, expected {n}", b.rows())));
        }
        if c.cols() != n {
            return Err(Error::DimensionMismatch(format!("C has {} columns, expected {n}", c.cols())));
        }
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::NonFinite("model matrices".into()));
        }
        Ok(Self { domain, a, b, c })
    }

    pub fn continuous(a: Matrix, b: Matrix, c: Matrix) -> Result<Self> {
        Self::new(TimeDomain::Continuous, a, b, c)
    }

    pub fn discrete(a: Matrix, b: Matrix, c: Matrix) -> Result<Self> {
        Self::new(TimeDomain::Discrete, a, b, c)
    }

    pub fn domain(&self) -> TimeDomain {
        self.domain
    }

    pub fn is_discrete(&self) -> bool {
        self.domain == TimeDomain::Discrete
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    /// State dimension n.
    pub fn order(&self) -> usize {
        self.a.rows()
    }

    /// Input dimension m.
    pub fn inputs(&self) -> usize {
        self.b.cols()
    }

    /// Output dimension p.
    pub fn outputs(&self) -> usize {
        self.c.rows()
    }

    /// Same model with a different state matrix of the same order.
    pub fn with_state_matrix(&self, a: Matrix) -> Result<Self> {
        Self::new(self.domain, a, self.b.clone(), self.c.clone())
    }

    pub(crate) fn require(&self, domain: TimeDomain) -> Result<()> {
        if self.domain != domain {
            return Err(Error::DomainMismatch { expected: domain.as_str() });
        }
        Ok(())
    }

    pub(crate) fn check_state(&self, x: &[f64], what: &str) -> Result<()> {
        if x.len() != self.order() {
            return Err(Error::DimensionMismatch(format!(
                "{what} has length {}, expected {}",
                x.len(),
                self.order()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(what.to_string()));
        }
        Ok(())
    }
}

fn as_step_count(t: f64, what: &str) -> Result<u64> {
    if !t.is_finite() || t < 0.0 || t.fract() != 0.0 {
        return Err(Error::InvalidTime(format!("{what} = {t} is not a non-negative integer")));
    }
    Ok(t as u64)
}

/// State-transition matrix φ(t, τ): `exp(A(t-τ))` for continuous models and
/// `A^(t-τ)` for discrete ones. `φ(t, t)` is exactly the identity.
pub fn transition_matrix(model: &StateSpaceModel, t: f64, tau: f64) -> Result<Matrix> {
    match model.domain {
        TimeDomain::Continuous => {
            if !t.is_finite() || !tau.is_finite() {
                return Err(Error::InvalidTime("times must be finite".into()));
            }
            if t == tau {
                return Ok(Matrix::identity(model.order()));
            }
            expm(&model.a, t - tau)
        }
        TimeDomain::Discrete => {
            let t = as_step_count(t, "t")?;
            let tau = as_step_count(tau, "tau")?;
            if t < tau {
                return Err(Error::InvalidTime(format!("discrete φ(t, τ) needs t ≥ τ, got t={t}, τ={tau}")));
            }
            Ok(model.a.powi(t - tau))
        }
    }
}

/// Monic polynomial with real coefficients, highest degree first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharPoly {
    coefficients: Vec<f64>,
}

impl CharPoly {
    /// Normalizes by the leading coefficient, which must be non-zero.
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        let lead = *coefficients
            .first()
            .ok_or_else(|| Error::DimensionMismatch("polynomial needs at least one coefficient".into()))?;
        if lead == 0.0 || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::DimensionMismatch("leading coefficient must be finite and non-zero".into()));
        }
        let mut coefficients: Vec<f64> = coefficients.iter().map(|c| c / lead).collect();
        coefficients[0] = 1.0;
        Ok(Self { coefficients })
    }

    /// `z^n`, the deadbeat target.
    pub fn monomial(degree: usize) -> Self {
        let mut coefficients = vec![0.0; degree + 1];
        coefficients[0] = 1.0;
        Self { coefficients }
    }

    /// Expands `∏(z - λᵢ)` and keeps the real parts.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for &root in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (k, &ck) in c.iter().enumerate() {
                next[k] += ck;
                next[k + 1] -= ck * root;
            }
            c = next;
        }
        Self { coefficients: c.into_iter().map(|z| z.re).collect() }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Lower coefficients in ascending order, `(a₀, a₁, …, a_{n-1})`.
    pub fn ascending_lower(&self) -> Vec<f64> {
        self.coefficients[1..].iter().rev().copied().collect()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn max_coefficient_diff(&self, other: &CharPoly) -> f64 {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Companion matrix in phase-variable form: ones on the superdiagonal,
    /// last row `(-a₀, …, -a_{n-1})`.
    pub fn companion(&self) -> Matrix {
        let n = self.degree();
        assert!(n > 0, "companion of a constant polynomial");
        let lower = self.ascending_lower();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n - 1 {
            m[(i, i + 1)] = 1.0;
        }
        for (j, a) in lower.iter().enumerate() {
            m[(n - 1, j)] = -a;
        }
        m
    }
}

/// Characteristic polynomial `det(zI - A)`, expanded from the eigenvalues.
pub fn characteristic_polynomial(a: &Matrix) -> Result<CharPoly> {
    let spectrum = eigenvalues(a)?;
    Ok(CharPoly::from_roots(spectrum.eigenvalues()))
}

/// `[B, AB, …, A^{n-1}B]`.
pub fn controllability_matrix(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if !a.is_square() || b.rows() != a.rows() {
        return Err(Error::DimensionMismatch("controllability matrix needs A n×n and B n×m".into()));
    }
    let mut blocks = vec![b.clone()];
    for _ in 1..a.rows() {
        let next = a.matmul(blocks.last().expect("non-empty"))?;
        blocks.push(next);
    }
    let refs: Vec<&Matrix> = blocks.iter().collect();
    Matrix::hstack(&refs)
}

/// A model in phase-variable form with the similarity `x = T x′`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm {
    pub model: StateSpaceModel,
    pub transform: Matrix,
    pub char_poly: CharPoly,
}

/// Transforms a controllable single-input model into phase-variable form,
/// with `T = 𝒞(A, B) · 𝒞(A′, B′)⁻¹`.
pub fn to_phase_variable(model: &StateSpaceModel) -> Result<CanonicalForm> {
    if model.inputs() != 1 {
        return Err(Error::MultiInput { inputs: model.inputs() });
    }
    let n = model.order();
    let ctrb = controllability_matrix(&model.a, &model.b)?;
    if Lu::factor(&ctrb)?.check().is_err() {
        return Err(Error::Uncontrollable);
    }
    let char_poly = characteristic_polynomial(&model.a)?;
    let a_canon = char_poly.companion();
    let mut b_canon = Matrix::zeros(n, 1);
    b_canon[(n - 1, 0)] = 1.0;
    let ctrb_canon = controllability_matrix(&a_canon, &b_canon)?;
    // T 𝒞′ = 𝒞  <=>  𝒞′ᵀ Tᵀ = 𝒞ᵀ
    let transform = Lu::factor(&ctrb_canon.transpose())?
        .solve(&ctrb.transpose())?
        .transpose();
    let c_canon = model.c.matmul(&transform)?;
    let canon = StateSpaceModel::new(model.domain, a_canon, b_canon, c_canon)?;
    Ok(CanonicalForm { model: canon, transform, char_poly })
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
    fn model_validation() {
        let a = Matrix::identity(2);
        assert!(StateSpaceModel::continuous(a.clone(), Matrix::zeros(3, 1), Matrix::zeros(1, 2)).is_err());
        assert!(StateSpaceModel::continuous(a.clone(), Matrix::zeros(2, 1), Matrix::zeros(1, 3)).is_err());
        assert!(StateSpaceModel::continuous(Matrix::zeros(2, 3), Matrix::zeros(2, 1), Matrix::zeros(1, 3)).is_err());
        let m = StateSpaceModel::continuous(a, Matrix::zeros(2, 3), Matrix::zeros(4, 2)).unwrap();
        assert_eq!((m.order(), m.inputs(), m.outputs()), (2, 3, 4));
    }

    #[test]
    fn half_turn_transition() {
        let phi = transition_matrix(&rotation(1.0), PI + 0.25, 0.25).unwrap();
        let want = Matrix::from_rows(&[[-1.0, 0.0], [0.0, -1.0]]).unwrap();
        assert!(phi.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn discrete_transition() {
        let phi = transition_matrix(&double_integrator(), 7.0, 2.0).unwrap();
        assert_eq!(phi, Matrix::from_rows(&[[1.0, 5.0], [0.0, 1.0]]).unwrap());
        assert!(matches!(transition_matrix(&double_integrator(), 2.0, 3.0), Err(Error::InvalidTime(_))));
        assert!(matches!(transition_matrix(&double_integrator(), 2.5, 1.0), Err(Error::InvalidTime(_))));
    }

    #[test]
    fn transition_at_equal_times_is_identity() {
        assert_eq!(transition_matrix(&rotation(3.0), 1.7, 1.7).unwrap(), Matrix::identity(2));
        assert_eq!(transition_matrix(&double_integrator(), 4.0, 4.0).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn char_polys() {
        let plant = Matrix::from_rows(&[[1.0, 0.08015], [0.0, 0.6313]]).unwrap();
        let p = characteristic_polynomial(&plant).unwrap();
        assert!((p.coefficients()[1] + 1.6313).abs() < 1e-12);
        assert!((p.coefficients()[2] - 0.6313).abs() < 1e-12);
        assert_eq!(characteristic_polynomial(&Matrix::identity(2)).unwrap().coefficients(), &[1.0, -2.0, 1.0]);
        let rot = characteristic_polynomial(rotation(2.0).a()).unwrap();
        assert!(rot.max_coefficient_diff(&CharPoly::new(vec![1.0, 0.0, 4.0]).unwrap()) < 1e-12);
    }

    #[test]
    fn charpoly_normalizes() {
        let p = CharPoly::new(vec![2.0, 4.0, 6.0]).unwrap();
        assert_eq!(p.coefficients(), &[1.0, 2.0, 3.0]);
        assert_eq!(p.ascending_lower(), vec![3.0, 2.0]);
        assert!(CharPoly::new(vec![0.0, 1.0]).is_err());
        assert!(CharPoly::new(vec![]).is_err());
    }

    #[test]
    fn canonical_form_is_fixed_point() {
        let poly = CharPoly::new(vec![1.0, -0.5, 0.06]).unwrap();
        let m = StateSpaceModel::discrete(poly.companion(), Matrix::column(&[0.0, 1.0]), Matrix::row_vector(&[1.0, 0.0]))
            .unwrap();
        let canon = to_phase_variable(&m).unwrap();
        assert!(canon.transform.max_abs_diff(&Matrix::identity(2)) < 1e-12);
    }

    #[test]
    fn uncontrollable_and_multi_input() {
        let m = StateSpaceModel::discrete(Matrix::identity(2), Matrix::column(&[1.0, 0.0]), Matrix::identity(2)).unwrap();
        assert_eq!(to_phase_variable(&m), Err(Error::Uncontrollable));
        let m = StateSpaceModel::discrete(Matrix::identity(2), Matrix::identity(2), Matrix::identity(2)).unwrap();
        assert_eq!(to_phase_variable(&m), Err(Error::MultiInput { inputs: 2 }));
    }
}
