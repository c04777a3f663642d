use super::{lu::Lu, Matrix};
use crate::error::{Error, Result};

const PADE_DEGREE: usize = 8;

/// Scaled argument norm bound before the Padé step.
const SCALED_NORM_MAX: f64 = 0.5;

/// `exp(A t)` by scaling and squaring around a diagonal [8/8] Padé approximant.
pub fn expm(a: &Matrix, t: f64) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("expm of a non-square matrix".into()));
    }
    if !t.is_finite() {
        return Err(Error::NonFinite("expm time argument".into()));
    }
    let n = a.rows();
    if t == 0.0 {
        return Ok(Matrix::identity(n));
    }
    let x = a.scale(t);
    let norm = x.norm_1();
    if norm == 0.0 {
        return Ok(Matrix::identity(n));
    }
    let squarings = if norm > SCALED_NORM_MAX {
        (norm / SCALED_NORM_MAX).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let x = x.scale(0.5f64.powi(squarings as i32));

    let coeffs = pade_coefficients(PADE_DEGREE);
    let mut numer = Matrix::identity(n).scale(coeffs[0]);
    let mut denom = numer.clone();
    let mut power = Matrix::identity(n);
    for (k, &c) in coeffs.iter().enumerate().skip(1) {
        power = &power * &x;
        let term = power.scale(c);
        numer = &numer + &term;
        denom = if k % 2 == 0 { &denom + &term } else { &denom - &term };
    }
    let mut result = Lu::factor(&denom)?.solve(&numer)?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    if !result.is_finite() {
        return Err(Error::NonFinite("matrix exponential overflow".into()));
    }
    Ok(result)
}

/// Coefficients `c_k = (2m-k)! m! / ((2m)! k! (m-k)!)` of the [m/m] approximant.
fn pade_coefficients(m: usize) -> Vec<f64> {
    let mut c = vec![1.0; m + 1];
    for k in 1..=m {
        c[k] = c[k - 1] * (m + 1 - k) as f64 / ((k * (2 * m + 1 - k)) as f64);
    }
    c
}
