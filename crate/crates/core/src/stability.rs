//! Equilibria, eigenvalue stability classification, quadratic Lyapunov
//! certificate checks and the impulse-response absolute integral used for
//! BIBO analysis.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{eigenvalues, solve, symmetric_eigenvalues, Matrix, Spectrum};
use crate::quad::adaptive_simpson;
use crate::simulate::uniform_grid;
use crate::statespace::{StateSpaceModel, TimeDomain};

/// Margin around the stability boundary for eigenvalue sign tests.
pub const EIGEN_TOL: f64 = 1e-9;

/// Relative threshold for definiteness tests.
pub const DEFINITENESS_RTOL: f64 = 1e-9;

/// Symmetry tolerance for Lyapunov candidates.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Average slope of I(t) over the last quarter of the profile above which
/// the integral is reported as growing.
pub const BIBO_SLOPE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    AsymptoticallyStable,
    Marginal,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LyapunovVerdict {
    /// `V̇` is negative definite.
    CertifiesAsymptotic,
    /// `V̇` is negative semidefinite.
    CertifiesStability,
    Fails,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovCertificate {
    pub equilibrium: Vec<f64>,
    pub p: Matrix,
    /// Quadratic form of `V̇` along free motion: `AᵀP + PA`.
    pub derivative_form: Matrix,
    pub verdict: LyapunovVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub eigenvalues: Spectrum,
    pub classification: Classification,
    /// Strict eigenvalue condition (Re λ < 0, or |λ| < 1 in discrete time),
    /// a sufficient condition for BIBO stability.
    pub bibo_by_eigenvalues: bool,
    pub lyapunov_certificate: Option<LyapunovCertificate>,
}

/// Equilibrium `x̄` with `A x̄ + B u = 0` for a constant input.
pub fn equilibrium(model: &StateSpaceModel, u_const: &[f64]) -> Result<Vec<f64>> {
    model.require(TimeDomain::Continuous)?;
    if u_const.len() != model.inputs() {
        return Err(Error::DimensionMismatch(format!(
            "constant input has {} entries, model has {} inputs",
            u_const.len(),
            model.inputs()
        )));
    }
    let rhs: Vec<f64> = model.b().mul_vec(u_const).iter().map(|v| -v).collect();
    let x = solve(model.a(), &Matrix::column(&rhs))?;
    Ok(x.col(0).into_iter().map(|v| v + 0.0).collect())
}

fn classify_spectrum(domain: TimeDomain, spectrum: &Spectrum) -> (Classification, bool) {
    let (stable, unstable) = match domain {
        TimeDomain::Continuous => {
            let abscissa = spectrum.max_real_part();
            (abscissa < -EIGEN_TOL, abscissa > EIGEN_TOL)
        }
        TimeDomain::Discrete => {
            let radius = spectrum.spectral_radius();
            (radius < 1.0 - EIGEN_TOL, radius > 1.0 + EIGEN_TOL)
        }
    };
    let class = if stable {
        Classification::AsymptoticallyStable
    } else if unstable {
        Classification::Unstable
    } else {
        Classification::Marginal
    };
    (class, stable)
}

pub fn classify(model: &StateSpaceModel) -> Result<StabilityReport> {
    let spectrum = eigenvalues(model.a())?;
    let (classification, bibo_by_eigenvalues) = classify_spectrum(model.domain(), &spectrum);
    Ok(StabilityReport { eigenvalues: spectrum, classification, bibo_by_eigenvalues, lyapunov_certificate: None })
}

/// [`classify`] plus a Lyapunov check of `V(x) = (x - x̄)ᵀ P (x - x̄)`.
pub fn classify_with_certificate(model: &StateSpaceModel, x_bar: &[f64], p: &Matrix) -> Result<StabilityReport> {
    let mut report = classify(model)?;
    report.lyapunov_certificate = Some(lyapunov_certificate(model, x_bar, p)?);
    Ok(report)
}

pub fn lyapunov_check(model: &StateSpaceModel, x_bar: &[f64], p: &Matrix) -> Result<LyapunovVerdict> {
    Ok(lyapunov_certificate(model, x_bar, p)?.verdict)
}

/// Checks a quadratic Lyapunov candidate around `x̄` for a continuous model.
///
/// `P` must be symmetric positive definite. The derivative of `V` along
/// deviations from the equilibrium is the quadratic form `S = AᵀP + PA`;
/// the candidate certifies asymptotic stability when `S` is negative
/// definite and stability when `S` is negative semidefinite. Quadratic
/// certificates are global for linear dynamics, so no region is involved.
pub fn lyapunov_certificate(model: &StateSpaceModel, x_bar: &[f64], p: &Matrix) -> Result<LyapunovCertificate> {
    model.require(TimeDomain::Continuous)?;
    model.check_state(x_bar, "equilibrium")?;
    let n = model.order();
    if p.rows() != n || p.cols() != n {
        return Err(Error::DimensionMismatch(format!("P must be {n}x{n}")));
    }
    if !p.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::NonSymmetricWeight("P".into()));
    }
    let p = p.symmetrize();
    let p_eigs = symmetric_eigenvalues(&p)?;
    if !(p_eigs[0] > DEFINITENESS_RTOL * p.norm_inf()) {
        return Err(Error::NotPositiveDefinite("P".into()));
    }
    let a = model.a();
    let s = &(&a.transpose() * &p) + &(&p * a);
    let s_eigs = symmetric_eigenvalues(&s)?;
    let tol = DEFINITENESS_RTOL * s.norm_inf();
    let max_eig = *s_eigs.last().expect("non-empty spectrum");
    let verdict = if max_eig < -tol {
        LyapunovVerdict::CertifiesAsymptotic
    } else if max_eig <= tol {
        LyapunovVerdict::CertifiesStability
    } else {
        LyapunovVerdict::Fails
    };
    Ok(LyapunovCertificate { equilibrium: x_bar.to_vec(), p, derivative_form: s, verdict })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BiboVerdict {
    Bounded,
    Growing,
}

/// `I_ij(t) = ∫₀ᵗ |t_ij(t, τ)| dτ` for the impulse response `T(t,τ) = C φ(t,τ) B`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiboProfile {
    pub sample_times: Vec<f64>,
    /// One p×m matrix per sample time.
    pub integral_values: Vec<Matrix>,
    /// Trend verdict from finite samples: a heuristic unless the eigenvalue
    /// condition already certifies boundedness.
    pub verdict: BiboVerdict,
    pub bibo_by_eigenvalues: bool,
    /// Average slope of the largest channel integral over the last quarter.
    pub tail_slope: f64,
}

impl BiboProfile {
    /// CSV with header `t,I_11,I_12,…` (output index first).
    pub fn to_csv(&self) -> String {
        let (p, m) = self.integral_values.first().map_or((0, 0), |v| (v.rows(), v.cols()));
        let mut out = String::from("t");
        for i in 1..=p {
            for j in 1..=m {
                write!(out, ",I_{i}{j}").unwrap();
            }
        }
        out.push('\n');
        for (t, v) in self.sample_times.iter().zip(&self.integral_values) {
            write!(out, "{t}").unwrap();
            for x in v.as_slice() {
                write!(out, ",{x}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Integration accuracy per sample interval.
const BIBO_QUAD_TOL: f64 = 1e-12;

/// Computes `I(t)` at `samples + 1` equally spaced times on `[0, t_end]`.
///
/// For LTI systems the impulse response depends only on `s = t - τ`, so
/// `I(t) = ∫₀ᵗ |C e^{As} B| ds` is accumulated interval by interval. The
/// verdict is `Bounded` whenever the eigenvalue condition holds; otherwise
/// it is `Growing` if the last-quarter slope exceeds [`BIBO_SLOPE_TOL`].
pub fn bibo_integral(model: &StateSpaceModel, t_end: f64, samples: usize) -> Result<BiboProfile> {
    model.require(TimeDomain::Continuous)?;
    let times = uniform_grid(0.0, t_end, samples)?;
    let (p, m) = (model.outputs(), model.inputs());
    let a = model.a().clone();
    let b = model.b();
    let c = model.c();
    let mut failure = None;
    let mut integrand = |s: f64| -> Vec<f64> {
        match crate::matrix::expm(&a, s) {
            Ok(phi) => (&(c * &phi) * b).as_slice().iter().map(|v| v.abs()).collect(),
            Err(e) => {
                failure.get_or_insert(e);
                vec![0.0; p * m]
            }
        }
    };
    let spectrum = eigenvalues(model.a())?;
    // Panels short enough that no oscillation hides between Simpson nodes.
    let rate = spectrum.eigenvalues().iter().map(|l| l.norm()).fold(0.0, f64::max);
    let mut acc = vec![0.0; p * m];
    let mut integral_values = vec![Matrix::zeros(p, m)];
    for w in times.windows(2) {
        let panels = ((w[1] - w[0]) * rate * 2.0).ceil().clamp(8.0, 4096.0) as usize;
        let h = (w[1] - w[0]) / panels as f64;
        for k in 0..panels {
            let (lo, hi) = (w[0] + k as f64 * h, if k + 1 == panels { w[1] } else { w[0] + (k + 1) as f64 * h });
            let piece = adaptive_simpson(&mut integrand, lo, hi, BIBO_QUAD_TOL / panels as f64, 24);
            for (a, v) in acc.iter_mut().zip(piece) {
                *a += v;
            }
        }
        integral_values.push(Matrix::new(p, m, acc.clone())?);
    }
    if let Some(e) = failure {
        return Err(e);
    }

    let (_, bibo_by_eigenvalues) = classify_spectrum(TimeDomain::Continuous, &spectrum);
    let quarter = (samples / 4).max(1);
    let last = integral_values.len() - 1;
    let first = last - quarter;
    let tail_slope = (integral_values[last].max_abs() - integral_values[first].max_abs())
        / (times[last] - times[first]);
    let verdict = if bibo_by_eigenvalues || tail_slope <= BIBO_SLOPE_TOL {
        BiboVerdict::Bounded
    } else {
        BiboVerdict::Growing
    };
    Ok(BiboProfile { sample_times: times, integral_values, verdict, bibo_by_eigenvalues, tail_slope })
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

    fn plain(a: Matrix) -> StateSpaceModel {
        let n = a.rows();
        StateSpaceModel::continuous(a, Matrix::identity(n), Matrix::identity(n)).unwrap()
    }

    #[test]
    fn equilibria() {
        let x = equilibrium(&rotation(2.0), &[1.0]).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-15 && x[1].abs() < 1e-15);
        let x = equilibrium(&plain(&Matrix::identity(2) * -1.0), &[3.0, 4.0]).unwrap();
        assert_eq!(x, vec![3.0, 4.0]);
        let nil = plain(Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap());
        assert!(matches!(equilibrium(&nil, &[1.0, 1.0]), Err(Error::SingularMatrix(_))));
    }

    #[test]
    fn classification() {
        let r = classify(&plain(Matrix::diag(&[-1.0, -2.0]))).unwrap();
        assert_eq!(r.classification, Classification::AsymptoticallyStable);
        assert!(r.bibo_by_eigenvalues);
        let r = classify(&rotation(3.0)).unwrap();
        assert_eq!(r.classification, Classification::Marginal);
        assert!(!r.bibo_by_eigenvalues);
        let d = StateSpaceModel::discrete(
            Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap(),
            Matrix::column(&[0.0, 1.0]),
            Matrix::row_vector(&[1.0, 1.0]),
        )
        .unwrap();
        assert_eq!(classify(&d).unwrap().classification, Classification::Marginal);
        assert_eq!(classify(&plain(Matrix::diag(&[0.1, -3.0]))).unwrap().classification, Classification::Unstable);
    }

    #[test]
    fn lyapunov_verdicts() {
        let c = lyapunov_certificate(&rotation(2.0), &[0.5, 0.0], &Matrix::identity(2)).unwrap();
        assert_eq!(c.verdict, LyapunovVerdict::CertifiesStability);
        assert_eq!(c.derivative_form, Matrix::zeros(2, 2));
        let neg = plain(&Matrix::identity(2) * -1.0);
        assert_eq!(lyapunov_check(&neg, &[0.0, 0.0], &Matrix::identity(2)).unwrap(), LyapunovVerdict::CertifiesAsymptotic);
        let pos = plain(Matrix::identity(2));
        assert_eq!(lyapunov_check(&pos, &[0.0, 0.0], &Matrix::identity(2)).unwrap(), LyapunovVerdict::Fails);
    }

    #[test]
    fn lyapunov_rejects_bad_p() {
        let m = rotation(1.0);
        let indefinite = Matrix::diag(&[1.0, -1.0]);
        assert!(matches!(lyapunov_check(&m, &[1.0, 0.0], &indefinite), Err(Error::NotPositiveDefinite(_))));
        let skew = Matrix::from_rows(&[[1.0, 0.5], [0.0, 1.0]]).unwrap();
        assert!(matches!(lyapunov_check(&m, &[1.0, 0.0], &skew), Err(Error::NonSymmetricWeight(_))));
    }

    #[test]
    fn bibo_rotation_one_period() {
        let prof = bibo_integral(&rotation(2.0), PI, 16).unwrap();
        let last = prof.integral_values.last().unwrap()[(0, 0)];
        assert!((last - 2.0 * 2f64.sqrt()).abs() < 1e-9, "{last}");
        assert_eq!(prof.verdict, BiboVerdict::Growing);
        assert_eq!(prof.integral_values[0], Matrix::zeros(1, 1));
    }

    #[test]
    fn bibo_scalar_decay() {
        let m = StateSpaceModel::continuous(
            Matrix::from_rows(&[[-1.0]]).unwrap(),
            Matrix::column(&[1.0]),
            Matrix::row_vector(&[1.0]),
        )
        .unwrap();
        let prof = bibo_integral(&m, 3.0, 12).unwrap();
        for (t, v) in prof.sample_times.iter().zip(&prof.integral_values) {
            assert!((v[(0, 0)] - (1.0 - (-t).exp())).abs() < 1e-11);
        }
        assert_eq!(prof.verdict, BiboVerdict::Bounded);
        assert!(prof.to_csv().starts_with("t,I_11\n0,0\n"));
    }
}
