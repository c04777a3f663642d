//! Equilibrium, eigenvalue classification, a quadratic Lyapunov
//! certificate and the impulse-response integral for an undamped oscillator.

use std::f64::consts::PI;

use ltikit::stability::{bibo_integral, classify_with_certificate, equilibrium};
use ltikit::{Matrix, StateSpaceModel};

fn main() -> ltikit::Result<()> {
    let omega = 2.0;
    let model = StateSpaceModel::continuous(
        Matrix::from_rows(&[[0.0, omega], [-omega, 0.0]])?,
        Matrix::column(&[0.0, 1.0]),
        Matrix::row_vector(&[1.0, 1.0]),
    )?;

    let x_bar = equilibrium(&model, &[1.0])?;
    println!("equilibrium for u = 1: {x_bar:?}");

    let report = classify_with_certificate(&model, &x_bar, &Matrix::identity(2))?;
    println!("eigenvalues: {:?}", report.eigenvalues.eigenvalues());
    println!("classification: {:?}", report.classification);
    println!("eigenvalue BIBO test: {}", report.bibo_by_eigenvalues);
    if let Some(cert) = &report.lyapunov_certificate {
        println!("V = |x - x̄|²: {:?}, AᵀP + PA = {:?}", cert.verdict, cert.derivative_form.to_rows());
    }

    // I(t) over three periods
    let profile = bibo_integral(&model, 3.0 * PI, 3)?;
    print!("{}", profile.to_csv());
    println!("trend: {:?} (slope {:.4})", profile.verdict, profile.tail_slope);
    Ok(())
}
