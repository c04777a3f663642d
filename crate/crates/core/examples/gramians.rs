//! Controllability and observability Gramians, continuous and discrete.

use std::f64::consts::PI;

use ltikit::gramian::{controllability_gramian, observability_gramian};
use ltikit::{Matrix, StateSpaceModel};

fn main() -> ltikit::Result<()> {
    let rotation = StateSpaceModel::continuous(
        Matrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]])?,
        Matrix::column(&[0.0, 1.0]),
        Matrix::row_vector(&[1.0, 1.0]),
    )?;
    for t1 in [0.5, 1.0, PI] {
        let w = controllability_gramian(&rotation, 0.0, t1)?;
        let m = observability_gramian(&rotation, t1)?;
        println!(
            "t1 = {t1:.4}: det W = {:.6} ({} panels), det M = {:.6}, nonsingular = {}",
            w.det,
            w.panels.unwrap_or(0),
            m.det,
            w.nonsingular && m.nonsingular
        );
    }

    let integrator = StateSpaceModel::discrete(
        Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]])?,
        Matrix::column(&[0.0, 1.0]),
        Matrix::row_vector(&[1.0, 1.0]),
    )?;
    for t1 in 1..=4 {
        let w = controllability_gramian(&integrator, 0.0, t1 as f64)?;
        let m = observability_gramian(&integrator, t1 as f64)?;
        println!("t1 = {t1}: W = {:?}, M = {:?}, M nonsingular = {}", w.w.to_rows(), m.w.to_rows(), m.nonsingular);
    }
    Ok(())
}
