//! Recovering the initial state from inputs and measured outputs.

use std::f64::consts::PI;

use ltikit::gramian::reconstruct_initial_state;
use ltikit::simulate::{simulate_continuous, simulate_discrete, InputSignal};
use ltikit::{Matrix, StateSpaceModel};

fn main() -> ltikit::Result<()> {
    let u = InputSignal::constant(&[1.0]);

    let rotation = StateSpaceModel::continuous(
        Matrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]])?,
        Matrix::column(&[0.0, 1.0]),
        Matrix::row_vector(&[1.0, 1.0]),
    )?;
    let measured = simulate_continuous(&rotation, &[1.0, 0.0], &u, 0.0, PI, 200)?;
    let x0 = reconstruct_initial_state(&rotation, &u, &measured.times, &measured.outputs, PI)?;
    println!("continuous estimate of x(0) = (1, 0): {x0:?}");

    let integrator = StateSpaceModel::discrete(
        Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]])?,
        Matrix::column(&[0.0, 1.0]),
        Matrix::row_vector(&[1.0, 1.0]),
    )?;
    let measured = simulate_discrete(&integrator, &[3.0, -2.0], &u, 1)?;
    println!("samples y(0), y(1): {:?}", measured.outputs);
    let x0 = reconstruct_initial_state(&integrator, &u, &measured.times, &measured.outputs, 2.0)?;
    println!("discrete estimate of x(0) = (3, -2): {x0:?}");
    Ok(())
}
