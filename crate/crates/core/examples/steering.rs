//! Minimum-energy transfer between two states.

use std::f64::consts::PI;

use ltikit::gramian::min_energy_input;
use ltikit::simulate::{simulate_continuous, simulate_discrete};
use ltikit::{Matrix, StateSpaceModel};

fn main() -> ltikit::Result<()> {
    let integrator = StateSpaceModel::discrete(
        Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]])?,
        Matrix::column(&[0.0, 1.0]),
        Matrix::row_vector(&[1.0, 0.0]),
    )?;
    let steer = min_energy_input(&integrator, &[1.0, 0.0], &[0.0, 0.0], 2.0, 0)?;
    let traj = simulate_discrete(&integrator, &[1.0, 0.0], &steer.input, 2)?;
    println!("discrete: energy {}, states {:?}", steer.energy, traj.states);

    let rotation = StateSpaceModel::continuous(
        Matrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]])?,
        Matrix::column(&[0.0, 1.0]),
        Matrix::row_vector(&[1.0, 1.0]),
    )?;
    for grid in [4, 16, 64] {
        let steer = min_energy_input(&rotation, &[1.0, 0.0], &[0.0, 0.0], PI, grid)?;
        let traj = simulate_continuous(&rotation, &[1.0, 0.0], &steer.input, 0.0, PI, grid)?;
        println!("continuous, {grid:>2} holds: energy {:.6}, x(π) = {:?}", steer.energy, traj.final_state());
    }
    Ok(())
}
