//! Free and forced response of a continuous oscillator and a discrete
//! double integrator.

use ltikit::simulate::{simulate_continuous, simulate_discrete, InputSignal};
use ltikit::{Matrix, StateSpaceModel};

fn main() -> ltikit::Result<()> {
    let omega = 2.0;
    let oscillator = StateSpaceModel::continuous(
        Matrix::from_rows(&[[0.0, omega], [-omega, 0.0]])?,
        Matrix::column(&[0.0, 1.0]),
        Matrix::row_vector(&[1.0, 1.0]),
    )?;
    let step = InputSignal::constant(&[1.0]);
    let traj = simulate_continuous(&oscillator, &[1.0, 0.0], &step, 0.0, 5.0, 10)?;
    println!("oscillator, u = 1");
    for ((t, x), y) in traj.times.iter().zip(&traj.states).zip(&traj.outputs) {
        println!("  t = {t:4.1}  x = ({:+.6}, {:+.6})  y = {:+.6}", x[0], x[1], y[0]);
    }

    let wave = InputSignal::Sinusoid { amplitude: vec![0.5], omega: 1.0, phase: 0.0 };
    let driven = simulate_continuous(&oscillator, &[0.0, 0.0], &wave, 0.0, 5.0, 50)?;
    println!("sinusoidal drive, final state {:?}", driven.final_state());

    let integrator = StateSpaceModel::discrete(
        Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]])?,
        Matrix::column(&[0.0, 1.0]),
        Matrix::row_vector(&[1.0, 1.0]),
    )?;
    let traj = simulate_discrete(&integrator, &[1.0, 0.0], &step, 6)?;
    println!("double integrator, u = 1");
    print!("{}", traj.to_csv());
    Ok(())
}
