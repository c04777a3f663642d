//! Deadbeat and general pole placement for a sampled position servo.

use ltikit::design::{closed_loop, deadbeat_gain, state_feedback_gain};
use ltikit::simulate::{simulate_discrete, InputSignal};
use ltikit::statespace::{to_phase_variable, CharPoly};
use ltikit::{Matrix, StateSpaceModel};

fn main() -> ltikit::Result<()> {
    let plant = StateSpaceModel::discrete(
        Matrix::from_rows(&[[1.0, 0.08015], [0.0, 0.6313]])?,
        Matrix::column(&[0.003396, 0.06308]),
        Matrix::row_vector(&[1.0, 0.0]),
    )?;

    let canon = to_phase_variable(&plant)?;
    println!("T = {:?}", canon.transform.to_rows());
    println!("A' = {:?}", canon.model.a().to_rows());

    let gain = deadbeat_gain(&plant)?;
    println!("deadbeat F = {:?}", gain.f.row(0));
    let closed = closed_loop(&plant, &gain.f)?;
    let traj = simulate_discrete(&closed, &[1.0, 0.0], &InputSignal::Zero, 3)?;
    for (k, x) in traj.states.iter().enumerate() {
        println!("  x({k}) = ({:+.3e}, {:+.3e})", x[0], x[1]);
    }

    // both poles at 0.5
    let desired = CharPoly::new(vec![1.0, -1.0, 0.25])?;
    let gain = state_feedback_gain(&plant, &desired)?;
    println!("F for z² - z + 0.25 = {:?}", gain.f.row(0));
    Ok(())
}
