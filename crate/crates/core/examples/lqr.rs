//! Finite-horizon discrete regulator on the sampled position servo.

use ltikit::design::lqr;
use ltikit::{Matrix, StateSpaceModel};

fn main() -> ltikit::Result<()> {
    let plant = StateSpaceModel::discrete(
        Matrix::from_rows(&[[1.0, 0.08015], [0.0, 0.6313]])?,
        Matrix::column(&[0.003396, 0.06308]),
        Matrix::row_vector(&[1.0, 0.0]),
    )?;
    let r1 = Matrix::diag(&[1.0, 0.0]);
    let r = Matrix::from_rows(&[[0.01]])?;
    let p1 = Matrix::diag(&[10.0, 0.0]);
    let sol = lqr(&plant, &r1, &r, &p1, 0, 20)?;

    for (i, f) in sol.gains.iter().enumerate().step_by(4) {
        println!("F({i:>2}) = {:?}", f.row(0));
    }
    let x0 = [1.0, 0.0];
    println!("optimal cost from {x0:?}: {:.6}", sol.cost_of(&x0));
    let (states, inputs) = sol.rollout(&plant, &x0);
    println!("u(0) = {:+.4}, x(20) = {:?}", inputs[0][0], states.last().unwrap());
    Ok(())
}
