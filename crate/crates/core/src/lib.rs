pub mod cli;
pub mod design;
pub mod error;
pub mod gramian;
pub mod matrix;
mod quad;
pub mod simulate;
pub mod stability;
pub mod statespace;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use statespace::{StateSpaceModel, TimeDomain};
