pub mod cli;
pub mod distance;
pub mod dyadic;
pub mod error;
pub mod function;
pub mod geometry;
pub mod groupoid;
pub mod numeric;
pub mod operators;
pub mod verify;
pub mod zeta;

pub use dyadic::DyadicScalar;
pub use error::{Error, Result};
