pub mod arith;
pub mod asymptotics;
pub mod cli;
pub mod density;
pub mod error;
pub mod lattice;
pub mod orbits;
pub mod verify;

pub use error::{Error, Result};
