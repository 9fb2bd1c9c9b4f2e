//! Scalar-auxiliary-variable pressure-correction schemes for the 2D
//! incompressible Navier-Stokes equations on a MAC staggered grid.

pub mod error;
pub mod harness;
pub mod linsolve;
pub mod mac;
pub mod mms;
pub mod schemes;

pub use error::{Error, Result};
