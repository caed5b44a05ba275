//! Core library for simulating two dipole-coupled planar rotors driven by
//! ultrashort kicks.

pub mod bessel;
pub mod error;
pub mod mathieu;
pub mod quantum;

pub use error::{Error, Result};
