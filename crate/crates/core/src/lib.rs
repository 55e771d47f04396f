//! Exact dephasing dynamics of a qubit initially correlated with a bosonic
//! bath: dephasing kernels, the reduced state, the trace-distance
//! non-Markovianity measure and quantum speed limit bounds, plus a sweep
//! engine and command-line front end.

pub mod cli;
pub mod distinguishability;
pub mod dynamics;
pub mod error;
pub mod kernels;
pub mod qsl;
pub mod quadrature;
pub mod sweep;

pub use error::{Error, Result};
pub use kernels::{ModelParams, Param};
