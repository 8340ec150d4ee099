//! Cartan chains on the boundary of the quaternionic hyperbolic plane and
//! the counting of an arithmetic orbit of chains.

// Index loops mirror the matrix formulas they implement.
#![allow(clippy::needless_range_loop)]

mod error;
pub mod arith;
pub mod chain;
pub mod hermitian;
pub mod harness;
pub mod heis;
pub mod quat;
pub mod siegel;

pub use error::{Error, Result};
