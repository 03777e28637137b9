//! Monic polynomials of least deviation from zero in discrete Sobolev p-norms.

pub mod asymptotics;
pub mod cli;
pub mod config;
pub mod error;
pub mod interp;
pub mod linalg;
pub mod measures;
pub mod poly;
pub mod quadrature;
pub mod sobolev;
pub mod solver;
pub mod structure;
pub mod verify;
pub mod zerolocation;

pub use error::{Error, Result};
