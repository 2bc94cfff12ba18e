//! Exact finite algebra for Selmer-rank parity statistics in quadratic twist families.

pub mod check;
pub mod error;
pub mod gflinalg;
pub mod quadform;
pub mod cohomology;
pub mod pollatsek;
pub mod galois;
pub mod disparity;
pub mod cli;

pub use error::{Error, Result};
