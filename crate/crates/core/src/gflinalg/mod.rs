//! Exact linear algebra over small prime fields and finite matrix groups.
//!
//! F₂ vectors and matrix rows are packed into 64-bit words; for odd `p` each residue
//! takes a byte.

mod group;
mod matrix;
mod vector;

pub use group::{GroupTable, MatrixGroup, DEFAULT_CLOSURE_CAP};
pub use matrix::{Echelon, FpMatrix};
pub use vector::{FpVector, Prime};

/// Row rank over `F_p`.
pub fn rank(m: &FpMatrix) -> usize {
    m.rank()
}

/// `dim ker(m - 1)`.
pub fn fixed_subspace_dim(m: &FpMatrix) -> usize {
    m.fixed_subspace_dim()
}

/// Some `x` with `a x = b`, or `None` when the system is inconsistent.
pub fn solve(a: &FpMatrix, b: &FpVector) -> crate::Result<Option<FpVector>> {
    a.solve(b)
}
