//! Exact rational scalars and the linear algebra kernel.

mod matrix;
mod scalar;
mod sparse;

pub use matrix::{kernel_basis, quotient_basis, rref, solve, Matrix};
pub use scalar::{ParseScalarError, Scalar};
pub use sparse::{compose_cols, Eliminator, Quotient, SVec, TrackedEliminator};

/// Rational from an integer, for terse literals.
pub fn q(n: i64) -> Scalar {
    Scalar::from_int(n)
}

/// Basis of the kernel of a column-stored map into a space of dimension `rows`,
/// computed by sparse elimination of the transposed system.
pub fn kernel_cols(rows: usize, cols: &[SVec]) -> Vec<SVec> {
    let m = Matrix::from_columns(rows, cols);
    kernel_basis(&m).into_iter().map(|v| SVec::from_dense(&v)).collect()
}
