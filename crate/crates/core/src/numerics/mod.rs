//! Dense linear algebra and special functions used by the trainers and the
//! significance tests.

mod dense;
mod kernel;
mod special;

pub use dense::{cholesky, cholesky_jittered, dot_slices, log_det, solve, CholeskyFactor, DenseMatrix};
pub use kernel::{dot, gram_matrix, gram_matrix_with, Kernel, LinearKernel};
pub use special::{ln_gamma, log_sigmoid, regularized_incomplete_beta, sigmoid, student_t_two_tailed_p};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumericsError {
    #[error("matrix is not positive definite (failing pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
