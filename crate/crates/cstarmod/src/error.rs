use thiserror::Error;

/// Errors produced by constructors, algebra/module operations and searches.
#[derive(Debug, Error)]
pub enum Error {
    /// A descriptor with no blocks or a zero block size.
    #[error("invalid algebra descriptor: {0}")]
    InvalidDescriptor(String),

    /// Operands shaped for different algebras or module ranks.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// An operation requiring a Hermitian element received one that is not.
    #[error("element is not Hermitian (residual {residual:.3e} > tol {tol:.3e})")]
    NotHermitian { residual: f64, tol: f64 },

    /// An operation requiring a positive element received one with a
    /// significantly negative eigenvalue.
    #[error("element is not positive (min eigenvalue {min_eig:.3e} < -tol {tol:.3e})")]
    NotPositive { min_eig: f64, tol: f64 },

    /// A commutative-only operation (lattice norms, frame formulas, ...) was
    /// called on a descriptor with a matrix block of size > 1.
    #[error("operation requires a commutative algebra, got block sizes {0:?}")]
    NotCommutative(Vec<usize>),

    /// A projection family violating its invariants (non-projection member,
    /// non-orthogonal members, or sum != identity).
    #[error("invalid projection family: {0}")]
    InvalidFamily(String),

    /// A vector family that is not a frame (lower bound ~ 0), or a frame
    /// whose stated bounds fail verification.
    #[error("frame error: {0}")]
    Frame(String),

    /// An eigen/SVD factorization failed to converge.
    #[error("factorization did not converge: {0}")]
    Factorization(String),

    /// A structurally invalid argument (empty tuple, n = 0, bad mode, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A verification battery was asked for an unknown check id.
    #[error("unknown verification suite or check: {0}")]
    Verification(String),

    /// A constructive operation (polar decomposition, triangle
    /// decomposition) failed its own built-in verification — a bug signal,
    /// reported with the offending residual.
    #[error("construction verification failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
