use thiserror::Error;

/// Errors produced by the numerics in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Parameters outside the admissible region of the mixed state.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series did not reach its tail tolerance within the term budget.
    #[error("series did not converge after {terms} terms (tail bound {tail_bound:e}, target {target:e})")]
    NonConvergence {
        terms: usize,
        tail_bound: f64,
        target: f64,
    },

    /// The requested truncation cannot satisfy the tail bound.
    #[error("truncation at {n_levels} levels leaves tail weight {tail:e} > {tol:e}")]
    TruncationTooSmall {
        n_levels: usize,
        tail: f64,
        tol: f64,
    },

    /// An eigenvalue of a density matrix came out significantly negative.
    #[error("negative eigenvalue {0:e} in a density matrix")]
    NegativeEigenvalue(f64),

    /// Cyclic Jacobi did not converge within the sweep cap.
    #[error("Jacobi eigensolver stalled after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    EigensolverStall { sweeps: usize, off_norm: f64 },

    /// Malformed grid or configuration.
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
