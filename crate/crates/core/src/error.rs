//! Error type shared by the whole crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A Fock-space truncation leaves more probability outside the kept
    /// basis than the caller allows.
    #[error("truncation tail mass {tail:.3e} exceeds tolerance {tol:.3e} at cutoff {cutoff}")]
    TailMass { tail: f64, tol: f64, cutoff: usize },

    /// Cutoff or parameter combination violates a construction invariant.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A matrix that must be Hermitian is not, beyond tolerance.
    #[error("matrix is not Hermitian: max |rho - rho^dagger| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    /// Homodyne projection landed in a region of vanishing outcome density;
    /// the conditional state cannot be normalized.
    #[error("conditioning yielded non-normalizable state (outcome density {density:.3e})")]
    ZeroTraceConditioning { density: f64 },

    /// The outcome-integration grid captures too little probability mass.
    #[error("outcome grid captures only {captured:.12} of the probability mass (need >= {required})")]
    GridMassDeficient { captured: f64, required: f64 },

    /// An optimization bracket was exhausted: the maximum sits on the
    /// boundary and is therefore untrusted.
    #[error("maximum found on bracket boundary at alpha = {alpha}; widen the search range")]
    BoundaryMaximum { alpha: f64 },

    /// Phase-space axes fail to cover the state's support.
    #[error("phase-space grid too small: Wigner mass {mass:.6} differs from 1 by more than {tol:.1e}")]
    AxesTooSmall { mass: f64, tol: f64 },

    /// Grid spacing too coarse for finite-difference derivatives.
    #[error("grid step {step:.3e} too coarse for second differences (need <= {max_step})")]
    GridTooCoarse { step: f64, max_step: f64 },

    /// Eigensolver failed to converge for a propagation block.
    #[error("eigendecomposition failed to converge for pump block n_p = {block}")]
    BlockEigenFailure { block: usize },

    /// Dense-oracle tensor dimension exceeds the supported size.
    #[error("dense oracle dimension {dim} exceeds the cap of {max}")]
    DenseDimension { dim: usize, max: usize },
}
