//! Core estimation for the functional linear model with scalar response:
//! centering, sample covariance and cross-covariance, eigendecomposition,
//! the truncated principal-component regression fit, heteroscedasticity
//! scaling factors, the estimating-equation correction term, and tuning
//! parameter selection.

mod dataset;
mod eigen;
mod fit;
mod tuning;

pub use dataset::{center, FunctionalDataset};
pub use eigen::{eigendecompose, eigendecompose_with_dim, truncated_inverse_apply, EigenSystem};
pub use fit::{cross_covariance, fpcr_fit, lambda_hat, sample_covariance, scaling_s_hat, u_hat, FpcrFit};
pub use tuning::{cv_select_k, rule_of_thumb, TuningChoice};

pub(crate) use dataset::ensure_centered;
pub(crate) use fit::fit_in_basis as fit_shared;

use thiserror::Error;

use crate::hilbert::HilbertError;

#[derive(Debug, Error)]
pub enum FlrmError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error("need at least {need} observations, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("responses ({responses}) and curves ({curves}) differ in length")]
    LengthMismatch { curves: usize, responses: usize },
    #[error("truncation level {requested} exceeds usable rank; largest admissible level is {max_admissible}")]
    TruncationExceedsRank { requested: usize, max_admissible: usize },
    #[error("operator is not symmetric within tolerance")]
    NotSymmetric,
    #[error("residual vector has length {got}, expected {expected}")]
    ResidualLength { expected: usize, got: usize },
    #[error("no tuning candidates supplied")]
    EmptyCandidates,
    #[error("invalid cross-validation setup: {0}")]
    InvalidCv(String),
}
