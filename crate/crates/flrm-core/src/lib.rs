//! Scalar-on-function linear regression with heteroscedasticity-robust
//! bootstrap inference.
//!
//! The crate estimates the slope of a functional linear model by principal
//! component regression on a discretized Hilbert space, and calibrates
//! confidence intervals and hypothesis tests for slope projections with a
//! bias-corrected paired bootstrap. A residual bootstrap, a naive paired
//! bootstrap, and a plain normal approximation are provided as baselines,
//! together with data generators and a Monte Carlo harness for studying all
//! of them at scale.
//!
//! Module map:
//! - [`hilbert`]: grids, curves, inner products, and kernel operators.
//! - [`flrm`]: centering, covariance moments, eigendecomposition, the FPCR
//!   fit, scaling factors, and tuning-parameter selection.
//! - [`bootstrap`]: paired/naive/residual bootstrap replicates and
//!   confidence intervals for slope projections.
//! - [`hypothesis`]: bootstrap tests of slope orthogonality to a span of
//!   target curves.
//! - [`dgp`]: Karhunen-Loeve style data generators for simulation studies.
//! - [`harness`]: parallel Monte Carlo experiment runners with CSV/SVG
//!   emission.

pub mod bootstrap;
pub mod dgp;
pub mod flrm;
pub mod harness;
pub mod hilbert;
pub mod hypothesis;
pub mod numfmt;
pub mod seed;
