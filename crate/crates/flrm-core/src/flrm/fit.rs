//! Sample moments, the truncated principal-component regression fit, and
//! the scaling machinery for studentized projections.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::hilbert::{apply, inner_product, Curve, LinearOperator};

use super::dataset::{ensure_centered, FunctionalDataset};
use super::eigen::{eigendecompose_with_dim, truncated_inverse_apply, EigenSystem};
use super::FlrmError;

/// Column matrix of curve values minus a mean curve, `m x n`.
fn centered_value_matrix(dataset: &FunctionalDataset, mean: &Curve) -> DMatrix<f64> {
    let m = dataset.grid().len();
    let n = dataset.len();
    let mut a = DMatrix::zeros(m, n);
    for (i, curve) in dataset.curves().iter().enumerate() {
        for (p, (&v, &mu)) in curve.values().iter().zip(mean.values()).enumerate() {
            a[(p, i)] = v - mu;
        }
    }
    a
}

/// Sample covariance operator `n^{-1} sum_i (X_i - X_bar) (x) (X_i - X_bar)`.
pub fn sample_covariance(dataset: &FunctionalDataset) -> Result<LinearOperator, FlrmError> {
    let n = dataset.len();
    if n < 2 {
        return Err(FlrmError::TooFewSamples { need: 2, got: n });
    }
    let mean = dataset.mean_curve();
    let a = centered_value_matrix(dataset, &mean);
    let kernel = (&a * a.transpose()) / n as f64;
    Ok(LinearOperator::new_symmetric(dataset.grid().clone(), kernel)?)
}

/// Sample cross-covariance curve `n^{-1} sum_i (Y_i - Y_bar)(X_i - X_bar)`.
pub fn cross_covariance(dataset: &FunctionalDataset) -> Result<Curve, FlrmError> {
    let n = dataset.len();
    if n < 2 {
        return Err(FlrmError::TooFewSamples { need: 2, got: n });
    }
    let mean = dataset.mean_curve();
    let y_bar = dataset.responses().iter().sum::<f64>() / n as f64;
    let mut out = Curve::zeros(dataset.grid().clone());
    for (curve, &y) in dataset.curves().iter().zip(dataset.responses()) {
        let w = (y - y_bar) / n as f64;
        let vals = out.values_mut();
        for (p, (&v, &mu)) in curve.values().iter().zip(mean.values()).enumerate() {
            vals[p] += w * (v - mu);
        }
    }
    Ok(out)
}

/// A fitted truncated principal-component regression.
#[derive(Debug, Clone)]
pub struct FpcrFit {
    h: usize,
    beta_hat: Curve,
    coeffs: Vec<f64>,
    residuals: Vec<f64>,
    eig: Arc<EigenSystem>,
    delta_hat: Curve,
    dataset: Arc<FunctionalDataset>,
}

impl FpcrFit {
    pub fn h(&self) -> usize {
        self.h
    }

    /// Estimated slope curve.
    pub fn beta_hat(&self) -> &Curve {
        &self.beta_hat
    }

    /// Eigenbasis coefficients of the slope, `gamma_j^{-1} <Delta, phi_j>`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Centered residuals `(Y_i - Y_bar) - <beta_hat, X_i - X_bar>`.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn eigen(&self) -> &Arc<EigenSystem> {
        &self.eig
    }

    pub fn delta_hat(&self) -> &Curve {
        &self.delta_hat
    }

    /// The centered dataset the fit was computed on.
    pub fn dataset(&self) -> &Arc<FunctionalDataset> {
        &self.dataset
    }

    /// Refit at a different truncation level, reusing moments and eigenpairs.
    pub fn refit(&self, h: usize) -> Result<FpcrFit, FlrmError> {
        fit_in_basis(self.dataset.clone(), self.eig.clone(), self.delta_hat.clone(), h)
    }
}

/// Fit the slope at truncation `h`, sharing a precomputed eigensystem and
/// cross-covariance.
pub(crate) fn fit_in_basis(
    dataset: Arc<FunctionalDataset>,
    eig: Arc<EigenSystem>,
    delta_hat: Curve,
    h: usize,
) -> Result<FpcrFit, FlrmError> {
    if h == 0 || h > eig.rank() {
        return Err(FlrmError::TruncationExceedsRank {
            requested: h,
            max_admissible: eig.rank(),
        });
    }
    let mut beta_hat = Curve::zeros(dataset.grid().clone());
    let mut coeffs = Vec::with_capacity(h);
    for j in 0..h {
        let phi = &eig.eigenfunctions()[j];
        let c = inner_product(&delta_hat, phi)? / eig.eigenvalues()[j];
        beta_hat.axpy(c, phi)?;
        coeffs.push(c);
    }
    let residuals = dataset
        .curves()
        .iter()
        .zip(dataset.responses())
        .map(|(x, &y)| Ok(y - inner_product(&beta_hat, x)?))
        .collect::<Result<Vec<f64>, FlrmError>>()?;
    Ok(FpcrFit {
        h,
        beta_hat,
        coeffs,
        residuals,
        eig,
        delta_hat,
        dataset,
    })
}

/// Fit the principal-component regression slope at truncation level `h`.
///
/// Centers the dataset internally when needed. Errors when `h` exceeds the
/// usable rank of the sample covariance, naming the largest admissible
/// level.
pub fn fpcr_fit(dataset: &Arc<FunctionalDataset>, h: usize) -> Result<FpcrFit, FlrmError> {
    let ds = ensure_centered(dataset);
    let n = ds.len();
    let m = ds.grid().len();
    let gamma = sample_covariance(&ds)?;
    let eig = eigendecompose_with_dim(&gamma, n.min(m), n.max(m))?;
    let delta = cross_covariance(&ds)?;
    fit_in_basis(ds, Arc::new(eig), delta, h)
}

/// Covariance estimate of the regressor-error product,
/// `n^{-1} sum_i (X_i eps_i - mean)^{(x)2}`, from supplied residuals.
pub fn lambda_hat(
    dataset: &FunctionalDataset,
    residuals: &[f64],
) -> Result<LinearOperator, FlrmError> {
    let n = dataset.len();
    if residuals.len() != n {
        return Err(FlrmError::ResidualLength {
            expected: n,
            got: residuals.len(),
        });
    }
    let m = dataset.grid().len();
    // Products V_i = X_i * eps_i, centered by their own mean.
    let mut v = DMatrix::zeros(m, n);
    for (i, (curve, &e)) in dataset.curves().iter().zip(residuals).enumerate() {
        for (p, &x) in curve.values().iter().enumerate() {
            v[(p, i)] = x * e;
        }
    }
    let mean = v.column_mean();
    for mut col in v.column_iter_mut() {
        col -= &mean;
    }
    let kernel = (&v * v.transpose()) / n as f64;
    Ok(LinearOperator::new_symmetric(dataset.grid().clone(), kernel)?)
}

/// Scaling factor `s_h(x) = <Lambda G_h^{-1} x, G_h^{-1} x>`, evaluated as a
/// quadratic form (no operator square root).
pub fn scaling_s_hat(
    eig: &EigenSystem,
    lambda_op: &LinearOperator,
    h: usize,
    x0: &Curve,
) -> Result<f64, FlrmError> {
    let a = truncated_inverse_apply(eig, h, x0)?;
    let s = inner_product(&apply(lambda_op, &a)?, &a)?;
    Ok(s.max(0.0))
}

/// Cross-covariance between regressors and residuals,
/// `n^{-1} sum_i (X_i - X_bar)(eps_i - eps_bar)`. For residuals from a
/// truncation-`g` fit this is exactly the amount by which the truncated
/// estimator fails the full normal equations.
pub fn u_hat(dataset: &FunctionalDataset, residuals_g: &[f64]) -> Result<Curve, FlrmError> {
    let n = dataset.len();
    if residuals_g.len() != n {
        return Err(FlrmError::ResidualLength {
            expected: n,
            got: residuals_g.len(),
        });
    }
    let mean_x = dataset.mean_curve();
    let mean_e = residuals_g.iter().sum::<f64>() / n as f64;
    let mut out = Curve::zeros(dataset.grid().clone());
    for (curve, &e) in dataset.curves().iter().zip(residuals_g) {
        let w = (e - mean_e) / n as f64;
        let vals = out.values_mut();
        for (p, (&x, &mu)) in curve.values().iter().zip(mean_x.values()).enumerate() {
            vals[p] += w * (x - mu);
        }
    }
    Ok(out)
}
