//! Paired functional observations and their centering state.

use std::sync::Arc;

use crate::hilbert::{same_grid, Curve, Grid};

use super::FlrmError;

/// Paired curves and scalar responses on a shared grid.
///
/// `x_bar` and `y_bar` record the means subtracted so far: zero until
/// [`center`] has run, the original sample means afterwards. All estimators
/// in this crate operate on centered data; inference entry points center
/// internally and shift user-supplied regressors by the stored `x_bar`.
#[derive(Debug, Clone)]
pub struct FunctionalDataset {
    curves: Vec<Curve>,
    y: Vec<f64>,
    x_bar: Curve,
    y_bar: f64,
    centered: bool,
}

impl FunctionalDataset {
    pub fn new(curves: Vec<Curve>, y: Vec<f64>) -> Result<Self, FlrmError> {
        if curves.len() < 2 {
            return Err(FlrmError::TooFewSamples {
                need: 2,
                got: curves.len(),
            });
        }
        if curves.len() != y.len() {
            return Err(FlrmError::LengthMismatch {
                curves: curves.len(),
                responses: y.len(),
            });
        }
        let grid = curves[0].grid().clone();
        for c in &curves[1..] {
            if !same_grid(c.grid(), &grid) {
                return Err(crate::hilbert::HilbertError::GridMismatch {
                    left: grid.len(),
                    right: c.grid().len(),
                }
                .into());
            }
        }
        let x_bar = Curve::zeros(grid);
        Ok(Self {
            curves,
            y,
            x_bar,
            y_bar: 0.0,
            centered: false,
        })
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.curves[0].grid()
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn responses(&self) -> &[f64] {
        &self.y
    }

    /// Mean curve removed by centering (zero curve when uncentered).
    pub fn x_bar(&self) -> &Curve {
        &self.x_bar
    }

    /// Mean response removed by centering (zero when uncentered).
    pub fn y_bar(&self) -> f64 {
        self.y_bar
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    /// Empirical mean of the stored curves.
    pub fn mean_curve(&self) -> Curve {
        let mut mean = Curve::zeros(self.grid().clone());
        let inv_n = 1.0 / self.len() as f64;
        for c in &self.curves {
            mean.axpy(inv_n, c).expect("same grid");
        }
        mean
    }

    /// Replaces the responses, keeping curves and centering state. Used by
    /// the residual bootstrap and null-enforced testing, where the design
    /// is fixed and only responses change.
    pub fn with_responses(&self, y: Vec<f64>) -> Result<Self, FlrmError> {
        if y.len() != self.curves.len() {
            return Err(FlrmError::LengthMismatch {
                curves: self.curves.len(),
                responses: y.len(),
            });
        }
        let mut out = self.clone();
        out.y = y;
        Ok(out)
    }
}

/// Subtract the sample means from curves and responses.
///
/// Idempotent: centering an already-centered dataset logs a warning and
/// returns a clone.
pub fn center(dataset: &FunctionalDataset) -> FunctionalDataset {
    if dataset.centered {
        log::warn!("dataset already centered; center() is a no-op");
        return dataset.clone();
    }
    let n = dataset.len();
    let x_bar = dataset.mean_curve();
    let y_bar = dataset.y.iter().sum::<f64>() / n as f64;
    let curves = dataset
        .curves
        .iter()
        .map(|c| {
            let mut cc = c.clone();
            cc.axpy(-1.0, &x_bar).expect("same grid");
            cc
        })
        .collect();
    let y = dataset.y.iter().map(|v| v - y_bar).collect();
    FunctionalDataset {
        curves,
        y,
        x_bar,
        y_bar,
        centered: true,
    }
}

/// Center a dataset unless already centered, without the repeat warning.
pub(crate) fn ensure_centered(dataset: &Arc<FunctionalDataset>) -> Arc<FunctionalDataset> {
    if dataset.is_centered() {
        dataset.clone()
    } else {
        Arc::new(center(dataset))
    }
}
