//! Bootstrap tests of slope orthogonality to the span of a finite set of
//! target regressors, combining per-direction studentized projections into
//! sum-of-squares or maximum statistics. The bootstrap reference
//! distribution can enforce the null hypothesis (projecting the centering
//! slope out of the responses) or leave the data world untouched.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use thiserror::Error;

use crate::bootstrap::{BootstrapConfig, BootstrapError, Prepared, ReplicateOutcome, Studentize, Variant};
use crate::flrm::{ensure_centered, fpcr_fit, u_hat, FlrmError, FunctionalDataset};
use crate::hilbert::{inner_product, same_grid, Curve, HilbertError};
use crate::seed;

#[derive(Debug, Error)]
pub enum HypothesisError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Flrm(#[from] FlrmError),
    #[error(transparent)]
    Bootstrap(#[from] BootstrapError),
    #[error("target set is empty")]
    EmptyTargets,
    #[error("direction {0} cannot be studentized: zero scaling with a nonzero projection")]
    UnscalableDirection(usize),
}

/// A finite collection of target regressors with its Gram matrix and a
/// tolerance-thresholded pseudo-inverse; rank-deficient (collinear) target
/// sets project through the retained spectrum.
#[derive(Debug, Clone)]
pub struct TargetSet {
    curves: Vec<Curve>,
    gram: DMatrix<f64>,
    pinv: DMatrix<f64>,
    rank: usize,
}

impl TargetSet {
    pub fn new(curves: Vec<Curve>) -> Result<Self, HypothesisError> {
        if curves.is_empty() {
            return Err(HypothesisError::EmptyTargets);
        }
        let grid = curves[0].grid().clone();
        for c in &curves[1..] {
            if !same_grid(c.grid(), &grid) {
                return Err(HilbertError::GridMismatch {
                    left: grid.len(),
                    right: c.grid().len(),
                }
                .into());
            }
        }
        let l = curves.len();
        let mut gram = DMatrix::zeros(l, l);
        for i in 0..l {
            for j in i..l {
                let v = inner_product(&curves[i], &curves[j])?;
                gram[(i, j)] = v;
                gram[(j, i)] = v;
            }
        }
        let eigen = gram.clone().symmetric_eigen();
        let lead = eigen.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let tol = 1e-10 * lead;
        let mut pinv = DMatrix::zeros(l, l);
        let mut rank = 0;
        for j in 0..l {
            let lam: f64 = eigen.eigenvalues[j];
            if lam > tol && lam > 0.0 {
                let v: DVector<f64> = eigen.eigenvectors.column(j).into();
                pinv += &v * v.transpose() / lam;
                rank += 1;
            }
        }
        Ok(Self {
            curves,
            gram,
            pinv,
            rank,
        })
    }

    /// The same targets shifted by a mean curve (the usual workflow before
    /// inference on a centered dataset).
    pub fn centered_by(&self, x_bar: &Curve) -> Result<Self, HypothesisError> {
        let curves = self
            .curves
            .iter()
            .map(|c| {
                let mut cc = c.clone();
                cc.axpy(-1.0, x_bar)?;
                Ok(cc)
            })
            .collect::<Result<Vec<_>, HilbertError>>()?;
        Self::new(curves)
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Orthogonal projection of `f` onto the span of the targets.
    pub fn project(&self, f: &Curve) -> Result<Curve, HypothesisError> {
        let l = self.curves.len();
        let mut v = DVector::zeros(l);
        for (i, c) in self.curves.iter().enumerate() {
            v[i] = inner_product(f, c)?;
        }
        let coeffs = &self.pinv * v;
        let mut out = Curve::zeros(f.grid().clone());
        for (i, c) in self.curves.iter().enumerate() {
            out.axpy(coeffs[i], c)?;
        }
        Ok(out)
    }
}

/// Projection of `f` onto the span of the target set.
pub fn project_onto_span(target: &TargetSet, f: &Curve) -> Result<Curve, HypothesisError> {
    target.project(f)
}

/// Observed per-direction studentized projections and their combinations.
#[derive(Debug, Clone)]
pub struct ObservedStatistics {
    /// `sqrt(n / s_h(x0_l)) <beta_h, x0_l>` per direction.
    pub per_direction: Vec<f64>,
    pub w_l2: f64,
    pub w_max: f64,
}

fn combine(per_direction: &[f64]) -> (f64, f64) {
    let w_l2 = per_direction.iter().map(|t| t * t).sum();
    let w_max = per_direction.iter().map(|t| t.abs()).fold(0.0, f64::max);
    (w_l2, w_max)
}

/// Observed test statistics. The dataset is centered internally; targets
/// are raw regressors shifted by the dataset mean, one shared residual
/// scaling and eigensystem serving every direction.
pub fn observed_statistics(
    dataset: &Arc<FunctionalDataset>,
    targets: &TargetSet,
    tuning: crate::flrm::TuningChoice,
) -> Result<ObservedStatistics, HypothesisError> {
    let prepared = Prepared::new(dataset, targets.curves(), tuning)?;
    observed_from_prepared(&prepared)
}

fn observed_from_prepared(prepared: &Prepared) -> Result<ObservedStatistics, HypothesisError> {
    let n = prepared.n;
    let per_direction = prepared
        .targets
        .iter()
        .enumerate()
        .map(|(l, t)| {
            crate::bootstrap::studentized_value(n, t.s_data, t.point, t.point.abs())
                .ok_or(HypothesisError::UnscalableDirection(l))
        })
        .collect::<Result<Vec<f64>, _>>()?;
    let (w_l2, w_max) = combine(&per_direction);
    Ok(ObservedStatistics {
        per_direction,
        w_l2,
        w_max,
    })
}

/// Remove the target-span projection of the g-level slope from the
/// responses, so the returned dataset satisfies the null hypothesis
/// exactly at that slope.
///
/// Returns the modified dataset and the projected-out slope
/// `beta_g - proj(beta_g)`, which is orthogonal to the (centered) targets.
pub fn null_enforced_dataset(
    dataset: &Arc<FunctionalDataset>,
    targets: &TargetSet,
    g: usize,
) -> Result<(Arc<FunctionalDataset>, Curve), HypothesisError> {
    let ds = ensure_centered(dataset);
    let fit_g = fpcr_fit(&ds, g)?;
    let centered_targets = targets.centered_by(ds.x_bar())?;
    let projection = centered_targets.project(fit_g.beta_hat())?;
    let mut beta_tilde = fit_g.beta_hat().clone();
    beta_tilde.axpy(-1.0, &projection)?;
    let y_tilde: Vec<f64> = ds
        .curves()
        .iter()
        .zip(ds.responses())
        .map(|(x, &y)| Ok(y - inner_product(&projection, x)?))
        .collect::<Result<_, HilbertError>>()?;
    let modified = Arc::new(ds.with_responses(y_tilde)?);
    Ok((modified, beta_tilde))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatisticKind {
    L2,
    Max,
}

impl StatisticKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StatisticKind::L2 => "l2",
            StatisticKind::Max => "max",
        }
    }
}

/// Result of one bootstrap test.
#[derive(Debug, Clone)]
pub struct TestResult {
    pub statistic_kind: StatisticKind,
    pub w_observed: f64,
    /// `(1 + #{W* >= W}) / (B_eff + 1)`.
    pub p_value: f64,
    pub b_eff: usize,
    pub enforce_null: bool,
    /// Observed per-direction studentized values.
    pub per_direction: Vec<f64>,
    pub degenerate_count: usize,
    pub warnings: Vec<String>,
}

const TEST_TAG: u64 = 0x5445_5354;

/// Run the bootstrap test for both statistic forms on one shared set of
/// replicates: per replicate, one resample drives all directions.
pub fn bootstrap_test_both(
    dataset: &Arc<FunctionalDataset>,
    targets: &TargetSet,
    config: &BootstrapConfig,
    enforce_null: bool,
) -> Result<(TestResult, TestResult), HypothesisError> {
    let warnings = config.validate()?;
    let ds = ensure_centered(dataset);
    let observed_prep = Prepared::new(&ds, targets.curves(), config.tuning)?;
    let observed = observed_from_prepared(&observed_prep)?;

    let replicate_prep = if enforce_null {
        let fit_g = observed_prep.fit_g.clone();
        let u_curve = u_hat(fit_g.dataset(), fit_g.residuals())?;
        let (modified, _beta_tilde) = null_enforced_dataset(&ds, targets, config.tuning.g)?;
        Prepared::new_enforced(&modified, targets.curves(), config.tuning, &u_curve)?
    } else {
        observed_prep
    };

    // Bootstrap statistics per replicate, combined across directions with
    // the bootstrap-recomputed scaling.
    let outcomes: Vec<Option<(f64, f64)>> = (0..config.b)
        .into_par_iter()
        .map(|b| {
            let mut rng = seed::stream_rng(config.seed, &[TEST_TAG, b as u64]);
            match replicate_prep.replicate(Variant::PbModified, Studentize::BootstrapScale, &mut rng)
            {
                ReplicateOutcome::Ok(stats) => {
                    let ts: Vec<f64> = stats.iter().map(|s| s.t_star).collect();
                    Some(combine(&ts))
                }
                ReplicateOutcome::Degenerate => None,
            }
        })
        .collect();
    let degenerate_count = outcomes.iter().filter(|o| o.is_none()).count();
    let kept: Vec<(f64, f64)> = outcomes.into_iter().flatten().collect();
    if kept.is_empty() {
        return Err(BootstrapError::AllReplicatesDegenerate(config.b).into());
    }
    let b_eff = kept.len();
    let p_of = |observed_w: f64, pick: fn(&(f64, f64)) -> f64| {
        let exceed = kept.iter().filter(|w| pick(w) >= observed_w).count();
        (1 + exceed) as f64 / (b_eff + 1) as f64
    };
    let make = |kind: StatisticKind| {
        let (w_observed, p_value) = match kind {
            StatisticKind::L2 => (observed.w_l2, p_of(observed.w_l2, |w| w.0)),
            StatisticKind::Max => (observed.w_max, p_of(observed.w_max, |w| w.1)),
        };
        TestResult {
            statistic_kind: kind,
            w_observed,
            p_value,
            b_eff,
            enforce_null,
            per_direction: observed.per_direction.clone(),
            degenerate_count,
            warnings: warnings.clone(),
        }
    };
    Ok((make(StatisticKind::L2), make(StatisticKind::Max)))
}

/// Run the bootstrap test for one statistic form.
pub fn bootstrap_test(
    dataset: &Arc<FunctionalDataset>,
    targets: &TargetSet,
    config: &BootstrapConfig,
    enforce_null: bool,
    kind: StatisticKind,
) -> Result<TestResult, HypothesisError> {
    let (l2, max) = bootstrap_test_both(dataset, targets, config, enforce_null)?;
    Ok(match kind {
        StatisticKind::L2 => l2,
        StatisticKind::Max => max,
    })
}
