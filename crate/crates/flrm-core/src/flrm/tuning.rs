//! Truncation-level selection: the rule of thumb and repeated
//! cross-validation for the residual truncation.

use std::sync::Arc;

use crate::hilbert::inner_product;
use crate::seed;

use super::dataset::{center, FunctionalDataset};
use super::eigen::eigendecompose_with_dim;
use super::fit::{cross_covariance, fit_in_basis, sample_covariance};
use super::FlrmError;

/// The three truncation levels used across estimation and bootstrap:
/// `k` for residuals feeding the scaling estimate, `h` for the estimator,
/// and `g` for the bootstrap centering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TuningChoice {
    pub k: usize,
    pub h: usize,
    pub g: usize,
}

impl TuningChoice {
    pub fn new(k: usize, h: usize, g: usize) -> Self {
        Self { k, h, g }
    }

    /// Largest truncation any stage will request.
    pub fn max_level(&self) -> usize {
        self.k.max(self.h).max(self.g)
    }

    pub fn validate(&self, rank: usize) -> Result<(), FlrmError> {
        let max = self.max_level();
        if self.k == 0 || self.h == 0 || self.g == 0 || max > rank {
            return Err(FlrmError::TruncationExceedsRank {
                requested: max,
                max_admissible: rank,
            });
        }
        Ok(())
    }
}

const CV_TAG: u64 = 0x6376;

/// Tuning rule of thumb: `g = k` and `h = round(1.113 k)`, all clamped to
/// the usable rank.
pub fn rule_of_thumb(k: usize, rank: usize) -> TuningChoice {
    let rank = rank.max(1);
    let k = k.clamp(1, rank);
    let g = k;
    let h = ((1.113 * k as f64).round() as usize).clamp(g, rank);
    TuningChoice { k, h, g }
}

/// Pick the residual truncation by repeated cross-validation, minimizing
/// mean squared prediction error; ties break toward the smaller level.
///
/// Folds are contiguous blocks of a seeded shuffle. Each training fold is
/// centered on its own means and held-out responses are predicted as
/// `y_bar_train + <beta_k, X - x_bar_train>`. Candidates exceeding the rank
/// of some training fold are dropped with a warning; if none survive the
/// selection errors with the largest admissible level.
pub fn cv_select_k(
    dataset: &Arc<FunctionalDataset>,
    k_candidates: &[usize],
    folds: usize,
    repeats: usize,
    seed: u64,
) -> Result<usize, FlrmError> {
    if k_candidates.is_empty() {
        return Err(FlrmError::EmptyCandidates);
    }
    let n = dataset.len();
    if folds < 2 || folds > n {
        return Err(FlrmError::InvalidCv(format!(
            "folds must be in [2, {n}], got {folds}"
        )));
    }
    if repeats == 0 {
        return Err(FlrmError::InvalidCv("repeats must be positive".into()));
    }
    let m = dataset.grid().len();

    let mut sse = vec![0.0; k_candidates.len()];
    let mut min_rank = usize::MAX;
    for rep in 0..repeats {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut rng = seed::stream_rng(seed, &[CV_TAG, rep as u64]);
        shuffle(&mut perm, &mut rng);
        for fold in 0..folds {
            let lo = fold * n / folds;
            let hi = (fold + 1) * n / folds;
            let held: &[usize] = &perm[lo..hi];
            if held.is_empty() {
                continue;
            }
            let in_held = {
                let mut mask = vec![false; n];
                for &i in held {
                    mask[i] = true;
                }
                mask
            };
            let train_curves: Vec<_> = (0..n)
                .filter(|i| !in_held[*i])
                .map(|i| dataset.curves()[i].clone())
                .collect();
            let train_y: Vec<f64> = (0..n)
                .filter(|i| !in_held[*i])
                .map(|i| dataset.responses()[i])
                .collect();
            let n_train = train_curves.len();
            let train = Arc::new(center(&FunctionalDataset::new(train_curves, train_y)?));
            let gamma = sample_covariance(&train)?;
            let eig = Arc::new(eigendecompose_with_dim(&gamma, n_train.min(m), n_train.max(m))?);
            min_rank = min_rank.min(eig.rank());
            let delta = cross_covariance(&train)?;
            for (slot, &k) in k_candidates.iter().enumerate() {
                if k == 0 || k > eig.rank() {
                    continue;
                }
                let fit = fit_in_basis(train.clone(), eig.clone(), delta.clone(), k)?;
                for &i in held {
                    let mut xc = dataset.curves()[i].clone();
                    xc.axpy(-1.0, train.x_bar())?;
                    let pred = train.y_bar() + inner_product(fit.beta_hat(), &xc)?;
                    let err = dataset.responses()[i] - pred;
                    sse[slot] += err * err;
                }
            }
        }
    }

    let feasible: Vec<usize> = (0..k_candidates.len())
        .filter(|&i| k_candidates[i] >= 1 && k_candidates[i] <= min_rank)
        .collect();
    if feasible.is_empty() {
        return Err(FlrmError::TruncationExceedsRank {
            requested: *k_candidates.iter().max().expect("nonempty"),
            max_admissible: min_rank,
        });
    }
    if feasible.len() < k_candidates.len() {
        log::warn!(
            "dropping {} cross-validation candidates above the fold rank {min_rank}",
            k_candidates.len() - feasible.len()
        );
    }

    let mut best = feasible[0];
    for &i in &feasible[1..] {
        let better = sse[i] < sse[best];
        let tie_smaller = sse[i] == sse[best] && k_candidates[i] < k_candidates[best];
        if better || tie_smaller {
            best = i;
        }
    }
    Ok(k_candidates[best])
}

/// Fisher-Yates with our seeded stream.
fn shuffle(perm: &mut [usize], rng: &mut rand_chacha::ChaCha8Rng) {
    use rand::Rng;
    for i in (1..perm.len()).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
}
