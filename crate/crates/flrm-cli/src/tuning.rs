//! Shared truncation-level resolution for the data commands.

use std::sync::Arc;

use flrm_core::flrm::{self, FunctionalDataset, TuningChoice};
use flrm_core::seed;

use crate::errors::{numerical, CliResult};
use crate::TuningArgs;

const CV_TAG: u64 = 0x636c69;

/// Resolve (k, h, g) from the flags: explicit levels, the rule of thumb
/// driven by a fixed or cross-validated k, or (default) cross-validation
/// plus the rule of thumb.
pub fn resolve(
    args: &TuningArgs,
    dataset: &Arc<FunctionalDataset>,
    seed: u64,
) -> CliResult<TuningChoice> {
    if let Some(h) = args.h {
        let g = args.g.unwrap_or(h);
        let k = args.k.unwrap_or(h);
        return Ok(TuningChoice::new(k, h, g));
    }
    let rank_cap = dataset.len().min(dataset.grid().len());
    let k = match (args.k, args.rule_of_thumb, args.cv) {
        (Some(k), _, false) => k,
        _ => {
            let candidates: Vec<usize> = (1..=rank_cap.min(8)).collect();
            let folds = 5.min(dataset.len() / 2).max(2);
            flrm::cv_select_k(dataset, &candidates, folds, 3, seed::derive(seed, &[CV_TAG]))
                .map_err(numerical)?
        }
    };
    Ok(flrm::rule_of_thumb(k, rank_cap))
}
