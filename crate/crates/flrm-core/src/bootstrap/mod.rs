//! Bootstrap inference for slope projections: the bias-corrected paired
//! bootstrap, the naive paired bootstrap, the residual bootstrap, and the
//! plain normal approximation, with symmetrized or percentile confidence
//! intervals on the studentized scale.
//!
//! The corrected paired estimator solves the adjusted bootstrap estimating
//! equation, subtracting the regressor/residual cross-covariance so the
//! truncated slope fit is an exact zero of the equation in the bootstrap
//! world. The naive variant omits that correction and carries a
//! construction bias whose magnitude [`construction_bias`] reports and
//! whose limiting spread [`sigma_tau`] evaluates.

mod engine;

pub(crate) use engine::{studentized as studentized_value, Prepared, ReplicateOutcome};

use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::flrm::{FlrmError, FpcrFit, FunctionalDataset, TuningChoice};
use crate::hilbert::Curve;
use crate::seed;

#[derive(Debug, Error)]
pub enum BootstrapError {
    #[error(transparent)]
    Flrm(#[from] FlrmError),
    #[error(transparent)]
    Hilbert(#[from] crate::hilbert::HilbertError),
    #[error("invalid bootstrap configuration: {0}")]
    InvalidConfig(String),
    #[error("replicate degenerate: bootstrap spectrum or scale collapsed")]
    DegenerateReplicate,
    #[error("all {0} bootstrap replicates were degenerate")]
    AllReplicatesDegenerate(usize),
    #[error("supplied correction term does not satisfy the estimating-equation identity")]
    InconsistentCorrection,
    #[error("asymptotic truncation ratio must be at least 1, got {0}")]
    TauDomain(f64),
    #[error("scaling weights must have positive mass")]
    ZeroScalingMass,
}

/// Which bootstrap re-creates the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Paired bootstrap with the estimating-equation correction.
    PbModified,
    /// Paired bootstrap without the correction.
    Naive,
    /// Residual bootstrap on the fixed design.
    Residual,
}

/// Which scaling studentizes a replicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Studentize {
    /// The data scaling `s_h(x0)`, shared by all replicates.
    DataScale,
    /// A scaling recomputed from each bootstrap sample.
    BootstrapScale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalKind {
    /// `point +- q(|T*|) * se`.
    Symmetrized,
    /// Basic bootstrap on the studentized scale:
    /// `[point - q_{1-a/2} se, point - q_{a/2} se]`.
    Percentile,
}

#[derive(Debug, Clone)]
pub struct BootstrapConfig {
    /// Replicate count.
    pub b: usize,
    pub tuning: TuningChoice,
    pub variant: Variant,
    pub studentize: Studentize,
    pub interval: IntervalKind,
    /// Coverage level in (0, 1).
    pub level: f64,
    pub seed: u64,
}

impl BootstrapConfig {
    pub fn new(b: usize, tuning: TuningChoice, seed: u64) -> Self {
        Self {
            b,
            tuning,
            variant: Variant::PbModified,
            studentize: Studentize::BootstrapScale,
            interval: IntervalKind::Symmetrized,
            level: 0.95,
            seed,
        }
    }

    pub fn validate(&self) -> Result<Vec<String>, BootstrapError> {
        if self.b < 1 {
            return Err(BootstrapError::InvalidConfig("need at least one replicate".into()));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(BootstrapError::InvalidConfig(format!(
                "level must lie in (0,1), got {}",
                self.level
            )));
        }
        let mut warnings = Vec::new();
        if self.tuning.h < self.tuning.g {
            let msg = format!(
                "tuning has h={} < g={}: bootstrap approximations in this regime are provably \
                 inconsistent; proceed only for diagnostics",
                self.tuning.h, self.tuning.g
            );
            log::warn!("{msg}");
            warnings.push(msg);
        }
        Ok(warnings)
    }
}

/// One bootstrap replicate's studentized statistic.
#[derive(Debug, Clone, Copy)]
pub struct ReplicateStat {
    /// Studentized value `sqrt(n/scale) (proj* - center)`.
    pub t_star: f64,
    /// Bootstrap projection `<beta*_h, x0>`.
    pub projection_star: f64,
    /// The scaling used (data or bootstrap flavored).
    pub scale_used: f64,
}

/// Full record of a bootstrap confidence-interval run.
#[derive(Debug, Clone)]
pub struct BootstrapReport {
    /// Centered projection `<beta_h, x0 - x_bar>`.
    pub point: f64,
    /// `sqrt(s_h(x0)/n)`.
    pub se: f64,
    /// Non-degenerate replicates, in replicate order.
    pub replicates: Vec<ReplicateStat>,
    pub interval: (f64, f64),
    pub degenerate_count: usize,
    pub config: BootstrapConfig,
    pub warnings: Vec<String>,
}

impl BootstrapReport {
    pub fn b_effective(&self) -> usize {
        self.replicates.len()
    }
}

const REPLICATE_TAG: u64 = 0x5245_504c;

/// Uniform-with-replacement resample of `0..n`; `n = 1` repeats the single
/// index.
pub fn resample_pairs(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    engine::draw_indices(n, rng)
}

/// Prepared inference state for one dataset, projection regressor, and
/// tuning choice. Builds the centered fit, the correction term, and the
/// data scaling once; replicates of any variant then run against it.
pub struct ProjectionInference {
    prepared: Prepared,
}

impl ProjectionInference {
    /// Center the dataset (if needed), shift `x0` by the stored mean, fit
    /// at all three truncation levels, and precompute replicate state.
    pub fn new(
        dataset: &Arc<FunctionalDataset>,
        x0: &Curve,
        tuning: TuningChoice,
    ) -> Result<Self, BootstrapError> {
        let prepared = Prepared::new(dataset, std::slice::from_ref(x0), tuning)?;
        Ok(Self { prepared })
    }

    /// Centered projection estimate `<beta_h, x0 - x_bar>`.
    pub fn point(&self) -> f64 {
        self.prepared.targets[0].point
    }

    /// Standard error `sqrt(s_h(x0)/n)`.
    pub fn se(&self) -> f64 {
        self.prepared.se(0)
    }

    /// Bootstrap centering value `<beta_g, x0 - x_bar>`.
    pub fn center(&self) -> f64 {
        self.prepared.targets[0].center
    }

    pub fn fit(&self) -> &FpcrFit {
        &self.prepared.fit_h
    }

    pub fn fit_g(&self) -> &FpcrFit {
        &self.prepared.fit_g
    }

    /// Normal-approximation interval `point +- z_{1-alpha/2} se`.
    pub fn clt_interval(&self, level: f64) -> (f64, f64) {
        let z = normal_quantile(0.5 + level / 2.0);
        let (p, se) = (self.point(), self.se());
        (p - z * se, p + z * se)
    }

    /// One replicate of the requested variant on a caller-owned stream.
    pub fn replicate(
        &self,
        variant: Variant,
        studentize: Studentize,
        rng: &mut ChaCha8Rng,
    ) -> Result<ReplicateStat, BootstrapError> {
        match self.prepared.replicate(variant, studentize, rng) {
            ReplicateOutcome::Ok(stats) => Ok(stats[0]),
            ReplicateOutcome::Degenerate => Err(BootstrapError::DegenerateReplicate),
        }
    }

    /// Full bootstrap run: B replicates on independent derived streams,
    /// interval assembly, degeneracy accounting.
    pub fn report(&self, config: &BootstrapConfig) -> Result<BootstrapReport, BootstrapError> {
        let mut warnings = config.validate()?;
        if config.tuning != self.prepared.tuning {
            return Err(BootstrapError::InvalidConfig(
                "config tuning differs from the prepared tuning".into(),
            ));
        }
        let outcomes: Vec<Option<ReplicateStat>> = (0..config.b)
            .into_par_iter()
            .map(|b| {
                let mut rng = seed::stream_rng(config.seed, &[REPLICATE_TAG, b as u64]);
                match self
                    .prepared
                    .replicate(config.variant, config.studentize, &mut rng)
                {
                    ReplicateOutcome::Ok(stats) => Some(stats[0]),
                    ReplicateOutcome::Degenerate => None,
                }
            })
            .collect();
        let degenerate_count = outcomes.iter().filter(|o| o.is_none()).count();
        let replicates: Vec<ReplicateStat> = outcomes.into_iter().flatten().collect();
        if replicates.is_empty() {
            return Err(BootstrapError::AllReplicatesDegenerate(config.b));
        }
        if degenerate_count as f64 > 0.05 * config.b as f64 {
            warnings.push(format!(
                "{degenerate_count} of {} replicates were degenerate; interval quality is suspect",
                config.b
            ));
        }
        let point = self.point();
        let se = self.se();
        let interval = build_interval(point, se, &replicates, config);
        Ok(BootstrapReport {
            point,
            se,
            replicates,
            interval,
            degenerate_count,
            config: config.clone(),
            warnings,
        })
    }

    /// Data-only diagnostic for the naive bootstrap's center shift.
    pub fn construction_bias(&self) -> Result<f64, BootstrapError> {
        let t = self.prepared.tuning;
        if t.h < t.g {
            return Err(BootstrapError::InvalidConfig(format!(
                "construction bias is defined for h >= g, got h={} g={}",
                t.h, t.g
            )));
        }
        Ok(self.prepared.construction_bias(0))
    }
}

fn build_interval(
    point: f64,
    se: f64,
    replicates: &[ReplicateStat],
    config: &BootstrapConfig,
) -> (f64, f64) {
    let b_eff = replicates.len();
    match config.interval {
        IntervalKind::Symmetrized => {
            let mut abs: Vec<f64> = replicates.iter().map(|r| r.t_star.abs()).collect();
            abs.sort_by(|a, b| a.partial_cmp(b).expect("finite statistics"));
            let k = order_index(b_eff, config.level);
            let q = abs[k];
            (point - q * se, point + q * se)
        }
        IntervalKind::Percentile => {
            let mut ts: Vec<f64> = replicates.iter().map(|r| r.t_star).collect();
            ts.sort_by(|a, b| a.partial_cmp(b).expect("finite statistics"));
            let alpha = 1.0 - config.level;
            let lo_q = ts[order_index(b_eff, alpha / 2.0)];
            let hi_q = ts[order_index(b_eff, 1.0 - alpha / 2.0)];
            (point - hi_q * se, point - lo_q * se)
        }
    }
}

/// Zero-based index of the `ceil((B+1) p)`-th order statistic, clamped to
/// the available replicates.
fn order_index(b_eff: usize, p: f64) -> usize {
    let k = ((b_eff as f64 + 1.0) * p).ceil() as usize;
    k.clamp(1, b_eff) - 1
}

fn normal_quantile(p: f64) -> f64 {
    use statrs::distribution::ContinuousCDF;
    statrs::distribution::Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(p)
}

fn check_consistent(
    beta_g: &FpcrFit,
    provided_u: &Curve,
) -> Result<(), BootstrapError> {
    let ds = beta_g.dataset();
    let delta = crate::flrm::cross_covariance(ds)?;
    let gamma = crate::flrm::sample_covariance(ds)?;
    let gb = crate::hilbert::apply(&gamma, beta_g.beta_hat())?;
    let mut expect = delta.clone();
    expect.axpy(-1.0, &gb)?;
    expect.axpy(-1.0, provided_u)?;
    if expect.norm() > 1e-8 * (1.0 + delta.norm()) {
        return Err(BootstrapError::InconsistentCorrection);
    }
    Ok(())
}

fn single_replicate(
    dataset: &Arc<FunctionalDataset>,
    x0: &Curve,
    config: &BootstrapConfig,
    variant: Variant,
    rng: &mut ChaCha8Rng,
) -> Result<ReplicateStat, BootstrapError> {
    config.validate()?;
    let inference = ProjectionInference::new(dataset, x0, config.tuning)?;
    inference.replicate(variant, config.studentize, rng)
}

/// One corrected paired-bootstrap replicate. `u_correction` and `beta_g`
/// must satisfy the estimating-equation identity on this dataset.
pub fn pb_replicate(
    dataset: &Arc<FunctionalDataset>,
    x0: &Curve,
    u_correction: &Curve,
    beta_g: &FpcrFit,
    config: &BootstrapConfig,
    rng: &mut ChaCha8Rng,
) -> Result<ReplicateStat, BootstrapError> {
    if beta_g.h() != config.tuning.g {
        return Err(BootstrapError::InvalidConfig(format!(
            "centering fit has truncation {}, config expects g={}",
            beta_g.h(),
            config.tuning.g
        )));
    }
    check_consistent(beta_g, u_correction)?;
    single_replicate(dataset, x0, config, Variant::PbModified, rng)
}

/// One naive paired-bootstrap replicate (no correction term anywhere).
pub fn naive_replicate(
    dataset: &Arc<FunctionalDataset>,
    x0: &Curve,
    beta_g: &FpcrFit,
    config: &BootstrapConfig,
    rng: &mut ChaCha8Rng,
) -> Result<ReplicateStat, BootstrapError> {
    if beta_g.h() != config.tuning.g {
        return Err(BootstrapError::InvalidConfig(format!(
            "centering fit has truncation {}, config expects g={}",
            beta_g.h(),
            config.tuning.g
        )));
    }
    single_replicate(dataset, x0, config, Variant::Naive, rng)
}

/// One residual-bootstrap replicate on the fixed design.
pub fn residual_replicate(
    dataset: &Arc<FunctionalDataset>,
    x0: &Curve,
    beta_g: &FpcrFit,
    config: &BootstrapConfig,
    rng: &mut ChaCha8Rng,
) -> Result<ReplicateStat, BootstrapError> {
    if beta_g.h() != config.tuning.g {
        return Err(BootstrapError::InvalidConfig(format!(
            "centering fit has truncation {}, config expects g={}",
            beta_g.h(),
            config.tuning.g
        )));
    }
    single_replicate(dataset, x0, config, Variant::Residual, rng)
}

/// Bootstrap confidence interval for the centered projection
/// `<beta, x0 - x_bar>`.
pub fn confidence_interval(
    dataset: &Arc<FunctionalDataset>,
    x0: &Curve,
    config: &BootstrapConfig,
) -> Result<BootstrapReport, BootstrapError> {
    ProjectionInference::new(dataset, x0, config.tuning)?.report(config)
}

/// The data-only center shift between the naive and corrected bootstrap:
/// `sqrt(n / s_h(x0)) <Gamma_h^{-1} U_hat, x0>`.
pub fn construction_bias(
    dataset: &Arc<FunctionalDataset>,
    x0: &Curve,
    tuning: TuningChoice,
) -> Result<f64, BootstrapError> {
    ProjectionInference::new(dataset, x0, tuning)?.construction_bias()
}

/// Limiting standard deviation of the naive construction bias when the
/// truncation ratio tends to `tau >= 1`:
/// `sigma^2(tau) = (1 - 1/tau) (sum gamma_j beta_j^2 / sum gamma_j rho_j^2 + 1)`.
pub fn sigma_tau(
    tau: f64,
    gamma: &[f64],
    rho_sq: &[f64],
    beta: &[f64],
) -> Result<f64, BootstrapError> {
    if !(tau >= 1.0) {
        return Err(BootstrapError::TauDomain(tau));
    }
    let denom: f64 = gamma.iter().zip(rho_sq).map(|(g, r)| g * r).sum();
    if !(denom > 0.0) {
        return Err(BootstrapError::ZeroScalingMass);
    }
    let slope_energy: f64 = gamma.iter().zip(beta).map(|(g, b)| g * b * b).sum();
    let var = (1.0 - 1.0 / tau) * (slope_energy / denom + 1.0);
    Ok(var.sqrt())
}

#[cfg(test)]
mod tests;
