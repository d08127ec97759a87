//! Monte Carlo experiment runners: interval coverage and width,
//! construction-bias spread, test size and power, and a central-limit
//! sanity check, all with per-repetition seed streams so any single run is
//! reproducible in isolation and results do not depend on the worker
//! count.

mod emit;

pub use emit::{parse_rows_csv, rows_to_csv, svg_line_plot, PlotSeries, CSV_HEADER};

use rayon::prelude::*;
use thiserror::Error;

use crate::bootstrap::{
    sigma_tau, BootstrapConfig, BootstrapError, IntervalKind, ProjectionInference, Studentize,
    Variant,
};
use crate::dgp::{self, DgpError, DgpSpec, SlopeMode};
use crate::flrm::{rule_of_thumb, FlrmError, TuningChoice};
use crate::hilbert::{inner_product, Grid, HilbertError};
use crate::hypothesis::{bootstrap_test, HypothesisError, StatisticKind, TargetSet};
use crate::seed;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Dgp(#[from] DgpError),
    #[error(transparent)]
    Flrm(#[from] FlrmError),
    #[error(transparent)]
    Bootstrap(#[from] BootstrapError),
    #[error(transparent)]
    Hypothesis(#[from] HypothesisError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error("invalid experiment plan: {0}")]
    InvalidPlan(String),
    #[error("scenario '{scenario}' aborted: {failed} of {reps} repetitions failed ({detail})")]
    TooManyFailures {
        scenario: String,
        failed: usize,
        reps: usize,
        detail: String,
    },
    #[error("csv parse error at line {line}: {message}")]
    CsvParse { line: usize, message: String },
}

/// Interval methods the coverage study compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Normal approximation with estimated scaling.
    Clt,
    /// Residual bootstrap, studentized.
    Rb,
    /// Corrected paired bootstrap, data scaling.
    Pb,
    /// Corrected paired bootstrap, bootstrap studentized.
    PbStd,
    /// Naive paired bootstrap, data scaling.
    Naive,
    /// Naive paired bootstrap, bootstrap studentized.
    NaiveStd,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Clt => "clt",
            Method::Rb => "rb",
            Method::Pb => "pb",
            Method::PbStd => "pb_std",
            Method::Naive => "naive",
            Method::NaiveStd => "naive_std",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Some(match s {
            "clt" => Method::Clt,
            "rb" => Method::Rb,
            "pb" => Method::Pb,
            "pb_std" => Method::PbStd,
            "naive" => Method::Naive,
            "naive_std" => Method::NaiveStd,
            _ => return None,
        })
    }

    /// Bootstrap wiring for the non-CLT methods.
    pub fn bootstrap_kind(&self) -> Option<(Variant, Studentize)> {
        Some(match self {
            Method::Clt => return None,
            Method::Rb => (Variant::Residual, Studentize::BootstrapScale),
            Method::Pb => (Variant::PbModified, Studentize::DataScale),
            Method::PbStd => (Variant::PbModified, Studentize::BootstrapScale),
            Method::Naive => (Variant::Naive, Studentize::DataScale),
            Method::NaiveStd => (Variant::Naive, Studentize::BootstrapScale),
        })
    }
}

/// How truncation levels are chosen per repetition.
#[derive(Debug, Clone)]
pub enum TuningPolicy {
    /// `k` from the plug-in rule (or fixed), then `g = k`,
    /// `h = round(1.113 k)`.
    RuleOfThumb { fixed_k: Option<usize> },
    /// An explicit grid of (k, h, g) triples, each producing its own rows.
    Explicit(Vec<TuningChoice>),
}

impl TuningPolicy {
    fn resolve(&self, spec: &DgpSpec) -> Vec<TuningChoice> {
        match self {
            TuningPolicy::RuleOfThumb { fixed_k } => {
                let k = fixed_k.unwrap_or_else(|| dgp::default_k(spec));
                vec![rule_of_thumb(k, spec.j_basis)]
            }
            TuningPolicy::Explicit(grid) => grid.clone(),
        }
    }
}

/// One data-generating scenario in a plan.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub label: String,
    pub dgp: DgpSpec,
}

/// Coverage/width experiment plan.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub scenarios: Vec<ScenarioSpec>,
    pub methods: Vec<Method>,
    pub tuning: TuningPolicy,
    pub reps: usize,
    pub b_boot: usize,
    pub level: f64,
    pub master_seed: u64,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.scenarios.is_empty() {
            return Err(HarnessError::InvalidPlan("no scenarios".into()));
        }
        if self.methods.is_empty() {
            return Err(HarnessError::InvalidPlan("no methods".into()));
        }
        if self.reps == 0 {
            return Err(HarnessError::InvalidPlan("reps must be positive".into()));
        }
        if self.b_boot == 0 {
            return Err(HarnessError::InvalidPlan("bootstrap replicates must be positive".into()));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(HarnessError::InvalidPlan(format!(
                "level must lie in (0,1), got {}",
                self.level
            )));
        }
        for s in &self.scenarios {
            s.dgp.validate()?;
        }
        Ok(())
    }
}

/// One aggregated line of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario_id: String,
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub nu: Option<f64>,
    pub error_mode: String,
    pub method: String,
    pub k: usize,
    pub h: usize,
    pub g: usize,
    pub reps: usize,
    pub coverage: Option<f64>,
    pub mean_width: Option<f64>,
    pub rejection_rate: Option<f64>,
    /// Binomial standard error of the primary rate.
    pub mc_se: f64,
    pub failed_reps: usize,
}

impl ResultRow {
    /// Equality at the emitted precision (ten significant digits).
    pub fn approx_eq(&self, other: &ResultRow) -> bool {
        fn feq(a: f64, b: f64) -> bool {
            (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
        }
        fn oeq(a: Option<f64>, b: Option<f64>) -> bool {
            match (a, b) {
                (None, None) => true,
                (Some(x), Some(y)) => feq(x, y),
                _ => false,
            }
        }
        self.scenario_id == other.scenario_id
            && self.n == other.n
            && feq(self.a, other.a)
            && feq(self.b, other.b)
            && oeq(self.nu, other.nu)
            && self.error_mode == other.error_mode
            && self.method == other.method
            && (self.k, self.h, self.g) == (other.k, other.h, other.g)
            && self.reps == other.reps
            && oeq(self.coverage, other.coverage)
            && oeq(self.mean_width, other.mean_width)
            && oeq(self.rejection_rate, other.rejection_rate)
            && feq(self.mc_se, other.mc_se)
            && self.failed_reps == other.failed_reps
    }
}

/// Coverage differences count as significant only beyond twice the
/// combined Monte Carlo standard error.
pub fn significant_difference(a: &ResultRow, b: &ResultRow) -> Option<bool> {
    let (ca, cb) = (a.coverage?, b.coverage?);
    let combined = (a.mc_se * a.mc_se + b.mc_se * b.mc_se).sqrt();
    Some((ca - cb).abs() > 2.0 * combined)
}

const COVERAGE_TAG: u64 = 0x434f56;
const METHOD_TAG: u64 = 0x4d4554;
const BIAS_TAG: u64 = 0x424953;
const POWER_TAG: u64 = 0x504f57;
const CLT_TAG: u64 = 0x434c54;
const DGP_TAG: u64 = 0x444750;

fn binomial_se(rate: f64, reps: usize) -> f64 {
    if reps == 0 {
        return f64::NAN;
    }
    (rate * (1.0 - rate) / reps as f64).sqrt()
}

struct RepOutcome {
    /// Per method: Some((covered, width)) or None when that method failed.
    per_method: Vec<Option<(bool, f64)>>,
    /// Rep-level failure (generation or shared fit), with detail.
    fatal: Option<String>,
}

/// Empirical coverage and width of confidence intervals for the centered
/// projection `<beta, X0 - X_bar>`, per scenario, tuning choice, and
/// method.
pub fn run_coverage(plan: &ExperimentPlan) -> Result<Vec<ResultRow>, HarnessError> {
    plan.validate()?;
    let mut rows = Vec::new();
    for (s_idx, scenario) in plan.scenarios.iter().enumerate() {
        for (t_idx, tuning) in plan.tuning.resolve(&scenario.dgp).iter().enumerate() {
            let outcomes: Vec<RepOutcome> = (0..plan.reps)
                .into_par_iter()
                .map(|rep| {
                    coverage_rep(plan, scenario, *tuning, s_idx, t_idx, rep)
                })
                .collect();
            let fatal: Vec<&String> = outcomes.iter().filter_map(|o| o.fatal.as_ref()).collect();
            for (m_idx, method) in plan.methods.iter().enumerate() {
                let mut used = 0usize;
                let mut covered = 0usize;
                let mut width_sum = 0.0;
                let mut failed = fatal.len();
                for o in &outcomes {
                    if o.fatal.is_some() {
                        continue;
                    }
                    match o.per_method[m_idx] {
                        Some((c, w)) => {
                            used += 1;
                            covered += usize::from(c);
                            width_sum += w;
                        }
                        None => failed += 1,
                    }
                }
                if failed * 20 > plan.reps {
                    let detail = fatal
                        .first()
                        .map(|s| s.as_str())
                        .unwrap_or("degenerate bootstrap runs")
                        .to_string();
                    return Err(HarnessError::TooManyFailures {
                        scenario: scenario.label.clone(),
                        failed,
                        reps: plan.reps,
                        detail,
                    });
                }
                let coverage = covered as f64 / used as f64;
                rows.push(ResultRow {
                    scenario_id: scenario.label.clone(),
                    n: scenario.dgp.n,
                    a: scenario.dgp.a,
                    b: scenario.dgp.b,
                    nu: scenario.dgp.nu,
                    error_mode: scenario.dgp.error_mode.as_str().to_string(),
                    method: method.as_str().to_string(),
                    k: tuning.k,
                    h: tuning.h,
                    g: tuning.g,
                    reps: used,
                    coverage: Some(coverage),
                    mean_width: Some(width_sum / used as f64),
                    rejection_rate: None,
                    mc_se: binomial_se(coverage, used),
                    failed_reps: failed,
                });
            }
        }
    }
    Ok(rows)
}

fn coverage_rep(
    plan: &ExperimentPlan,
    scenario: &ScenarioSpec,
    tuning: TuningChoice,
    s_idx: usize,
    t_idx: usize,
    rep: usize,
) -> RepOutcome {
    let rep_seed = seed::derive(
        plan.master_seed,
        &[COVERAGE_TAG, s_idx as u64, t_idx as u64, rep as u64],
    );
    let mut gen_rng = seed::stream_rng(rep_seed, &[DGP_TAG]);
    let sample = match dgp::gen_dataset(&scenario.dgp, &mut gen_rng) {
        Ok(s) => s,
        Err(e) => {
            return RepOutcome {
                per_method: vec![None; plan.methods.len()],
                fatal: Some(e.to_string()),
            }
        }
    };
    let inference = match ProjectionInference::new(&sample.dataset, &sample.x0, tuning) {
        Ok(i) => i,
        Err(e) => {
            return RepOutcome {
                per_method: vec![None; plan.methods.len()],
                fatal: Some(e.to_string()),
            }
        }
    };
    // Target: the centered projection, the quantity the intervals are
    // built for under the conditional-on-regressor convention.
    let mut x0c = sample.x0.clone();
    let centered = inference.fit().dataset().clone();
    if x0c.axpy(-1.0, centered.x_bar()).is_err() {
        return RepOutcome {
            per_method: vec![None; plan.methods.len()],
            fatal: Some("grid mismatch".into()),
        };
    }
    let target = match inner_product(&sample.beta_true, &x0c) {
        Ok(t) => t,
        Err(e) => {
            return RepOutcome {
                per_method: vec![None; plan.methods.len()],
                fatal: Some(e.to_string()),
            }
        }
    };

    let per_method = plan
        .methods
        .iter()
        .enumerate()
        .map(|(m_idx, method)| {
            let interval = match method.bootstrap_kind() {
                None => inference.clt_interval(plan.level),
                Some((variant, studentize)) => {
                    let config = BootstrapConfig {
                        b: plan.b_boot,
                        tuning,
                        variant,
                        studentize,
                        interval: IntervalKind::Symmetrized,
                        level: plan.level,
                        seed: seed::derive(rep_seed, &[METHOD_TAG, m_idx as u64]),
                    };
                    match inference.report(&config) {
                        Ok(r) => r.interval,
                        Err(_) => return None,
                    }
                }
            };
            // Containment with a numerical slack so exactly-degenerate
            // (zero-width) intervals still cover a target equal to the
            // point up to floating-point dust.
            let tol = 1e-9 * (1.0 + interval.0.abs() + interval.1.abs());
            let covered = interval.0 - tol <= target && target <= interval.1 + tol;
            Some((covered, interval.1 - interval.0))
        })
        .collect();
    RepOutcome {
        per_method,
        fatal: None,
    }
}

/// Construction-bias density study: raw diagnostic samples per tuning
/// choice, with a binned density estimate and summary spread.
#[derive(Debug, Clone)]
pub struct BiasPlan {
    pub dgp: DgpSpec,
    /// (k, h, g) triples; the interesting axis is the ratio h/g.
    pub tunings: Vec<TuningChoice>,
    pub reps: usize,
    pub master_seed: u64,
}

#[derive(Debug, Clone)]
pub struct BiasDensity {
    pub tuning: TuningChoice,
    pub ratio: f64,
    pub samples: Vec<f64>,
    /// (bin midpoint, density) pairs over an equal-width binning.
    pub bins: Vec<(f64, f64)>,
    pub sd: f64,
    pub failed_reps: usize,
}

/// Reference spread for a bias study under the heteroscedastic design with
/// unit conditional-variance loadings: plugs the scenario's spectrum and
/// slope coefficients into the limiting formula at `tau = h/g`.
pub fn bias_reference_sd(spec: &DgpSpec, tau: f64) -> Result<f64, HarnessError> {
    let gammas = dgp::spectrum_with_convention(spec.a, spec.j_basis, spec.spectrum)?;
    let grid = Grid::uniform_unit(spec.grid_size)?;
    let (_, coeffs) = dgp::gen_slope(spec, SlopeMode::Simulation, &grid)?;
    let rho_sq = vec![1.0; gammas.len()];
    Ok(sigma_tau(tau, &gammas, &rho_sq, &coeffs)?)
}

pub fn run_bias_density(plan: &BiasPlan) -> Result<Vec<BiasDensity>, HarnessError> {
    plan.dgp.validate()?;
    if plan.reps == 0 || plan.tunings.is_empty() {
        return Err(HarnessError::InvalidPlan(
            "bias study needs repetitions and at least one tuning".into(),
        ));
    }
    let mut out = Vec::new();
    for (t_idx, tuning) in plan.tunings.iter().enumerate() {
        let samples: Vec<Option<f64>> = (0..plan.reps)
            .into_par_iter()
            .map(|rep| {
                let rep_seed = seed::derive(
                    plan.master_seed,
                    &[BIAS_TAG, t_idx as u64, rep as u64],
                );
                let mut gen_rng = seed::stream_rng(rep_seed, &[DGP_TAG]);
                let sample = dgp::gen_dataset(&plan.dgp, &mut gen_rng).ok()?;
                crate::bootstrap::construction_bias(&sample.dataset, &sample.x0, *tuning).ok()
            })
            .collect();
        let failed = samples.iter().filter(|s| s.is_none()).count();
        if failed * 20 > plan.reps {
            return Err(HarnessError::TooManyFailures {
                scenario: format!("bias h={} g={}", tuning.h, tuning.g),
                failed,
                reps: plan.reps,
                detail: "construction-bias evaluation failed".into(),
            });
        }
        let samples: Vec<f64> = samples.into_iter().flatten().collect();
        let nn = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / nn;
        let sd = (samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / nn).sqrt();
        out.push(BiasDensity {
            tuning: *tuning,
            ratio: tuning.h as f64 / tuning.g as f64,
            bins: bin_density(&samples, 40),
            sd,
            samples,
            failed_reps: failed,
        });
    }
    Ok(out)
}

fn bin_density(samples: &[f64], bins: usize) -> Vec<(f64, f64)> {
    if samples.is_empty() {
        return Vec::new();
    }
    let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return vec![(lo, f64::INFINITY)];
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &s in samples {
        let idx = (((s - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let norm = samples.len() as f64 * width;
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (lo + (i as f64 + 0.5) * width, c as f64 / norm))
        .collect()
}

/// Size/power study over the alternative-proportion grid.
#[derive(Debug, Clone)]
pub struct PowerPlan {
    /// Base process; `hypothesis_p` is overridden per grid point.
    pub dgp: DgpSpec,
    pub p_grid: Vec<f64>,
    pub enforce: Vec<bool>,
    pub statistic: StatisticKind,
    pub tuning: TuningPolicy,
    pub reps: usize,
    pub b_boot: usize,
    /// Test size, typically 0.05.
    pub level: f64,
    pub master_seed: u64,
}

pub fn run_power(plan: &PowerPlan) -> Result<Vec<ResultRow>, HarnessError> {
    plan.dgp.validate()?;
    if plan.p_grid.is_empty() || plan.enforce.is_empty() || plan.reps == 0 {
        return Err(HarnessError::InvalidPlan(
            "power study needs a proportion grid, enforcement flags, and repetitions".into(),
        ));
    }
    let grid = Grid::uniform_unit(plan.dgp.grid_size)?;
    let targets = TargetSet::new(dgp::fourier_basis(6, &grid))
        .expect("six basis targets");
    let mut rows = Vec::new();
    for (p_idx, &p) in plan.p_grid.iter().enumerate() {
        let spec = DgpSpec {
            hypothesis_p: Some(p),
            ..plan.dgp.clone()
        };
        let tunings = plan.tuning.resolve(&spec);
        let tuning = tunings[0];
        for &enforce in &plan.enforce {
            let rejections: Vec<Option<bool>> = (0..plan.reps)
                .into_par_iter()
                .map(|rep| {
                    let rep_seed = seed::derive(
                        plan.master_seed,
                        &[POWER_TAG, p_idx as u64, u64::from(enforce), rep as u64],
                    );
                    let mut gen_rng = seed::stream_rng(rep_seed, &[DGP_TAG]);
                    let sample = dgp::gen_dataset(&spec, &mut gen_rng).ok()?;
                    let config = BootstrapConfig {
                        b: plan.b_boot,
                        tuning,
                        variant: Variant::PbModified,
                        studentize: Studentize::BootstrapScale,
                        interval: IntervalKind::Symmetrized,
                        level: 0.95,
                        seed: seed::derive(rep_seed, &[METHOD_TAG]),
                    };
                    let result = bootstrap_test(
                        &sample.dataset,
                        &targets,
                        &config,
                        enforce,
                        plan.statistic,
                    )
                    .ok()?;
                    Some(result.p_value <= plan.level)
                })
                .collect();
            let failed = rejections.iter().filter(|r| r.is_none()).count();
            if failed * 20 > plan.reps {
                return Err(HarnessError::TooManyFailures {
                    scenario: format!("power p={p} enforce={enforce}"),
                    failed,
                    reps: plan.reps,
                    detail: "test evaluation failed".into(),
                });
            }
            let kept: Vec<bool> = rejections.into_iter().flatten().collect();
            let used = kept.len();
            let rate = kept.iter().filter(|&&r| r).count() as f64 / used as f64;
            rows.push(ResultRow {
                scenario_id: format!("power_p{p}_{}", if enforce { "enforced" } else { "plain" }),
                n: spec.n,
                a: spec.a,
                b: spec.b,
                nu: spec.nu,
                error_mode: spec.error_mode.as_str().to_string(),
                method: format!(
                    "test_{}_{}",
                    plan.statistic.as_str(),
                    if enforce { "enforced" } else { "plain" }
                ),
                k: tuning.k,
                h: tuning.h,
                g: tuning.g,
                reps: used,
                coverage: None,
                mean_width: None,
                rejection_rate: Some(rate),
                mc_se: binomial_se(rate, used),
                failed_reps: failed,
            });
        }
    }
    Ok(rows)
}

/// Central-limit sanity check: Kolmogorov-Smirnov distance between the
/// studentized projection statistic (true slope available from the
/// generator) and the standard normal.
#[derive(Debug, Clone)]
pub struct CltPlan {
    pub scenarios: Vec<ScenarioSpec>,
    pub tuning: TuningPolicy,
    pub reps: usize,
    pub master_seed: u64,
}

#[derive(Debug, Clone)]
pub struct CltRow {
    pub scenario_id: String,
    pub tuning: TuningChoice,
    pub reps: usize,
    pub ks_distance: f64,
    pub failed_reps: usize,
}

pub fn run_clt_check(plan: &CltPlan) -> Result<Vec<CltRow>, HarnessError> {
    if plan.scenarios.is_empty() || plan.reps == 0 {
        return Err(HarnessError::InvalidPlan(
            "central-limit check needs scenarios and repetitions".into(),
        ));
    }
    let mut rows = Vec::new();
    for (s_idx, scenario) in plan.scenarios.iter().enumerate() {
        scenario.dgp.validate()?;
        for tuning in plan.tuning.resolve(&scenario.dgp) {
            let stats: Vec<Option<f64>> = (0..plan.reps)
                .into_par_iter()
                .map(|rep| {
                    let rep_seed = seed::derive(
                        plan.master_seed,
                        &[CLT_TAG, s_idx as u64, rep as u64],
                    );
                    let mut gen_rng = seed::stream_rng(rep_seed, &[DGP_TAG]);
                    let sample = dgp::gen_dataset(&scenario.dgp, &mut gen_rng).ok()?;
                    let inference =
                        ProjectionInference::new(&sample.dataset, &sample.x0, tuning).ok()?;
                    let mut x0c = sample.x0.clone();
                    x0c.axpy(-1.0, inference.fit().dataset().x_bar()).ok()?;
                    let target = inner_product(&sample.beta_true, &x0c).ok()?;
                    let se = inference.se();
                    if se > 0.0 {
                        Some((inference.point() - target) / se)
                    } else {
                        None
                    }
                })
                .collect();
            let failed = stats.iter().filter(|s| s.is_none()).count();
            if failed * 20 > plan.reps {
                return Err(HarnessError::TooManyFailures {
                    scenario: scenario.label.clone(),
                    failed,
                    reps: plan.reps,
                    detail: "studentized statistic could not be formed".into(),
                });
            }
            let kept: Vec<f64> = stats.into_iter().flatten().collect();
            rows.push(CltRow {
                scenario_id: scenario.label.clone(),
                tuning,
                reps: kept.len(),
                ks_distance: ks_distance_to_standard_normal(&kept),
                failed_reps: failed,
            });
        }
    }
    Ok(rows)
}

/// Kolmogorov-Smirnov distance between a sample and the standard normal.
pub fn ks_distance_to_standard_normal(samples: &[f64]) -> f64 {
    use statrs::distribution::ContinuousCDF;
    if samples.is_empty() {
        return 1.0;
    }
    let normal = statrs::distribution::Normal::new(0.0, 1.0).expect("standard normal");
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite statistics"));
    let n = sorted.len() as f64;
    let mut dist: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let cdf = normal.cdf(x);
        dist = dist.max((cdf - i as f64 / n).abs());
        dist = dist.max(((i + 1) as f64 / n - cdf).abs());
    }
    dist
}

#[cfg(test)]
mod tests;
