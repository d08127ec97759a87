//! Data generators for the simulation studies: truncated Karhunen-Loeve
//! regressors on a Fourier basis, polynomial eigengap spectra, a
//! Rademacher-signed polynomial slope, centered chi-square errors in
//! homoscedastic and regressor-dependent flavors, and the null/alternative
//! slope family for power studies.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal, StudentT};
use thiserror::Error;

use crate::flrm::FunctionalDataset;
use crate::hilbert::{inner_product, Curve, Grid, HilbertError};
use crate::seed;

#[derive(Debug, Error)]
pub enum DgpError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Flrm(#[from] crate::flrm::FlrmError),
    #[error("invalid generator setting: {0}")]
    InvalidSpec(String),
}

/// How errors enter the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorMode {
    /// Centered chi-square with trace(Gamma)/2 degrees of freedom,
    /// independent of the regressor.
    HomoscedasticChiSq,
    /// Centered chi-square with `||X||^2 / 2` degrees of freedom, so the
    /// conditional error variance equals `||X||^2`.
    HeteroscedasticChiSq,
    /// No errors; responses are exactly linear in the regressor.
    None,
}

impl ErrorMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ErrorMode::HomoscedasticChiSq => "homoscedastic",
            ErrorMode::HeteroscedasticChiSq => "heteroscedastic",
            ErrorMode::None => "none",
        }
    }
}

/// Which eigenvalue sequence the gap rule produces.
///
/// The gap-faithful spectrum takes `gamma_j = 2 * sum_{l>=j} l^{-a}` so the
/// gaps `gamma_j - gamma_{j+1} = 2 j^{-a}` hold exactly. The literal
/// variant instead pins `gamma_1 = zeta(a)` with gaps `j^{-a}`; the two
/// conventions differ by a factor of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumConvention {
    GapFaithful,
    LiteralGammaOne,
}

/// Slope family selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlopeMode {
    /// `beta_j = scale * j^{-b} * sign_j` on all J basis directions.
    Simulation,
    /// Null slope: support on directions j >= 7 only.
    H0,
    /// Mixture `(1-p) * H0 + p * (leading six directions)`.
    H1 { p: f64 },
}

/// Full description of one simulated data-generating process.
#[derive(Debug, Clone)]
pub struct DgpSpec {
    pub n: usize,
    /// Number of Fourier basis directions (J).
    pub j_basis: usize,
    /// Eigengap decay exponent (a > 1).
    pub a: f64,
    /// Slope coefficient decay exponent.
    pub b: f64,
    /// Slope coefficient scale (c).
    pub slope_scale: f64,
    /// Degrees of freedom for the latent t variable; `None` means Gaussian
    /// scores (xi = 1).
    pub nu: Option<f64>,
    pub error_mode: ErrorMode,
    pub grid_size: usize,
    /// Rescale xi so the scores have unit variance.
    pub standardize_xi: bool,
    /// Seed fixing the Rademacher signs of the slope coefficients.
    pub slope_signs_seed: u64,
    /// Alternative-proportion for the H1 slope family.
    pub hypothesis_p: Option<f64>,
    pub spectrum: SpectrumConvention,
}

impl Default for DgpSpec {
    fn default() -> Self {
        Self {
            n: 100,
            j_basis: 15,
            a: 2.5,
            b: 5.5,
            slope_scale: 3.0,
            nu: None,
            error_mode: ErrorMode::HomoscedasticChiSq,
            grid_size: 100,
            standardize_xi: true,
            slope_signs_seed: 1,
            hypothesis_p: None,
            spectrum: SpectrumConvention::GapFaithful,
        }
    }
}

impl DgpSpec {
    pub fn validate(&self) -> Result<(), DgpError> {
        if self.n < 2 {
            return Err(DgpError::InvalidSpec("need n >= 2".into()));
        }
        if !(self.a > 1.0) {
            return Err(DgpError::InvalidSpec(format!(
                "eigengap exponent must exceed 1 for summability, got {}",
                self.a
            )));
        }
        if self.j_basis == 0 || self.j_basis > 2 * self.grid_size {
            return Err(DgpError::InvalidSpec(format!(
                "basis truncation {} infeasible on {} grid points",
                self.j_basis, self.grid_size
            )));
        }
        if let Some(nu) = self.nu {
            if !(nu > 0.0) {
                return Err(DgpError::InvalidSpec("nu must be positive".into()));
            }
            if self.standardize_xi && !(nu > 2.0) {
                return Err(DgpError::InvalidSpec(
                    "standardize_xi needs nu > 2 so the variance exists".into(),
                ));
            }
        }
        if let Some(p) = self.hypothesis_p {
            if !(0.0..=1.0).contains(&p) {
                return Err(DgpError::InvalidSpec(format!("proportion p={p} outside [0,1]")));
            }
        }
        Ok(())
    }
}

/// A generated paired sample plus everything needed for oracle checks.
#[derive(Debug, Clone)]
pub struct GeneratedSample {
    pub dataset: Arc<FunctionalDataset>,
    /// Fresh regressor draw for projection inference.
    pub x0: Curve,
    pub beta_true: Curve,
    /// `<beta, X_0>` with the raw, uncentered X_0.
    pub true_projection: f64,
    /// n x J matrix of the latent component scores.
    pub scores: Vec<Vec<f64>>,
}

/// First `j_count` orthonormal Fourier modes `{1, sqrt2 sin(2 pi t),
/// sqrt2 cos(2 pi t), sqrt2 sin(4 pi t), ...}` on the grid.
pub fn fourier_basis(j_count: usize, grid: &Arc<Grid>) -> Vec<Curve> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let sqrt2 = 2f64.sqrt();
    (1..=j_count)
        .map(|j| {
            Curve::from_fn(grid.clone(), move |t| {
                if j == 1 {
                    1.0
                } else if j % 2 == 0 {
                    let l = (j / 2) as f64;
                    sqrt2 * (two_pi * l * t).sin()
                } else {
                    let l = (j / 2) as f64;
                    sqrt2 * (two_pi * l * t).cos()
                }
            })
        })
        .collect()
}

/// Tail sums `sum_{l>=j} l^{-a}` for j = 1..j_count, truncated at 10^6
/// terms with an analytic integral remainder.
fn power_tail_sums(a: f64, j_count: usize) -> Vec<f64> {
    const CUTOFF: usize = 1_000_000;
    let top = CUTOFF.max(j_count);
    let remainder = (top as f64 + 0.5).powf(1.0 - a) / (a - 1.0);
    let mut tails = vec![0.0; j_count + 1];
    let mut acc = remainder;
    let mut l = top;
    while l >= 1 {
        acc += (l as f64).powf(-a);
        if l <= j_count {
            tails[l] = acc;
        }
        l -= 1;
    }
    tails.remove(0);
    tails
}

/// Eigenvalues from the polynomial gap rule.
pub fn spectrum_from_gaps(a: f64, j_count: usize) -> Result<Vec<f64>, DgpError> {
    spectrum_with_convention(a, j_count, SpectrumConvention::GapFaithful)
}

pub fn spectrum_with_convention(
    a: f64,
    j_count: usize,
    convention: SpectrumConvention,
) -> Result<Vec<f64>, DgpError> {
    if !(a > 1.0) {
        return Err(DgpError::InvalidSpec(format!(
            "eigengap exponent must exceed 1, got {a}"
        )));
    }
    if j_count == 0 {
        return Err(DgpError::InvalidSpec("need at least one eigenvalue".into()));
    }
    let tails = power_tail_sums(a, j_count);
    let scale = match convention {
        SpectrumConvention::GapFaithful => 2.0,
        SpectrumConvention::LiteralGammaOne => 1.0,
    };
    Ok(tails.into_iter().map(|t| scale * t).collect())
}

const SLOPE_SIGNS_TAG: u64 = 0x5349_474e;

/// Rademacher signs for the slope coefficients, fixed by their own seed.
fn slope_signs(seed: u64, j_count: usize) -> Vec<f64> {
    let mut rng = seed::stream_rng(seed, &[SLOPE_SIGNS_TAG]);
    (0..j_count)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect()
}

/// Slope curve and its basis coefficients for the requested family.
///
/// The H0 family puts support on directions j >= 7 only, so the slope is
/// exactly orthogonal to the six leading basis directions used as testing
/// targets.
pub fn gen_slope(
    spec: &DgpSpec,
    mode: SlopeMode,
    grid: &Arc<Grid>,
) -> Result<(Curve, Vec<f64>), DgpError> {
    spec.validate()?;
    let j = spec.j_basis;
    if matches!(mode, SlopeMode::H0 | SlopeMode::H1 { .. }) && j <= 6 {
        return Err(DgpError::InvalidSpec(
            "null/alternative slope families need more than 6 basis directions".into(),
        ));
    }
    let signs = slope_signs(spec.slope_signs_seed, j);
    let mag = |idx: usize| spec.slope_scale * ((idx + 1) as f64).powf(-spec.b);
    let coeffs: Vec<f64> = match mode {
        SlopeMode::Simulation => (0..j).map(|i| mag(i) * signs[i]).collect(),
        SlopeMode::H0 => (0..j)
            .map(|i| if i >= 6 { mag(i) * signs[i] } else { 0.0 })
            .collect(),
        SlopeMode::H1 { p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(DgpError::InvalidSpec(format!("proportion p={p} outside [0,1]")));
            }
            (0..j)
                .map(|i| {
                    if i < 6 {
                        p * mag(i) * signs[i]
                    } else {
                        (1.0 - p) * mag(i) * signs[i]
                    }
                })
                .collect()
        }
    };
    let basis = fourier_basis(j, grid);
    let mut beta = Curve::zeros(grid.clone());
    for (c, phi) in coeffs.iter().zip(&basis) {
        beta.axpy(*c, phi)?;
    }
    Ok((beta, coeffs))
}

/// Draw `n` regressor curves and their latent scores.
///
/// Each curve draws one latent `xi` (t distributed, or 1 when `nu` is
/// unset) and independent standard normal `W_j`; the j-th score is
/// `xi * W_j`, optionally rescaled so its variance is one.
pub fn gen_regressors(
    spec: &DgpSpec,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Curve>, Vec<Vec<f64>>), DgpError> {
    spec.validate()?;
    let grid = Grid::uniform_unit(spec.grid_size)?;
    let basis = fourier_basis(spec.j_basis, &grid);
    let gammas = spectrum_with_convention(spec.a, spec.j_basis, spec.spectrum)?;
    let sqrt_gammas: Vec<f64> = gammas.iter().map(|g| g.sqrt()).collect();
    let normal = Normal::new(0.0, 1.0).expect("valid normal");
    let xi_scale = match (spec.nu, spec.standardize_xi) {
        (Some(nu), true) => ((nu - 2.0) / nu).sqrt(),
        _ => 1.0,
    };
    let student = spec.nu.map(|nu| StudentT::new(nu).expect("valid dof"));

    let mut curves = Vec::with_capacity(spec.n);
    let mut scores = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let xi = match &student {
            Some(t) => xi_scale * t.sample(rng),
            None => 1.0,
        };
        let mut row = Vec::with_capacity(spec.j_basis);
        let mut curve = Curve::zeros(grid.clone());
        for (j, phi) in basis.iter().enumerate() {
            let score = xi * normal.sample(rng);
            curve.axpy(sqrt_gammas[j] * score, phi)?;
            row.push(score);
        }
        curves.push(curve);
        scores.push(row);
    }
    Ok((curves, scores))
}

/// Draw model errors for the given regressors.
///
/// Fractional chi-square degrees of freedom are realized through the
/// Gamma(shape = dof/2, scale = 2) identity, then centered at the mean.
pub fn gen_errors(
    x_curves: &[Curve],
    mode: ErrorMode,
    trace_gamma: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>, DgpError> {
    let centered_chisq = |dof: f64, rng: &mut ChaCha8Rng| -> f64 {
        if dof <= 0.0 {
            return 0.0;
        }
        let gamma = Gamma::new(dof / 2.0, 2.0).expect("valid gamma");
        gamma.sample(rng) - dof
    };
    match mode {
        ErrorMode::None => Ok(vec![0.0; x_curves.len()]),
        ErrorMode::HomoscedasticChiSq => {
            let dof = trace_gamma / 2.0;
            Ok(x_curves.iter().map(|_| centered_chisq(dof, rng)).collect())
        }
        ErrorMode::HeteroscedasticChiSq => x_curves
            .iter()
            .map(|x| {
                let norm_sq = inner_product(x, x)?;
                Ok(centered_chisq(norm_sq / 2.0, rng))
            })
            .collect(),
    }
}

/// Generate a full paired sample: slope, regressors, errors, responses, and
/// a fresh projection regressor. Draw order is fixed: n regressor curves,
/// then X_0, then the n errors.
pub fn gen_dataset(spec: &DgpSpec, rng: &mut ChaCha8Rng) -> Result<GeneratedSample, DgpError> {
    spec.validate()?;
    let mode = match spec.hypothesis_p {
        Some(p) => SlopeMode::H1 { p },
        None => SlopeMode::Simulation,
    };
    let grid = Grid::uniform_unit(spec.grid_size)?;
    let (beta_true, _) = gen_slope(spec, mode, &grid)?;
    let (curves, scores) = gen_regressors(spec, rng)?;
    let x0 = {
        let one = DgpSpec { n: 2, ..spec.clone() };
        let (mut pair, _) = gen_regressors(&one, rng)?;
        pair.swap_remove(0)
    };
    let trace_gamma: f64 = spectrum_with_convention(spec.a, spec.j_basis, spec.spectrum)?
        .iter()
        .sum();
    let errors = gen_errors(&curves, spec.error_mode, trace_gamma, rng)?;
    let y: Vec<f64> = curves
        .iter()
        .zip(&errors)
        .map(|(x, e)| Ok(inner_product(&beta_true, x)? + e))
        .collect::<Result<_, DgpError>>()?;
    let true_projection = inner_product(&beta_true, &x0)?;
    let dataset = Arc::new(FunctionalDataset::new(curves, y)?);
    Ok(GeneratedSample {
        dataset,
        x0,
        beta_true,
        true_projection,
        scores,
    })
}

/// Default residual truncation `k = 2 * floor(n^{1/(2a + 1.1)})`, clamped
/// to the basis size.
pub fn default_k(spec: &DgpSpec) -> usize {
    let v = 2.0 * spec.a + 1.1;
    let k = 2 * (spec.n as f64).powf(1.0 / v).floor() as usize;
    k.clamp(1, spec.j_basis)
}
