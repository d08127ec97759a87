//! Prepared inference state and the per-replicate computation.
//!
//! All replicate work happens in the coordinates of the data eigenbasis.
//! Every curve in a resample lies in the span of the original centered
//! curves, so the bootstrap covariance operator, restricted to that span,
//! carries its entire nonzero spectrum; components of the projection
//! regressor outside the span are orthogonal to every bootstrap
//! eigenfunction and never enter a statistic. A grid-space reference
//! implementation in the tests pins this equivalence down numerically.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::flrm::{
    cross_covariance, eigendecompose_with_dim, sample_covariance, u_hat, FpcrFit,
    FunctionalDataset, TuningChoice,
};
use crate::hilbert::{inner_product, Curve};

use super::{BootstrapError, ReplicateStat, Studentize, Variant};

/// Everything fixed across replicates for one dataset, tuning choice, and
/// set of projection regressors.
pub(crate) struct Prepared {
    pub n: usize,
    pub m: usize,
    /// Retained rank of the data eigensystem.
    pub rank: usize,
    /// Data eigenvalues, descending.
    pub gammas: Vec<f64>,
    /// n x rank component scores `<X_i, phi_j>` of the centered curves.
    pub scores: DMatrix<f64>,
    /// Centered responses.
    pub y: Vec<f64>,
    /// Correction term coordinates `<U_hat, phi_j>`.
    pub u_scores: DVector<f64>,
    /// Slope coefficients at the three truncation levels.
    pub coeffs_h: Vec<f64>,
    pub coeffs_g: Vec<f64>,
    /// Fitted values `<beta_g, X_i>` for residual-bootstrap regeneration.
    pub fitted_g: Vec<f64>,
    /// Centered residuals of the g-fit (exactly mean zero).
    pub resid_g: Vec<f64>,
    /// Residuals of the k-fit feeding the data scaling.
    pub resid_k: Vec<f64>,
    pub tuning: TuningChoice,
    pub targets: Vec<Target>,
    /// Fits kept for report rendering and consistency checks.
    pub fit_h: FpcrFit,
    pub fit_g: FpcrFit,
}

/// One projection regressor, already centered by the dataset mean.
pub(crate) struct Target {
    /// `<x0c, phi_j>`, j < rank.
    pub x0_scores: DVector<f64>,
    /// `<beta_h, x0c>`.
    pub point: f64,
    /// `<beta_g, x0c>`, the bootstrap centering value.
    pub center: f64,
    /// Data scaling `s_h(x0c)`.
    pub s_data: f64,
}

/// Outcome of one replicate: per-target statistics, or a degeneracy flag.
pub(crate) enum ReplicateOutcome {
    Ok(Vec<ReplicateStat>),
    Degenerate,
}

impl Prepared {
    /// Build the shared state. Targets are raw regressors that get
    /// centered by the dataset's stored mean.
    pub(crate) fn new(
        dataset: &Arc<FunctionalDataset>,
        raw_targets: &[Curve],
        tuning: TuningChoice,
    ) -> Result<Self, BootstrapError> {
        Self::build(dataset, raw_targets, tuning, None)
    }

    /// Null-enforced variant: the correction term comes from the original
    /// responses (the estimating-equation residual is unchanged by the
    /// projection removal) and every replicate centers at zero, mirroring
    /// the orthogonality of the projected-out slope.
    pub(crate) fn new_enforced(
        dataset: &Arc<FunctionalDataset>,
        raw_targets: &[Curve],
        tuning: TuningChoice,
        u_override: &Curve,
    ) -> Result<Self, BootstrapError> {
        Self::build(dataset, raw_targets, tuning, Some(u_override))
    }

    fn build(
        dataset: &Arc<FunctionalDataset>,
        raw_targets: &[Curve],
        tuning: TuningChoice,
        u_override: Option<&Curve>,
    ) -> Result<Self, BootstrapError> {
        let ds = crate::flrm::ensure_centered(dataset);
        let n = ds.len();
        let m = ds.grid().len();
        let gamma_op = sample_covariance(&ds)?;
        let eig = Arc::new(eigendecompose_with_dim(&gamma_op, n.min(m), n.max(m))?);
        tuning.validate(eig.rank())?;
        let delta = cross_covariance(&ds)?;
        let fit_h = crate::flrm::fit_shared(ds.clone(), eig.clone(), delta.clone(), tuning.h)?;
        let fit_g = fit_h.refit(tuning.g)?;
        let fit_k = fit_h.refit(tuning.k)?;

        let rank = eig.rank();
        let mut scores = DMatrix::zeros(n, rank);
        for (i, x) in ds.curves().iter().enumerate() {
            for j in 0..rank {
                scores[(i, j)] = inner_product(x, &eig.eigenfunctions()[j])?;
            }
        }
        let own_u;
        let u_curve = match u_override {
            Some(u) => u,
            None => {
                own_u = u_hat(&ds, fit_g.residuals())?;
                &own_u
            }
        };
        let mut u_scores = DVector::zeros(rank);
        for j in 0..rank {
            u_scores[j] = inner_product(u_curve, &eig.eigenfunctions()[j])?;
        }

        let fitted_g: Vec<f64> = (0..n)
            .map(|i| (0..tuning.g).map(|j| fit_g.coeffs()[j] * scores[(i, j)]).sum())
            .collect();
        let mean_rg = fit_g.residuals().iter().sum::<f64>() / n as f64;
        let resid_g: Vec<f64> = fit_g.residuals().iter().map(|r| r - mean_rg).collect();

        let mut prepared = Self {
            n,
            m,
            rank,
            gammas: eig.eigenvalues().to_vec(),
            scores,
            y: ds.responses().to_vec(),
            u_scores,
            coeffs_h: fit_h.coeffs().to_vec(),
            coeffs_g: fit_g.coeffs().to_vec(),
            fitted_g,
            resid_g,
            resid_k: fit_k.residuals().to_vec(),
            tuning,
            targets: Vec::new(),
            fit_h,
            fit_g,
        };
        let enforced = u_override.is_some();
        for x0 in raw_targets {
            let mut target = prepared.make_target(x0, &ds)?;
            if enforced {
                target.center = 0.0;
            }
            prepared.targets.push(target);
        }
        Ok(prepared)
    }

    fn make_target(
        &self,
        x0: &Curve,
        ds: &Arc<FunctionalDataset>,
    ) -> Result<Target, BootstrapError> {
        let mut x0c = x0.clone();
        x0c.axpy(-1.0, ds.x_bar())?;
        let mut x0_scores = DVector::zeros(self.rank);
        for j in 0..self.rank {
            x0_scores[j] = inner_product(&x0c, &self.fit_h.eigen().eigenfunctions()[j])?;
        }
        drop(x0c);
        let point: f64 = (0..self.tuning.h).map(|j| self.coeffs_h[j] * x0_scores[j]).sum();
        let center: f64 = (0..self.tuning.g).map(|j| self.coeffs_g[j] * x0_scores[j]).sum();
        let s_data = self.scale_fixed_design(&x0_scores, &self.resid_k);
        Ok(Target {
            x0_scores,
            point,
            center,
            s_data,
        })
    }

    /// `s_h(x0) = n^{-1} sum_i (eps_i <X_i, a> - mean)^2` with
    /// `a = Gamma_h^{-1} x0` in the data eigenbasis.
    fn scale_fixed_design(&self, x0_scores: &DVector<f64>, eps: &[f64]) -> f64 {
        let h = self.tuning.h;
        let n = self.n;
        let mut v = vec![0.0; n];
        for i in 0..n {
            let mut w = 0.0;
            for j in 0..h {
                w += x0_scores[j] / self.gammas[j] * self.scores[(i, j)];
            }
            v[i] = eps[i] * w;
        }
        let mean = v.iter().sum::<f64>() / n as f64;
        (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64).max(0.0)
    }

    /// Standard error `sqrt(s_h(x0)/n)` for target `l`.
    pub(crate) fn se(&self, l: usize) -> f64 {
        (self.targets[l].s_data / self.n as f64).sqrt()
    }

    /// Data-only shift between naive and corrected bootstrap centers:
    /// `sqrt(n / s_h(x0)) <Gamma_h^{-1} U_hat, x0>`.
    pub(crate) fn construction_bias(&self, l: usize) -> f64 {
        let t = &self.targets[l];
        let mut shift = 0.0;
        for j in 0..self.tuning.h {
            shift += self.u_scores[j] * t.x0_scores[j] / self.gammas[j];
        }
        studentized(self.n, t.s_data, shift, t.point.abs() + t.center.abs()).unwrap_or(0.0)
    }

    /// Run one replicate of the requested variant.
    pub(crate) fn replicate(
        &self,
        variant: Variant,
        studentize: Studentize,
        rng: &mut ChaCha8Rng,
    ) -> ReplicateOutcome {
        match variant {
            Variant::PbModified => self.paired_replicate(rng, false, studentize),
            Variant::Naive => self.paired_replicate(rng, true, studentize),
            Variant::Residual => self.residual_replicate(rng, studentize),
        }
    }

    /// Uniform-with-replacement index draw; degenerate n = 1 repeats the
    /// single index.
    pub(crate) fn draw_indices(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        draw_indices(self.n, rng)
    }

    fn paired_replicate(
        &self,
        rng: &mut ChaCha8Rng,
        naive: bool,
        studentize: Studentize,
    ) -> ReplicateOutcome {
        let idx = self.draw_indices(rng);
        self.paired_replicate_at(&idx, naive, studentize)
    }

    /// Paired-bootstrap statistic for a fixed resample, used directly by
    /// tests that need the identity resample.
    pub(crate) fn paired_replicate_at(
        &self,
        idx: &[usize],
        naive: bool,
        studentize: Studentize,
    ) -> ReplicateOutcome {
        let n = self.n;
        let r = self.rank;
        let tuning = self.tuning;
        let need = match studentize {
            Studentize::DataScale => tuning.h,
            Studentize::BootstrapScale => tuning.h.max(tuning.k),
        };

        // Bootstrap moments in data-eigenbasis coordinates.
        let mut zbar = DVector::zeros(r);
        let mut ybar = 0.0;
        for &i in idx {
            for j in 0..r {
                zbar[j] += self.scores[(i, j)];
            }
            ybar += self.y[i];
        }
        zbar /= n as f64;
        ybar /= n as f64;

        let mut cov = DMatrix::zeros(r, r);
        let mut d = DVector::zeros(r);
        for &i in idx {
            let row = self.scores.row(i);
            let yc = self.y[i] - ybar;
            for p in 0..r {
                let zp = row[p] - zbar[p];
                d[p] += yc * zp;
                for q in p..r {
                    cov[(p, q)] += zp * (row[q] - zbar[q]);
                }
            }
        }
        for p in 0..r {
            for q in p..r {
                let v = cov[(p, q)] / n as f64;
                cov[(p, q)] = v;
                cov[(q, p)] = v;
            }
        }
        d /= n as f64;

        let eigen = cov.symmetric_eigen();
        let mut order: Vec<usize> = (0..r).collect();
        order.sort_by(|&a, &b| {
            let (va, vb): (f64, f64) = (eigen.eigenvalues[a], eigen.eigenvalues[b]);
            vb.partial_cmp(&va).expect("finite eigenvalues")
        });
        let lead: f64 = eigen.eigenvalues[order[0]];
        let tol = self.n.max(self.m) as f64 * f64::EPSILON * lead.max(0.0);
        let needed_eval: f64 = eigen.eigenvalues[order[need - 1]];
        if lead <= 0.0 || needed_eval <= tol {
            return ReplicateOutcome::Degenerate;
        }

        // Slope coefficients in the bootstrap eigenbasis.
        let mut lam = vec![0.0; need];
        let mut coeff = vec![0.0; need];
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(need);
        for (j, &oj) in order.iter().take(need).enumerate() {
            let v: DVector<f64> = eigen.eigenvectors.column(oj).into();
            lam[j] = eigen.eigenvalues[oj];
            let dj = v.dot(&d);
            let uj = if naive { 0.0 } else { v.dot(&self.u_scores) };
            coeff[j] = (dj - uj) / lam[j];
            basis.push(v);
        }

        let mut stats = Vec::with_capacity(self.targets.len());
        match studentize {
            Studentize::DataScale => {
                for t in &self.targets {
                    let proj: f64 = (0..tuning.h)
                        .map(|j| coeff[j] * basis[j].dot(&t.x0_scores))
                        .sum();
                    match studentized(n, t.s_data, proj - t.center, proj.abs() + t.center.abs()) {
                        Some(t_star) => stats.push(ReplicateStat {
                            t_star,
                            projection_star: proj,
                            scale_used: t.s_data,
                        }),
                        None => return ReplicateOutcome::Degenerate,
                    }
                }
            }
            Studentize::BootstrapScale => {
                // Raw scores of the resampled curves against the bootstrap
                // eigenbasis, needed for residuals and the product scaling.
                let mut t_scores = DMatrix::zeros(n, need);
                for (row_i, &i) in idx.iter().enumerate() {
                    for (j, v) in basis.iter().enumerate() {
                        let mut acc = 0.0;
                        for p in 0..r {
                            acc += v[p] * self.scores[(i, p)];
                        }
                        t_scores[(row_i, j)] = acc;
                    }
                }
                let eps: Vec<f64> = idx
                    .iter()
                    .enumerate()
                    .map(|(row_i, &i)| {
                        let fit: f64 =
                            (0..tuning.k).map(|j| coeff[j] * t_scores[(row_i, j)]).sum();
                        self.y[i] - fit
                    })
                    .collect();
                for t in &self.targets {
                    let xj: Vec<f64> = (0..tuning.h)
                        .map(|j| basis[j].dot(&t.x0_scores))
                        .collect();
                    let proj: f64 = (0..tuning.h).map(|j| coeff[j] * xj[j]).sum();
                    let mut v = vec![0.0; n];
                    for row_i in 0..n {
                        let mut w = 0.0;
                        for j in 0..tuning.h {
                            w += xj[j] / lam[j] * t_scores[(row_i, j)];
                        }
                        v[row_i] = eps[row_i] * w;
                    }
                    let mean = v.iter().sum::<f64>() / n as f64;
                    let scale = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
                    match studentized(n, scale, proj - t.center, proj.abs() + t.center.abs()) {
                        Some(t_star) => stats.push(ReplicateStat {
                            t_star,
                            projection_star: proj,
                            scale_used: scale,
                        }),
                        None => return ReplicateOutcome::Degenerate,
                    }
                }
            }
        }
        ReplicateOutcome::Ok(stats)
    }

    /// Residual-bootstrap statistic: regenerate responses from the g-fit
    /// plus resampled centered residuals on the fixed design.
    fn residual_replicate(&self, rng: &mut ChaCha8Rng, studentize: Studentize) -> ReplicateOutcome {
        let n = self.n;
        let tuning = self.tuning;
        let need = match studentize {
            Studentize::DataScale => tuning.h,
            Studentize::BootstrapScale => tuning.h.max(tuning.k),
        };

        let y_star: Vec<f64> = (0..n)
            .map(|i| {
                let pick = rng.random_range(0..n);
                self.fitted_g[i] + self.resid_g[pick]
            })
            .collect();
        let ybar = y_star.iter().sum::<f64>() / n as f64;

        // Fixed design: the data eigensystem is unchanged, only the
        // cross-covariance coordinates move.
        let mut coeff = vec![0.0; need];
        for j in 0..need {
            let mut dj = 0.0;
            for i in 0..n {
                dj += (y_star[i] - ybar) * self.scores[(i, j)];
            }
            coeff[j] = dj / n as f64 / self.gammas[j];
        }

        let mut stats = Vec::with_capacity(self.targets.len());
        for t in &self.targets {
            let proj: f64 = (0..tuning.h).map(|j| coeff[j] * t.x0_scores[j]).sum();
            let scale = match studentize {
                Studentize::DataScale => t.s_data,
                Studentize::BootstrapScale => {
                    let eps: Vec<f64> = (0..n)
                        .map(|i| {
                            let fit: f64 =
                                (0..tuning.k).map(|j| coeff[j] * self.scores[(i, j)]).sum();
                            y_star[i] - fit
                        })
                        .collect();
                    self.scale_fixed_design(&t.x0_scores, &eps)
                }
            };
            match studentized(n, scale, proj - t.center, proj.abs() + t.center.abs()) {
                Some(t_star) => stats.push(ReplicateStat {
                    t_star,
                    projection_star: proj,
                    scale_used: scale,
                }),
                None => return ReplicateOutcome::Degenerate,
            }
        }
        ReplicateOutcome::Ok(stats)
    }
}

pub(crate) fn draw_indices(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if n == 1 {
        return vec![0];
    }
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

/// `sqrt(n/scale) * diff`. When the implied standard error falls below
/// the numerical noise floor of the projections (noiseless data collapse
/// both numerator and scale to floating-point dust), a vanishing numerator
/// is a zero statistic and anything else is a degenerate replicate.
pub(crate) fn studentized(n: usize, scale: f64, diff: f64, ref_mag: f64) -> Option<f64> {
    let num_tol = 1e-9 * (1.0 + ref_mag);
    if scale > 0.0 && scale / n as f64 >= num_tol * num_tol {
        Some((n as f64 / scale).sqrt() * diff)
    } else if diff.abs() <= num_tol {
        Some(0.0)
    } else {
        None
    }
}
