use std::sync::Arc;

use rand::Rng;

use crate::dgp::{gen_dataset, DgpSpec, ErrorMode};
use crate::flrm::{
    self, center, cross_covariance, eigendecompose_with_dim, fpcr_fit, lambda_hat,
    sample_covariance, scaling_s_hat, truncated_inverse_apply, u_hat, EigenSystem,
    FunctionalDataset, TuningChoice,
};
use crate::hilbert::{apply, inner_product, Curve, Grid};
use crate::seed::stream_rng;

use super::engine::{Prepared, ReplicateOutcome};
use super::*;

fn random_dataset(n: usize, m: usize, noise: f64, seed: u64) -> (Arc<FunctionalDataset>, Curve) {
    let g = Grid::uniform_unit(m).unwrap();
    let mut rng = stream_rng(seed, &[100]);
    let curves: Vec<Curve> = (0..n)
        .map(|_| {
            Curve::new(g.clone(), (0..m).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap()
        })
        .collect();
    let slope = Curve::from_fn(g.clone(), |t| 1.0 - 2.0 * t);
    let y: Vec<f64> = curves
        .iter()
        .map(|x| inner_product(&slope, x).unwrap() + noise * rng.random_range(-1.0..1.0))
        .collect();
    let x0 = Curve::new(g.clone(), (0..m).map(|_| rng.random_range(-1.5..1.5)).collect()).unwrap();
    (Arc::new(FunctionalDataset::new(curves, y).unwrap()), x0)
}

/// Curves spanning exactly `dims` directions with responses exactly linear
/// in that span: at truncation `dims` every residual is zero.
fn spanned_dataset(n: usize, m: usize, dims: usize, seed: u64) -> (Arc<FunctionalDataset>, Curve) {
    let g = Grid::uniform_unit(m).unwrap();
    let mut rng = stream_rng(seed, &[101]);
    let basis: Vec<Curve> = (0..dims)
        .map(|d| {
            let freq = 2.0 * std::f64::consts::PI * (d + 1) as f64;
            let mut c = Curve::from_fn(g.clone(), move |t| if d == 0 { 1.0 } else { (freq * t).sin() });
            let norm = c.norm();
            c.scale(1.0 / norm);
            c
        })
        .collect();
    let mut slope = Curve::zeros(g.clone());
    for (d, b) in basis.iter().enumerate() {
        slope.axpy(1.5 - 0.7 * d as f64, b).unwrap();
    }
    let mut curves = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let mut c = Curve::zeros(g.clone());
        for b in &basis {
            c.axpy(rng.random_range(-2.0..2.0), b).unwrap();
        }
        y.push(inner_product(&slope, &c).unwrap());
        curves.push(c);
    }
    let x0 = {
        let mut c = Curve::zeros(g.clone());
        for b in &basis {
            c.axpy(rng.random_range(-1.0..1.0), b).unwrap();
        }
        c
    };
    (Arc::new(FunctionalDataset::new(curves, y).unwrap()), x0)
}

/// Grid-space reference for the paired replicate: resample the dataset,
/// recompute moments and eigenpairs on the grid, assemble the statistic
/// from curve algebra. Slow but entirely independent of the engine's
/// eigenbasis shortcut.
#[allow(clippy::too_many_arguments)]
fn reference_paired(
    ds: &Arc<FunctionalDataset>,
    x0c: &Curve,
    u_curve: &Curve,
    center_value: f64,
    s_data: f64,
    tuning: TuningChoice,
    idx: &[usize],
    naive: bool,
    studentize: Studentize,
) -> (f64, f64, f64) {
    let n = ds.len();
    let m = ds.grid().len();
    let curves: Vec<Curve> = idx.iter().map(|&i| ds.curves()[i].clone()).collect();
    let y: Vec<f64> = idx.iter().map(|&i| ds.responses()[i]).collect();
    let resampled = Arc::new(FunctionalDataset::new(curves, y.clone()).unwrap());
    let gamma = sample_covariance(&resampled).unwrap();
    let eig = eigendecompose_with_dim(&gamma, n.min(m), n.max(m)).unwrap();
    let delta = cross_covariance(&resampled).unwrap();

    let beta_star = |level: usize| -> Curve {
        let mut out = Curve::zeros(ds.grid().clone());
        for j in 0..level {
            let phi = &eig.eigenfunctions()[j];
            let dj = inner_product(&delta, phi).unwrap();
            let uj = if naive { 0.0 } else { inner_product(u_curve, phi).unwrap() };
            out.axpy((dj - uj) / eig.eigenvalues()[j], phi).unwrap();
        }
        out
    };
    let beta_h = beta_star(tuning.h);
    let proj = inner_product(&beta_h, x0c).unwrap();
    let scale = match studentize {
        Studentize::DataScale => s_data,
        Studentize::BootstrapScale => {
            let beta_k = beta_star(tuning.k);
            let eps: Vec<f64> = resampled
                .curves()
                .iter()
                .zip(&y)
                .map(|(x, &yv)| yv - inner_product(&beta_k, x).unwrap())
                .collect();
            let lam = lambda_hat(&resampled, &eps).unwrap();
            let mut a = Curve::zeros(ds.grid().clone());
            for j in 0..tuning.h {
                let phi = &eig.eigenfunctions()[j];
                a.axpy(inner_product(x0c, phi).unwrap() / eig.eigenvalues()[j], phi)
                    .unwrap();
            }
            inner_product(&apply(&lam, &a).unwrap(), &a).unwrap()
        }
    };
    let t = (n as f64 / scale).sqrt() * (proj - center_value);
    (t, proj, scale)
}

#[test]
fn resampled_indices_are_uniform() {
    let mut rng = stream_rng(7, &[1]);
    let n = 10;
    let draws = 100_000;
    let mut counts = vec![0usize; n];
    for _ in 0..(draws / n) {
        for i in resample_pairs(n, &mut rng) {
            counts[i] += 1;
        }
    }
    let expected = draws as f64 / n as f64;
    let chi_sq: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    use statrs::distribution::ContinuousCDF;
    let dist = statrs::distribution::ChiSquared::new((n - 1) as f64).unwrap();
    let p = 1.0 - dist.cdf(chi_sq);
    assert!(p > 0.001, "chi-square GOF p = {p}, statistic {chi_sq}");
}

#[test]
fn resampling_is_deterministic_and_handles_single_point() {
    let a = resample_pairs(12, &mut stream_rng(3, &[2]));
    let b = resample_pairs(12, &mut stream_rng(3, &[2]));
    assert_eq!(a, b);
    assert!(a.iter().all(|&i| i < 12));
    assert_eq!(resample_pairs(1, &mut stream_rng(3, &[2])), vec![0]);
}

#[test]
fn identity_resample_with_h_equal_g_gives_zero_statistic() {
    let (ds, x0) = random_dataset(25, 20, 0.8, 11);
    let tuning = TuningChoice::new(3, 3, 3);
    let prep = Prepared::new(&ds, std::slice::from_ref(&x0), tuning).unwrap();
    let idx: Vec<usize> = (0..25).collect();
    match prep.paired_replicate_at(&idx, false, Studentize::DataScale) {
        ReplicateOutcome::Ok(stats) => {
            assert!(stats[0].t_star.abs() < 1e-7, "t* = {}", stats[0].t_star)
        }
        ReplicateOutcome::Degenerate => panic!("identity resample degenerate"),
    }
}

#[test]
fn noiseless_data_give_zero_statistics_for_any_resample() {
    let (ds, x0) = spanned_dataset(20, 12, 2, 12);
    let tuning = TuningChoice::new(2, 2, 2);
    let prep = Prepared::new(&ds, std::slice::from_ref(&x0), tuning).unwrap();
    let mut rng = stream_rng(13, &[3]);
    for _ in 0..10 {
        let idx = prep.draw_indices(&mut rng);
        match prep.paired_replicate_at(&idx, false, Studentize::DataScale) {
            ReplicateOutcome::Ok(stats) => {
                assert!(stats[0].t_star.abs() < 1e-8, "t* = {}", stats[0].t_star)
            }
            ReplicateOutcome::Degenerate => panic!("unexpected degenerate"),
        }
    }
}

#[test]
fn replicates_are_bit_identical_across_runs() {
    let (ds, x0) = random_dataset(30, 15, 0.5, 14);
    let tuning = TuningChoice::new(2, 3, 2);
    let config = BootstrapConfig::new(8, tuning, 99);
    let inference = ProjectionInference::new(&ds, &x0, tuning).unwrap();
    let r1 = inference.report(&config).unwrap();
    let r2 = inference.report(&config).unwrap();
    for (a, b) in r1.replicates.iter().zip(&r2.replicates) {
        assert_eq!(a.t_star.to_bits(), b.t_star.to_bits());
    }
    assert_eq!(r1.interval, r2.interval);
}

#[test]
fn engine_matches_grid_space_reference_for_all_variants() {
    let (ds, x0) = random_dataset(18, 14, 0.7, 15);
    let tuning = TuningChoice::new(2, 4, 3);
    let prep = Prepared::new(&ds, std::slice::from_ref(&x0), tuning).unwrap();
    let centered = center(&ds);
    let cds = Arc::new(centered);
    let mut x0c = x0.clone();
    x0c.axpy(-1.0, cds.x_bar()).unwrap();

    let fit_g = fpcr_fit(&cds, tuning.g).unwrap();
    let u_curve = u_hat(fit_g.dataset(), fit_g.residuals()).unwrap();
    let center_value = inner_product(fit_g.beta_hat(), &x0c).unwrap();
    let s_data = prep.targets[0].s_data;

    let mut rng = stream_rng(16, &[4]);
    for trial in 0..6 {
        let idx = prep.draw_indices(&mut rng);
        for naive in [false, true] {
            for studentize in [Studentize::DataScale, Studentize::BootstrapScale] {
                let got = match prep.paired_replicate_at(&idx, naive, studentize) {
                    ReplicateOutcome::Ok(stats) => stats[0],
                    ReplicateOutcome::Degenerate => continue,
                };
                let (t_ref, proj_ref, scale_ref) = reference_paired(
                    cds.dataset_arc(),
                    &x0c,
                    &u_curve,
                    center_value,
                    s_data,
                    tuning,
                    &idx,
                    naive,
                    studentize,
                );
                let tol = 1e-6 * (1.0 + t_ref.abs());
                assert!(
                    (got.t_star - t_ref).abs() < tol,
                    "trial {trial} naive={naive} studentize={studentize:?}: {} vs {t_ref}",
                    got.t_star
                );
                assert!((got.projection_star - proj_ref).abs() < 1e-8 * (1.0 + proj_ref.abs()));
                assert!((got.scale_used - scale_ref).abs() < 1e-8 * (1.0 + scale_ref.abs()));
            }
        }
    }
}

trait DatasetArc {
    fn dataset_arc(&self) -> &Arc<FunctionalDataset>;
}
impl DatasetArc for Arc<FunctionalDataset> {
    fn dataset_arc(&self) -> &Arc<FunctionalDataset> {
        self
    }
}

#[test]
fn naive_minus_corrected_equals_bootstrap_bias_shift() {
    let (ds, x0) = random_dataset(22, 16, 0.9, 17);
    let tuning = TuningChoice::new(2, 4, 2);
    let prep = Prepared::new(&ds, std::slice::from_ref(&x0), tuning).unwrap();
    let cds = Arc::new(center(&ds));
    let mut x0c = x0.clone();
    x0c.axpy(-1.0, cds.x_bar()).unwrap();
    let fit_g = fpcr_fit(&cds, tuning.g).unwrap();
    let u_curve = u_hat(fit_g.dataset(), fit_g.residuals()).unwrap();

    let mut rng = stream_rng(18, &[5]);
    for _ in 0..5 {
        let idx = prep.draw_indices(&mut rng);
        let t_naive = match prep.paired_replicate_at(&idx, true, Studentize::DataScale) {
            ReplicateOutcome::Ok(s) => s[0].t_star,
            ReplicateOutcome::Degenerate => continue,
        };
        let t_pb = match prep.paired_replicate_at(&idx, false, Studentize::DataScale) {
            ReplicateOutcome::Ok(s) => s[0].t_star,
            ReplicateOutcome::Degenerate => continue,
        };
        // Shift oracle from the grid-space bootstrap eigensystem:
        // sqrt(n/s) <(Gamma*_h)^{-1} U, x0>.
        let curves: Vec<Curve> = idx.iter().map(|&i| cds.curves()[i].clone()).collect();
        let y: Vec<f64> = idx.iter().map(|&i| cds.responses()[i]).collect();
        let resampled = Arc::new(FunctionalDataset::new(curves, y).unwrap());
        let gamma = sample_covariance(&resampled).unwrap();
        let eig = eigendecompose_with_dim(&gamma, 22.min(16), 22.max(16)).unwrap();
        let inv_u = truncated_inverse_apply(&eig, tuning.h, &u_curve).unwrap();
        let shift = (22.0 / prep.targets[0].s_data).sqrt() * inner_product(&inv_u, &x0c).unwrap();
        assert!(
            ((t_naive - t_pb) - shift).abs() < 1e-9 * (1.0 + shift.abs()),
            "difference {} vs shift {shift}",
            t_naive - t_pb
        );
    }
}

#[test]
fn full_rank_centering_makes_naive_and_corrected_coincide() {
    // With g at full rank the correction term vanishes.
    let (ds, x0) = random_dataset(30, 8, 0.6, 19);
    let tuning = TuningChoice::new(2, 3, 8);
    let prep = Prepared::new(&ds, std::slice::from_ref(&x0), tuning).unwrap();
    let mut rng = stream_rng(20, &[6]);
    for _ in 0..5 {
        let idx = prep.draw_indices(&mut rng);
        let (a, b) = match (
            prep.paired_replicate_at(&idx, true, Studentize::DataScale),
            prep.paired_replicate_at(&idx, false, Studentize::DataScale),
        ) {
            (ReplicateOutcome::Ok(a), ReplicateOutcome::Ok(b)) => (a[0].t_star, b[0].t_star),
            _ => continue,
        };
        assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
    }
}

#[test]
fn residual_replicate_of_constant_residuals_is_zero() {
    // Exactly linear responses leave zero centered residuals; the residual
    // bootstrap reproduces the fit.
    let (ds, x0) = spanned_dataset(16, 10, 2, 21);
    let tuning = TuningChoice::new(2, 2, 2);
    let inference = ProjectionInference::new(&ds, &x0, tuning).unwrap();
    let mut rng = stream_rng(22, &[7]);
    let stat = inference
        .replicate(Variant::Residual, Studentize::DataScale, &mut rng)
        .unwrap();
    assert!(stat.t_star.abs() < 1e-8);
}

#[test]
fn residual_replicates_are_deterministic() {
    let (ds, x0) = random_dataset(20, 12, 0.5, 23);
    let tuning = TuningChoice::new(2, 3, 2);
    let inference = ProjectionInference::new(&ds, &x0, tuning).unwrap();
    let a = inference
        .replicate(Variant::Residual, Studentize::BootstrapScale, &mut stream_rng(9, &[8]))
        .unwrap();
    let b = inference
        .replicate(Variant::Residual, Studentize::BootstrapScale, &mut stream_rng(9, &[8]))
        .unwrap();
    assert_eq!(a.t_star.to_bits(), b.t_star.to_bits());
}

fn pivot_design(error_mode: ErrorMode, seed: u64) -> (Arc<FunctionalDataset>, Curve, TuningChoice) {
    let spec = DgpSpec {
        n: 1000,
        nu: Some(5.0),
        error_mode,
        ..DgpSpec::default()
    };
    let mut rng = stream_rng(seed, &[9]);
    let sample = gen_dataset(&spec, &mut rng).unwrap();
    let k = crate::dgp::default_k(&spec);
    let tuning = flrm::rule_of_thumb(k, spec.j_basis);
    (sample.dataset, sample.x0, tuning)
}

#[test]
fn residual_bootstrap_is_pivotal_on_homoscedastic_data() {
    let (ds, x0, tuning) = pivot_design(ErrorMode::HomoscedasticChiSq, 31);
    let mut config = BootstrapConfig::new(2000, tuning, 77);
    config.variant = Variant::Residual;
    config.studentize = Studentize::BootstrapScale;
    let report = confidence_interval(&ds, &x0, &config).unwrap();
    let n = report.replicates.len() as f64;
    let mean = report.replicates.iter().map(|r| r.t_star).sum::<f64>() / n;
    let sd = (report
        .replicates
        .iter()
        .map(|r| (r.t_star - mean).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    assert!((sd - 1.0).abs() < 0.15, "replicate sd = {sd}");
}

#[test]
fn corrected_paired_bootstrap_is_pivotal_on_homoscedastic_data() {
    let (ds, x0, tuning) = pivot_design(ErrorMode::HomoscedasticChiSq, 32);
    let mut config = BootstrapConfig::new(2000, tuning, 78);
    config.variant = Variant::PbModified;
    config.studentize = Studentize::BootstrapScale;
    let report = confidence_interval(&ds, &x0, &config).unwrap();
    let n = report.replicates.len() as f64;
    let mean = report.replicates.iter().map(|r| r.t_star).sum::<f64>() / n;
    let var = report
        .replicates
        .iter()
        .map(|r| (r.t_star - mean).powi(2))
        .sum::<f64>()
        / n;
    assert!(mean.abs() < 0.1, "replicate mean = {mean}");
    assert!((var - 1.0).abs() < 0.2, "replicate variance = {var}");
}

#[test]
fn single_replicate_interval_arithmetic() {
    let reps = vec![ReplicateStat {
        t_star: 2.0,
        projection_star: 0.0,
        scale_used: 1.0,
    }];
    let config = BootstrapConfig::new(1, TuningChoice::new(1, 1, 1), 0);
    let (lo, hi) = super::build_interval(0.5, 0.1, &reps, &config);
    assert!((lo - 0.3).abs() < 1e-12);
    assert!((hi - 0.7).abs() < 1e-12);
}

#[test]
fn symmetric_replicates_give_unit_halfwidth() {
    let mut reps = Vec::new();
    for _ in 0..1000 {
        for t in [-1.0, 1.0] {
            reps.push(ReplicateStat {
                t_star: t,
                projection_star: 0.0,
                scale_used: 1.0,
            });
        }
    }
    let config = BootstrapConfig::new(2000, TuningChoice::new(1, 1, 1), 0);
    let se = 0.37;
    let (lo, hi) = super::build_interval(1.0, se, &reps, &config);
    assert!((hi - lo - 2.0 * se).abs() < 1e-12);
    // Symmetrized intervals are invariant under t* -> -t*.
    for r in reps.iter_mut() {
        r.t_star = -r.t_star;
    }
    let (lo2, hi2) = super::build_interval(1.0, se, &reps, &config);
    assert_eq!((lo, hi), (lo2, hi2));
}

#[test]
fn noiseless_interval_collapses_to_the_point() {
    let (ds, x0) = spanned_dataset(18, 10, 2, 25);
    let tuning = TuningChoice::new(2, 2, 2);
    let config = BootstrapConfig::new(50, tuning, 5);
    let report = confidence_interval(&ds, &x0, &config).unwrap();
    assert!((report.interval.0 - report.point).abs() < 1e-8);
    assert!((report.interval.1 - report.point).abs() < 1e-8);
}

#[test]
fn percentile_interval_uses_studentized_quantiles() {
    let reps: Vec<ReplicateStat> = (1..=99)
        .map(|i| ReplicateStat {
            t_star: i as f64,
            projection_star: 0.0,
            scale_used: 1.0,
        })
        .collect();
    let mut config = BootstrapConfig::new(99, TuningChoice::new(1, 1, 1), 0);
    config.interval = IntervalKind::Percentile;
    config.level = 0.9;
    // alpha/2 = 0.05: order index ceil(100 * 0.05) = 5 -> t = 5;
    // 1 - alpha/2: ceil(100 * 0.95) = 95 -> t = 95.
    let (lo, hi) = super::build_interval(0.0, 1.0, &reps, &config);
    assert_eq!((lo, hi), (-95.0, -5.0));
}

#[test]
fn consistency_checks_guard_the_public_replicates() {
    let (ds, x0) = random_dataset(14, 9, 0.4, 26);
    let tuning = TuningChoice::new(2, 3, 2);
    let config = BootstrapConfig::new(1, tuning, 1);
    let cds = Arc::new(center(&ds));
    let fit_g = fpcr_fit(&cds, 2).unwrap();
    let u_ok = u_hat(fit_g.dataset(), fit_g.residuals()).unwrap();
    let mut rng = stream_rng(27, &[10]);
    assert!(pb_replicate(&ds, &x0, &u_ok, &fit_g, &config, &mut rng).is_ok());
    // Wrong correction curve fails the identity check.
    let mut u_bad = u_ok.clone();
    u_bad.values_mut()[0] += 1.0;
    assert!(matches!(
        pb_replicate(&ds, &x0, &u_bad, &fit_g, &config, &mut rng),
        Err(BootstrapError::InconsistentCorrection)
    ));
    // Wrong centering truncation is rejected up front.
    let fit_wrong = fpcr_fit(&cds, 3).unwrap();
    assert!(matches!(
        naive_replicate(&ds, &x0, &fit_wrong, &config, &mut rng),
        Err(BootstrapError::InvalidConfig(_))
    ));
    assert!(residual_replicate(&ds, &x0, &fit_g, &config, &mut rng).is_ok());
}

#[test]
fn construction_bias_vanishes_at_full_rank_and_h_equal_g() {
    let (ds, x0) = random_dataset(30, 8, 0.7, 28);
    // Full-rank centering: U = 0.
    let b_full = construction_bias(&ds, &x0, TuningChoice::new(2, 8, 8)).unwrap();
    assert!(b_full.abs() < 1e-8, "bias {b_full}");
    // h = g: the corrected and naive centers agree exactly.
    let b_eq = construction_bias(&ds, &x0, TuningChoice::new(2, 3, 3)).unwrap();
    assert!(b_eq.abs() < 1e-10, "bias {b_eq}");
    // h > g on noisy data: nonzero in general.
    let b_gap = construction_bias(&ds, &x0, TuningChoice::new(2, 5, 2)).unwrap();
    assert!(b_gap.abs() > 1e-6, "bias {b_gap}");
    // h < g rejected.
    assert!(construction_bias(&ds, &x0, TuningChoice::new(2, 2, 3)).is_err());
}

#[test]
fn construction_bias_is_scale_invariant() {
    let (ds, x0) = random_dataset(24, 12, 0.8, 29);
    let cds = Arc::new(center(&ds));
    let tuning = TuningChoice::new(2, 4, 2);
    let b1 = construction_bias(&cds, &x0, tuning).unwrap();
    let scaled = Arc::new(
        cds.with_responses(cds.responses().iter().map(|y| 4.2 * y).collect())
            .unwrap(),
    );
    let b2 = construction_bias(&scaled, &x0, tuning).unwrap();
    assert!((b1 - b2).abs() < 1e-9 * (1.0 + b1.abs()), "{b1} vs {b2}");
}

#[test]
fn construction_bias_matches_direct_evaluation_at_h_equal_g_center() {
    // At h = g the diagnostic equals the studentized inverse-covariance
    // residual form evaluated directly, which is exactly zero.
    let (ds, x0) = random_dataset(20, 10, 0.5, 30);
    let cds = Arc::new(center(&ds));
    let tuning = TuningChoice::new(2, 3, 3);
    let fit = fpcr_fit(&cds, 3).unwrap();
    let gamma = sample_covariance(&cds).unwrap();
    let delta = cross_covariance(&cds).unwrap();
    let mut resid = delta.clone();
    resid.axpy(-1.0, &apply(&gamma, fit.beta_hat()).unwrap()).unwrap();
    let inv = truncated_inverse_apply(fit.eigen(), 3, &resid).unwrap();
    let mut x0c = x0.clone();
    x0c.axpy(-1.0, cds.x_bar()).unwrap();
    let lam = lambda_hat(&cds, &fpcr_fit(&cds, 2).unwrap().residuals().to_vec()).unwrap();
    let s = scaling_s_hat(fit.eigen(), &lam, 3, &x0c).unwrap();
    let direct = (cds.len() as f64 / s).sqrt() * inner_product(&inv, &x0c).unwrap();
    let diag = construction_bias(&cds, &x0, tuning).unwrap();
    assert!((diag - direct).abs() < 1e-9 * (1.0 + direct.abs()));
}

#[test]
fn sigma_tau_plugin_arithmetic() {
    assert_eq!(sigma_tau(1.0, &[1.0], &[1.0], &[1.0]).unwrap(), 0.0);
    let s = sigma_tau(2.0, &[1.0], &[1.0], &[1.0]).unwrap();
    assert!((s - 1.0).abs() < 1e-12);
    // Zero slope removes the first summand.
    let tau = 3.0;
    let s0 = sigma_tau(tau, &[0.5, 0.25], &[1.0, 1.0], &[0.0, 0.0]).unwrap();
    assert!((s0 * s0 - (1.0 - 1.0 / tau)).abs() < 1e-12);
    assert!(matches!(
        sigma_tau(0.5, &[1.0], &[1.0], &[1.0]),
        Err(BootstrapError::TauDomain(_))
    ));
    assert!(sigma_tau(2.0, &[1.0], &[0.0], &[1.0]).is_err());
}

#[test]
fn warnings_are_attached_for_backwards_tuning() {
    let (ds, x0) = random_dataset(20, 10, 0.5, 33);
    let tuning = TuningChoice::new(2, 2, 3);
    let config = BootstrapConfig::new(10, tuning, 4);
    let report = confidence_interval(&ds, &x0, &config).unwrap();
    assert!(report.warnings.iter().any(|w| w.contains("h=2 < g=3")));
}

#[test]
fn eigen_cache_agrees_with_standalone_scaling() {
    // Dual route: the engine's score-space data scaling equals the public
    // grid-space quadratic form.
    let (ds, x0) = random_dataset(24, 14, 0.6, 34);
    let tuning = TuningChoice::new(3, 4, 3);
    let prep = Prepared::new(&ds, std::slice::from_ref(&x0), tuning).unwrap();
    let cds = Arc::new(center(&ds));
    let fit = fpcr_fit(&cds, tuning.h).unwrap();
    let fit_k = fpcr_fit(&cds, tuning.k).unwrap();
    let lam = lambda_hat(&cds, fit_k.residuals()).unwrap();
    let mut x0c = x0.clone();
    x0c.axpy(-1.0, cds.x_bar()).unwrap();
    let s_grid = scaling_s_hat(fit.eigen(), &lam, tuning.h, &x0c).unwrap();
    assert!(
        (prep.targets[0].s_data - s_grid).abs() < 1e-9 * (1.0 + s_grid),
        "{} vs {s_grid}",
        prep.targets[0].s_data
    );
}

#[allow(dead_code)]
fn eig_rank(e: &EigenSystem) -> usize {
    e.rank()
}
