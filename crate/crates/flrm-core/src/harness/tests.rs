use super::*;
use crate::dgp::ErrorMode;

fn tiny_plan(error_mode: ErrorMode, reps: usize, b_boot: usize) -> ExperimentPlan {
    ExperimentPlan {
        scenarios: vec![ScenarioSpec {
            label: "tiny".into(),
            dgp: DgpSpec {
                n: 30,
                j_basis: 8,
                error_mode,
                ..DgpSpec::default()
            },
        }],
        methods: vec![Method::Clt, Method::PbStd],
        tuning: TuningPolicy::Explicit(vec![TuningChoice::new(2, 2, 2)]),
        reps,
        b_boot,
        level: 0.95,
        master_seed: 7,
    }
}

#[test]
fn zero_error_variance_gives_full_coverage_and_tiny_width() {
    // Full-rank truncation makes the noiseless fit exact, so every
    // interval collapses onto the true projection.
    let mut plan = tiny_plan(ErrorMode::None, 5, 10);
    plan.tuning = TuningPolicy::Explicit(vec![TuningChoice::new(8, 8, 8)]);
    let rows = run_coverage(&plan).unwrap();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert_eq!(row.coverage, Some(1.0));
        assert!(row.mean_width.unwrap() < 1e-8, "width {:?}", row.mean_width);
    }
}

#[test]
fn single_rep_coverage_is_binary() {
    let plan = ExperimentPlan {
        reps: 1,
        ..tiny_plan(ErrorMode::HomoscedasticChiSq, 1, 20)
    };
    let rows = run_coverage(&plan).unwrap();
    for row in rows {
        let c = row.coverage.unwrap();
        assert!(c == 0.0 || c == 1.0);
    }
}

#[test]
fn coverage_runs_are_deterministic() {
    let plan = tiny_plan(ErrorMode::HeteroscedasticChiSq, 6, 15);
    let a = run_coverage(&plan).unwrap();
    let b = run_coverage(&plan).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!(x.approx_eq(y));
        assert_eq!(x.coverage, y.coverage);
        assert_eq!(x.mean_width, y.mean_width);
    }
}

#[test]
fn plan_validation_rejects_nonsense() {
    let mut plan = tiny_plan(ErrorMode::None, 0, 10);
    assert!(matches!(run_coverage(&plan), Err(HarnessError::InvalidPlan(_))));
    plan.reps = 2;
    plan.methods.clear();
    assert!(matches!(run_coverage(&plan), Err(HarnessError::InvalidPlan(_))));
}

#[test]
fn bias_samples_vanish_at_full_rank_centering() {
    let plan = BiasPlan {
        dgp: DgpSpec {
            n: 40,
            j_basis: 6,
            ..DgpSpec::default()
        },
        tunings: vec![TuningChoice::new(2, 6, 6)],
        reps: 10,
        master_seed: 3,
    };
    let out = run_bias_density(&plan).unwrap();
    assert_eq!(out.len(), 1);
    for s in &out[0].samples {
        assert!(s.abs() < 1e-8, "sample {s}");
    }
}

#[test]
fn bias_spread_grows_with_the_truncation_ratio() {
    let plan = BiasPlan {
        dgp: DgpSpec {
            n: 150,
            error_mode: ErrorMode::HeteroscedasticChiSq,
            ..DgpSpec::default()
        },
        tunings: vec![
            TuningChoice::new(4, 4, 4),
            TuningChoice::new(4, 6, 4),
            TuningChoice::new(4, 8, 4),
        ],
        reps: 60,
        master_seed: 5,
    };
    let out = run_bias_density(&plan).unwrap();
    assert_eq!(out.len(), 3);
    assert!(out[0].sd < 1e-8);
    assert!(out[1].sd > out[0].sd);
    assert!(out[2].sd > out[1].sd, "{} vs {}", out[2].sd, out[1].sd);
    // Determinism.
    let again = run_bias_density(&plan).unwrap();
    assert_eq!(out[2].samples, again[2].samples);
}

#[test]
fn clt_check_is_sane_on_a_small_run() {
    let plan = CltPlan {
        scenarios: vec![ScenarioSpec {
            label: "clt".into(),
            dgp: DgpSpec {
                n: 150,
                error_mode: ErrorMode::HomoscedasticChiSq,
                ..DgpSpec::default()
            },
        }],
        tuning: TuningPolicy::RuleOfThumb { fixed_k: None },
        reps: 200,
        master_seed: 11,
    };
    let rows = run_clt_check(&plan).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].ks_distance < 0.15, "ks {}", rows[0].ks_distance);
    // A single rep gives a trivially large distance.
    let tiny = CltPlan { reps: 1, ..plan };
    let rows = run_clt_check(&tiny).unwrap();
    assert!(rows[0].ks_distance > 0.25);
}

#[test]
fn ks_distance_matches_hand_computation() {
    // Sample {0}: sup |F_n - Phi| = 0.5 at the atom.
    assert!((ks_distance_to_standard_normal(&[0.0]) - 0.5).abs() < 1e-12);
    let d = ks_distance_to_standard_normal(&[-1.0, 0.0, 1.0]);
    // Hand computation: max deviation at the atoms is Phi(1) - 2/3.
    use statrs::distribution::ContinuousCDF;
    let phi1 = statrs::distribution::Normal::new(0.0, 1.0).unwrap().cdf(1.0);
    assert!((d - (phi1 - 2.0 / 3.0)).abs() < 1e-12, "d = {d}");
}

#[test]
fn csv_round_trips_and_is_stable() {
    let rows = vec![
        ResultRow {
            scenario_id: "s1".into(),
            n: 200,
            a: 2.5,
            b: 5.5,
            nu: Some(5.0),
            error_mode: "heteroscedastic".into(),
            method: "pb_std".into(),
            k: 4,
            h: 4,
            g: 4,
            reps: 500,
            coverage: Some(0.9423357),
            mean_width: Some(1.25e-3),
            rejection_rate: None,
            mc_se: 0.0104,
            failed_reps: 0,
        },
        ResultRow {
            scenario_id: "s2".into(),
            n: 50,
            a: 2.5,
            b: 3.5,
            nu: None,
            error_mode: "none".into(),
            method: "test_max_enforced".into(),
            k: 2,
            h: 2,
            g: 2,
            reps: 100,
            coverage: None,
            mean_width: None,
            rejection_rate: Some(1.0 / 3.0),
            mc_se: 0.047,
            failed_reps: 2,
        },
    ];
    let csv = rows_to_csv(&rows);
    let parsed = parse_rows_csv(&csv).unwrap();
    assert_eq!(parsed.len(), rows.len());
    for (p, r) in parsed.iter().zip(&rows) {
        assert!(p.approx_eq(r), "{p:?} vs {r:?}");
    }
    assert_eq!(csv, rows_to_csv(&parsed));
    // Empty rows emit a header-only file.
    assert_eq!(rows_to_csv(&[]), format!("{CSV_HEADER}\n"));
    assert!(parse_rows_csv("").is_err());
}

#[test]
fn svg_plot_contains_the_series() {
    let svg = svg_line_plot(
        "coverage",
        "h",
        "rate",
        &[PlotSeries {
            label: "pb_std".into(),
            points: vec![(1.0, 0.9), (2.0, 0.95), (3.0, 0.94)],
        }],
    );
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("pb_std"));
    assert!(svg.contains("polyline"));
    assert!(svg.ends_with("</svg>\n"));
}

#[test]
fn significance_respects_monte_carlo_error() {
    let mut a = ResultRow {
        scenario_id: "s".into(),
        n: 100,
        a: 2.5,
        b: 5.5,
        nu: None,
        error_mode: "none".into(),
        method: "pb".into(),
        k: 1,
        h: 1,
        g: 1,
        reps: 100,
        coverage: Some(0.95),
        mean_width: None,
        rejection_rate: None,
        mc_se: 0.02,
        failed_reps: 0,
    };
    let mut b = a.clone();
    b.coverage = Some(0.93);
    assert_eq!(significant_difference(&a, &b), Some(false));
    b.coverage = Some(0.80);
    assert_eq!(significant_difference(&a, &b), Some(true));
    a.coverage = None;
    assert_eq!(significant_difference(&a, &b), None);
}

#[test]
fn power_study_ranks_null_below_alternative() {
    let plan = PowerPlan {
        dgp: DgpSpec {
            n: 50,
            a: 2.5,
            b: 3.5,
            slope_scale: 50.0,
            nu: None,
            error_mode: ErrorMode::HeteroscedasticChiSq,
            ..DgpSpec::default()
        },
        p_grid: vec![0.0, 1.0],
        enforce: vec![true],
        statistic: StatisticKind::Max,
        tuning: TuningPolicy::RuleOfThumb { fixed_k: None },
        reps: 30,
        b_boot: 50,
        level: 0.05,
        master_seed: 13,
    };
    let rows = run_power(&plan).unwrap();
    assert_eq!(rows.len(), 2);
    let r0 = rows[0].rejection_rate.unwrap();
    let r1 = rows[1].rejection_rate.unwrap();
    assert!(r0 <= 0.2, "size {r0}");
    assert!(r1 >= 0.8, "power {r1}");
}
