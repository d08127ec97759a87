//! `flrm ci`: bootstrap confidence interval for a slope projection.

use std::path::Path;

use flrm_core::bootstrap::{
    BootstrapConfig, IntervalKind, ProjectionInference, Studentize, Variant,
};
use flrm_core::numfmt::fmt10;

use crate::errors::{numerical, CliError, CliResult};
use crate::{io, tuning, BootArgs, CommonArgs, TuningArgs};

pub struct VariantSpec {
    pub name: &'static str,
    pub bootstrap: Option<(Variant, Studentize)>,
}

pub fn parse_variant(name: &str) -> CliResult<VariantSpec> {
    let spec = match name {
        "clt" => VariantSpec { name: "clt", bootstrap: None },
        "rb" => VariantSpec {
            name: "rb",
            bootstrap: Some((Variant::Residual, Studentize::BootstrapScale)),
        },
        "pb" => VariantSpec {
            name: "pb",
            bootstrap: Some((Variant::PbModified, Studentize::DataScale)),
        },
        "pb_std" => VariantSpec {
            name: "pb_std",
            bootstrap: Some((Variant::PbModified, Studentize::BootstrapScale)),
        },
        "naive" => VariantSpec {
            name: "naive",
            bootstrap: Some((Variant::Naive, Studentize::DataScale)),
        },
        "naive_std" => VariantSpec {
            name: "naive_std",
            bootstrap: Some((Variant::Naive, Studentize::BootstrapScale)),
        },
        other => return Err(CliError::usage(format!("unknown variant '{other}'"))),
    };
    Ok(spec)
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    data: &Path,
    x0_path: &Path,
    y: Option<&Path>,
    grid: Option<&Path>,
    variant: &str,
    interval_kind: &str,
    mean_response: bool,
    boot: &BootArgs,
    tuning_args: &TuningArgs,
    common: &CommonArgs,
) -> CliResult<()> {
    let seed = crate::resolve_seed(common.seed);
    let dataset = io::load_dataset(data, y, grid)?;
    let x0s = io::load_curves(x0_path, dataset.grid())?;
    if x0s.len() != 1 {
        return Err(CliError::data(format!(
            "{}: expected exactly one projection regressor, found {}",
            x0_path.display(),
            x0s.len()
        )));
    }
    let spec = parse_variant(variant)?;
    let tuning = tuning::resolve(tuning_args, &dataset, seed)?;
    let inference = ProjectionInference::new(&dataset, &x0s[0], tuning).map_err(numerical)?;

    let shift = if mean_response {
        inference.fit().dataset().y_bar()
    } else {
        0.0
    };
    let label = if mean_response { "mean response" } else { "centered projection" };

    let (report_line, csv_row, warnings) = match spec.bootstrap {
        None => {
            let (lo, hi) = inference.clt_interval(boot.level);
            let line = format!(
                "{label}: {}\nse: {}\n{}% normal-approximation interval: [{}, {}]",
                fmt10(inference.point() + shift),
                fmt10(inference.se()),
                boot.level * 100.0,
                fmt10(lo + shift),
                fmt10(hi + shift)
            );
            let row = CsvRow {
                variant: spec.name,
                interval: "normal".to_string(),
                point: inference.point() + shift,
                se: inference.se(),
                lo: lo + shift,
                hi: hi + shift,
                level: boot.level,
                b: 0,
                b_eff: 0,
                degenerate: 0,
                tuning,
                seed,
            };
            (line, row, Vec::new())
        }
        Some((variant, studentize)) => {
            let config = BootstrapConfig {
                b: boot.b,
                tuning,
                variant,
                studentize,
                interval: match interval_kind {
                    "symmetrized" => IntervalKind::Symmetrized,
                    "percentile" => IntervalKind::Percentile,
                    other => return Err(CliError::usage(format!("unknown interval kind '{other}'"))),
                },
                level: boot.level,
                seed,
            };
            let report = inference.report(&config).map_err(numerical)?;
            let line = format!(
                "{label}: {}\nse: {}\n{}% {} {} interval: [{}, {}]\nreplicates: {} effective of {} ({} degenerate)",
                fmt10(report.point + shift),
                fmt10(report.se),
                boot.level * 100.0,
                spec.name,
                interval_kind,
                fmt10(report.interval.0 + shift),
                fmt10(report.interval.1 + shift),
                report.b_effective(),
                boot.b,
                report.degenerate_count
            );
            let row = CsvRow {
                variant: spec.name,
                interval: interval_kind.to_string(),
                point: report.point + shift,
                se: report.se,
                lo: report.interval.0 + shift,
                hi: report.interval.1 + shift,
                level: boot.level,
                b: boot.b,
                b_eff: report.b_effective(),
                degenerate: report.degenerate_count,
                tuning,
                seed,
            };
            (line, row, report.warnings)
        }
    };
    println!("{report_line}");
    for w in &warnings {
        println!("warning: {w}");
    }

    let csv = format!(
        "variant,interval,point,se,lo,hi,level,B,B_eff,degenerate,k,h,g,seed\n{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        csv_row.variant,
        csv_row.interval,
        fmt10(csv_row.point),
        fmt10(csv_row.se),
        fmt10(csv_row.lo),
        fmt10(csv_row.hi),
        fmt10(csv_row.level),
        csv_row.b,
        csv_row.b_eff,
        csv_row.degenerate,
        csv_row.tuning.k,
        csv_row.tuning.h,
        csv_row.tuning.g,
        csv_row.seed,
    );
    let path = common.out.join("ci_report.csv");
    io::write_file(&path, &csv)?;
    println!("wrote {}", path.display());
    Ok(())
}

struct CsvRow {
    variant: &'static str,
    interval: String,
    point: f64,
    se: f64,
    lo: f64,
    hi: f64,
    level: f64,
    b: usize,
    b_eff: usize,
    degenerate: usize,
    tuning: flrm_core::flrm::TuningChoice,
    seed: u64,
}
