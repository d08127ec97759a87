//! `flrm simulate`: run an experiment plan and emit CSV and SVG files.

use std::path::Path;

use flrm_core::harness::{
    self, rows_to_csv, svg_line_plot, PlotSeries, ResultRow,
};
use flrm_core::numfmt::fmt10;

use crate::cfg::{self, Plan};
use crate::errors::{numerical, CliResult};
use crate::{io, CommonArgs};

pub fn run(plan_path: &Path, common: &CommonArgs) -> CliResult<()> {
    let plan = cfg::load_plan(plan_path, common.seed)?;
    match plan {
        Plan::Coverage(plan) => {
            let rows = harness::run_coverage(&plan).map_err(numerical)?;
            write_rows(&rows, common)?;
            write_rate_plots(&rows, common, "h", |r| r.h as f64)?;
            Ok(())
        }
        Plan::Power(plan) => {
            let rows = harness::run_power(&plan).map_err(numerical)?;
            write_rows(&rows, common)?;
            // Rejection against the alternative proportion, one series per
            // enforcement mode; rows come back in (p x enforce) order.
            let mut series: Vec<PlotSeries> = Vec::new();
            for (i, row) in rows.iter().enumerate() {
                let p = plan.p_grid[i / plan.enforce.len()];
                let label = row.method.clone();
                let y = row.rejection_rate.unwrap_or(f64::NAN);
                match series.iter_mut().find(|s| s.label == label) {
                    Some(s) => s.points.push((p, y)),
                    None => series.push(PlotSeries {
                        label,
                        points: vec![(p, y)],
                    }),
                }
            }
            let svg = svg_line_plot("rejection rate", "alternative proportion", "rate", &series);
            let path = common.out.join("rejection.svg");
            io::write_file(&path, &svg)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Plan::Bias(plan) => {
            let densities = harness::run_bias_density(&plan).map_err(numerical)?;
            let mut samples_csv = String::from("ratio,k,h,g,rep,bias\n");
            let mut density_csv = String::from("ratio,bin_mid,density\n");
            let mut summary_csv = String::from("ratio,k,h,g,reps,sd,failed_reps\n");
            let mut series = Vec::new();
            for d in &densities {
                for (rep, s) in d.samples.iter().enumerate() {
                    samples_csv.push_str(&format!(
                        "{},{},{},{},{rep},{}\n",
                        fmt10(d.ratio),
                        d.tuning.k,
                        d.tuning.h,
                        d.tuning.g,
                        fmt10(*s)
                    ));
                }
                for &(mid, dens) in &d.bins {
                    density_csv.push_str(&format!(
                        "{},{},{}\n",
                        fmt10(d.ratio),
                        fmt10(mid),
                        fmt10(dens)
                    ));
                }
                summary_csv.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    fmt10(d.ratio),
                    d.tuning.k,
                    d.tuning.h,
                    d.tuning.g,
                    d.samples.len(),
                    fmt10(d.sd),
                    d.failed_reps
                ));
                series.push(PlotSeries {
                    label: format!("h/g = {}", fmt10(d.ratio)),
                    points: d.bins.clone(),
                });
                println!(
                    "h/g = {}: spread {} over {} samples",
                    fmt10(d.ratio),
                    fmt10(d.sd),
                    d.samples.len()
                );
            }
            for (name, text) in [
                ("bias_samples.csv", samples_csv),
                ("bias_density.csv", density_csv),
                ("bias_summary.csv", summary_csv),
            ] {
                let path = common.out.join(name);
                io::write_file(&path, &text)?;
                println!("wrote {}", path.display());
            }
            let svg = svg_line_plot("construction-bias density", "bias", "density", &series);
            let path = common.out.join("bias_density.svg");
            io::write_file(&path, &svg)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Plan::Clt(plan) => {
            let rows = harness::run_clt_check(&plan).map_err(numerical)?;
            let mut csv = String::from("scenario_id,k,h,g,reps,ks_distance,failed_reps\n");
            for r in &rows {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    r.scenario_id,
                    r.tuning.k,
                    r.tuning.h,
                    r.tuning.g,
                    r.reps,
                    fmt10(r.ks_distance),
                    r.failed_reps
                ));
                println!(
                    "{}: KS distance to standard normal {} over {} repetitions",
                    r.scenario_id,
                    fmt10(r.ks_distance),
                    r.reps
                );
            }
            let path = common.out.join("clt_check.csv");
            io::write_file(&path, &csv)?;
            println!("wrote {}", path.display());
            Ok(())
        }
    }
}

fn write_rows(rows: &[ResultRow], common: &CommonArgs) -> CliResult<()> {
    let csv = rows_to_csv(rows);
    let path = common.out.join("results.csv");
    io::write_file(&path, &csv)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Coverage and width against a tuning axis, one series per method.
fn write_rate_plots(
    rows: &[ResultRow],
    common: &CommonArgs,
    x_label: &str,
    x_of: impl Fn(&ResultRow) -> f64,
) -> CliResult<()> {
    for (field, name, file) in [
        (0usize, "coverage", "coverage.svg"),
        (1usize, "mean width", "width.svg"),
    ] {
        let mut series: Vec<PlotSeries> = Vec::new();
        for row in rows {
            let y = match field {
                0 => row.coverage,
                _ => row.mean_width,
            };
            let Some(y) = y else { continue };
            let label = format!("{} ({})", row.method, row.scenario_id);
            let x = x_of(row);
            match series.iter_mut().find(|s| s.label == label) {
                Some(s) => s.points.push((x, y)),
                None => series.push(PlotSeries {
                    label,
                    points: vec![(x, y)],
                }),
            }
        }
        if series.is_empty() {
            continue;
        }
        let svg = svg_line_plot(name, x_label, name, &series);
        let path = common.out.join(file);
        io::write_file(&path, &svg)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
