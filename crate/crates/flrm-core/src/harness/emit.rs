//! Deterministic CSV and SVG emission for experiment results.

use crate::numfmt::fmt10;

use super::{HarnessError, ResultRow};

pub const CSV_HEADER: &str = "scenario_id,n,a,b,nu,error_mode,method,k,h,g,reps,coverage,mean_width,rejection_rate,mc_se,failed_reps";

fn opt(v: Option<f64>) -> String {
    v.map(fmt10).unwrap_or_default()
}

/// Fixed-schema CSV with ten-significant-digit numbers; byte-identical for
/// identical rows.
pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.scenario_id,
            r.n,
            fmt10(r.a),
            fmt10(r.b),
            opt(r.nu),
            r.error_mode,
            r.method,
            r.k,
            r.h,
            r.g,
            r.reps,
            opt(r.coverage),
            opt(r.mean_width),
            opt(r.rejection_rate),
            fmt10(r.mc_se),
            r.failed_reps,
        ));
    }
    out
}

/// Parse a result CSV back into rows (inverse of [`rows_to_csv`] at the
/// emitted precision).
pub fn parse_rows_csv(text: &str) -> Result<Vec<ResultRow>, HarnessError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        _ => {
            return Err(HarnessError::CsvParse {
                line: 1,
                message: "missing or wrong header".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 16 {
            return Err(HarnessError::CsvParse {
                line: idx + 1,
                message: format!("expected 16 fields, got {}", fields.len()),
            });
        }
        let perr = |message: String| HarnessError::CsvParse {
            line: idx + 1,
            message,
        };
        let f = |s: &str| -> Result<f64, HarnessError> {
            s.parse().map_err(|e| perr(format!("bad number '{s}': {e}")))
        };
        let u = |s: &str| -> Result<usize, HarnessError> {
            s.parse().map_err(|e| perr(format!("bad integer '{s}': {e}")))
        };
        let o = |s: &str| -> Result<Option<f64>, HarnessError> {
            if s.is_empty() {
                Ok(None)
            } else {
                f(s).map(Some)
            }
        };
        rows.push(ResultRow {
            scenario_id: fields[0].to_string(),
            n: u(fields[1])?,
            a: f(fields[2])?,
            b: f(fields[3])?,
            nu: o(fields[4])?,
            error_mode: fields[5].to_string(),
            method: fields[6].to_string(),
            k: u(fields[7])?,
            h: u(fields[8])?,
            g: u(fields[9])?,
            reps: u(fields[10])?,
            coverage: o(fields[11])?,
            mean_width: o(fields[12])?,
            rejection_rate: o(fields[13])?,
            mc_se: f(fields[14])?,
            failed_reps: u(fields[15])?,
        });
    }
    Ok(rows)
}

/// One plotted series.
#[derive(Debug, Clone)]
pub struct PlotSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = ["#000000", "#2ca02c", "#d62728", "#1f77b4", "#ff7f0e", "#9467bd"];

/// Minimal deterministic SVG line plot: one polyline per series with
/// square markers, linear axes, and a legend.
pub fn svg_line_plot(title: &str, x_label: &str, y_label: &str, series: &[PlotSeries]) -> String {
    let (w, h) = (640.0, 420.0);
    let (ml, mr, mt, mb) = (64.0, 24.0, 40.0, 48.0);
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().cloned()).collect();
    let (mut x_lo, mut x_hi) = all
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.0), hi.max(p.0))
        });
    let (mut y_lo, mut y_hi) = all
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.1), hi.max(p.1))
        });
    if all.is_empty() {
        (x_lo, x_hi, y_lo, y_hi) = (0.0, 1.0, 0.0, 1.0);
    }
    if x_hi <= x_lo {
        x_hi = x_lo + 1.0;
    }
    if y_hi <= y_lo {
        y_hi = y_lo + 1.0;
    }
    let pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;
    let sx = |x: f64| ml + (x - x_lo) / (x_hi - x_lo) * (w - ml - mr);
    let sy = |y: f64| h - mb - (y - y_lo) / (y_hi - y_lo) * (h - mt - mb);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{title}</text>\n",
        w / 2.0
    ));
    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n",
        h - mb,
        w - mr
    ));
    svg.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>\n",
        h - mb
    ));
    for i in 0..=4 {
        let fx = x_lo + (x_hi - x_lo) * i as f64 / 4.0;
        let fy = y_lo + (y_hi - y_lo) * i as f64 / 4.0;
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            sx(fx),
            h - mb + 16.0,
            fmt_tick(fx)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
            ml - 6.0,
            sy(fy) + 4.0,
            fmt_tick(fy)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{x_label}</text>\n",
        (ml + w - mr) / 2.0,
        h - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">{y_label}</text>\n",
        (mt + h - mb) / 2.0
    ));
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{},{}", fmt_tick(sx(x)), fmt_tick(sy(y))))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            pts.join(" ")
        ));
        for &(x, y) in &s.points {
            svg.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"5\" height=\"5\" fill=\"{color}\"/>\n",
                fmt_tick(sx(x) - 2.5),
                fmt_tick(sy(y) - 2.5)
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
            w - mr - 150.0,
            mt + 16.0 * i as f64 + 4.0,
            s.label
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn fmt_tick(x: f64) -> String {
    crate::numfmt::fmt_sig(x, 6)
}
