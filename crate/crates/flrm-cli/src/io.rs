//! CSV ingestion for curves, responses, grids, and target regressors, and
//! numeric output helpers.

use std::path::Path;
use std::sync::Arc;

use flrm_core::flrm::FunctionalDataset;
use flrm_core::hilbert::{Curve, Grid};

use crate::errors::{CliError, CliResult};

/// Parse a numeric CSV into rows, reporting 1-based row/column coordinates
/// on failure. Blank lines are skipped; a leading header line of
/// non-numeric cells is tolerated and dropped.
pub fn read_numeric_csv(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (row_idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let cells: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let mut parsed = Vec::with_capacity(cells.len());
        let mut bad: Option<(usize, String)> = None;
        for (col_idx, cell) in cells.iter().enumerate() {
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => parsed.push(v),
                Ok(v) => {
                    bad = Some((col_idx, format!("non-finite value {v}")));
                    break;
                }
                Err(_) => {
                    bad = Some((col_idx, format!("non-numeric cell '{cell}'")));
                    break;
                }
            }
        }
        if let Some((col_idx, message)) = bad {
            // Tolerate a single header line at the top.
            if rows.is_empty() && row_idx == 0 {
                continue;
            }
            return Err(CliError::data(format!(
                "{}: row {}, column {}: {message}",
                path.display(),
                row_idx + 1,
                col_idx + 1
            )));
        }
        if let Some(w) = width {
            if parsed.len() != w {
                return Err(CliError::data(format!(
                    "{}: row {} has {} columns, expected {w}",
                    path.display(),
                    row_idx + 1,
                    parsed.len()
                )));
            }
        } else {
            width = Some(parsed.len());
        }
        rows.push(parsed);
    }
    if rows.is_empty() {
        return Err(CliError::data(format!("{}: no data rows", path.display())));
    }
    Ok(rows)
}

/// Grid from an optional abscissa file; otherwise the uniform unit grid
/// with rectangle weights.
pub fn load_grid(grid_path: Option<&Path>, m: usize) -> CliResult<Arc<Grid>> {
    match grid_path {
        None => Grid::uniform_unit(m).map_err(|e| CliError::data(e.to_string())),
        Some(path) => {
            let rows = read_numeric_csv(path)?;
            let points: Vec<f64> = if rows.len() == 1 {
                rows.into_iter().next().expect("one row")
            } else {
                rows.into_iter()
                    .map(|r| {
                        if r.len() == 1 {
                            Ok(r[0])
                        } else {
                            Err(CliError::data(format!(
                                "{}: grid file must be a single row or column",
                                path.display()
                            )))
                        }
                    })
                    .collect::<CliResult<Vec<f64>>>()?
            };
            if points.len() != m {
                return Err(CliError::data(format!(
                    "{}: grid has {} points but curves have {m} columns",
                    path.display(),
                    points.len()
                )));
            }
            Grid::from_points(points).map_err(|e| CliError::data(e.to_string()))
        }
    }
}

/// Load the paired dataset: curves CSV (one row per subject) with the
/// response in the final column, or in a separate single-column file.
pub fn load_dataset(
    data_path: &Path,
    y_path: Option<&Path>,
    grid_path: Option<&Path>,
) -> CliResult<Arc<FunctionalDataset>> {
    let rows = read_numeric_csv(data_path)?;
    let (curve_rows, responses): (Vec<Vec<f64>>, Vec<f64>) = match y_path {
        Some(yp) => {
            let y_rows = read_numeric_csv(yp)?;
            let y: Vec<f64> = y_rows
                .iter()
                .map(|r| {
                    if r.len() == 1 {
                        Ok(r[0])
                    } else {
                        Err(CliError::data(format!(
                            "{}: response file must have one value per row",
                            yp.display()
                        )))
                    }
                })
                .collect::<CliResult<Vec<f64>>>()?;
            if y.len() != rows.len() {
                return Err(CliError::data(format!(
                    "{} rows of curves but {} responses",
                    rows.len(),
                    y.len()
                )));
            }
            (rows, y)
        }
        None => {
            if rows[0].len() < 2 {
                return Err(CliError::data(
                    "curves file needs at least one grid column plus the response column",
                ));
            }
            let mut curves = Vec::with_capacity(rows.len());
            let mut y = Vec::with_capacity(rows.len());
            for mut r in rows {
                y.push(r.pop().expect("nonempty row"));
                curves.push(r);
            }
            (curves, y)
        }
    };
    let m = curve_rows[0].len();
    let grid = load_grid(grid_path, m)?;
    let curves: Vec<Curve> = curve_rows
        .into_iter()
        .map(|values| Curve::new(grid.clone(), values).map_err(|e| CliError::data(e.to_string())))
        .collect::<CliResult<Vec<Curve>>>()?;
    FunctionalDataset::new(curves, responses)
        .map(Arc::new)
        .map_err(|e| CliError::data(e.to_string()))
}

/// Load one or more curves (no response column) on a given grid.
pub fn load_curves(path: &Path, grid: &Arc<Grid>) -> CliResult<Vec<Curve>> {
    let rows = read_numeric_csv(path)?;
    rows.into_iter()
        .map(|values| {
            if values.len() != grid.len() {
                return Err(CliError::data(format!(
                    "{}: curve has {} values but the grid has {}",
                    path.display(),
                    values.len(),
                    grid.len()
                )));
            }
            Curve::new(grid.clone(), values).map_err(|e| CliError::data(e.to_string()))
        })
        .collect()
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::data(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, contents)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))
}
