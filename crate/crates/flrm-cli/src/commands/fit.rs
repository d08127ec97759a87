//! `flrm fit`: estimate the slope and write it per grid point.

use std::path::Path;

use flrm_core::flrm::fpcr_fit;
use flrm_core::numfmt::fmt10;

use crate::errors::{numerical, CliResult};
use crate::{io, tuning, CommonArgs, TuningArgs};

pub fn run(
    data: &Path,
    y: Option<&Path>,
    grid: Option<&Path>,
    tuning_args: &TuningArgs,
    common: &CommonArgs,
) -> CliResult<()> {
    let seed = crate::resolve_seed(common.seed);
    let dataset = io::load_dataset(data, y, grid)?;
    let tuning = tuning::resolve(tuning_args, &dataset, seed)?;
    let fit = fpcr_fit(&dataset, tuning.h).map_err(numerical)?;

    let residuals = fit.residuals();
    let n = residuals.len() as f64;
    let mean = residuals.iter().sum::<f64>() / n;
    let sd = (residuals.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n).sqrt();
    let min = residuals.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = residuals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    println!("{{");
    println!("  \"n\": {},", dataset.len());
    println!("  \"grid_points\": {},", dataset.grid().len());
    println!("  \"k\": {}, \"h\": {}, \"g\": {},", tuning.k, tuning.h, tuning.g);
    println!("  \"rank\": {},", fit.eigen().rank());
    let evs: Vec<String> = fit
        .eigen()
        .eigenvalues()
        .iter()
        .take(fit.eigen().rank().min(12))
        .map(|v| fmt10(*v))
        .collect();
    println!("  \"eigenvalues\": [{}],", evs.join(", "));
    let coeffs: Vec<String> = fit.coeffs().iter().map(|c| fmt10(*c)).collect();
    println!("  \"slope_coefficients\": [{}],", coeffs.join(", "));
    println!(
        "  \"residuals\": {{\"mean\": {}, \"sd\": {}, \"min\": {}, \"max\": {}}},",
        fmt10(mean),
        fmt10(sd),
        fmt10(min),
        fmt10(max)
    );
    println!("  \"y_bar\": {}", fmt10(fit.dataset().y_bar()));
    println!("}}");

    let mut csv = String::from("t,beta_hat\n");
    for (t, b) in fit
        .dataset()
        .grid()
        .points()
        .iter()
        .zip(fit.beta_hat().values())
    {
        csv.push_str(&format!("{},{}\n", fmt10(*t), fmt10(*b)));
    }
    let path = common.out.join("beta_hat.csv");
    io::write_file(&path, &csv)?;
    println!("wrote {}", path.display());
    Ok(())
}
