//! `flrm`: inference for functional linear regression with scalar
//! response. Fits truncated principal-component regressions, builds
//! heteroscedasticity-robust bootstrap confidence intervals for slope
//! projections, tests slope orthogonality against target curves, and runs
//! simulation studies.

mod cfg;
mod commands;
mod errors;
mod io;
mod tuning;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::Rng;

use errors::CliResult;

#[derive(Parser)]
#[command(
    name = "flrm",
    version,
    about = "Scalar-on-function regression with bootstrap inference",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Master seed; omitted, a fresh seed is drawn and printed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for bootstrap replicates and simulation repetitions.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory for generated files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug, Clone)]
struct TuningArgs {
    /// Estimator truncation level (explicit tuning).
    #[arg(long, conflicts_with_all = ["rule_of_thumb", "cv"])]
    h: Option<usize>,
    /// Bootstrap-centering truncation (defaults to h under explicit tuning).
    #[arg(long, requires = "h")]
    g: Option<usize>,
    /// Residual truncation for the scaling estimate; with --rule-of-thumb
    /// this is the driving level.
    #[arg(long)]
    k: Option<usize>,
    /// Derive (h, g) from k via the rule of thumb g = k, h = round(1.113 k).
    #[arg(long, conflicts_with = "cv")]
    rule_of_thumb: bool,
    /// Select k by repeated cross-validation, then apply the rule of thumb.
    #[arg(long)]
    cv: bool,
}

#[derive(Args, Debug, Clone)]
struct BootArgs {
    /// Bootstrap replicate count.
    #[arg(long = "B", default_value_t = 500)]
    b: usize,
    /// Coverage level for intervals.
    #[arg(long, default_value_t = 0.95)]
    level: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit the truncated principal-component regression and write the
    /// estimated slope curve.
    Fit {
        /// Curves CSV: one row per subject; response in the final column
        /// unless --y is given.
        data: PathBuf,
        /// Separate single-column response file.
        #[arg(long)]
        y: Option<PathBuf>,
        /// Abscissa file overriding the uniform unit grid.
        #[arg(long)]
        grid: Option<PathBuf>,
        #[command(flatten)]
        tuning: TuningArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Bootstrap confidence interval for the projection of the slope onto
    /// a supplied regressor curve.
    Ci {
        data: PathBuf,
        /// Single-row CSV with the projection regressor.
        x0: PathBuf,
        #[arg(long)]
        y: Option<PathBuf>,
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Interval method.
        #[arg(long, default_value = "pb_std", value_parser = ["pb", "pb_std", "naive", "naive_std", "rb", "clt"])]
        variant: String,
        /// Interval construction from the replicate statistics.
        #[arg(long, default_value = "symmetrized", value_parser = ["symmetrized", "percentile"])]
        interval: String,
        /// Report the mean-response prediction (adds the response mean to
        /// the centered projection).
        #[arg(long)]
        mean_response: bool,
        #[command(flatten)]
        boot: BootArgs,
        #[command(flatten)]
        tuning: TuningArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Bootstrap test of slope orthogonality to the span of target curves.
    Test {
        data: PathBuf,
        /// Targets CSV: one row per target curve.
        targets: PathBuf,
        #[arg(long)]
        y: Option<PathBuf>,
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Enforce the null hypothesis in the bootstrap world.
        #[arg(long)]
        enforce_null: bool,
        /// Run both the enforced and non-enforced bootstrap.
        #[arg(long, conflicts_with = "enforce_null")]
        both: bool,
        #[command(flatten)]
        boot: BootArgs,
        #[command(flatten)]
        tuning: TuningArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a simulation experiment described by a plan file.
    Simulate {
        plan: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Construction-bias diagnostic for the naive bootstrap center.
    DiagnoseBias {
        data: PathBuf,
        x0: PathBuf,
        #[arg(long)]
        y: Option<PathBuf>,
        #[arg(long)]
        grid: Option<PathBuf>,
        #[command(flatten)]
        tuning: TuningArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    match seed {
        Some(s) => s,
        None => {
            let s: u64 = rand::rng().random();
            println!("seed: {s}");
            log::info!("no --seed given; drew {s}");
            s
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Fit {
            data,
            y,
            grid,
            tuning,
            common,
        } => commands::fit::run(&data, y.as_deref(), grid.as_deref(), &tuning, &common),
        Command::Ci {
            data,
            x0,
            y,
            grid,
            variant,
            interval,
            mean_response,
            boot,
            tuning,
            common,
        } => commands::ci::run(
            &data,
            &x0,
            y.as_deref(),
            grid.as_deref(),
            &variant,
            &interval,
            mean_response,
            &boot,
            &tuning,
            &common,
        ),
        Command::Test {
            data,
            targets,
            y,
            grid,
            enforce_null,
            both,
            boot,
            tuning,
            common,
        } => commands::test::run(
            &data,
            &targets,
            y.as_deref(),
            grid.as_deref(),
            enforce_null,
            both,
            &boot,
            &tuning,
            &common,
        ),
        Command::Simulate { plan, common } => commands::simulate::run(&plan, &common),
        Command::DiagnoseBias {
            data,
            x0,
            y,
            grid,
            tuning,
            common,
        } => commands::diagnose::run(&data, &x0, y.as_deref(), grid.as_deref(), &tuning, &common),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    // Bound the worker pool once, before any parallel region runs.
    let workers = match &cli.command {
        Command::Fit { common, .. }
        | Command::Ci { common, .. }
        | Command::Test { common, .. }
        | Command::Simulate { common, .. }
        | Command::DiagnoseBias { common, .. } => common.workers,
    };
    if let Some(w) = workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global() {
            eprintln!("error: cannot size worker pool: {e}");
            std::process::exit(4);
        }
    }
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.class.code());
    }
}
