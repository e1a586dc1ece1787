//! `werner` — compute conformal radii of radial-slit domains, the
//! inclusion/exclusion partial sums over roots of unity, capacity oracles,
//! and Cardy's annulus series.

mod commands;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit codes: 0 success, 2 usage, 3 solver failure, 4 resource cap.
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_RESOURCE: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "werner", version, about)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads (default: logical cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Write the result table to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// File format for --out.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Subsets,
    Compositions,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate Cardy's annulus series F0(rho) with bounds checks.
    Cardy {
        /// Comma-separated list of rho values.
        #[arg(long, value_delimiter = ',', required = true)]
        rho: Vec<f64>,
        /// Truncation error budget for the series.
        #[arg(long, default_value_t = 1e-12)]
        eps: f64,
    },
    /// Solve one slit configuration and report the conformal radius.
    Slitmap {
        /// Real gap vector (entries sum to 2), e.g. `0.5,0.5,1.0`.
        #[arg(long, value_delimiter = ',', conflicts_with = "exact")]
        gaps: Option<Vec<f64>>,
        /// Exact gap vector `n:a1,a2,...` with parts summing to n.
        #[arg(long)]
        exact: Option<String>,
        /// First slit direction in radians.
        #[arg(long, default_value_t = 0.0)]
        base: f64,
        /// Solver tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Print the analytic conformal radii for the tractable families.
    Closedform {
        /// Two-slit and symmetric-three-slit parameter.
        #[arg(long)]
        gamma: Option<f64>,
        /// Equal-slit count.
        #[arg(long)]
        m: Option<u32>,
    },
    /// Transfinite-diameter estimates for a star of radial segments.
    Fekete {
        /// Comma-separated segment directions in radians.
        #[arg(long, value_delimiter = ',', required = true)]
        angles: Vec<f64>,
        /// Fekete point counts for the delta_n table.
        #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
        points: Vec<u32>,
        /// Restarts for the coordinate-ascent optimizer.
        #[arg(long, default_value_t = 8)]
        restarts: u32,
        /// Panels per segment for the equilibrium-energy estimate.
        #[arg(long, default_value_t = 256)]
        panels: u32,
    },
    /// Build the inclusion/exclusion partial-sum table S(1..n).
    Iesum {
        /// Largest n.
        #[arg(long, required = true)]
        n: u32,
        /// Enumeration route.
        #[arg(long, value_enum, default_value_t = Route::Compositions)]
        route: Route,
        /// Solve-cache file (default: werner-cache.txt, see WERNER_CACHE_DIR).
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Solver tolerance for cached solves.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Record real wall-clock times in file output (off keeps files
        /// byte-identical across runs and thread counts).
        #[arg(long)]
        timings: bool,
    },
    /// Run the cross-module invariant suite; exit 0 iff everything passes.
    Verify {
        /// Cache file to soundness-check (entries are re-solved).
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Table depth for the informational gap line and route equivalence.
        #[arg(long, default_value_t = 8)]
        n: u32,
        /// Panels per segment for the capacity cross-check.
        #[arg(long, default_value_t = 128)]
        panels: u32,
    },
}

/// Cache file path: --cache flag, else $WERNER_CACHE_DIR/werner-cache.txt,
/// else ./werner-cache.txt.
pub fn cache_path(flag: &Option<PathBuf>) -> PathBuf {
    if let Some(p) = flag {
        return p.clone();
    }
    match std::env::var_os("WERNER_CACHE_DIR") {
        Some(dir) => PathBuf::from(dir).join("werner-cache.txt"),
        None => PathBuf::from("werner-cache.txt"),
    }
}

fn main() -> ExitCode {
    let config = RunConfig::parse();
    if let Some(threads) = config.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_err()
        {
            eprintln!("warning: thread pool already initialized");
        }
    }
    match commands::run(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::exit_code_for(&err))
        }
    }
}
