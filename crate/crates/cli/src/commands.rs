//! Subcommand implementations.

use std::io::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};

use werner_core::closedforms;
use werner_core::fekete::{capacity_estimate, equilibrium_energy, SegmentSet};
use werner_core::iesum::{
    partial_sum_compositions, partial_sum_subsets, IesumError, PartialSumRow, RhoCache,
};
use werner_core::qseries::{self, QSeriesError};
use werner_core::slitmap::{
    self, solve_prevertices, GapVector, SlitConfiguration, SlitMapError,
};
use werner_core::{round_sig12, CARDY_LIMIT};

use crate::output::{Cell, Table};
use crate::{cache_path, Command, Format, Route, RunConfig};

pub fn run(config: &RunConfig) -> Result<()> {
    match &config.command {
        Command::Cardy { rho, eps } => cmd_cardy(config, rho, *eps),
        Command::Slitmap {
            gaps,
            exact,
            base,
            tol,
        } => cmd_slitmap(config, gaps.as_deref(), exact.as_deref(), *base, *tol),
        Command::Closedform { gamma, m } => cmd_closedform(config, *gamma, *m),
        Command::Fekete {
            angles,
            points,
            restarts,
            panels,
        } => cmd_fekete(config, angles, points, *restarts, *panels),
        Command::Iesum {
            n,
            route,
            cache,
            tol,
            timings,
        } => cmd_iesum(config, *n, *route, cache, *tol, *timings),
        Command::Verify { cache, n, panels } => cmd_verify(cache, *n, *panels),
    }
}

/// Map domain errors onto the documented exit codes.
pub fn exit_code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(q) = cause.downcast_ref::<QSeriesError>() {
            return match q {
                QSeriesError::TruncationCap { .. } => crate::EXIT_RESOURCE,
                _ => 2,
            };
        }
        if let Some(s) = cause.downcast_ref::<SlitMapError>() {
            return match s {
                SlitMapError::NonConvergence { .. } => crate::EXIT_SOLVER,
                _ => 2,
            };
        }
        if let Some(i) = cause.downcast_ref::<IesumError>() {
            return match i {
                IesumError::Solve { .. } => crate::EXIT_SOLVER,
                IesumError::BadN(_) => 2,
                _ => 1,
            };
        }
        if cause.downcast_ref::<werner_core::fekete::FeketeError>().is_some() {
            return crate::EXIT_SOLVER;
        }
        if cause.downcast_ref::<VerifyFailed>().is_some() {
            return crate::EXIT_SOLVER;
        }
    }
    1
}

fn emit(config: &RunConfig, table: &Table) -> Result<()> {
    print!("{}", table.render_stdout());
    if let Some(path) = &config.out {
        table
            .write(path, config.format)
            .with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_cardy(config: &RunConfig, rhos: &[f64], eps: f64) -> Result<()> {
    if rhos.is_empty() {
        bail!("--rho needs at least one value");
    }
    let mut table = Table::new(vec![
        "rho",
        "q",
        "F0",
        "asymptote",
        "gap_to_asymptote",
        "lower_ok",
        "upper_ok",
    ]);
    for &rho in rhos {
        let eval = qseries::cardy_f0(rho, eps)?;
        let asym = qseries::asymptotic_f0(rho)?;
        let (gap, lower, upper) = if rho >= 1.0 {
            let report = qseries::check_cardy_bounds(rho, eps)?;
            (
                report.gap_to_asymptote,
                Some(report.lower_ok),
                Some(report.upper_ok),
            )
        } else {
            (eval.value - asym, None, None)
        };
        table.push(vec![
            Cell::float(rho),
            Cell::float(eval.q),
            Cell::float(eval.value),
            Cell::float(asym),
            Cell::float(gap),
            Cell::Flag(lower),
            Cell::Flag(upper),
        ]);
    }
    emit(config, &table)
}

fn parse_exact(spec: &str) -> Result<GapVector> {
    let (n_str, parts_str) = spec
        .split_once(':')
        .context("--exact expects n:a1,a2,...")?;
    let n: u32 = n_str.parse().context("bad n in --exact")?;
    let parts: Vec<u32> = parts_str
        .split(',')
        .map(|p| p.parse().context("bad part in --exact"))
        .collect::<Result<_>>()?;
    Ok(GapVector::exact(n, parts)?)
}

fn cmd_slitmap(
    config: &RunConfig,
    gaps: Option<&[f64]>,
    exact: Option<&str>,
    base: f64,
    tol: f64,
) -> Result<()> {
    let gap_vector = match (gaps, exact) {
        (Some(g), None) => GapVector::real(g.to_vec())?,
        (None, Some(spec)) => parse_exact(spec)?,
        _ => bail!("provide exactly one of --gaps or --exact"),
    };
    let configuration = SlitConfiguration::new(base, gap_vector)?;
    let solution = solve_prevertices(&configuration, tol)?;
    let check = slitmap::geometric_mean_identity(&solution);

    let mut table = Table::new(vec!["quantity", "index", "value"]);
    table.push(vec![
        Cell::Text("rho0".into()),
        Cell::Text(String::new()),
        Cell::float(solution.rho0),
    ]);
    table.push(vec![
        Cell::Text("rho_inf".into()),
        Cell::Text(String::new()),
        Cell::float(1.0 / solution.rho0),
    ]);
    table.push(vec![
        Cell::Text("residual".into()),
        Cell::Text(String::new()),
        Cell::float(solution.residual),
    ]);
    table.push(vec![
        Cell::Text("iterations".into()),
        Cell::Text(String::new()),
        Cell::Int(solution.iterations as i64),
    ]);
    table.push(vec![
        Cell::Text("geometric_mean_check".into()),
        Cell::Text(String::new()),
        Cell::float(check.rho0_check),
    ]);
    for (j, theta) in solution.prevertex_angles.iter().enumerate() {
        table.push(vec![
            Cell::Text("prevertex".into()),
            Cell::Int(j as i64),
            Cell::float(*theta),
        ]);
    }
    for (i, tau) in solution.critical_angles.iter().enumerate() {
        table.push(vec![
            Cell::Text("critical".into()),
            Cell::Int(i as i64),
            Cell::float(*tau),
        ]);
    }
    emit(config, &table)
}

fn cmd_closedform(config: &RunConfig, gamma: Option<f64>, m: Option<u32>) -> Result<()> {
    let mut table = Table::new(vec!["family", "parameter", "rho0"]);
    table.push(vec![
        Cell::Text("single".into()),
        Cell::Text(String::new()),
        Cell::float(closedforms::rho0_single()),
    ]);
    let gammas = match gamma {
        Some(g) => vec![g],
        None => vec![0.5, 2.0 / 3.0, 1.0, 1.5],
    };
    for g in &gammas {
        if let Ok(v) = closedforms::rho0_two(*g) {
            table.push(vec![
                Cell::Text("two".into()),
                Cell::float(*g),
                Cell::float(v),
            ]);
        }
    }
    let ms = match m {
        Some(m) => vec![m],
        None => (1..=8).collect(),
    };
    for m in ms {
        table.push(vec![
            Cell::Text("equal".into()),
            Cell::Int(m as i64),
            Cell::float(closedforms::rho0_equal(m)?),
        ]);
    }
    for g in &gammas {
        if let Ok(v) = closedforms::rho0_sym3(*g) {
            table.push(vec![
                Cell::Text("sym3".into()),
                Cell::float(*g),
                Cell::float(v),
            ]);
        }
    }
    emit(config, &table)
}

fn cmd_fekete(
    config: &RunConfig,
    angles: &[f64],
    points: &[u32],
    restarts: u32,
    panels: u32,
) -> Result<()> {
    let segments = SegmentSet::new(angles.to_vec())?;
    let estimate = capacity_estimate(&segments, points, restarts, panels)?;
    let mut table = Table::new(vec!["quantity", "n", "value"]);
    for (n, d) in &estimate.delta_sequence {
        table.push(vec![
            Cell::Text("delta_n".into()),
            Cell::Int(*n as i64),
            Cell::float(*d),
        ]);
    }
    table.push(vec![
        Cell::Text("energy".into()),
        Cell::Text(String::new()),
        Cell::float(estimate.energy_estimate),
    ]);
    table.push(vec![
        Cell::Text("rho_inf".into()),
        Cell::Text(String::new()),
        Cell::float(estimate.rho_inf),
    ]);
    table.push(vec![
        Cell::Text("rho0_implied".into()),
        Cell::Text(String::new()),
        Cell::float(1.0 / estimate.rho_inf),
    ]);
    emit(config, &table)
}

fn row_cells(row: &PartialSumRow, timings: bool) -> Vec<Cell> {
    vec![
        Cell::Int(row.n as i64),
        Cell::Int(row.distinct_classes as i64),
        Cell::Int(row.new_solves as i64),
        Cell::float(row.s_n),
        Cell::float(row.gap_to_limit),
        Cell::float(if timings { row.wall_time } else { 0.0 }),
    ]
}

const IESUM_HEADERS: [&str; 6] = [
    "n",
    "num_classes",
    "num_solves",
    "S_n",
    "gap_to_limit",
    "wall_time_s",
];

fn cmd_iesum(
    config: &RunConfig,
    n_max: u32,
    route: Route,
    cache_flag: &Option<PathBuf>,
    tol: f64,
    timings: bool,
) -> Result<()> {
    let path = cache_path(cache_flag);
    let mut cache = RhoCache::open(&path)
        .with_context(|| format!("opening cache {}", path.display()))?
        .with_tol(tol);
    eprintln!(
        "cache {} ({} classes loaded)",
        path.display(),
        cache.len()
    );

    let mut table = Table::new(IESUM_HEADERS.to_vec());
    // CSV streams row by row so interrupted runs leave a usable prefix.
    let mut csv_writer = match (&config.out, config.format) {
        (Some(path), Format::Csv) => {
            let mut file = std::fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            writeln!(file, "{}", IESUM_HEADERS.join(","))?;
            Some(file)
        }
        _ => None,
    };

    let mut rows = Vec::new();
    for n in 1..=n_max {
        let row = match route {
            Route::Subsets => partial_sum_subsets(n, &mut cache),
            Route::Compositions => partial_sum_compositions(n, &mut cache),
        }?;
        eprintln!(
            "n={:2} classes={} solves={} S_n={:.12} gap={:.6} [{:.2}s]",
            row.n,
            row.distinct_classes,
            row.new_solves,
            row.s_n,
            row.gap_to_limit,
            row.wall_time
        );
        if row.gap_to_limit <= 0.0 {
            eprintln!(
                "WARNING: S({}) = {} exceeds 2*pi/sqrt(3) = {CARDY_LIMIT}; \
                 the partial sums are expected to stay below the limit",
                row.n, row.s_n
            );
        }
        let cells = row_cells(&row, timings);
        if let Some(file) = csv_writer.as_mut() {
            let line: Vec<String> = cells
                .iter()
                .map(|c| match c {
                    Cell::Int(i) => i.to_string(),
                    Cell::Float(x) => format!("{x:.11e}"),
                    other => unreachable!("iesum rows are numeric: {other:?}"),
                })
                .collect();
            writeln!(file, "{}", line.join(","))?;
            file.flush()?;
        }
        table.push(cells);
        rows.push(row);
    }
    print!("{}", table.render_stdout());
    if let Some(path) = &config.out {
        if config.format == Format::Json {
            table.write(path, Format::Json)?;
        }
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

#[derive(Debug)]
pub struct VerifyFailed {
    pub failures: usize,
}

impl std::fmt::Display for VerifyFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} verification check(s) failed", self.failures)
    }
}

impl std::error::Error for VerifyFailed {}

fn cmd_verify(cache_flag: &Option<PathBuf>, n_max: u32, panels: u32) -> Result<()> {
    let mut failures = 0usize;
    let mut check = |name: &str, ok: bool, detail: String| {
        if ok {
            println!("PASS  {name}");
        } else {
            failures += 1;
            println!("FAIL  {name}: {detail}");
        }
    };

    // Closed-form regressions.
    let single = solve_prevertices(
        &SlitConfiguration::from_gaps(GapVector::exact(1, vec![1])?),
        1e-10,
    )?;
    check(
        "single slit rho0 = 4",
        (single.rho0 - 4.0).abs() < 1e-8,
        format!("got {}", single.rho0),
    );
    let mut worst_two: f64 = 0.0;
    for a in 1..10u32 {
        let sol = solve_prevertices(
            &SlitConfiguration::from_gaps(GapVector::exact(10, vec![a, 10 - a])?),
            1e-10,
        )?;
        let expect = closedforms::rho0_two(2.0 * a as f64 / 10.0)?;
        worst_two = worst_two.max((sol.rho0 - expect).abs());
    }
    check(
        "two-slit family matches closed form",
        worst_two < 1e-8,
        format!("worst |diff| = {worst_two:e}"),
    );
    let mut worst_eq: f64 = 0.0;
    for m in 1..=8u32 {
        let sol = solve_prevertices(
            &SlitConfiguration::from_gaps(GapVector::exact(m, vec![1; m as usize])?),
            1e-10,
        )?;
        worst_eq = worst_eq.max((sol.rho0 - closedforms::rho0_equal(m)?).abs());
    }
    check(
        "equal-slit family matches closed form",
        worst_eq < 1e-8,
        format!("worst |diff| = {worst_eq:e}"),
    );
    let mut worst_sym: f64 = 0.0;
    for g in [0.2, 0.5, 2.0 / 3.0] {
        let sol = solve_prevertices(
            &SlitConfiguration::from_gaps(GapVector::real(vec![g, g, 2.0 - 2.0 * g])?),
            1e-10,
        )?;
        worst_sym = worst_sym.max((sol.rho0 - closedforms::rho0_sym3(g)?).abs());
    }
    check(
        "symmetric three-slit matches closed form",
        worst_sym < 1e-6,
        format!("worst |diff| = {worst_sym:e}"),
    );

    // Route equivalence on a scratch cache.
    let mut scratch = RhoCache::in_memory();
    let mut worst_route: f64 = 0.0;
    for n in 1..=n_max.min(8) {
        let a = partial_sum_subsets(n, &mut scratch)?;
        let b = partial_sum_compositions(n, &mut scratch)?;
        worst_route = worst_route.max((a.s_n - b.s_n).abs());
    }
    check(
        "subset and composition routes agree",
        worst_route < 1e-12,
        format!("worst |diff| = {worst_route:e}"),
    );

    // Symmetrization law.
    let mut worst_symm: f64 = 0.0;
    for (base, k) in [
        (GapVector::exact(1, vec![1])?, 4u32),
        (GapVector::exact(2, vec![1, 1])?, 3),
        (GapVector::real(vec![0.8, 1.2])?, 4),
    ] {
        let r = slitmap::symmetrize_check(&base, k, 1e-10)?;
        worst_symm = worst_symm.max((r.predicted_rho0 - r.solved_rho0).abs());
    }
    check(
        "symmetrization law",
        worst_symm < 1e-8,
        format!("worst |diff| = {worst_symm:e}"),
    );

    // Capacity oracle against the solver.
    let single_seg = SegmentSet::new(vec![0.0])?;
    let est = equilibrium_energy(&single_seg, panels)?;
    check(
        "segment capacity near 1/4",
        (est.rho_inf - 0.25).abs() / 0.25 < 0.01,
        format!("rho_inf = {}", est.rho_inf),
    );
    let gaps = GapVector::exact(8, vec![1, 3, 4])?;
    let sol = solve_prevertices(&SlitConfiguration::from_gaps(gaps.clone()), 1e-10)?;
    let est = equilibrium_energy(&SegmentSet::from_gaps(&gaps)?, panels)?;
    let product = sol.rho0 * est.rho_inf;
    check(
        "energy oracle inverts the solver",
        (product - 1.0).abs() < 0.02,
        format!("rho0 * rho_inf = {product}"),
    );

    // Cache soundness.
    let path = cache_path(cache_flag);
    if path.exists() {
        let cache = RhoCache::open(&path)?;
        let checks = cache.verify_entries(32)?;
        let bad: Vec<String> = checks
            .iter()
            .filter(|c| !c.ok)
            .map(|c| format!("{:?} cached {} re-solved {}", c.key, c.cached_rho0, c.resolved_rho0))
            .collect();
        check(
            "cache entries reproduce under re-solving",
            bad.is_empty(),
            bad.join("; "),
        );
    }

    // Informational: distance of the deepest table row to the limit.
    let mut scratch = RhoCache::in_memory();
    let mut last_gap = f64::NAN;
    werner_core::iesum::series_table(n_max, &mut scratch, |row| {
        last_gap = row.gap_to_limit;
    })
    .map_err(|(_, e)| e)?;
    println!(
        "INFO  2*pi/sqrt(3) - S({n_max}) = {}",
        round_sig12(last_gap)
    );

    if failures > 0 {
        return Err(VerifyFailed { failures }.into());
    }
    println!("all checks passed");
    Ok(())
}
