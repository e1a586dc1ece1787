//! Damped Newton solve of the accessory-parameter problem.
//!
//! Unknowns: the first `m-1` prevertex angles, with `theta_m` frozen as the
//! rotation gauge. Residuals: successive differences of the log tip radii
//!
//! ```text
//! T_i = sum_j gamma_j ln(2 |sin((tau_i - theta_j)/2)|),
//! F_i = T_{i+1} - T_i,    i = 1 .. m-1,
//! ```
//!
//! where the `tau_i` are recomputed by bisection at every trial point. All
//! tips share one radius exactly when `F = 0`; the common value then gives
//! `rho0 = exp(mean T_i)` and a final rigid rotation aligns the first tip
//! with the configured `phi_1`.

use num_complex::Complex64;

use super::critical::critical_points;
use super::map::map_eval_raw;
use super::{
    wrap_to_pi, wrap_to_two_pi, GapVector, SlitConfiguration, SlitMapError, SlitMapSolution,
    MIN_GAMMA, TWO_PI,
};

const MAX_ITER: u32 = 200;
const FD_STEP: f64 = 1e-7;
/// Below this gap the equal-gap homotopy is engaged.
const HOMOTOPY_THRESHOLD: f64 = 0.1;
const HOMOTOPY_STAGES: [f64; 4] = [0.25, 0.5, 0.75, 1.0];
/// Minimum prevertex separation a Newton step may produce.
const MIN_SEPARATION: f64 = 1e-9;

struct GaugeSolve {
    thetas: Vec<f64>,
    taus: Vec<f64>,
    log_radii: Vec<f64>,
    iterations: u32,
}

fn log_tip_radii(thetas: &[f64], gammas: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let gaps = GapVector::Real {
        gammas: gammas.to_vec(),
    };
    let taus = critical_points(thetas, &gaps).expect("ordered thetas");
    let radii = taus
        .iter()
        .map(|&tau| {
            thetas
                .iter()
                .zip(gammas)
                .map(|(&th, &g)| g * (2.0 * ((tau - th) / 2.0).sin().abs()).ln())
                .sum()
        })
        .collect();
    (taus, radii)
}

fn residual_vec(thetas: &[f64], gammas: &[f64]) -> Vec<f64> {
    let (_, radii) = log_tip_radii(thetas, gammas);
    radii.windows(2).map(|w| w[1] - w[0]).collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Midpoint initial guess: prevertices halfway between consecutive slit
/// directions (exact for equal gaps).
fn midpoint_guess(gammas: &[f64]) -> Vec<f64> {
    let mut thetas = Vec::with_capacity(gammas.len());
    let mut phi = 0.0;
    for &g in gammas {
        thetas.push(phi + std::f64::consts::PI * g / 2.0);
        phi += std::f64::consts::PI * g;
    }
    thetas
}

fn ordered(thetas: &[f64], gauge_floor: f64) -> bool {
    if thetas[0] <= gauge_floor + MIN_SEPARATION {
        return false;
    }
    thetas.windows(2).all(|w| w[1] - w[0] > MIN_SEPARATION)
}

/// Solve the gauge-fixed system for one gap vector. `init` carries the
/// previous homotopy stage's prevertices when present.
fn solve_gauge(
    gammas: &[f64],
    tol: f64,
    init: Option<Vec<f64>>,
) -> Result<GaugeSolve, Box<(f64, u32, Vec<f64>)>> {
    let m = gammas.len();
    let mut thetas = init.unwrap_or_else(|| midpoint_guess(gammas));
    if m == 1 {
        let (taus, log_radii) = log_tip_radii(&thetas, gammas);
        return Ok(GaugeSolve {
            thetas,
            taus,
            log_radii,
            iterations: 0,
        });
    }
    let gauge = thetas[m - 1];
    let gauge_floor = gauge - TWO_PI;
    let mut f = residual_vec(&thetas, gammas);
    let mut iterations = 0;
    while max_abs(&f) > tol && iterations < MAX_ITER {
        iterations += 1;
        // Finite-difference Jacobian in the free angles.
        let dim = m - 1;
        let mut jac = vec![0.0; dim * dim];
        for col in 0..dim {
            let saved = thetas[col];
            thetas[col] = saved + FD_STEP;
            let fp = residual_vec(&thetas, gammas);
            thetas[col] = saved;
            for row in 0..dim {
                jac[row * dim + col] = (fp[row] - f[row]) / FD_STEP;
            }
        }
        let mut step: Vec<f64> = f.iter().map(|x| -x).collect();
        if crate::linalg::solve(&mut jac, &mut step).is_none() {
            return Err(Box::new((max_abs(&f), iterations, thetas)));
        }
        // Damped acceptance: keep the prevertex ordering and demand a
        // sufficient residual decrease.
        let base = max_abs(&f);
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-3 {
            let cand: Vec<f64> = thetas
                .iter()
                .take(dim)
                .zip(&step)
                .map(|(&t, &s)| t + lambda * s)
                .chain(std::iter::once(gauge))
                .collect();
            if ordered(&cand, gauge_floor) {
                let fc = residual_vec(&cand, gammas);
                if max_abs(&fc) <= base * (1.0 - 0.25 * lambda) + 1e-15 {
                    thetas = cand;
                    f = fc;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Box::new((max_abs(&f), iterations, thetas)));
        }
    }
    let residual = max_abs(&f);
    if residual > tol {
        return Err(Box::new((residual, iterations, thetas)));
    }
    let (taus, log_radii) = log_tip_radii(&thetas, gammas);
    Ok(GaugeSolve {
        thetas,
        taus,
        log_radii,
        iterations,
    })
}

/// Solve the accessory-parameter problem for `config`.
///
/// On success the returned solution has every slit tip on the unit circle
/// and at the configured direction to within `tol` (the internal Newton
/// tolerance is tightened by the slit count so the reported map residual
/// stays below `tol`). Strongly skewed gap vectors are reached by a 4-stage
/// continuation from the equal-gap configuration.
pub fn solve_prevertices(
    config: &SlitConfiguration,
    tol: f64,
) -> Result<SlitMapSolution, SlitMapError> {
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(SlitMapError::BadTolerance(tol));
    }
    let gaps = config.gaps();
    let m = gaps.len();
    let gammas = gaps.gammas();
    let min_gamma = gaps.min_gamma();
    if min_gamma < MIN_GAMMA {
        return Err(SlitMapError::DegenerateGaps { min_gamma });
    }
    // Spread the per-tip tolerance so accumulated radius differences across
    // all m tips stay below tol.
    let gauge_tol = (tol / m as f64).max(5e-14);

    let mut iterations = 0;
    let result = if m >= 2 && min_gamma < HOMOTOPY_THRESHOLD {
        let equal = vec![2.0 / m as f64; m];
        let mut init: Option<Vec<f64>> = None;
        let mut last = None;
        for s in HOMOTOPY_STAGES {
            let stage: Vec<f64> = equal
                .iter()
                .zip(&gammas)
                .map(|(&e, &g)| (1.0 - s) * e + s * g)
                .collect();
            match solve_gauge(&stage, gauge_tol, init.take()) {
                Ok(sol) => {
                    iterations += sol.iterations;
                    init = Some(sol.thetas.clone());
                    last = Some(sol);
                }
                Err(info) => {
                    let (residual, its, thetas) = *info;
                    return Err(nonconvergence(config, &gammas, thetas, residual, iterations + its));
                }
            }
        }
        last.expect("at least one homotopy stage")
    } else {
        match solve_gauge(&gammas, gauge_tol, None) {
            Ok(sol) => {
                iterations += sol.iterations;
                sol
            }
            Err(info) => {
                let (residual, its, thetas) = *info;
                return Err(nonconvergence(config, &gammas, thetas, residual, its));
            }
        }
    };

    Ok(finish(config, &gammas, result, iterations))
}

/// Rotate the gauge solution so the first tip maps to `phi_1`, wrap all
/// angles into `[0, 2pi)`, and measure the map residual at every tip.
fn finish(
    config: &SlitConfiguration,
    gammas: &[f64],
    sol: GaugeSolve,
    iterations: u32,
) -> SlitMapSolution {
    let m = gammas.len();
    let mean_log = sol.log_radii.iter().sum::<f64>() / m as f64;
    let rho0 = mean_log.exp();
    let phis = config.slit_angles();

    let w1 = map_eval_raw(rho0, &sol.thetas, gammas, Complex64::cis(sol.taus[0]));
    let shift = phis[0] - w1.arg();
    let prevertex_angles: Vec<f64> = sol.thetas.iter().map(|&t| wrap_to_two_pi(t + shift)).collect();
    let critical_angles: Vec<f64> = sol.taus.iter().map(|&t| wrap_to_two_pi(t + shift)).collect();

    let mut residual: f64 = 0.0;
    for (i, &tau) in critical_angles.iter().enumerate() {
        let w = map_eval_raw(rho0, &prevertex_angles, gammas, Complex64::cis(tau));
        residual = residual
            .max((w.norm() - 1.0).abs())
            .max(wrap_to_pi(w.arg() - phis[i]).abs());
    }

    SlitMapSolution {
        config: config.clone(),
        prevertex_angles,
        critical_angles,
        rho0,
        residual,
        iterations,
    }
}

fn nonconvergence(
    config: &SlitConfiguration,
    gammas: &[f64],
    thetas: Vec<f64>,
    residual: f64,
    iterations: u32,
) -> SlitMapError {
    let (taus, log_radii) = log_tip_radii(&thetas, gammas);
    let best = GaugeSolve {
        thetas,
        taus,
        log_radii,
        iterations,
    };
    SlitMapError::NonConvergence {
        residual,
        iterations,
        best: Box::new(finish(config, gammas, best, iterations)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_guess_is_exact_for_equal_gaps() {
        let gammas = vec![0.5; 4];
        let f = residual_vec(&midpoint_guess(&gammas), &gammas);
        assert!(max_abs(&f) < 1e-13, "{f:?}");
    }
}
