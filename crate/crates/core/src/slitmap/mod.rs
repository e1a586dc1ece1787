//! Accessory-parameter solver for the disk map onto the complement of
//! `m` radial slits.
//!
//! The target domain is the plane minus `m` rays `{r e^{i phi_j} : r >= 1}`.
//! The normalized conformal map from the unit disk has the product form
//!
//! ```text
//! phi+(z) = rho0 * z * prod_j (1 - z/z_j)^(-gamma_j),      sum_j gamma_j = 2,
//! ```
//!
//! with unknown prevertices `z_j = e^{i theta_j}` on the unit circle. The
//! angular gaps `gamma_j` (in units of pi) determine everything up to
//! rotation; `rho0 = phi+'(0)` is the conformal radius of the slit domain and
//! the reciprocal of the transfinite diameter of the complementary star of
//! segments.
//!
//! The solver fixes `theta_m` as a rotation gauge, finds the remaining
//! prevertex angles so that all slit tips land on the unit circle, and
//! finally rotates the solution so the first tip sits at the configured
//! `phi_1`. Slit tip *directions* need no equations: the argument of `phi+`
//! is constant on each prevertex arc and jumps by exactly `pi*gamma_j` when
//! crossing `z_j`, so the angular spacing is built into the functional form.

mod critical;
mod map;
mod solver;

pub use critical::critical_points;
pub use map::map_eval;
pub use solver::solve_prevertices;

use serde::Serialize;
use thiserror::Error;

pub(crate) const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Gap entries below this are rejected: near-touching slits make the
/// accessory-parameter Jacobian singular.
pub const MIN_GAMMA: f64 = 1e-6;

/// Gap vectors the solver accepts: either exact multiples of `2/n` or free
/// positive reals summing to 2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum GapVector {
    /// Gaps `gamma_j = 2 a_j / n` with positive integer parts summing to `n`.
    Exact { n: u32, parts: Vec<u32> },
    /// Free positive gaps summing to 2 (within 1e-14).
    Real { gammas: Vec<f64> },
}

#[derive(Debug, Error)]
pub enum SlitMapError {
    #[error("invalid gap vector: {0}")]
    BadGapVector(String),
    #[error("base angle {0} outside [0, 2pi)")]
    BadBaseAngle(f64),
    #[error("tolerance {0:e} outside (0, 1e-4]")]
    BadTolerance(f64),
    #[error("gap entry {min_gamma:e} below {MIN_GAMMA:e}: near-touching slits rejected")]
    DegenerateGaps { min_gamma: f64 },
    #[error("prevertices not strictly ordered on the circle (min arc {min_arc:e})")]
    CoincidentPrevertices { min_arc: f64 },
    #[error("prevertex count {thetas} does not match gap count {gaps}")]
    LengthMismatch { thetas: usize, gaps: usize },
    #[error("no convergence after {iterations} iterations; best residual {residual:e}")]
    NonConvergence {
        residual: f64,
        iterations: u32,
        best: Box<SlitMapSolution>,
    },
    #[error("evaluation point is {dist:e} from prevertex {index}: pole of the map")]
    PoleAtPrevertex { index: usize, dist: f64 },
    #[error("tip index {index} out of range for m = {m}")]
    TipIndex { index: usize, m: usize },
}

impl GapVector {
    /// Exact-mode vector: gaps `2 a_j / n`.
    pub fn exact(n: u32, parts: Vec<u32>) -> Result<Self, SlitMapError> {
        if parts.is_empty() {
            return Err(SlitMapError::BadGapVector("no parts".into()));
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(SlitMapError::BadGapVector("zero part".into()));
        }
        let sum: u64 = parts.iter().map(|&p| p as u64).sum();
        if sum != n as u64 {
            return Err(SlitMapError::BadGapVector(format!(
                "parts sum to {sum}, expected n = {n}"
            )));
        }
        Ok(GapVector::Exact { n, parts })
    }

    /// Real-mode vector: positive gaps summing to 2 within 1e-14.
    pub fn real(gammas: Vec<f64>) -> Result<Self, SlitMapError> {
        if gammas.is_empty() {
            return Err(SlitMapError::BadGapVector("no gaps".into()));
        }
        if gammas.iter().any(|&g| !(g > 0.0)) {
            return Err(SlitMapError::BadGapVector("non-positive gap".into()));
        }
        let sum: f64 = gammas.iter().sum();
        if (sum - 2.0).abs() > 1e-14 {
            return Err(SlitMapError::BadGapVector(format!(
                "gaps sum to {sum}, expected 2"
            )));
        }
        Ok(GapVector::Real { gammas })
    }

    /// Number of slits.
    pub fn len(&self) -> usize {
        match self {
            GapVector::Exact { parts, .. } => parts.len(),
            GapVector::Real { gammas } => gammas.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Gaps as floats, in units of pi.
    pub fn gammas(&self) -> Vec<f64> {
        match self {
            GapVector::Exact { n, parts } => parts
                .iter()
                .map(|&a| 2.0 * a as f64 / *n as f64)
                .collect(),
            GapVector::Real { gammas } => gammas.clone(),
        }
    }

    pub fn min_gamma(&self) -> f64 {
        self.gammas().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// `k`-fold refinement: every gap divided by `k`, the sequence repeated
    /// `k` times around the circle.
    pub fn k_fold(&self, k: u32) -> Result<Self, SlitMapError> {
        if k == 0 {
            return Err(SlitMapError::BadGapVector("k = 0".into()));
        }
        match self {
            GapVector::Exact { n, parts } => {
                let mut rep = Vec::with_capacity(parts.len() * k as usize);
                for _ in 0..k {
                    rep.extend_from_slice(parts);
                }
                GapVector::exact(n * k, rep)
            }
            GapVector::Real { gammas } => {
                let mut rep = Vec::with_capacity(gammas.len() * k as usize);
                for _ in 0..k {
                    rep.extend(gammas.iter().map(|g| g / k as f64));
                }
                GapVector::real(rep)
            }
        }
    }

    /// Cyclic rotation by `r` positions.
    pub fn rotated(&self, r: usize) -> Self {
        match self {
            GapVector::Exact { n, parts } => {
                let mut p = parts.clone();
                let r = r % p.len();
                p.rotate_left(r);
                GapVector::Exact { n: *n, parts: p }
            }
            GapVector::Real { gammas } => {
                let mut g = gammas.clone();
                let r = r % g.len();
                g.rotate_left(r);
                GapVector::Real { gammas: g }
            }
        }
    }

    /// Reversed traversal direction.
    pub fn reversed(&self) -> Self {
        match self {
            GapVector::Exact { n, parts } => {
                let mut p = parts.clone();
                p.reverse();
                GapVector::Exact { n: *n, parts: p }
            }
            GapVector::Real { gammas } => {
                let mut g = gammas.clone();
                g.reverse();
                GapVector::Real { gammas: g }
            }
        }
    }
}

/// A slit configuration: the first slit direction plus the gap sequence.
#[derive(Debug, Clone, Serialize)]
pub struct SlitConfiguration {
    base_angle: f64,
    gaps: GapVector,
}

impl SlitConfiguration {
    pub fn new(base_angle: f64, gaps: GapVector) -> Result<Self, SlitMapError> {
        if !(0.0..TWO_PI).contains(&base_angle) {
            return Err(SlitMapError::BadBaseAngle(base_angle));
        }
        Ok(SlitConfiguration { base_angle, gaps })
    }

    /// Configuration with `phi_1 = 0`.
    pub fn from_gaps(gaps: GapVector) -> Self {
        SlitConfiguration {
            base_angle: 0.0,
            gaps,
        }
    }

    pub fn base_angle(&self) -> f64 {
        self.base_angle
    }

    pub fn gaps(&self) -> &GapVector {
        &self.gaps
    }

    /// Slit directions `phi_j = phi_1 + pi*(gamma_1 + ... + gamma_{j-1})`,
    /// strictly increasing in `[phi_1, phi_1 + 2 pi)`.
    pub fn slit_angles(&self) -> Vec<f64> {
        let gammas = self.gaps.gammas();
        let mut phis = Vec::with_capacity(gammas.len());
        let mut acc = self.base_angle;
        for g in &gammas {
            phis.push(acc);
            acc += std::f64::consts::PI * g;
        }
        phis
    }
}

/// A solved slit map: prevertices, critical points, conformal radius, and
/// convergence diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct SlitMapSolution {
    pub config: SlitConfiguration,
    /// Prevertex angles `theta_j` in `[0, 2pi)`; `z_j = e^{i theta_j}`.
    pub prevertex_angles: Vec<f64>,
    /// Critical angles `tau_i` in `[0, 2pi)`; `c_i = e^{i tau_i}` maps to the
    /// tip of slit `i`. Cyclic order is `theta_m, tau_1, theta_1, tau_2, ...`.
    pub critical_angles: Vec<f64>,
    /// Conformal radius `phi+'(0)`.
    pub rho0: f64,
    /// Worst deviation of slit-tip moduli from 1 and tip arguments from the
    /// configured slit directions, measured by evaluating the map.
    pub residual: f64,
    /// Newton iterations spent (summed over homotopy stages).
    pub iterations: u32,
}

impl SlitMapSolution {
    pub fn m(&self) -> usize {
        self.prevertex_angles.len()
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.config.gaps().gammas()
    }

    /// Checks the cyclic interleaving `theta_m < tau_1 < theta_1 < tau_2 < ...`
    /// on the circle.
    pub fn interleaving_ok(&self) -> bool {
        let m = self.m();
        if m == 1 {
            return true;
        }
        // Merge into a single cyclic sequence tau_1, theta_1, tau_2, theta_2, ...
        let mut seq = Vec::with_capacity(2 * m);
        for i in 0..m {
            seq.push(self.critical_angles[i]);
            seq.push(self.prevertex_angles[i]);
        }
        // Strictly increasing after unwrapping by the start: exactly one wrap
        // allowed over the full cycle.
        let mut wraps = 0;
        for w in seq.windows(2) {
            if w[1] <= w[0] {
                wraps += 1;
            }
        }
        if seq[0] <= *seq.last().unwrap() {
            wraps += 1;
        }
        wraps == 1
    }
}

/// Conformal radius recovered from tip `i` alone:
/// `prod_j (2 |sin((tau_i - theta_j)/2)|)^(gamma_j)`.
///
/// The same value (within solver tolerance) must come out for every `i`;
/// `i` is a zero-based tip index.
pub fn rho0_of(solution: &SlitMapSolution, i: usize) -> Result<f64, SlitMapError> {
    let m = solution.m();
    if i >= m {
        return Err(SlitMapError::TipIndex { index: i, m });
    }
    let gammas = solution.gammas();
    let tau = solution.critical_angles[i];
    let mut log_r = 0.0;
    for (theta, g) in solution.prevertex_angles.iter().zip(&gammas) {
        log_r += g * (2.0 * ((tau - theta) / 2.0).sin().abs()).ln();
    }
    Ok(log_r.exp())
}

/// Result of [`geometric_mean_identity`].
#[derive(Debug, Clone, Serialize)]
pub struct GeometricMeanCheck {
    /// `a_j = prod_i |1 - c_i/z_j|`, the product of distances from prevertex
    /// `j` to all critical points.
    pub distances: Vec<f64>,
    /// `(prod_j a_j^(gamma_j))^(1/m)`; equals `rho0` up to solver tolerance.
    pub rho0_check: f64,
}

/// Cross-check of the geometric-mean identity
/// `rho0 = (prod_j a_j^(gamma_j))^(1/m)`.
pub fn geometric_mean_identity(solution: &SlitMapSolution) -> GeometricMeanCheck {
    let m = solution.m();
    let gammas = solution.gammas();
    let mut distances = Vec::with_capacity(m);
    for &theta in &solution.prevertex_angles {
        let mut log_a = 0.0;
        for &tau in &solution.critical_angles {
            log_a += (2.0 * ((tau - theta) / 2.0).sin().abs()).ln();
        }
        distances.push(log_a.exp());
    }
    let log_check = gammas
        .iter()
        .zip(&distances)
        .map(|(g, a)| g * a.ln())
        .sum::<f64>()
        / m as f64;
    GeometricMeanCheck {
        distances,
        rho0_check: log_check.exp(),
    }
}

/// Result of [`symmetrize_check`].
#[derive(Debug, Clone, Serialize)]
pub struct SymmetrizeCheck {
    pub predicted_rho0: f64,
    pub solved_rho0: f64,
}

/// Checks the symmetrization law: if `g(z) = f(z^k)^(1/k)`, the `k`-fold
/// refined configuration has conformal radius `rho0(base)^(1/k)`.
///
/// Solves both the base and the refined configuration and returns the
/// prediction next to the solver's value.
pub fn symmetrize_check(
    base: &GapVector,
    k: u32,
    tol: f64,
) -> Result<SymmetrizeCheck, SlitMapError> {
    let base_sol = solve_prevertices(&SlitConfiguration::from_gaps(base.clone()), tol)?;
    let refined = base.k_fold(k)?;
    let refined_sol = solve_prevertices(&SlitConfiguration::from_gaps(refined), tol)?;
    Ok(SymmetrizeCheck {
        predicted_rho0: base_sol.rho0.powf(1.0 / k as f64),
        solved_rho0: refined_sol.rho0,
    })
}

pub(crate) fn wrap_to_two_pi(a: f64) -> f64 {
    let mut x = a % TWO_PI;
    if x < 0.0 {
        x += TWO_PI;
    }
    x
}

/// Wrap an angle difference into `(-pi, pi]`.
pub(crate) fn wrap_to_pi(a: f64) -> f64 {
    let mut x = a % TWO_PI;
    if x > std::f64::consts::PI {
        x -= TWO_PI;
    } else if x <= -std::f64::consts::PI {
        x += TWO_PI;
    }
    x
}

#[cfg(test)]
mod tests;
