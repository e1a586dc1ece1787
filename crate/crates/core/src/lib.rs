//! Numerical machinery for testing Cardy's annulus formula against the
//! self-avoiding-loop measure.
//!
//! The crate has five subsystems:
//!
//! - [`slitmap`] — accessory-parameter solver for the conformal map of the unit
//!   disk onto the complement of `m` radial slits, yielding the conformal
//!   radius `rho0` of the slit domain.
//! - [`closedforms`] — the handful of analytically tractable slit
//!   configurations, used as regression oracles for the solver.
//! - [`fekete`] — solver-independent estimates of the transfinite diameter
//!   `rho_inf = 1/rho0` via Fekete point products and a discretized
//!   equilibrium-energy minimization.
//! - [`iesum`] — the inclusion/exclusion sum `S(n)` over slit configurations
//!   supported on `n`-th roots of unity, with dihedral-class deduplication and
//!   a persistent solve cache.
//! - [`qseries`] — Cardy's conjectured annulus function `F0(rho)`, its
//!   large-`rho` asymptote `rho - 2*pi/sqrt(3)`, and consistency bounds.
//!
//! All solves are pure functions of their inputs and safe to run from any
//! number of threads.

pub mod closedforms;
pub mod fekete;
pub mod iesum;
pub mod qseries;
pub mod slitmap;

mod linalg;

/// `2*pi/sqrt(3)`, the conjectured value of the loop measure of all loops
/// meeting the unit circle; the limit the partial sums `S(n)` are compared
/// against.
pub const CARDY_LIMIT: f64 = 3.627598728468435701188;

pub use fekete::{CapacityEstimate, SegmentSet};
pub use iesum::{CanonicalClass, PartialSumRow, RhoCache};
pub use qseries::CardyEvaluation;
pub use slitmap::{GapVector, SlitConfiguration, SlitMapSolution};

/// Round to 12 significant digits. Table emitters use this so that CSV and
/// JSON carry the same values.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cardy_limit_matches_closed_form() {
        let v = 2.0 * std::f64::consts::PI / 3.0_f64.sqrt();
        assert!((CARDY_LIMIT - v).abs() < 1e-15);
    }

    #[test]
    fn round_sig12_is_idempotent() {
        for x in [3.045085_f64, -1.0 / 3.0, 2e-58, 9996.372401271531] {
            let r = round_sig12(x);
            assert_eq!(r, round_sig12(r));
            assert!((r - x).abs() <= 1e-11 * x.abs());
        }
    }
}
