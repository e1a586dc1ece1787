//! Analytic conformal radii for the tractable slit configurations.
//!
//! These closed forms cover one slit, two slits at arbitrary angle, `m`
//! equally spaced slits, and the symmetric three-slit family. They serve as
//! regression oracles for the general solver in [`crate::slitmap`].

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ClosedFormError {
    #[error("gamma must lie in the open interval ({lo}, {hi}), got {value}")]
    GammaOutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("m must be at least 1")]
    ZeroSlits,
    #[error("implicit equation has no root in (0,1): rhs = {rhs}")]
    NoRoot { rhs: f64 },
}

/// Conformal radius of the complement of a single radial slit: the Koebe
/// value 4.
pub fn rho0_single() -> f64 {
    4.0
}

/// Conformal radius for two slits with angular gaps `(gamma, 2 - gamma)`
/// (in units of pi): `4 (g/2)^(g/2) (1 - g/2)^(1 - g/2)`.
pub fn rho0_two(gamma: f64) -> Result<f64, ClosedFormError> {
    if !(gamma > 0.0 && gamma < 2.0) {
        return Err(ClosedFormError::GammaOutOfRange {
            value: gamma,
            lo: 0.0,
            hi: 2.0,
        });
    }
    let h = gamma / 2.0;
    Ok(4.0 * h.powf(h) * (1.0 - h).powf(1.0 - h))
}

/// Conformal radius for `m` equally spaced slits: `2^(2/m)`.
pub fn rho0_equal(m: u32) -> Result<f64, ClosedFormError> {
    if m == 0 {
        return Err(ClosedFormError::ZeroSlits);
    }
    Ok(2f64.powf(2.0 / m as f64))
}

/// Conformal radius for the mirror-symmetric three-slit family with gaps
/// `(gamma, gamma, 2 - 2*gamma)`.
///
/// The implicit parameter `x` solves `(1-x)^g / (1+x) = 2^(g-1) g^g (1-g)^(1-g)`
/// on `[0, 1]`; the left side decreases monotonically from 1 to 0, so the
/// root is unique and bisection is unconditionally safe. The radius is then
/// `2 (1+x) g^g (1-g)^(1-g)`.
pub fn rho0_sym3(gamma: f64) -> Result<f64, ClosedFormError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(ClosedFormError::GammaOutOfRange {
            value: gamma,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let ent = gamma.powf(gamma) * (1.0 - gamma).powf(1.0 - gamma);
    let rhs = 2f64.powf(gamma - 1.0) * ent;
    if !(rhs > 0.0 && rhs <= 1.0) {
        return Err(ClosedFormError::NoRoot { rhs });
    }
    let f = |x: f64| (1.0 - x).powf(gamma) / (1.0 + x);
    let (mut lo, mut hi) = (0.0_f64, 1.0 - 1e-15);
    // f(lo) = 1 >= rhs > 0 = f(hi); bisect to 1e-14 on x.
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > rhs {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok(2.0 * (1.0 + x) * ent)
}
