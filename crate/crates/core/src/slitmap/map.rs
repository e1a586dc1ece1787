//! Evaluation of the slit map `phi+` on the closed disk.

use num_complex::Complex64;

use super::{SlitMapError, SlitMapSolution};

/// Distance to a prevertex below which evaluation is refused.
const POLE_GUARD: f64 = 1e-12;

pub(crate) fn map_eval_raw(
    rho0: f64,
    thetas: &[f64],
    gammas: &[f64],
    z: Complex64,
) -> Complex64 {
    let mut w = rho0 * z;
    for (&theta, &g) in thetas.iter().zip(gammas) {
        // 1 - z/z_j has nonnegative real part on the closed disk, so the
        // principal branch of the power never crosses the cut.
        let factor = Complex64::new(1.0, 0.0) - z * Complex64::cis(-theta);
        w *= factor.powf(-g);
    }
    w
}

/// Evaluate `phi+(z) = rho0 z prod_j (1 - z/z_j)^(-gamma_j)` with principal
/// branches. `phi+(0) = 0` and `phi+'(0) = rho0 > 0`.
pub fn map_eval(solution: &SlitMapSolution, z: Complex64) -> Result<Complex64, SlitMapError> {
    for (index, &theta) in solution.prevertex_angles.iter().enumerate() {
        let dist = (z - Complex64::cis(theta)).norm();
        if dist < POLE_GUARD {
            return Err(SlitMapError::PoleAtPrevertex { index, dist });
        }
    }
    Ok(map_eval_raw(
        solution.rho0,
        &solution.prevertex_angles,
        &solution.gammas(),
        z,
    ))
}
