//! Critical points of the slit map on the unit circle.
//!
//! With `z = e^{i tau}` and `sum_j gamma_j = 2`, the critical-point equation
//! `1 = sum_j gamma_j z/(z - z_j)` reduces to a real root problem:
//!
//! ```text
//! g(tau) = sum_j gamma_j cot((tau - theta_j)/2) = 0,
//! ```
//!
//! since `z/(z - z_j) = 1/2 + (i/2) cot((theta_j - tau)/2)` on the circle and
//! the real parts already sum to 1. On each open prevertex arc `g` decreases
//! strictly from `+inf` to `-inf`, so there is exactly one root per arc;
//! bisection plus a Newton polish finds it unconditionally.

use super::{GapVector, SlitMapError, TWO_PI};

pub(crate) fn crit_g(tau: f64, thetas: &[f64], gammas: &[f64]) -> f64 {
    thetas
        .iter()
        .zip(gammas)
        .map(|(&th, &g)| g / ((tau - th) / 2.0).tan())
        .sum()
}

fn crit_g_prime(tau: f64, thetas: &[f64], gammas: &[f64]) -> f64 {
    -0.5 * thetas
        .iter()
        .zip(gammas)
        .map(|(&th, &g)| {
            let s = ((tau - th) / 2.0).sin();
            g / (s * s)
        })
        .sum::<f64>()
}

/// Root of `g` in the open arc `(lo, hi)`, with `g(lo+) = +inf`, `g(hi-) = -inf`.
fn root_in_arc(lo: f64, hi: f64, thetas: &[f64], gammas: &[f64]) -> f64 {
    let span = hi - lo;
    let (mut a, mut b) = (lo + 1e-12 * span, hi - 1e-12 * span);
    for _ in 0..200 {
        if b - a <= 1e-15 {
            break;
        }
        let mid = 0.5 * (a + b);
        if crit_g(mid, thetas, gammas) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let mut tau = 0.5 * (a + b);
    for _ in 0..4 {
        let gp = crit_g_prime(tau, thetas, gammas);
        let next = tau - crit_g(tau, thetas, gammas) / gp;
        if next > a && next < b {
            tau = next;
        } else {
            break;
        }
    }
    tau
}

/// All `m` critical angles, one per prevertex arc. `thetas` must be strictly
/// increasing and span less than one turn; the returned `tau_i` lies in the
/// arc ending at `theta_i` (so `tau_1` sits between `theta_m - 2pi` and
/// `theta_1`), matching the boundary correspondence to slit `i`.
pub fn critical_points(thetas: &[f64], gaps: &GapVector) -> Result<Vec<f64>, SlitMapError> {
    let m = thetas.len();
    if m != gaps.len() {
        return Err(SlitMapError::LengthMismatch {
            thetas: m,
            gaps: gaps.len(),
        });
    }
    let gammas = gaps.gammas();
    if m == 1 {
        // Sole critical point is antipodal to the prevertex.
        return Ok(vec![thetas[0] - std::f64::consts::PI]);
    }
    let mut min_arc = thetas[0] + TWO_PI - thetas[m - 1];
    for w in thetas.windows(2) {
        min_arc = min_arc.min(w[1] - w[0]);
    }
    if !(min_arc > 1e-12) {
        return Err(SlitMapError::CoincidentPrevertices { min_arc });
    }
    let mut taus = Vec::with_capacity(m);
    for i in 0..m {
        let lo = if i == 0 {
            thetas[m - 1] - TWO_PI
        } else {
            thetas[i - 1]
        };
        taus.push(root_in_arc(lo, thetas[i], thetas, &gammas));
    }
    Ok(taus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn antipodal_pair_has_midpoint_criticals() {
        let gaps = GapVector::exact(2, vec![1, 1]).unwrap();
        let taus = critical_points(&[PI / 2.0, 3.0 * PI / 2.0], &gaps).unwrap();
        assert!((taus[0] - 0.0).abs() < 1e-12, "{taus:?}");
        assert!((taus[1] - PI).abs() < 1e-12, "{taus:?}");
    }

    #[test]
    fn koebe_critical_point_is_antipodal() {
        // Map 4z/(1+z)^2: prevertex at -1, critical point at +1.
        let gaps = GapVector::exact(1, vec![1]).unwrap();
        let taus = critical_points(&[PI], &gaps).unwrap();
        assert!((taus[0] - 0.0).abs() < 1e-12, "{taus:?}");
        // Verify by substitution into the cot equation.
        assert!(crit_g(taus[0], &[PI], &[2.0]).abs() < 1e-13);
    }

    #[test]
    fn three_equal_gaps_criticals_at_cube_roots_of_unity() {
        // Map 2^(2/3) z (1+z^3)^(-2/3): prevertices at cube roots of -1,
        // critical points at cube roots of 1.
        let gaps = GapVector::exact(3, vec![1, 1, 1]).unwrap();
        let thetas = [PI / 3.0, PI, 5.0 * PI / 3.0];
        let taus = critical_points(&thetas, &gaps).unwrap();
        let expect = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];
        for (t, e) in taus.iter().zip(expect) {
            assert!((t - e).abs() < 1e-12, "{taus:?}");
        }
        for &t in &taus {
            assert!(crit_g(t, &thetas, &gaps.gammas()).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_coincident_prevertices() {
        let gaps = GapVector::exact(2, vec![1, 1]).unwrap();
        let err = critical_points(&[1.0, 1.0 + 1e-13], &gaps).unwrap_err();
        assert!(matches!(err, SlitMapError::CoincidentPrevertices { .. }));
    }

    #[test]
    fn residual_meets_tolerance_on_skewed_gaps() {
        let gaps = GapVector::real(vec![0.3, 0.5, 0.9, 0.3]).unwrap();
        // Prevertices at arbitrary ordered angles; equation residual must be
        // below 1e-13 in every arc.
        let thetas = [0.4, 1.1, 2.9, 5.0];
        let taus = critical_points(&thetas, &gaps).unwrap();
        for &t in &taus {
            assert!(crit_g(t, &thetas, &gaps.gammas()).abs() < 1e-13);
        }
    }
}
