use super::*;
use crate::closedforms;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn solve_gaps(gaps: GapVector) -> SlitMapSolution {
    solve_prevertices(&SlitConfiguration::from_gaps(gaps), 1e-10).unwrap()
}

#[test]
fn single_slit_is_koebe() {
    let sol = solve_gaps(GapVector::exact(1, vec![1]).unwrap());
    assert!((sol.rho0 - 4.0).abs() < 1e-12);
    assert!(sol.residual < 1e-10);
    // Tip of the slit: phi+(1) = 4*1/(1+1)^2 = 1.
    let w = map_eval(&sol, Complex64::new(1.0, 0.0)).unwrap();
    assert!((w - Complex64::new(1.0, 0.0)).norm() < 1e-12, "{w}");
    // Eq. (3.1) from the single tip: |1 - c_1/z_1|^2 = |1 - (-1)|^2 = 4.
    assert!((rho0_of(&sol, 0).unwrap() - 4.0).abs() < 1e-12);
}

#[test]
fn antipodal_pair() {
    let sol = solve_gaps(GapVector::exact(2, vec![1, 1]).unwrap());
    assert!((sol.rho0 - 2.0).abs() < 1e-10);
}

#[test]
fn equal_gaps_match_closed_form() {
    for m in 1..=8u32 {
        let sol = solve_gaps(GapVector::exact(m, vec![1; m as usize]).unwrap());
        let expect = closedforms::rho0_equal(m).unwrap();
        assert!(
            (sol.rho0 - expect).abs() < 1e-10,
            "m={m}: {} vs {expect}",
            sol.rho0
        );
        assert!(sol.interleaving_ok());
    }
}

#[test]
fn two_slit_family_matches_closed_form() {
    for a in 1..10u32 {
        let sol = solve_gaps(GapVector::exact(10, vec![a, 10 - a]).unwrap());
        let expect = closedforms::rho0_two(2.0 * a as f64 / 10.0).unwrap();
        assert!(
            (sol.rho0 - expect).abs() < 1e-10,
            "a={a}: {} vs {expect}",
            sol.rho0
        );
    }
}

#[test]
fn symmetric_three_slit_matches_closed_form() {
    for g in [0.2, 0.4, 0.5, 2.0 / 3.0, 0.8] {
        let sol = solve_gaps(GapVector::real(vec![g, g, 2.0 - 2.0 * g]).unwrap());
        let expect = closedforms::rho0_sym3(g).unwrap();
        assert!(
            (sol.rho0 - expect).abs() < 1e-8,
            "gamma={g}: {} vs {expect}",
            sol.rho0
        );
    }
}

#[test]
fn rho0_consistent_across_tips() {
    let sol = solve_gaps(GapVector::real(vec![0.3, 0.7, 0.55, 0.45]).unwrap());
    let first = rho0_of(&sol, 0).unwrap();
    let last = rho0_of(&sol, sol.m() - 1).unwrap();
    assert!((first - last).abs() < 1e-10);
    for i in 0..sol.m() {
        let r = rho0_of(&sol, i).unwrap();
        assert!((r - sol.rho0).abs() < 1e-10, "tip {i}: {r} vs {}", sol.rho0);
    }
    assert!(matches!(
        rho0_of(&sol, sol.m()),
        Err(SlitMapError::TipIndex { .. })
    ));
}

#[test]
fn map_fixes_origin_and_tip_radii() {
    let sol = solve_gaps(GapVector::real(vec![0.8, 1.2]).unwrap());
    let at_zero = map_eval(&sol, Complex64::new(0.0, 0.0)).unwrap();
    assert_eq!(at_zero, Complex64::new(0.0, 0.0));
    for &tau in &sol.critical_angles {
        let w = map_eval(&sol, Complex64::cis(tau)).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-10, "|w| = {}", w.norm());
    }
}

#[test]
fn map_rejects_prevertex_pole() {
    let sol = solve_gaps(GapVector::exact(1, vec![1]).unwrap());
    let z = Complex64::cis(sol.prevertex_angles[0]);
    assert!(matches!(
        map_eval(&sol, z),
        Err(SlitMapError::PoleAtPrevertex { .. })
    ));
}

#[test]
fn tips_point_along_configured_directions() {
    let config = SlitConfiguration::new(0.3, GapVector::real(vec![0.5, 0.5, 1.0]).unwrap()).unwrap();
    let sol = solve_prevertices(&config, 1e-10).unwrap();
    let phis = config.slit_angles();
    for (i, &tau) in sol.critical_angles.iter().enumerate() {
        let w = map_eval(&sol, Complex64::cis(tau)).unwrap();
        assert!(wrap_to_pi(w.arg() - phis[i]).abs() < 1e-10);
        assert!((w.norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn geometric_mean_identity_two_slits() {
    // Thm-style check: for gaps (gamma, 2-gamma), a_1 = 2*gamma.
    for g in [0.4, 1.0, 1.3] {
        let sol = solve_gaps(GapVector::real(vec![g, 2.0 - g]).unwrap());
        let check = geometric_mean_identity(&sol);
        assert!(
            (check.distances[0] - 2.0 * g).abs() < 1e-9,
            "gamma={g}: a_1 = {}",
            check.distances[0]
        );
        assert!((check.rho0_check - sol.rho0).abs() < 1e-10);
    }
}

#[test]
fn geometric_mean_identity_equal_gaps() {
    let sol = solve_gaps(GapVector::exact(5, vec![1; 5]).unwrap());
    let check = geometric_mean_identity(&sol);
    for a in &check.distances {
        assert!((a - 2.0).abs() < 1e-9, "a_j = {a}");
    }
}

#[test]
fn geometric_mean_identity_single_slit() {
    let sol = solve_gaps(GapVector::exact(1, vec![1]).unwrap());
    let check = geometric_mean_identity(&sol);
    assert!((check.distances[0] - 2.0).abs() < 1e-12);
    assert!((check.rho0_check - 4.0).abs() < 1e-12);
}

#[test]
fn symmetrization_koebe() {
    let base = GapVector::exact(1, vec![1]).unwrap();
    let check = symmetrize_check(&base, 2, 1e-10).unwrap();
    assert!((check.predicted_rho0 - 2.0).abs() < 1e-10);
    assert!((check.solved_rho0 - 2.0).abs() < 1e-10);
    for m in 2..=6u32 {
        let check = symmetrize_check(&base, m, 1e-10).unwrap();
        let expect = closedforms::rho0_equal(m).unwrap();
        assert!((check.predicted_rho0 - expect).abs() < 1e-10);
        assert!((check.solved_rho0 - expect).abs() < 1e-10);
    }
}

#[test]
fn symmetrization_identity_at_k1() {
    let base = GapVector::real(vec![0.6, 1.4]).unwrap();
    let check = symmetrize_check(&base, 1, 1e-10).unwrap();
    assert_eq!(check.predicted_rho0, check.solved_rho0);
}

#[test]
fn symmetrization_law_general() {
    for (base, k) in [
        (GapVector::real(vec![0.8, 1.2]).unwrap(), 4u32),
        (GapVector::exact(3, vec![1, 2]).unwrap(), 3),
        (GapVector::real(vec![0.5, 0.5, 1.0]).unwrap(), 6),
    ] {
        let check = symmetrize_check(&base, k, 1e-10).unwrap();
        assert!(
            (check.predicted_rho0 - check.solved_rho0).abs() < 1e-8,
            "base={base:?} k={k}: {} vs {}",
            check.predicted_rho0,
            check.solved_rho0
        );
    }
}

#[test]
fn rho0_ignores_base_angle() {
    let gaps = GapVector::real(vec![0.25, 0.75, 1.0]).unwrap();
    let reference = solve_gaps(gaps.clone()).rho0;
    for base in [0.1, 1.0, 2.5, 4.0, 6.0] {
        let sol =
            solve_prevertices(&SlitConfiguration::new(base, gaps.clone()).unwrap(), 1e-10).unwrap();
        assert!((sol.rho0 - reference).abs() < 1e-12, "base={base}");
    }
}

#[test]
fn rho0_invariant_under_rotation_and_reversal() {
    let gaps = GapVector::exact(12, vec![1, 4, 2, 5]).unwrap();
    let reference = solve_gaps(gaps.clone()).rho0;
    for r in 1..4 {
        let rot = solve_gaps(gaps.rotated(r)).rho0;
        assert!((rot - reference).abs() < 1e-10, "rotation {r}: {rot}");
    }
    let rev = solve_gaps(gaps.reversed()).rho0;
    assert!((rev - reference).abs() < 1e-10, "reversal: {rev}");
}

#[test]
fn rejects_degenerate_and_bad_inputs() {
    assert!(matches!(
        GapVector::real(vec![1.0, 0.5]),
        Err(SlitMapError::BadGapVector(_))
    ));
    assert!(GapVector::exact(4, vec![1, 2]).is_err());
    assert!(GapVector::exact(4, vec![0, 4]).is_err());
    assert!(GapVector::real(vec![]).is_err());

    let nearly_touching = GapVector::real(vec![1e-7, 2.0 - 1e-7]).unwrap();
    assert!(matches!(
        solve_prevertices(&SlitConfiguration::from_gaps(nearly_touching), 1e-10),
        Err(SlitMapError::DegenerateGaps { .. })
    ));

    let gaps = GapVector::exact(2, vec![1, 1]).unwrap();
    assert!(matches!(
        solve_prevertices(&SlitConfiguration::from_gaps(gaps.clone()), 0.0),
        Err(SlitMapError::BadTolerance(_))
    ));
    assert!(matches!(
        solve_prevertices(&SlitConfiguration::from_gaps(gaps), 1e-3),
        Err(SlitMapError::BadTolerance(_))
    ));
    assert!(SlitConfiguration::new(7.0, GapVector::exact(1, vec![1]).unwrap()).is_err());
}

#[test]
fn strongly_skewed_gaps_solved_via_continuation() {
    // min gamma = 2/22 < 0.1 engages the homotopy path.
    let gaps = GapVector::exact(22, vec![1, 1, 9, 11]).unwrap();
    let sol = solve_gaps(gaps);
    assert!(sol.residual < 1e-10);
    assert!((1.0..=4.0).contains(&sol.rho0));
    assert!(sol.interleaving_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Capacity bounds and interleaving hold for random exact configurations.
    #[test]
    fn bounds_and_interleaving(n in 2u32..14, seed in 0u64..1000) {
        let mut rng = seed;
        let mut parts = Vec::new();
        let mut left = n;
        while left > 0 {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let p = (rng >> 33) as u32 % left + 1;
            parts.push(p);
            left -= p;
        }
        let sol = solve_gaps(GapVector::exact(n, parts).unwrap());
        prop_assert!(sol.rho0 >= 1.0 - 1e-12 && sol.rho0 <= 4.0 + 1e-12);
        prop_assert!(sol.interleaving_ok());
        prop_assert!(sol.residual < 1e-10);
        // Eq. (3.1) consistency across every tip.
        for i in 0..sol.m() {
            prop_assert!((rho0_of(&sol, i).unwrap() - sol.rho0).abs() < 1e-10);
        }
    }

    /// Every factor 1 - z/z_j keeps a nonnegative real part on the disk, so
    /// the principal branch in map_eval never crosses the cut.
    #[test]
    fn map_factors_stay_right_of_cut(r in 0.0f64..1.0, arg in 0.0f64..TWO_PI, theta in 0.0f64..TWO_PI) {
        let z = r * Complex64::cis(arg);
        let factor = Complex64::new(1.0, 0.0) - z * Complex64::cis(-theta);
        prop_assert!(factor.re >= -1e-12);
    }

    /// The map sends the open disk into the slit domain: |phi+| is finite and
    /// the image of a point inside the disk avoids the slit rays' tips region
    /// check is weaker: phi+ is finite and nonzero away from 0.
    #[test]
    fn map_finite_on_disk(r in 0.01f64..0.99, arg in 0.0f64..TWO_PI) {
        let sol = solve_gaps(GapVector::real(vec![0.5, 0.7, 0.8]).unwrap());
        let w = map_eval(&sol, r * Complex64::cis(arg)).unwrap();
        prop_assert!(w.norm().is_finite());
        prop_assert!(w.norm() > 0.0);
    }
}
