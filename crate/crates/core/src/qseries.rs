//! Cardy's conjectured annulus function
//!
//! ```text
//! F0(rho) = 6 pi * sum_{k in Z} (-1)^(k-1) k q^(3k^2/2 - k + 1/8)
//!                  / prod_{k>=1} (1 - q^k),        q = exp(-2 pi^2 / rho),
//! ```
//!
//! its large-`rho` asymptote `rho - 2*pi/sqrt(3)`, and the consistency
//! bounds it is checked against.
//!
//! Evaluation is by direct summation with rigorous geometric tail bounds.
//! The working precision is chosen per call: as `rho` grows, `q -> 1` and
//! the alternating numerator cancels down to a value of order
//! `exp(-rho/12)` relative to its terms, so roughly `rho/12` extra bits are
//! needed before the sign of the sum is even meaningful (double precision
//! dies near `rho ~ 150`). MPFR carries the computation; results are
//! returned as `f64` together with the truncation orders and a tail bound.

use rug::float::Constant;
use rug::Float;
use serde::Serialize;
use thiserror::Error;

use crate::CARDY_LIMIT;

/// Numerator truncation cap (terms with |k| up to this may be summed).
pub const MAX_K: u64 = 200_000;
/// Euler-product truncation cap.
pub const MAX_P: u64 = 5_000_000;

const LN2: f64 = std::f64::consts::LN_2;

#[derive(Debug, Error, PartialEq)]
pub enum QSeriesError {
    #[error("rho must be positive, got {0}")]
    NonPositiveRho(f64),
    #[error("eps must be positive, got {0}")]
    NonPositiveEps(f64),
    #[error("bounds check requires rho >= 1, got {0}")]
    RhoBelowOne(f64),
    #[error(
        "required truncations exceed the caps: need K = {needed_k} (cap {cap_k}), \
         P = {needed_p} (cap {cap_p})"
    )]
    TruncationCap {
        needed_k: u64,
        needed_p: u64,
        cap_k: u64,
        cap_p: u64,
    },
}

/// One evaluation of `F0`.
#[derive(Debug, Clone, Serialize)]
pub struct CardyEvaluation {
    pub rho: f64,
    /// Nome `exp(-2 pi^2 / rho)` as computed from `rho` in double precision.
    pub q: f64,
    /// Numerator cutoff: terms `|k| <= truncation_k` were summed.
    pub truncation_k: u32,
    /// Denominator cutoff: factors `k <= truncation_prod` were multiplied.
    pub truncation_prod: u32,
    /// `F0(rho)`.
    pub value: f64,
    /// Rigorous bound on the truncation error of `value`.
    pub tail_bound: f64,
}

/// Bounds report for one `rho`.
#[derive(Debug, Clone, Serialize)]
pub struct CardyBoundsReport {
    /// `F0(rho) >= rho - ln 16`.
    pub lower_ok: bool,
    /// `F0(rho) <= rho`.
    pub upper_ok: bool,
    /// `F0(rho) - (rho - 2 pi / sqrt 3)`, resolved at a precision that keeps
    /// its sign and magnitude meaningful up to `rho` around 800.
    pub gap_to_asymptote: f64,
}

/// The nome `q = exp(-2 pi^2 / rho)`.
pub fn nome(rho: f64) -> Result<f64, QSeriesError> {
    if !(rho > 0.0) {
        return Err(QSeriesError::NonPositiveRho(rho));
    }
    Ok((-2.0 * std::f64::consts::PI * std::f64::consts::PI / rho).exp())
}

/// The asymptote `rho - 2 pi / sqrt 3`.
pub fn asymptotic_f0(rho: f64) -> Result<f64, QSeriesError> {
    if !(rho > 0.0) {
        return Err(QSeriesError::NonPositiveRho(rho));
    }
    Ok(rho - CARDY_LIMIT)
}

struct Evaluation {
    value: Float,
    truncation_k: u64,
    truncation_prod: u64,
    tail_bound: f64,
}

/// Working precision in bits for an absolute error target `exp(ln_eps)`.
fn working_prec(rho: f64, ln_eps: f64) -> u32 {
    let cancel_bits = (rho / 12.0 / LN2).ceil().max(0.0);
    let result_bits = ((rho.max(1.0).ln() - ln_eps) / LN2).ceil().max(20.0);
    64 + cancel_bits as u32 + result_bits as u32
}

/// Truncation orders for an absolute error target `exp(ln_eps)` on `F0`.
/// Returns `(K, P, ln(1-q))` or the cap error.
fn truncations(rho: f64, ln_eps: f64, ln_denominator: f64) -> Result<(u64, u64, f64), QSeriesError> {
    let lnq = -2.0 * std::f64::consts::PI * std::f64::consts::PI / rho;
    let one_minus_q = -f64::exp_m1(lnq);
    let ln1mq = one_minus_q.ln();

    // Dropping Euler factors beyond P perturbs F0 relatively by about
    // q^(P+1)/(1-q); demand that times |F0| ~ rho stays below the budget.
    let ln_eps_rel = ln_eps - rho.max(1.0).ln() - 3f64.ln();
    let needed_p = (((ln_eps_rel + ln1mq) / lnq).ceil().max(1.0)) as u64;

    // Numerator tail: paired terms are bounded by 2 k q^(3k^2/2 - k + 1/8),
    // decaying faster than geometrically; the cutoff K is the first index
    // whose successor term falls below eps * D / (12 pi).
    let ln_eps_n = ln_eps + ln_denominator - (12.0 * std::f64::consts::PI).ln();
    let ln_pair = |k: f64| (2.0 * (k + 1.0)).ln() + (1.5 * k * k - k + 0.125) * lnq;
    let mut k = 1u64;
    while ln_pair(k as f64 + 1.0) >= ln_eps_n {
        k += 1;
        if k > MAX_K {
            break;
        }
    }
    // Keep the tail ratio well under 1 so the geometric bound is honest.
    while (3.0 * (k as f64 + 1.0) + 0.5) * lnq + LN2 > -LN2 {
        k += 1;
        if k > MAX_K {
            break;
        }
    }
    if k > MAX_K || needed_p > MAX_P {
        return Err(QSeriesError::TruncationCap {
            needed_k: k,
            needed_p,
            cap_k: MAX_K,
            cap_p: MAX_P,
        });
    }
    Ok((k, needed_p, ln1mq))
}

/// Full evaluation at absolute error target `exp(ln_eps)`.
fn evaluate(rho: f64, ln_eps: f64) -> Result<Evaluation, QSeriesError> {
    let prec = working_prec(rho, ln_eps);
    let pi = Float::with_val(prec, Constant::Pi);
    let lnq_f: Float = Float::with_val(prec, &pi * &pi) * Float::with_val(prec, -2.0 / rho);
    let lnq = lnq_f.to_f64();
    let q = Float::with_val(prec, lnq_f.clone().exp());

    // Denominator first (its size calibrates the numerator budget), with a
    // preliminary P from the relative-error rule alone.
    let (_, p_cut, ln1mq) = truncations(rho, ln_eps, 0.0)?;
    let mut denominator = Float::with_val(prec, 1);
    let mut qk = q.clone();
    for k in 1..=p_cut {
        denominator *= Float::with_val(prec, 1.0) - &qk;
        if k < p_cut {
            qk *= &q;
        }
    }
    let ln_d = denominator.clone().ln().to_f64();

    let (k_cut, p_cut2, _) = truncations(rho, ln_eps, ln_d)?;
    debug_assert_eq!(p_cut, p_cut2);

    // Numerator: pair the +k and -k terms; exponents are exact in f64.
    let mut numerator = Float::with_val(prec, 0);
    for k in 1..=k_cut {
        let kf = k as f64;
        let e_minus = 1.5 * kf * kf - kf + 0.125;
        let e_plus = 1.5 * kf * kf + kf + 0.125;
        let t_minus = Float::with_val(prec, &lnq_f * e_minus).exp();
        let t_plus = Float::with_val(prec, &lnq_f * e_plus).exp();
        let mut pair = Float::with_val(prec, t_minus - t_plus);
        pair *= kf;
        if k % 2 == 0 {
            numerator -= pair;
        } else {
            numerator += pair;
        }
    }

    let six_pi = Float::with_val(prec, &pi * 6.0);
    let value = Float::with_val(prec, &six_pi * &numerator) / &denominator;

    // Rigorous tail bound, assembled in log space to survive tiny scales.
    let kf = k_cut as f64 + 1.0;
    let ln_ratio = LN2 + (3.0 * kf + 0.5) * lnq;
    let ln_tail_n = (2.0 * kf).ln() + (1.5 * kf * kf - kf + 0.125) * lnq
        - (-f64::exp_m1(ln_ratio)).ln();
    let numer_part = ((6.0 * std::f64::consts::PI).ln() + ln_tail_n - ln_d).exp();
    let ln_rel_d = (p_cut as f64 + 1.0) * lnq - ln1mq;
    let denom_part = value.to_f64().abs() * ln_rel_d.exp();
    let tail_bound = numer_part + denom_part;

    Ok(Evaluation {
        value,
        truncation_k: k_cut,
        truncation_prod: p_cut,
        tail_bound,
    })
}

/// Evaluate `F0(rho)` with truncation error below `eps` (absolute).
pub fn cardy_f0(rho: f64, eps: f64) -> Result<CardyEvaluation, QSeriesError> {
    if !(rho > 0.0) {
        return Err(QSeriesError::NonPositiveRho(rho));
    }
    if !(eps > 0.0) {
        return Err(QSeriesError::NonPositiveEps(eps));
    }
    let eval = evaluate(rho, eps.ln())?;
    Ok(CardyEvaluation {
        rho,
        q: nome(rho)?,
        truncation_k: eval.truncation_k.min(u32::MAX as u64) as u32,
        truncation_prod: eval.truncation_prod.min(u32::MAX as u64) as u32,
        value: eval.value.to_f64(),
        tail_bound: eval.tail_bound,
    })
}

/// Log of the absolute accuracy needed to resolve the asymptote gap, which
/// empirically decays like `(4 pi / sqrt 3) e^(-2 rho / 3)`. Capped so the
/// request stays sane for very large `rho`.
fn gap_budget(rho: f64) -> f64 {
    let capped = rho.min(800.0);
    -(2.0 * capped / 3.0) - 2.0 - 100f64.ln()
}

/// Check `rho - ln 16 <= F0(rho) <= rho` and report the distance to the
/// asymptote. Requires `rho >= 1`.
pub fn check_cardy_bounds(rho: f64, eps: f64) -> Result<CardyBoundsReport, QSeriesError> {
    if !(rho >= 1.0) {
        return Err(QSeriesError::RhoBelowOne(rho));
    }
    if !(eps > 0.0) {
        return Err(QSeriesError::NonPositiveEps(eps));
    }
    let ln_eps = eps.ln().min(gap_budget(rho));
    let eval = evaluate(rho, ln_eps)?;
    let prec = eval.value.prec();
    let ln16 = Float::with_val(prec, 16).ln();
    let lower = Float::with_val(prec, rho) - ln16;
    let upper = Float::with_val(prec, rho);
    let pi = Float::with_val(prec, Constant::Pi);
    let limit = Float::with_val(prec, 2 * &pi) / Float::with_val(prec, 3).sqrt();
    let asym = Float::with_val(prec, rho) - limit;
    let gap = Float::with_val(prec, &eval.value - &asym);
    Ok(CardyBoundsReport {
        lower_ok: eval.value >= lower,
        upper_ok: eval.value <= upper,
        gap_to_asymptote: gap.to_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed independently at 60+ digits (direct
    // summation of the series in arbitrary precision).
    const F0_1: f64 = 8.268137907601315900739e-5;
    const F0_5: f64 = 1.629997516167576757793;
    const F0_10: f64 = 6.381634383669466533965;
    const F0_20: f64 = 16.37241302202609277769;
    const F0_50: f64 = 46.37240127153158851839;
    const F0_100: f64 = 96.37240127153156429881;
    const F0_200: f64 = 196.3724012715315642988;
    const NOME_10: f64 = 0.1389111331428002440018;

    const GAP_10: f64 = 9.2331121379e-3;
    const GAP_20: f64 = 1.17504945285e-5;
    const GAP_50: f64 = 2.42195743636e-14;
    const GAP_100: f64 = 8.08506985282e-29;
    const GAP_200: f64 = 9.009865674e-58;
    const GAP_500: f64 = 1.246872181e-144;

    #[test]
    fn nome_values() {
        assert!(nome(1e-6).unwrap() < 1e-300); // q -> 0 as rho -> 0+
        let at_two_pi_sq = nome(2.0 * std::f64::consts::PI * std::f64::consts::PI).unwrap();
        assert!((at_two_pi_sq - (-1f64).exp()).abs() < 1e-15);
        assert!((nome(10.0).unwrap() - NOME_10).abs() < 1e-15);
        assert!(nome(0.0).is_err());
        assert!(nome(-3.0).is_err());
    }

    #[test]
    fn asymptote_values() {
        assert!((asymptotic_f0(CARDY_LIMIT).unwrap()).abs() < 1e-15);
        assert!((asymptotic_f0(100.0).unwrap() - 96.37240127153156).abs() < 1e-11);
        assert!(asymptotic_f0(0.0).is_err());
    }

    #[test]
    fn f0_reference_values() {
        for (rho, expect) in [
            (1.0, F0_1),
            (5.0, F0_5),
            (10.0, F0_10),
            (20.0, F0_20),
            (50.0, F0_50),
            (100.0, F0_100),
            (200.0, F0_200),
        ] {
            let eval = cardy_f0(rho, 1e-13).unwrap();
            assert!(
                (eval.value - expect).abs() <= 1e-12 * expect.max(1e-4),
                "rho={rho}: {} vs {expect}",
                eval.value
            );
            assert!(eval.tail_bound <= 1e-13);
            assert!((eval.q - nome(rho).unwrap()).abs() == 0.0);
        }
    }

    #[test]
    fn f0_vanishes_at_small_rho() {
        let eval = cardy_f0(0.5, 1e-12).unwrap();
        assert!(eval.value > 0.0 && eval.value < 1e-15, "{}", eval.value);
    }

    #[test]
    fn f0_self_consistent_across_eps() {
        let a = cardy_f0(10.0, 1e-10).unwrap();
        let b = cardy_f0(10.0, 1e-14).unwrap();
        assert!((a.value - b.value).abs() < 1e-10);
    }

    #[test]
    fn truncation_doubling_stays_within_tail_bound() {
        // Tightening eps by 100x re-picks larger truncations; the change in
        // value must be inside the first run's reported tail bound.
        for rho in [10.0, 100.0, 300.0] {
            let a = cardy_f0(rho, 1e-10).unwrap();
            let b = cardy_f0(rho, 1e-14).unwrap();
            assert!(b.truncation_k >= a.truncation_k);
            assert!(b.truncation_prod > a.truncation_prod);
            assert!(
                (a.value - b.value).abs() <= a.tail_bound.max(1e-15),
                "rho={rho}: moved {} > bound {}",
                (a.value - b.value).abs(),
                a.tail_bound
            );
            // Larger truncations shrink the bound.
            assert!(b.tail_bound < a.tail_bound);
        }
    }

    #[test]
    fn f0_stays_between_zero_and_rho() {
        for rho in [1.0, 2.0, 5.0, 17.0, 100.0, 500.0, 1000.0, 3000.0, 10000.0] {
            let eval = cardy_f0(rho, 1e-12).unwrap();
            assert!(
                eval.value > 0.0 && eval.value < rho,
                "rho={rho}: {}",
                eval.value
            );
        }
    }

    #[test]
    fn upper_bound_holds_from_ten_up() {
        for rho in [10.0, 50.0, 250.0, 1000.0] {
            let report = check_cardy_bounds(rho, 1e-12).unwrap();
            assert!(report.upper_ok, "rho={rho}");
        }
    }

    #[test]
    fn lower_bound_fails_as_the_asymptote_sits_below_it() {
        // ln 16 ~ 2.7726 < 2 pi / sqrt 3 ~ 3.6276, so F0 ~ rho - 3.6276
        // lies below rho - ln 16 once rho is moderately large. Documented
        // behavior of the series, counter to the printed inequality.
        for rho in [10.0, 50.0, 200.0] {
            let report = check_cardy_bounds(rho, 1e-12).unwrap();
            assert!(!report.lower_ok, "rho={rho}");
        }
    }

    #[test]
    fn gap_matches_reference_and_decreases() {
        let gaps: Vec<f64> = [10.0, 20.0, 50.0, 100.0, 200.0, 500.0]
            .iter()
            .map(|&rho| check_cardy_bounds(rho, 1e-12).unwrap().gap_to_asymptote)
            .collect();
        for (got, expect) in gaps.iter().zip([GAP_10, GAP_20, GAP_50, GAP_100, GAP_200, GAP_500]) {
            assert!(
                ((got - expect) / expect).abs() < 1e-6,
                "{got:e} vs {expect:e}"
            );
        }
        for w in gaps.windows(2) {
            assert!(w[1].abs() < w[0].abs(), "{w:?}");
        }
        assert!(gaps[2].abs() < 1e-2); // |gap| at rho = 50
    }

    #[test]
    fn bounds_check_validates_domain() {
        assert!(matches!(
            check_cardy_bounds(0.5, 1e-12),
            Err(QSeriesError::RhoBelowOne(_))
        ));
        assert!(matches!(
            cardy_f0(10.0, 0.0),
            Err(QSeriesError::NonPositiveEps(_))
        ));
    }

    #[test]
    fn resource_cap_names_needed_truncations() {
        let err = cardy_f0(1e6, 1e-12).unwrap_err();
        match err {
            QSeriesError::TruncationCap {
                needed_p, cap_p, ..
            } => {
                assert!(needed_p > cap_p);
            }
            other => panic!("expected TruncationCap, got {other:?}"),
        }
    }
}
