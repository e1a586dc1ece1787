//! Fekete products by multi-start coordinate ascent.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::SegmentSet;

const SEED: u64 = 0x5eed_fe7e_7e5e_ed00;
const COARSE_GRID: usize = 64;
const GOLDEN_ITERS: u32 = 40;
const MAX_SWEEPS: u32 = 80;

#[derive(Clone, Copy)]
struct SegPoint {
    seg: usize,
    t: f64,
}

fn position(segments: &SegmentSet, p: SegPoint) -> Complex64 {
    p.t * Complex64::cis(segments.angles()[p.seg])
}

/// Sum of log distances from `z` to all points except index `skip`.
fn log_dist_sum(points: &[SegPoint], segments: &SegmentSet, skip: usize, z: Complex64) -> f64 {
    points
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != skip)
        .map(|(_, &p)| (z - position(segments, p)).norm().max(1e-300).ln())
        .sum()
}

fn total_log_product(points: &[SegPoint], segments: &SegmentSet) -> f64 {
    let mut acc = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = (position(segments, points[i]) - position(segments, points[j])).norm();
            acc += d.max(1e-300).ln();
        }
    }
    acc
}

/// Best `t` on one segment for point `skip`, by coarse grid plus golden
/// section around the best cell.
fn best_on_segment(
    points: &[SegPoint],
    segments: &SegmentSet,
    skip: usize,
    seg: usize,
) -> (f64, f64) {
    let eval = |t: f64| {
        log_dist_sum(
            points,
            segments,
            skip,
            t * Complex64::cis(segments.angles()[seg]),
        )
    };
    let mut best_t = 0.0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=COARSE_GRID {
        let t = i as f64 / COARSE_GRID as f64;
        let v = eval(t);
        if v > best_v {
            best_v = v;
            best_t = t;
        }
    }
    let cell = 1.0 / COARSE_GRID as f64;
    let (mut lo, mut hi) = ((best_t - cell).max(0.0), (best_t + cell).min(1.0));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
    let (mut f1, mut f2) = (eval(x1), eval(x2));
    for _ in 0..GOLDEN_ITERS {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = eval(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = eval(x1);
        }
    }
    let t = 0.5 * (lo + hi);
    let v = eval(t);
    if v >= best_v {
        (t, v)
    } else {
        (best_t, best_v)
    }
}

fn ascend(mut points: Vec<SegPoint>, segments: &SegmentSet) -> f64 {
    let n = points.len();
    let mut current = total_log_product(&points, segments);
    for _ in 0..MAX_SWEEPS {
        let mut improved = false;
        for i in 0..n {
            let mut best = (points[i], log_dist_sum(&points, segments, i, position(segments, points[i])));
            for seg in 0..segments.len() {
                let (t, v) = best_on_segment(&points, segments, i, seg);
                if v > best.1 + 1e-14 {
                    best = (SegPoint { seg, t }, v);
                }
            }
            if best.0.seg != points[i].seg || (best.0.t - points[i].t).abs() > 1e-15 {
                points[i] = best.0;
                improved = true;
            }
        }
        let next = total_log_product(&points, segments);
        if !improved || next - current < 1e-13 {
            current = current.max(next);
            break;
        }
        current = next;
    }
    current
}

/// Best found `delta_n`: the `C(n,2)`-th root of the maximal product of
/// pairwise distances of `n` points on the segment star. Multi-start
/// coordinate ascent; a lower bound on the true Fekete value. `n >= 2`.
pub fn fekete_delta(segments: &SegmentSet, n: u32, restarts: u32) -> f64 {
    assert!(n >= 2, "fekete_delta needs at least two points");
    let n = n as usize;
    let m = segments.len();
    let starts: Vec<Vec<SegPoint>> = (0..=restarts)
        .map(|r| {
            if r == 0 {
                // Structured start: outer endpoints first, then even spacing.
                (0..n)
                    .map(|i| SegPoint {
                        seg: i % m,
                        t: if i < m {
                            1.0
                        } else {
                            (i / m) as f64 / (n / m + 1) as f64
                        },
                    })
                    .collect()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(SEED.wrapping_add(r as u64));
                (0..n)
                    .map(|_| SegPoint {
                        seg: rng.gen_range(0..m),
                        t: rng.gen::<f64>(),
                    })
                    .collect()
            }
        })
        .collect();
    let best = starts
        .into_par_iter()
        .map(|points| ascend(points, segments))
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let pairs = (n * (n - 1) / 2) as f64;
    (best / pairs).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points_on_a_segment_sit_at_the_endpoints() {
        let e = SegmentSet::new(vec![0.0]).unwrap();
        let d = fekete_delta(&e, 2, 2);
        assert!((d - 1.0).abs() < 1e-9, "{d}");
    }

    #[test]
    fn three_points_match_brute_force() {
        // Independent oracle: exhaustive grid over ordered triples on [0,1].
        let grid = 160;
        let mut best = f64::NEG_INFINITY;
        let mut arg = (0.0, 0.0, 0.0);
        for i in 0..=grid {
            for j in i + 1..=grid {
                for k in j + 1..=grid {
                    let (a, b, c) = (
                        i as f64 / grid as f64,
                        j as f64 / grid as f64,
                        k as f64 / grid as f64,
                    );
                    let p = (b - a) * (c - b) * (c - a);
                    if p > best {
                        best = p;
                        arg = (a, b, c);
                    }
                }
            }
        }
        assert_eq!(arg, (0.0, 0.5, 1.0));
        assert!((best - 0.25).abs() < 1e-12);

        let e = SegmentSet::new(vec![0.0]).unwrap();
        let d = fekete_delta(&e, 3, 3);
        let expect = 0.25f64.powf(1.0 / 3.0);
        assert!((d - expect).abs() < 1e-6, "{d} vs {expect}");
    }

    #[test]
    fn antipodal_pair_approaches_one_half() {
        // Diameter through the origin: rho_inf = 1/2; delta_16 overshoots it
        // from above but must already be within 15%.
        let e = SegmentSet::new(vec![0.0, std::f64::consts::PI]).unwrap();
        let d = fekete_delta(&e, 16, 4);
        assert!(d > 0.5 - 1e-9, "delta_n must stay above rho_inf, got {d}");
        assert!((d - 0.5).abs() / 0.5 < 0.15, "{d}");
    }

    #[test]
    fn deterministic_across_calls() {
        let e = SegmentSet::new(vec![0.0, 1.9]).unwrap();
        let a = fekete_delta(&e, 6, 5);
        let b = fekete_delta(&e, 6, 5);
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
