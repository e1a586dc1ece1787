//! Discretized equilibrium-energy capacity estimate.
//!
//! Each segment is split into `N` panels clustered toward both endpoints by
//! a cosine map (the equilibrium density blows up like an inverse square
//! root at the tips). The charge is piecewise uniform per panel; the energy
//! matrix entry for panels `p, q` is the mean value of `-ln|z - w|` over
//! their product:
//!
//! - pairs on one line through the origin (same segment or antipodal
//!   segments) use the exact closed-form double integral;
//! - other pairs use 16-point Gauss-Legendre outer quadrature over the exact
//!   single-panel potential integral.
//!
//! The quadratic form is minimized over the probability simplex by a KKT
//! warm start (the minimizer is interior in practice) followed by monotone
//! projected gradient descent.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{CapacityEstimate, CapacityMethod, FeketeError, SegmentSet};
use crate::slitmap::wrap_to_pi;

/// 16-point Gauss-Legendre nodes and weights on [-1, 1].
const GL16: [(f64, f64); 16] = [
    (-9.894009349916499e-1, 2.7152459411754037e-2),
    (-9.445750230732326e-1, 6.225352393864771e-2),
    (-8.656312023878318e-1, 9.515851168249259e-2),
    (-7.554044083550030e-1, 1.2462897125553403e-1),
    (-6.178762444026438e-1, 1.4959598881657676e-1),
    (-4.580167776572274e-1, 1.6915651939500262e-1),
    (-2.816035507792589e-1, 1.8260341504492361e-1),
    (-9.501250983763745e-2, 1.8945061045506859e-1),
    (9.501250983763745e-2, 1.8945061045506859e-1),
    (2.816035507792589e-1, 1.8260341504492361e-1),
    (4.580167776572274e-1, 1.6915651939500262e-1),
    (6.178762444026438e-1, 1.4959598881657676e-1),
    (7.554044083550030e-1, 1.2462897125553403e-1),
    (8.656312023878318e-1, 9.515851168249259e-2),
    (9.445750230732326e-1, 6.225352393864771e-2),
    (9.894009349916499e-1, 2.7152459411754037e-2),
];

const MAX_DESCENT_ITERS: u32 = 20_000;

struct Panel {
    a: Complex64,
    b: Complex64,
    len: f64,
    seg: usize,
    /// Signed endpoints along the segment's line through the origin.
    s0: f64,
    s1: f64,
}

fn build_panels(segments: &SegmentSet, n_panels: u32) -> Vec<Panel> {
    let mut panels = Vec::with_capacity(segments.len() * n_panels as usize);
    for (seg, &phi) in segments.angles().iter().enumerate() {
        let dir = Complex64::cis(phi);
        for i in 0..n_panels {
            let t0 = 0.5 * (1.0 - (std::f64::consts::PI * i as f64 / n_panels as f64).cos());
            let t1 =
                0.5 * (1.0 - (std::f64::consts::PI * (i + 1) as f64 / n_panels as f64).cos());
            panels.push(Panel {
                a: t0 * dir,
                b: t1 * dir,
                len: t1 - t0,
                seg,
                s0: t0,
                s1: t1,
            });
        }
    }
    panels
}

/// `H(s) = s^2 (ln|s| - 3/2) / 2`, the second antiderivative of `ln|s|`.
fn h(s: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        0.5 * s * s * (s.abs().ln() - 1.5)
    }
}

/// Exact `int int ln|x - y| dx dy` over `[a1,b1] x [a2,b2]` on one line.
fn colinear_double(a1: f64, b1: f64, a2: f64, b2: f64) -> f64 {
    h(b1 - a2) + h(a1 - b2) - h(a1 - a2) - h(b1 - b2)
}

/// Exact `int ln|z - w| |dw|` over the straight panel `[a, b]`.
fn line_potential(z: Complex64, a: Complex64, b: Complex64, len: f64) -> f64 {
    let e = (b - a) / len;
    let r = (z - a) * e.conj();
    let (p, hgt) = (r.re, r.im);
    let g = |v: f64| {
        if hgt == 0.0 {
            if v == 0.0 {
                0.0
            } else {
                v * v.abs().ln() - v
            }
        } else {
            0.5 * (v * (v * v + hgt * hgt).ln() - 2.0 * v + 2.0 * hgt * (v / hgt).atan())
        }
    };
    g(len - p) - g(-p)
}

/// Mean of `-ln|z-w|` over the product of panels `p` and `q`.
fn kernel_entry(segments: &SegmentSet, p: &Panel, q: &Panel) -> f64 {
    let same_line = p.seg == q.seg || {
        let diff = segments.angles()[p.seg] - segments.angles()[q.seg];
        (wrap_to_pi(diff).abs() - std::f64::consts::PI).abs() < 1e-13
    };
    let integral = if same_line {
        // Antipodal segments sit at negative coordinates along p's line.
        let (qa, qb) = if p.seg == q.seg {
            (q.s0, q.s1)
        } else {
            (-q.s1, -q.s0)
        };
        colinear_double(p.s0, p.s1, qa, qb)
    } else {
        let mid = 0.5 * (p.a + p.b);
        let half = 0.5 * (p.b - p.a);
        let mut acc = 0.0;
        for (x, w) in GL16 {
            acc += w * line_potential(mid + x * half, q.a, q.b, q.len);
        }
        acc * 0.5 * p.len
    };
    -integral / (p.len * q.len)
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(x: &mut [f64]) {
    let mut sorted: Vec<f64> = x.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut acc = 0.0;
    let mut theta = 0.0;
    let mut k = 0;
    for (i, &v) in sorted.iter().enumerate() {
        acc += v;
        let t = (acc - 1.0) / (i + 1) as f64;
        if v - t > 0.0 {
            theta = t;
            k = i + 1;
        }
    }
    debug_assert!(k > 0);
    let mut total = 0.0;
    for v in x.iter_mut() {
        *v = (*v - theta).max(0.0);
        total += *v;
    }
    // Exact mass renormalization.
    for v in x.iter_mut() {
        *v /= total;
    }
}

fn energy_of(k: &[Vec<f64>], x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(i, &xi)| {
            let row: f64 = k[i].iter().zip(x).map(|(kij, xj)| kij * xj).sum();
            xi * row
        })
        .sum()
}

fn gradient(k: &[Vec<f64>], x: &[f64], out: &mut [f64]) {
    out.par_iter_mut().enumerate().for_each(|(i, g)| {
        *g = 2.0 * k[i].iter().zip(x).map(|(kij, xj)| kij * xj).sum::<f64>();
    });
}

/// Interior KKT warm start: solve `[2K, -1; 1^T, 0] [x; mu] = [0; 1]`.
fn kkt_start(k: &[Vec<f64>]) -> Option<Vec<f64>> {
    let p = k.len();
    let dim = p + 1;
    let mut a = vec![0.0; dim * dim];
    let mut b = vec![0.0; dim];
    for i in 0..p {
        for j in 0..p {
            a[i * dim + j] = 2.0 * k[i][j];
        }
        a[i * dim + p] = -1.0;
        a[p * dim + i] = 1.0;
    }
    b[p] = 1.0;
    crate::linalg::solve(&mut a, &mut b)?;
    b.truncate(p);
    Some(b)
}

/// Minimal discretized logarithmic energy of `segments` at `panels` panels
/// per segment; `rho_inf = exp(-energy)`.
pub fn equilibrium_energy(
    segments: &SegmentSet,
    panels: u32,
) -> Result<CapacityEstimate, FeketeError> {
    if panels < 32 {
        return Err(FeketeError::TooFewPanels(panels));
    }
    let panel_list = build_panels(segments, panels);
    let p = panel_list.len();

    // Upper triangle (incl. diagonal) per row, mirrored afterwards.
    let mut k: Vec<Vec<f64>> = (0..p)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; p];
            for j in i..p {
                row[j] = kernel_entry(segments, &panel_list[i], &panel_list[j]);
            }
            row
        })
        .collect();
    for i in 0..p {
        for j in 0..i {
            k[i][j] = k[j][i];
        }
    }

    // Warm start at the equality-constrained optimum when it is feasible.
    let mut x = match kkt_start(&k) {
        Some(sol) if sol.iter().all(|v| v.is_finite()) => {
            let mut x = sol;
            if x.iter().any(|&v| v < 0.0) {
                project_simplex(&mut x);
            } else {
                let total: f64 = x.iter().sum();
                x.iter_mut().for_each(|v| *v /= total);
            }
            x
        }
        _ => vec![1.0 / p as f64; p],
    };

    // Monotone projected gradient descent polish.
    let mut energy = energy_of(&k, &x);
    let mut grad = vec![0.0; p];
    let mut step = 0.25;
    let mut stalled = 0;
    let mut iterations = 0;
    while iterations < MAX_DESCENT_ITERS {
        iterations += 1;
        gradient(&k, &x, &mut grad);
        let mut accepted = false;
        let mut alpha = step;
        for _ in 0..30 {
            let mut cand: Vec<f64> = x.iter().zip(&grad).map(|(&xi, &g)| xi - alpha * g).collect();
            project_simplex(&mut cand);
            let cand_energy = energy_of(&k, &cand);
            if cand_energy < energy - 1e-15 {
                x = cand;
                energy = cand_energy;
                step = alpha * 1.5;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            // No descent direction at line-search resolution: converged.
            break;
        }
        if step < 1e-14 {
            stalled += 1;
            if stalled > 4 {
                return Err(FeketeError::NonConvergence {
                    iterations,
                    energy,
                    step,
                });
            }
        } else {
            stalled = 0;
        }
    }

    debug_assert!(x.iter().all(|&v| v >= 0.0));
    debug_assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-12);

    Ok(CapacityEstimate {
        delta_sequence: Vec::new(),
        energy_estimate: energy,
        rho_inf: (-energy).exp(),
        method: CapacityMethod::Energy,
    })
}
