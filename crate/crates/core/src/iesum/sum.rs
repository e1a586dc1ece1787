//! The two enumeration routes for `S(n)` and the row table.

use std::collections::BTreeMap;
use std::time::Instant;

use super::{canonicalize, IesumError, PartialSumRow, RhoCache, MAX_N};
use crate::CARDY_LIMIT;

/// Compensated (Neumaier) summation over a fixed term order.
fn kahan_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for t in terms {
        let s = sum + t;
        comp += if sum.abs() >= t.abs() {
            (sum - s) + t
        } else {
            (t - s) + sum
        };
        sum = s;
    }
    sum + comp
}

fn check_n(n: u32) -> Result<(), IesumError> {
    if n == 0 || n > MAX_N {
        return Err(IesumError::BadN(n));
    }
    Ok(())
}

/// Signed class weights accumulated by reduced canonical key. `BTreeMap`
/// fixes the summation order independently of enumeration or thread count.
type ClassWeights = BTreeMap<Vec<u32>, i64>;

fn finish_row(
    n: u32,
    enumerated: u64,
    weights: ClassWeights,
    cache: &mut RhoCache,
    started: Instant,
) -> Result<PartialSumRow, IesumError> {
    let keys: Vec<Vec<u32>> = weights.keys().cloned().collect();
    let new_solves = cache.ensure_batch(&keys)?;
    let s_n = kahan_sum(
        weights
            .iter()
            .map(|(key, &w)| w as f64 * cache.get(key).expect("just solved").rho0.ln()),
    );
    Ok(PartialSumRow {
        n,
        subsets_evaluated: enumerated,
        distinct_classes: keys.len() as u64,
        new_solves,
        s_n,
        gap_to_limit: CARDY_LIMIT - s_n,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

/// `S(n)` by direct iteration over the `2^n - 1` nonempty subsets of `Z_n`,
/// each contributing `(-1)^(m-1) ln rho0` of its gap pattern.
pub fn partial_sum_subsets(n: u32, cache: &mut RhoCache) -> Result<PartialSumRow, IesumError> {
    check_n(n)?;
    let started = Instant::now();
    let mut weights = ClassWeights::new();
    let mut positions = Vec::with_capacity(n as usize);
    let mut parts = Vec::with_capacity(n as usize);
    for mask in 1u64..(1u64 << n) {
        positions.clear();
        for i in 0..n {
            if mask >> i & 1 == 1 {
                positions.push(i);
            }
        }
        let m = positions.len();
        parts.clear();
        for i in 0..m {
            let d = (positions[(i + 1) % m] + n - positions[i]) % n;
            parts.push(if d == 0 { n } else { d });
        }
        let key = canonicalize(&parts).reduced_key();
        let sign = if m % 2 == 1 { 1 } else { -1 };
        *weights.entry(key).or_insert(0) += sign;
    }
    finish_row(n, (1u64 << n) - 1, weights, cache, started)
}

/// `S(n)` by iteration over the `2^(n-1)` compositions of `n`: composition
/// `(a_1, ..., a_m)` carries weight `a_m`, the count of admissible first-slit
/// placements `|{phi_1 : 0 <= phi_1 < pi gamma_m}|` on the `n`-point grid.
pub fn partial_sum_compositions(n: u32, cache: &mut RhoCache) -> Result<PartialSumRow, IesumError> {
    check_n(n)?;
    let started = Instant::now();
    let mut weights = ClassWeights::new();
    let mut parts = Vec::with_capacity(n as usize);
    // Bit i of the mask cuts the composition after position i.
    for mask in 0u64..(1u64 << (n - 1)) {
        parts.clear();
        let mut run = 1u32;
        for i in 0..n - 1 {
            if mask >> i & 1 == 1 {
                parts.push(run);
                run = 1;
            } else {
                run += 1;
            }
        }
        parts.push(run);
        let m = parts.len();
        let weight = *parts.last().unwrap() as i64;
        let key = canonicalize(&parts).reduced_key();
        let signed = if m % 2 == 1 { weight } else { -weight };
        *weights.entry(key).or_insert(0) += signed;
    }
    finish_row(n, 1u64 << (n - 1), weights, cache, started)
}

/// Rows `n = 1..=n_max` through the composition route, sharing one cache.
/// `on_row` fires after each row so long runs can stream results out; the
/// rows built so far survive an error in a later row.
pub fn series_table(
    n_max: u32,
    cache: &mut RhoCache,
    mut on_row: impl FnMut(&PartialSumRow),
) -> Result<Vec<PartialSumRow>, (Vec<PartialSumRow>, IesumError)> {
    let mut rows = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        match partial_sum_compositions(n, cache) {
            Ok(row) => {
                on_row(&row);
                rows.push(row);
            }
            Err(e) => return Err((rows, e)),
        }
    }
    Ok(rows)
}
