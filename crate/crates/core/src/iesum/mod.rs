//! Inclusion/exclusion sum over slit configurations on `n`-th roots of unity.
//!
//! The alternating sum
//!
//! ```text
//! S(n) = sum_{m=1}^{n} (-1)^(m-1) sum_{configs of m slits on n-th roots} ln rho0
//! ```
//!
//! approximates the loop measure of the set of loops that cross the unit
//! circle yet avoid some ray among the `n` rays through roots of unity. Two
//! enumeration routes are implemented and must agree: direct iteration over
//! the `2^n - 1` nonempty subsets of `Z_n`, and iteration over compositions
//! of `n` where the composition `(a_1, ..., a_m)` carries weight `a_m` (the
//! number of admissible placements of the first slit).
//!
//! `rho0` depends on the gap pattern only through its dihedral class
//! (rotation and reflection of the plane do not change a conformal radius),
//! so both routes aggregate weights per canonical class and solve each class
//! once through a memoizing [`RhoCache`].

mod cache;
mod canonical;
mod hexfloat;
mod sum;

pub use cache::{CacheEntry, ClassCheck, RhoCache};
pub use canonical::{canonicalize, CanonicalClass};
pub use sum::{partial_sum_compositions, partial_sum_subsets, series_table};

use serde::Serialize;
use thiserror::Error;

use crate::slitmap::SlitMapError;

/// Largest `n` the enumeration accepts; `2^n` subset masks must stay cheap.
pub const MAX_N: u32 = 24;

#[derive(Debug, Error)]
pub enum IesumError {
    #[error("n = {0} outside 1..={MAX_N}")]
    BadN(u32),
    #[error("solver failed for class {class:?}: {source}")]
    Solve {
        class: Vec<u32>,
        source: SlitMapError,
    },
    #[error("cache io: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// One row of the partial-sum table.
#[derive(Debug, Clone, Serialize)]
pub struct PartialSumRow {
    pub n: u32,
    /// Work enumerated for this row: `2^n - 1` subsets for the subset route,
    /// `2^(n-1)` compositions for the composition route.
    pub subsets_evaluated: u64,
    /// Distinct canonical classes this row touched (after gcd reduction).
    pub distinct_classes: u64,
    /// Classes actually solved for this row (cache misses).
    pub new_solves: u64,
    /// The alternating sum `S(n)`.
    pub s_n: f64,
    /// `2*pi/sqrt(3) - S(n)`.
    pub gap_to_limit: f64,
    /// Wall-clock seconds spent building this row.
    pub wall_time: f64,
}
