//! Dihedral canonicalization of gap patterns.

use serde::Serialize;

/// A gap pattern on `n`-th roots of unity, canonicalized to the
/// lexicographically least sequence over all cyclic rotations of itself and
/// of its reversal. Two subsets of `Z_n` with congruent gap patterns map to
/// the same class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CanonicalClass {
    /// Sum of the parts.
    pub n: u32,
    /// Canonical gap parts; `gamma_j = 2 * parts[j] / n`.
    pub parts: Vec<u32>,
    /// Number of rotations fixing the pattern (cyclic stabilizer order).
    pub cyclic_symmetry: u32,
    /// True when the reversed pattern is a rotation of the pattern itself.
    pub reversible: bool,
}

impl CanonicalClass {
    /// Number of subsets of `Z_n` whose gap pattern lies in this class:
    /// `n / s` per chirality, doubled when reversal gives a distinct necklace.
    pub fn subset_multiplicity(&self) -> u64 {
        let per_necklace = self.n as u64 / self.cyclic_symmetry as u64;
        if self.reversible {
            per_necklace
        } else {
            2 * per_necklace
        }
    }

    /// Cache key: parts divided by their gcd, so congruent gap geometries at
    /// different `n` share one solve (e.g. `(2,2)` at `n=4` reuses `(1,1)`).
    pub fn reduced_key(&self) -> Vec<u32> {
        let g = self.parts.iter().fold(0u32, |acc, &p| gcd(acc, p));
        self.parts.iter().map(|&p| p / g).collect()
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn min_rotation(seq: &[u32]) -> Vec<u32> {
    let m = seq.len();
    let mut best: Option<Vec<u32>> = None;
    for r in 0..m {
        let cand: Vec<u32> = (0..m).map(|i| seq[(i + r) % m]).collect();
        if best.as_ref().map_or(true, |b| cand < *b) {
            best = Some(cand);
        }
    }
    best.unwrap()
}

/// Canonicalize a positive gap sequence.
pub fn canonicalize(parts: &[u32]) -> CanonicalClass {
    assert!(!parts.is_empty(), "empty gap sequence");
    assert!(parts.iter().all(|&p| p > 0), "non-positive part");
    let m = parts.len();
    let fwd = min_rotation(parts);
    let rev_input: Vec<u32> = parts.iter().rev().copied().collect();
    let rev = min_rotation(&rev_input);
    // rev is the least rotation of the reversal, so comparing least
    // representatives decides whether reversal stays in the same necklace.
    let reversible = rev == fwd;
    let canonical = if rev < fwd { rev } else { fwd };

    let cyclic_symmetry = (0..m)
        .filter(|&r| (0..m).all(|i| canonical[(i + r) % m] == canonical[i]))
        .count() as u32;

    CanonicalClass {
        n: parts.iter().sum(),
        parts: canonical,
        cyclic_symmetry,
        reversible,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        assert_eq!(canonicalize(&[1, 2, 1, 2]).parts, vec![1, 2, 1, 2]);
        assert_eq!(canonicalize(&[2, 1]).parts, vec![1, 2]);
        assert_eq!(canonicalize(&[1, 3, 2]).parts, vec![1, 2, 3]);
    }

    #[test]
    fn canonical_form_is_fixed_point() {
        for parts in [vec![3u32, 1, 4, 1], vec![2, 2, 2], vec![5], vec![1, 2, 3, 4]] {
            let c = canonicalize(&parts);
            assert_eq!(canonicalize(&c.parts).parts, c.parts);
        }
    }

    #[test]
    fn multiplicity_matches_direct_count() {
        // Count subsets of Z_n per class by brute force and compare.
        for n in 1..=10u32 {
            let mut counts = std::collections::HashMap::new();
            for mask in 1u32..(1 << n) {
                let pos: Vec<u32> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                let m = pos.len();
                let parts: Vec<u32> = (0..m)
                    .map(|i| (pos[(i + 1) % m] + n - pos[i]) % n)
                    .map(|d| if d == 0 { n } else { d })
                    .collect();
                let c = canonicalize(&parts);
                *counts.entry(c.parts.clone()).or_insert(0u64) += 1;
            }
            for (parts, count) in counts {
                let c = canonicalize(&parts);
                assert_eq!(
                    c.subset_multiplicity(),
                    count,
                    "n={n} class {parts:?}: predicted {} counted {count}",
                    c.subset_multiplicity()
                );
            }
        }
    }

    #[test]
    fn reduction_shares_congruent_geometries() {
        assert_eq!(canonicalize(&[2, 2]).reduced_key(), vec![1, 1]);
        assert_eq!(canonicalize(&[6, 3, 3]).reduced_key(), vec![1, 1, 2]);
        assert_eq!(canonicalize(&[1, 2]).reduced_key(), vec![1, 2]);
    }

    #[test]
    fn palindromic_and_chiral_classes() {
        assert!(canonicalize(&[1, 2, 1, 2]).reversible);
        // (1,2,4) reversed is (4,2,1) ~ (1,4,2): a different necklace.
        assert!(!canonicalize(&[1, 2, 4]).reversible);
        assert_eq!(canonicalize(&[1, 2, 4]).subset_multiplicity(), 14);
    }
}
