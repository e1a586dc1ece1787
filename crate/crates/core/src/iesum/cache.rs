//! Memoizing store of solved conformal radii, keyed by reduced canonical
//! gap parts, with an append-only text file behind it.
//!
//! File format, one record per line:
//!
//! ```text
//! n_reduced parts_csv rho0_hex residual iterations
//! ```
//!
//! where `rho0_hex` is a bit-exact hexadecimal float. The file is re-read at
//! startup and appended to as new classes are solved, so interrupted table
//! runs resume where they stopped.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use super::hexfloat::{format_hex_f64, parse_hex_f64};
use super::IesumError;
use crate::slitmap::{solve_prevertices, GapVector, SlitConfiguration};

/// Default solver tolerance for cached solves.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct CacheEntry {
    pub rho0: f64,
    pub residual: f64,
    pub iterations: u32,
}

/// One re-verified cache record (see [`RhoCache::verify_entries`]).
#[derive(Debug, Clone)]
pub struct ClassCheck {
    pub key: Vec<u32>,
    pub cached_rho0: f64,
    pub resolved_rho0: f64,
    pub ok: bool,
}

pub struct RhoCache {
    entries: HashMap<Vec<u32>, CacheEntry>,
    writer: Option<BufWriter<File>>,
    tol: f64,
}

impl RhoCache {
    /// Purely in-memory cache.
    pub fn in_memory() -> Self {
        RhoCache {
            entries: HashMap::new(),
            writer: None,
            tol: DEFAULT_TOL,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// File-backed cache: loads every existing record, then appends.
    pub fn open(path: &Path) -> Result<Self, IesumError> {
        let mut entries = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(path)?);
            for (idx, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let (key, entry) = parse_line(&line).map_err(|reason| IesumError::Parse {
                    line: idx + 1,
                    reason,
                })?;
                entries.insert(key, entry);
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(RhoCache {
            entries,
            writer: Some(BufWriter::new(file)),
            tol: DEFAULT_TOL,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn get(&self, key: &[u32]) -> Option<&CacheEntry> {
        self.entries.get(key)
    }

    /// Solve every missing key (in parallel), insert, and persist. Keys must
    /// already be reduced canonical parts. Returns the number of new solves.
    pub fn ensure_batch(&mut self, keys: &[Vec<u32>]) -> Result<u64, IesumError> {
        let mut misses: Vec<&Vec<u32>> = keys
            .iter()
            .filter(|k| !self.entries.contains_key(k.as_slice()))
            .collect();
        misses.sort();
        misses.dedup();
        if misses.is_empty() {
            return Ok(0);
        }
        let tol = self.tol;
        let solved: Vec<Result<CacheEntry, IesumError>> = misses
            .par_iter()
            .map(|key| solve_class(key, tol))
            .collect();
        // Scan sequentially so the reported failure is deterministic.
        for (key, result) in misses.iter().zip(solved) {
            let entry = result?;
            if let Some(w) = self.writer.as_mut() {
                writeln!(w, "{}", format_line(key, &entry))?;
            }
            self.entries.insert((*key).clone(), entry);
        }
        if let Some(w) = self.writer.as_mut() {
            w.flush()?;
        }
        Ok(misses.len() as u64)
    }

    /// Re-solve up to `limit` cached classes from scratch (smallest keys
    /// first) and compare against the stored radii at solver tolerance.
    pub fn verify_entries(&self, limit: usize) -> Result<Vec<ClassCheck>, IesumError> {
        let mut keys: Vec<&Vec<u32>> = self.entries.keys().collect();
        keys.sort();
        keys.truncate(limit);
        let tol = self.tol;
        keys.par_iter()
            .map(|key| {
                let cached = self.entries[key.as_slice()];
                let fresh = solve_class(key, tol)?;
                Ok(ClassCheck {
                    key: (*key).clone(),
                    cached_rho0: cached.rho0,
                    resolved_rho0: fresh.rho0,
                    ok: (cached.rho0 - fresh.rho0).abs() <= 10.0 * tol,
                })
            })
            .collect()
    }
}

fn solve_class(key: &[u32], tol: f64) -> Result<CacheEntry, IesumError> {
    let n: u32 = key.iter().sum();
    let gaps = GapVector::exact(n, key.to_vec()).map_err(|source| IesumError::Solve {
        class: key.to_vec(),
        source,
    })?;
    let solution = solve_prevertices(&SlitConfiguration::from_gaps(gaps), tol).map_err(
        |source| IesumError::Solve {
            class: key.to_vec(),
            source,
        },
    )?;
    Ok(CacheEntry {
        rho0: solution.rho0,
        residual: solution.residual,
        iterations: solution.iterations,
    })
}

fn format_line(key: &[u32], entry: &CacheEntry) -> String {
    let n: u32 = key.iter().sum();
    let parts = key
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(",");
    format!(
        "{n} {parts} {} {:e} {}",
        format_hex_f64(entry.rho0),
        entry.residual,
        entry.iterations
    )
}

fn parse_line(line: &str) -> Result<(Vec<u32>, CacheEntry), String> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 5 {
        return Err(format!("expected 5 fields, got {}", fields.len()));
    }
    let n: u32 = fields[0].parse().map_err(|_| "bad n".to_string())?;
    let parts: Vec<u32> = fields[1]
        .split(',')
        .map(|p| p.parse().map_err(|_| format!("bad part {p:?}")))
        .collect::<Result<_, _>>()?;
    if parts.iter().sum::<u32>() != n {
        return Err(format!("parts sum != {n}"));
    }
    let rho0 = parse_hex_f64(fields[2]).ok_or_else(|| format!("bad hex float {:?}", fields[2]))?;
    let residual: f64 = fields[3].parse().map_err(|_| "bad residual".to_string())?;
    let iterations: u32 = fields[4].parse().map_err(|_| "bad iterations".to_string())?;
    Ok((
        parts,
        CacheEntry {
            rho0,
            residual,
            iterations,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_roundtrip() {
        let entry = CacheEntry {
            rho0: 2.0_f64.powf(2.0 / 3.0),
            residual: 3.2e-15,
            iterations: 6,
        };
        let key = vec![1u32, 1, 1];
        let line = format_line(&key, &entry);
        let (k, e) = parse_line(&line).unwrap();
        assert_eq!(k, key);
        assert_eq!(e.rho0.to_bits(), entry.rho0.to_bits());
        assert_eq!(e.iterations, 6);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse_line("3 1,1 0x1p+1").is_err());
        assert!(parse_line("3 1,1,2 0x1p+1 0 4").is_err()); // sum mismatch
        assert!(parse_line("2 1,1 nothex 0 4").is_err());
    }

    #[test]
    fn batch_solves_once_and_persists() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.txt");
        let keys = vec![vec![1u32], vec![1, 1], vec![1u32]];
        {
            let mut cache = RhoCache::open(&path).unwrap();
            assert_eq!(cache.ensure_batch(&keys).unwrap(), 2);
            assert_eq!(cache.ensure_batch(&keys).unwrap(), 0);
            assert!((cache.get(&[1]).unwrap().rho0 - 4.0).abs() < 1e-10);
        }
        // Reload from disk: no new solves needed.
        let mut cache = RhoCache::open(&path).unwrap();
        assert_eq!(cache.len(), 2);
        assert_eq!(cache.ensure_batch(&keys).unwrap(), 0);
        assert!((cache.get(&[1, 1]).unwrap().rho0 - 2.0).abs() < 1e-10);
    }

    #[test]
    fn verify_detects_corrupted_entry() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.txt");
        {
            let mut cache = RhoCache::open(&path).unwrap();
            cache.ensure_batch(&[vec![1], vec![1, 2]]).unwrap();
        }
        // Inject a wrong rho0 for class (1,2).
        let text = std::fs::read_to_string(&path).unwrap();
        let patched: String = text
            .lines()
            .map(|l| {
                if l.contains("1,2") {
                    format!("3 1,2 {} 1e-12 5\n", format_hex_f64(3.0))
                } else {
                    format!("{l}\n")
                }
            })
            .collect();
        std::fs::write(&path, patched).unwrap();

        let cache = RhoCache::open(&path).unwrap();
        let checks = cache.verify_entries(10).unwrap();
        let bad: Vec<_> = checks.iter().filter(|c| !c.ok).collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].key, vec![1, 2]);
    }
}
