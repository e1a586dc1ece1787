//! Solver-independent estimates of the transfinite diameter of a star of
//! radial unit segments.
//!
//! The segments `E = union_j [0,1] e^{i phi_j}` are exactly the complement
//! picture of the slit domain handled by [`crate::slitmap`], so the
//! transfinite diameter `rho_inf` of `E` must equal `1/rho0`. Two methods:
//!
//! - [`fekete_delta`]: maximize the geometric mean of pairwise distances of
//!   `n` points on `E` (the defining sequence `delta_n`, which decreases to
//!   `rho_inf` slowly; a definition-faithful sanity check).
//! - [`equilibrium_energy`]: minimize the discretized logarithmic energy of
//!   a charge distribution on `E`; `rho_inf = exp(-minimal energy)` (the
//!   quantitative oracle).

mod delta;
mod energy;

pub use delta::fekete_delta;
pub use energy::equilibrium_energy;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FeketeError {
    #[error("invalid segment set: {0}")]
    BadSegments(String),
    #[error("panel count {0} below minimum 32")]
    TooFewPanels(u32),
    #[error(
        "energy minimization stalled after {iterations} iterations \
         (energy {energy}, step {step:e})"
    )]
    NonConvergence {
        iterations: u32,
        energy: f64,
        step: f64,
    },
}

/// A union of radial unit segments `{t e^{i phi} : t in [0,1]}`.
#[derive(Debug, Clone, Serialize)]
pub struct SegmentSet {
    angles: Vec<f64>,
}

impl SegmentSet {
    /// Segment directions, strictly increasing within one turn.
    pub fn new(angles: Vec<f64>) -> Result<Self, FeketeError> {
        if angles.is_empty() {
            return Err(FeketeError::BadSegments("no segments".into()));
        }
        for w in angles.windows(2) {
            if w[1] <= w[0] {
                return Err(FeketeError::BadSegments(format!(
                    "angles not strictly increasing: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let span = angles.last().unwrap() - angles.first().unwrap();
        if span >= crate::slitmap::TWO_PI {
            return Err(FeketeError::BadSegments(format!(
                "angles span {span} >= 2pi"
            )));
        }
        Ok(SegmentSet { angles })
    }

    /// The segment star complementary to a slit configuration.
    pub fn from_gaps(gaps: &crate::slitmap::GapVector) -> Result<Self, FeketeError> {
        let config = crate::slitmap::SlitConfiguration::from_gaps(gaps.clone());
        SegmentSet::new(config.slit_angles())
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// How a [`CapacityEstimate`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CapacityMethod {
    Energy,
    Fekete,
    Combined,
}

/// Transfinite-diameter estimate with its convergence record.
#[derive(Debug, Clone, Serialize)]
pub struct CapacityEstimate {
    /// Best found `delta_n` per requested `n` (lower bounds on the true
    /// Fekete values, which decrease to `rho_inf` from above).
    pub delta_sequence: Vec<(u32, f64)>,
    /// Minimal discretized logarithmic energy, `ln(1/rho_inf)`.
    pub energy_estimate: f64,
    /// Final transfinite-diameter estimate.
    pub rho_inf: f64,
    pub method: CapacityMethod,
}

/// Convenience wrapper: energy estimate at `panels` per segment plus Fekete
/// products for each `n` in `delta_ns`.
pub fn capacity_estimate(
    segments: &SegmentSet,
    delta_ns: &[u32],
    restarts: u32,
    panels: u32,
) -> Result<CapacityEstimate, FeketeError> {
    let mut est = equilibrium_energy(segments, panels)?;
    est.delta_sequence = delta_ns
        .iter()
        .map(|&n| (n, fekete_delta(segments, n, restarts)))
        .collect();
    est.method = CapacityMethod::Combined;
    Ok(est)
}
