//! Binning rules shared by the probability maps: masses snap to the next
//! higher grid edge, velocities group into fixed-width half-open intervals.

use super::RecordsError;
use serde::{Deserialize, Serialize};

/// Relative snap tolerance for mass grid matching. Simulated effective
/// masses differ from the nominal grid labels in the third decimal (the
/// published labels are rounded), so anything within 0.2% of an edge counts
/// as that edge rather than spilling into the next bin.
pub const MASS_SNAP_REL: f64 = 2e-3;

/// Where a value landed in a binning scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinIndex {
    InRange(usize),
    /// Beyond the configured range; kept so aggregation conserves counts.
    Overflow,
}

fn binning_error(reason: impl Into<String>) -> RecordsError {
    RecordsError::InvalidBinning {
        reason: reason.into(),
    }
}

/// Ascending mass edges; a record maps to the smallest edge at or above its
/// robot effective mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassGrid {
    edges_kg: Vec<f64>,
}

impl MassGrid {
    pub fn new(edges_kg: Vec<f64>) -> Result<Self, RecordsError> {
        if edges_kg.is_empty() {
            return Err(binning_error("mass grid needs at least one edge"));
        }
        if edges_kg.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(binning_error("mass grid edges must be finite and > 0"));
        }
        for pair in edges_kg.windows(2) {
            if pair[1] <= pair[0] {
                return Err(binning_error("mass grid edges must be strictly increasing"));
            }
        }
        Ok(MassGrid { edges_kg })
    }

    /// The four robot builds of the bundled rig, labeled by their nominal
    /// effective masses.
    pub fn bundled() -> Self {
        MassGrid {
            edges_kg: vec![3.20, 5.12, 7.04, 8.97],
        }
    }

    pub fn edges_kg(&self) -> &[f64] {
        &self.edges_kg
    }

    pub fn len(&self) -> usize {
        self.edges_kg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges_kg.is_empty()
    }

    /// Smallest edge containing the mass ("round to the next higher value"),
    /// with [`MASS_SNAP_REL`] slack so near-edge masses stay on their label.
    pub fn index_of(&self, mass_kg: f64) -> BinIndex {
        if !mass_kg.is_finite() {
            return BinIndex::Overflow;
        }
        for (i, edge) in self.edges_kg.iter().enumerate() {
            if mass_kg <= edge * (1.0 + MASS_SNAP_REL) {
                return BinIndex::InRange(i);
            }
        }
        BinIndex::Overflow
    }

    pub fn label(&self, index: usize) -> String {
        format!("{:.2}", self.edges_kg[index])
    }

    pub fn overflow_label(&self) -> String {
        format!(">{:.2}", self.edges_kg[self.edges_kg.len() - 1])
    }
}

/// Uniform half-open velocity intervals `(start + i·width, start + (i+1)·width]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityBins {
    pub start_m_s: f64,
    pub width_m_s: f64,
    pub count: usize,
}

impl Default for VelocityBins {
    /// Five 0.5 m/s groups covering the tested range (0, 2.5].
    fn default() -> Self {
        VelocityBins {
            start_m_s: 0.0,
            width_m_s: 0.5,
            count: 5,
        }
    }
}

impl VelocityBins {
    pub fn new(start_m_s: f64, width_m_s: f64, count: usize) -> Result<Self, RecordsError> {
        let bins = VelocityBins {
            start_m_s,
            width_m_s,
            count,
        };
        bins.validate()?;
        Ok(bins)
    }

    pub fn validate(&self) -> Result<(), RecordsError> {
        if !(self.start_m_s.is_finite() && self.start_m_s >= 0.0) {
            return Err(binning_error("velocity bin start must be finite and >= 0"));
        }
        if !(self.width_m_s.is_finite() && self.width_m_s > 0.0) {
            return Err(binning_error("velocity bin width must be finite and > 0"));
        }
        if self.count == 0 {
            return Err(binning_error("velocity bin count must be >= 1"));
        }
        Ok(())
    }

    pub fn index_of(&self, v_m_s: f64) -> BinIndex {
        if !v_m_s.is_finite() {
            return BinIndex::Overflow;
        }
        let rel = (v_m_s - self.start_m_s) / self.width_m_s;
        // Values at or below the range start land in the first bin; upper
        // edges belong to their bin (half-open on the left).
        let index = (rel.ceil() as isize - 1).max(0) as usize;
        if index >= self.count {
            BinIndex::Overflow
        } else {
            BinIndex::InRange(index)
        }
    }

    /// (lower, upper) edges of an in-range bin.
    pub fn edges(&self, index: usize) -> (f64, f64) {
        (
            self.start_m_s + index as f64 * self.width_m_s,
            self.start_m_s + (index + 1) as f64 * self.width_m_s,
        )
    }

    pub fn upper_edge(&self) -> f64 {
        self.start_m_s + self.count as f64 * self.width_m_s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn velocity_bins_follow_half_open_rule() {
        let bins = VelocityBins::default();
        assert_eq!(bins.index_of(0.74), BinIndex::InRange(1));
        assert_eq!(bins.index_of(0.5), BinIndex::InRange(0));
        assert_eq!(bins.index_of(0.500001), BinIndex::InRange(1));
        assert_eq!(bins.index_of(1.0), BinIndex::InRange(1));
        assert_eq!(bins.index_of(0.0), BinIndex::InRange(0));
        assert_eq!(bins.index_of(2.5), BinIndex::InRange(4));
        assert_eq!(bins.index_of(2.5001), BinIndex::Overflow);
        assert_eq!(bins.edges(1), (0.5, 1.0));
        assert_eq!(bins.upper_edge(), 2.5);
    }

    #[test]
    fn velocity_bins_reject_bad_config() {
        assert!(VelocityBins::new(0.0, 0.0, 5).is_err());
        assert!(VelocityBins::new(-1.0, 0.5, 5).is_err());
        assert!(VelocityBins::new(0.0, 0.5, 0).is_err());
    }

    #[test]
    fn mass_grid_rounds_to_next_higher_edge() {
        let grid = MassGrid::bundled();
        // True effective masses of the bundled robot builds sit just above
        // their rounded labels; the snap keeps them on the label.
        assert_eq!(grid.index_of(3.200_153), BinIndex::InRange(0));
        assert_eq!(grid.index_of(5.123_806), BinIndex::InRange(1));
        assert_eq!(grid.index_of(7.047_733), BinIndex::InRange(2));
        assert_eq!(grid.index_of(8.973_688), BinIndex::InRange(3));
        // In-between masses round up.
        assert_eq!(grid.index_of(4.0), BinIndex::InRange(1));
        assert_eq!(grid.index_of(5.131), BinIndex::InRange(2));
        assert_eq!(grid.index_of(0.5), BinIndex::InRange(0));
        assert_eq!(grid.index_of(9.5), BinIndex::Overflow);
        assert_eq!(grid.label(1), "5.12");
        assert_eq!(grid.overflow_label(), ">8.97");
    }

    #[test]
    fn mass_grid_rejects_bad_edges() {
        assert!(MassGrid::new(vec![]).is_err());
        assert!(MassGrid::new(vec![3.0, 3.0]).is_err());
        assert!(MassGrid::new(vec![3.0, 2.0]).is_err());
        assert!(MassGrid::new(vec![-1.0, 2.0]).is_err());
    }
}
