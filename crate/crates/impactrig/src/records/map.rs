//! Mass/velocity probability maps: per-bin injury class frequencies over a
//! validated record set.

use super::binning::{BinIndex, MassGrid, VelocityBins};
use super::RecordsError;
use crate::model::{Condition, ExperimentRecord, ImpactorKind, InjuryClass, SourceTag};
use serde::{Deserialize, Serialize};
use std::io::{self, Write};

pub const MAP_CSV_HEADER: &str = "mass_bin,velocity_bin_lo,velocity_bin_hi,class,count,probability";

/// Per-bin class tallies. An all-zero cell means "no data", which exports
/// must keep distinct from probability 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellStats {
    /// Counts indexed in severity order (none, s-i, s-c, t-b).
    pub counts: [usize; 4],
}

impl CellStats {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Class frequencies, or None for a no-data cell.
    pub fn probabilities(&self) -> Option<[f64; 4]> {
        let total = self.total();
        if total == 0 {
            return None;
        }
        let mut p = [0.0; 4];
        for (slot, count) in p.iter_mut().zip(self.counts) {
            *slot = count as f64 / total as f64;
        }
        Some(p)
    }
}

/// Injury class frequencies binned by robot effective mass and measured
/// velocity, for one condition and optionally one impactor.
///
/// The cell table carries one extra row and column for records beyond the
/// configured grid, so class counts over all cells always sum to
/// `total_valid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityMap {
    pub condition: Condition,
    /// None aggregates over all impactors.
    pub impactor: Option<ImpactorKind>,
    pub mass_grid: MassGrid,
    pub velocity_bins: VelocityBins,
    /// Row-major (mass rows × velocity columns), overflow row/column last.
    pub cells: Vec<CellStats>,
    /// Valid records binned into the map.
    pub total_valid: usize,
    /// Records matching the filter but flagged invalid; not binned.
    pub excluded_invalid: usize,
    pub source: SourceTag,
}

impl ProbabilityMap {
    fn rows(&self) -> usize {
        self.mass_grid.len() + 1
    }

    fn cols(&self) -> usize {
        self.velocity_bins.count + 1
    }

    fn flat_index(&self, mass: BinIndex, velocity: BinIndex) -> usize {
        let row = match mass {
            BinIndex::InRange(i) => i,
            BinIndex::Overflow => self.rows() - 1,
        };
        let col = match velocity {
            BinIndex::InRange(i) => i,
            BinIndex::Overflow => self.cols() - 1,
        };
        row * self.cols() + col
    }

    pub fn cell(&self, mass: BinIndex, velocity: BinIndex) -> &CellStats {
        &self.cells[self.flat_index(mass, velocity)]
    }

    /// Sum of class counts over every cell; equals `total_valid`.
    pub fn binned_count(&self) -> usize {
        self.cells.iter().map(CellStats::total).sum()
    }

    /// Long-form CSV, one row per (bin, class). No-data cells render their
    /// probability as `NA`; overflow bins appear only when occupied.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "{MAP_CSV_HEADER}")?;
        let vel_overflow_lo = self.velocity_bins.upper_edge();
        for row in 0..self.rows() {
            let mass_overflow = row == self.rows() - 1;
            let mass_label = if mass_overflow {
                self.mass_grid.overflow_label()
            } else {
                self.mass_grid.label(row)
            };
            for col in 0..self.cols() {
                let vel_overflow = col == self.cols() - 1;
                let cell = &self.cells[row * self.cols() + col];
                if (mass_overflow || vel_overflow) && cell.total() == 0 {
                    continue;
                }
                let (lo, hi) = if vel_overflow {
                    (format!("{vel_overflow_lo:.2}"), "inf".to_string())
                } else {
                    let (lo, hi) = self.velocity_bins.edges(col);
                    (format!("{lo:.2}"), format!("{hi:.2}"))
                };
                let probabilities = cell.probabilities();
                for (class, count) in InjuryClass::ALL.iter().zip(cell.counts) {
                    let p = match probabilities {
                        Some(p) => format!("{:.6}", p[*class as usize]),
                        None => "NA".to_string(),
                    };
                    writeln!(out, "{mass_label},{lo},{hi},{},{count},{p}", class.code())?;
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("map serialization cannot fail")
    }
}

/// Bin the valid records matching `condition` (and `impactor`, if given)
/// into class frequencies per (mass, velocity) cell.
///
/// Mass bins use the robot effective mass; velocity bins use the measured
/// collision velocity. An empty record set yields an empty map.
pub fn probability_map(
    records: &[ExperimentRecord],
    condition: Condition,
    impactor: Option<ImpactorKind>,
    mass_grid: MassGrid,
    velocity_bins: VelocityBins,
    source: SourceTag,
) -> Result<ProbabilityMap, RecordsError> {
    velocity_bins.validate()?;
    let mut map = ProbabilityMap {
        condition,
        impactor,
        mass_grid,
        velocity_bins,
        cells: Vec::new(),
        total_valid: 0,
        excluded_invalid: 0,
        source,
    };
    map.cells = vec![CellStats::default(); map.rows() * map.cols()];
    for record in records {
        if record.condition != condition {
            continue;
        }
        if let Some(kind) = impactor {
            if record.impactor.kind != kind {
                continue;
            }
        }
        if !record.valid {
            map.excluded_invalid += 1;
            continue;
        }
        let mass = map.mass_grid.index_of(record.robot_eff_mass_kg);
        let velocity = map.velocity_bins.index_of(record.measured_velocity_m_s);
        let index = map.flat_index(mass, velocity);
        map.cells[index].counts[record.injury as usize] += 1;
        map.total_valid += 1;
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DataSource, ImpactorGeometry, SurrogateSite};

    fn record(
        condition: Condition,
        kind: ImpactorKind,
        mass: f64,
        velocity: f64,
        injury: InjuryClass,
        valid: bool,
    ) -> ExperimentRecord {
        ExperimentRecord {
            condition,
            impactor: ImpactorGeometry::bundled(kind),
            site: SurrogateSite::ALL[0],
            human_eff_mass_kg: 2.58,
            robot_eff_mass_kg: mass,
            desired_velocity_m_s: velocity,
            measured_velocity_m_s: velocity,
            peak_force_n: 100.0,
            force_saturated: false,
            injury,
            valid,
            invalid_reason: if valid { None } else { Some("test".into()) },
            specimen_id: "spec-1".into(),
            provenance: DataSource::Synthetic,
        }
    }

    fn tag() -> SourceTag {
        SourceTag::new(DataSource::Synthetic, "test records")
    }

    #[test]
    fn single_bin_class_frequencies() {
        let records = vec![
            record(Condition::IA, ImpactorKind::Edge, 5.12, 0.74, InjuryClass::None, true),
            record(Condition::IA, ImpactorKind::Edge, 5.12, 0.76, InjuryClass::SkinImprint, true),
            record(Condition::IA, ImpactorKind::Edge, 5.12, 0.80, InjuryClass::SkinCut, true),
            record(Condition::IA, ImpactorKind::Edge, 5.12, 0.95, InjuryClass::SkinCut, true),
        ];
        let map = probability_map(
            &records,
            Condition::IA,
            Some(ImpactorKind::Edge),
            MassGrid::bundled(),
            VelocityBins::default(),
            tag(),
        )
        .unwrap();
        let cell = map.cell(BinIndex::InRange(1), BinIndex::InRange(1));
        let p = cell.probabilities().unwrap();
        assert_eq!(p, [0.25, 0.25, 0.5, 0.0]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(map.total_valid, 4);
    }

    #[test]
    fn uniform_class_has_probability_one() {
        let records: Vec<_> = (0..5)
            .map(|_| record(Condition::IB, ImpactorKind::Wedge, 7.04, 1.2, InjuryClass::SkinCut, true))
            .collect();
        let map = probability_map(
            &records,
            Condition::IB,
            Some(ImpactorKind::Wedge),
            MassGrid::bundled(),
            VelocityBins::default(),
            tag(),
        )
        .unwrap();
        let p = map
            .cell(BinIndex::InRange(2), BinIndex::InRange(2))
            .probabilities()
            .unwrap();
        assert_eq!(p[InjuryClass::SkinCut as usize], 1.0);
    }

    #[test]
    fn counts_are_conserved_including_overflow() {
        let mut records = vec![
            record(Condition::IA, ImpactorKind::Sheet, 5.12, 0.3, InjuryClass::None, true),
            record(Condition::IA, ImpactorKind::Sheet, 12.0, 1.2, InjuryClass::SkinCut, true),
            record(Condition::IA, ImpactorKind::Sheet, 5.12, 9.0, InjuryClass::SkinImprint, true),
            record(Condition::IA, ImpactorKind::Sheet, 3.2, 2.0, InjuryClass::None, false),
            record(Condition::IB, ImpactorKind::Sheet, 3.2, 2.0, InjuryClass::None, true),
            record(Condition::IA, ImpactorKind::Wedge, 3.2, 2.0, InjuryClass::None, true),
        ];
        let map = probability_map(
            &records,
            Condition::IA,
            Some(ImpactorKind::Sheet),
            MassGrid::bundled(),
            VelocityBins::default(),
            tag(),
        )
        .unwrap();
        assert_eq!(map.total_valid, 3);
        assert_eq!(map.excluded_invalid, 1);
        assert_eq!(map.binned_count(), 3);
        assert_eq!(
            map.cell(BinIndex::Overflow, BinIndex::InRange(2)).total(),
            1
        );
        assert_eq!(
            map.cell(BinIndex::InRange(1), BinIndex::Overflow).total(),
            1
        );

        // Order independence: aggregation is a pure count.
        records.reverse();
        let reversed = probability_map(
            &records,
            Condition::IA,
            Some(ImpactorKind::Sheet),
            MassGrid::bundled(),
            VelocityBins::default(),
            tag(),
        )
        .unwrap();
        assert_eq!(reversed, map);
    }

    #[test]
    fn empty_input_gives_empty_map() {
        let map = probability_map(
            &[],
            Condition::IA,
            None,
            MassGrid::bundled(),
            VelocityBins::default(),
            tag(),
        )
        .unwrap();
        assert_eq!(map.total_valid, 0);
        assert_eq!(map.binned_count(), 0);
    }

    #[test]
    fn csv_renders_no_data_as_na_and_skips_empty_overflow() {
        let records = vec![record(
            Condition::IA,
            ImpactorKind::Edge,
            5.12,
            0.74,
            InjuryClass::SkinCut,
            true,
        )];
        let map = probability_map(
            &records,
            Condition::IA,
            Some(ImpactorKind::Edge),
            MassGrid::bundled(),
            VelocityBins::default(),
            tag(),
        )
        .unwrap();
        let mut out = Vec::new();
        map.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("mass_bin,velocity_bin_lo,velocity_bin_hi,class,count,probability\n"));
        assert!(text.contains("5.12,0.50,1.00,s-c,1,1.000000"));
        assert!(text.contains("3.20,0.00,0.50,none,0,NA"));
        assert!(!text.contains("inf"));
        assert!(!text.contains(">8.97"));
        // In-range cells: 4 mass rows x 5 velocity bins x 4 classes + header.
        assert_eq!(text.lines().count(), 1 + 4 * 5 * 4);
        // A zero count inside a data cell is probability 0; a no-data cell
        // is NA for every class, never 0.
        assert!(text.contains("5.12,0.50,1.00,none,0,0.000000"));
        for line in text.lines().skip(1) {
            let fields: Vec<_> = line.split(',').collect();
            let is_data_cell = fields[0] == "5.12" && fields[1] == "0.50";
            if !is_data_cell {
                assert_eq!(fields[5], "NA");
            }
        }
    }
}
