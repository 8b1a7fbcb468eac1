//! Flat aggregates over a record set: injury percentages under velocity
//! caps, and peak-force statistics per impactor and injury class.

use super::RecordsError;
use crate::model::{Condition, ExperimentRecord, ImpactorKind, InjuryClass, SourceTag};
use serde::{Deserialize, Serialize};

/// Caps used by the bundled summary table.
pub const DEFAULT_CAPS_M_S: [f64; 3] = [0.5, 1.0, 2.0];

/// Robot effective-mass window of the bundled summary.
pub const DEFAULT_MASS_RANGE_KG: (f64, f64) = (3.0, 9.0);

/// How a velocity cap treats a measurement exactly at the cap.
///
/// The bundled table's column headers read as strict upper bounds, but its
/// top cap coincides with the highest tested velocity, so whether the
/// boundary trials are inside is ambiguous in the published numbers. Both
/// readings are available; `Strict` is the default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum CapConvention {
    /// velocity < cap
    #[default]
    Strict,
    /// velocity <= cap
    Inclusive,
}

impl CapConvention {
    fn admits(self, v_m_s: f64, cap_m_s: f64) -> bool {
        match self {
            CapConvention::Strict => v_m_s < cap_m_s,
            CapConvention::Inclusive => v_m_s <= cap_m_s,
        }
    }
}

/// One (condition, impactor, cap) cell. Percentages are `None` when no
/// record qualifies, which is reported as "no data", not as 0%.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub condition: Condition,
    pub impactor: ImpactorKind,
    pub cap_m_s: f64,
    /// Qualifying valid records.
    pub n: usize,
    pub skin_cut_percent: Option<f64>,
    pub tendon_bone_percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSummary {
    pub rows: Vec<ThresholdRow>,
    pub mass_range_kg: (f64, f64),
    pub convention: CapConvention,
    pub source: SourceTag,
}

impl ThresholdSummary {
    pub fn row(&self, condition: Condition, impactor: ImpactorKind, cap_m_s: f64) -> Option<&ThresholdRow> {
        self.rows.iter().find(|r| {
            r.condition == condition && r.impactor == impactor && r.cap_m_s == cap_m_s
        })
    }
}

/// One decimal place, ties away from zero (the bundled table's formatting).
pub(crate) fn round_percent(value: f64) -> f64 {
    (value * 10.0).round() / 10.0
}

/// Percentage of skin cuts and of tendon/bone damage among valid records
/// under each velocity cap, per (condition, impactor).
///
/// Filters: `valid`, robot effective mass within `mass_range_kg` (closed
/// interval), measured velocity under the cap per `convention`. Every
/// (condition, impactor, cap) combination gets a row even when empty.
pub fn threshold_summary(
    records: &[ExperimentRecord],
    mass_range_kg: (f64, f64),
    caps_m_s: &[f64],
    convention: CapConvention,
    source: SourceTag,
) -> Result<ThresholdSummary, RecordsError> {
    let bad_request = |reason: &str| RecordsError::InvalidRequest {
        reason: reason.to_string(),
    };
    if caps_m_s.is_empty() {
        return Err(bad_request("at least one velocity cap is required"));
    }
    if caps_m_s.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
        return Err(bad_request("velocity caps must be finite and > 0"));
    }
    if caps_m_s.windows(2).any(|p| p[1] <= p[0]) {
        return Err(bad_request("velocity caps must be strictly increasing"));
    }
    let (lo, hi) = mass_range_kg;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(bad_request("mass range must be an ordered finite interval"));
    }

    let mut rows = Vec::with_capacity(Condition::ALL.len() * ImpactorKind::ALL.len() * caps_m_s.len());
    for condition in Condition::ALL {
        for impactor in ImpactorKind::ALL {
            for &cap in caps_m_s {
                let mut n = 0usize;
                let mut skin_cut = 0usize;
                let mut tendon_bone = 0usize;
                for r in records {
                    if !r.valid
                        || r.condition != condition
                        || r.impactor.kind != impactor
                        || r.robot_eff_mass_kg < lo
                        || r.robot_eff_mass_kg > hi
                        || !convention.admits(r.measured_velocity_m_s, cap)
                    {
                        continue;
                    }
                    n += 1;
                    match r.injury {
                        InjuryClass::SkinCut => skin_cut += 1,
                        InjuryClass::TendonBone => tendon_bone += 1,
                        _ => {}
                    }
                }
                let percent = |count: usize| {
                    (n > 0).then(|| round_percent(count as f64 * 100.0 / n as f64))
                };
                rows.push(ThresholdRow {
                    condition,
                    impactor,
                    cap_m_s: cap,
                    n,
                    skin_cut_percent: percent(skin_cut),
                    tendon_bone_percent: percent(tendon_bone),
                });
            }
        }
    }
    Ok(ThresholdSummary {
        rows,
        mass_range_kg,
        convention,
        source,
    })
}

/// Peak-force statistics for one (impactor, injury class) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceCell {
    pub impactor: ImpactorKind,
    pub injury: InjuryClass,
    pub n: usize,
    pub mean_n: f64,
    /// Sample standard deviation (n - 1); reported as 0 when n = 1.
    pub std_n: f64,
    /// Records whose peak reached the sensor range; they stay in the stats
    /// but make mean/std lower bounds.
    pub saturated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceStatistics {
    /// Cells with at least one record, in (impactor, severity) order.
    pub cells: Vec<ForceCell>,
    pub source: SourceTag,
}

impl ForceStatistics {
    pub fn cell(&self, impactor: ImpactorKind, injury: InjuryClass) -> Option<&ForceCell> {
        self.cells
            .iter()
            .find(|c| c.impactor == impactor && c.injury == injury)
    }
}

/// Mean and sample standard deviation of peak force per (impactor, class)
/// over valid records.
pub fn force_statistics(records: &[ExperimentRecord], source: SourceTag) -> ForceStatistics {
    let mut cells = Vec::new();
    for impactor in ImpactorKind::ALL {
        for injury in InjuryClass::ALL {
            let forces: Vec<f64> = records
                .iter()
                .filter(|r| r.valid && r.impactor.kind == impactor && r.injury == injury)
                .map(|r| r.peak_force_n)
                .collect();
            let n = forces.len();
            if n == 0 {
                continue;
            }
            let mean = forces.iter().sum::<f64>() / n as f64;
            let std = if n == 1 {
                0.0
            } else {
                let var = forces.iter().map(|f| (f - mean) * (f - mean)).sum::<f64>()
                    / (n - 1) as f64;
                var.sqrt()
            };
            let saturated = records
                .iter()
                .filter(|r| {
                    r.valid && r.impactor.kind == impactor && r.injury == injury && r.force_saturated
                })
                .count();
            cells.push(ForceCell {
                impactor,
                injury,
                n,
                mean_n: mean,
                std_n: std,
                saturated,
            });
        }
    }
    ForceStatistics { cells, source }
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
        force: f64,
        injury: InjuryClass,
    ) -> ExperimentRecord {
        ExperimentRecord {
            condition,
            impactor: ImpactorGeometry::bundled(kind),
            site: SurrogateSite::ALL[0],
            human_eff_mass_kg: 2.58,
            robot_eff_mass_kg: mass,
            desired_velocity_m_s: velocity,
            measured_velocity_m_s: velocity,
            peak_force_n: force,
            force_saturated: force >= 500.0,
            injury,
            valid: true,
            invalid_reason: None,
            specimen_id: "spec-1".into(),
            provenance: DataSource::Synthetic,
        }
    }

    fn tag() -> SourceTag {
        SourceTag::new(DataSource::Synthetic, "test records")
    }

    #[test]
    fn engineered_quarter_fraction() {
        // 24 qualifying records under the 1.0 cap, 6 of them skin cuts.
        let mut records = Vec::new();
        for i in 0..24 {
            let injury = if i < 6 { InjuryClass::SkinCut } else { InjuryClass::None };
            records.push(record(Condition::IA, ImpactorKind::Edge, 5.12, 0.6, 100.0, injury));
        }
        // Distractors: wrong impactor, above cap, outside mass window, invalid.
        records.push(record(Condition::IA, ImpactorKind::Wedge, 5.12, 0.6, 100.0, InjuryClass::SkinCut));
        records.push(record(Condition::IA, ImpactorKind::Edge, 5.12, 1.4, 100.0, InjuryClass::SkinCut));
        records.push(record(Condition::IA, ImpactorKind::Edge, 12.0, 0.6, 100.0, InjuryClass::SkinCut));
        let mut invalid = record(Condition::IA, ImpactorKind::Edge, 5.12, 0.6, 100.0, InjuryClass::SkinCut);
        invalid.valid = false;
        invalid.invalid_reason = Some("test".into());
        records.push(invalid);

        let summary = threshold_summary(
            &records,
            DEFAULT_MASS_RANGE_KG,
            &DEFAULT_CAPS_M_S,
            CapConvention::Strict,
            tag(),
        )
        .unwrap();
        let row = summary.row(Condition::IA, ImpactorKind::Edge, 1.0).unwrap();
        assert_eq!(row.n, 24);
        assert_eq!(row.skin_cut_percent, Some(25.0));
        assert_eq!(row.tendon_bone_percent, Some(0.0));
        // All 18 combination rows are present even where empty.
        assert_eq!(summary.rows.len(), 18);
        let empty = summary.row(Condition::IB, ImpactorKind::Sheet, 0.5).unwrap();
        assert_eq!(empty.n, 0);
        assert_eq!(empty.skin_cut_percent, None);
    }

    #[test]
    fn cap_convention_controls_the_boundary() {
        let records = vec![record(
            Condition::IA,
            ImpactorKind::Edge,
            5.12,
            1.0,
            100.0,
            InjuryClass::SkinCut,
        )];
        let strict = threshold_summary(&records, DEFAULT_MASS_RANGE_KG, &DEFAULT_CAPS_M_S, CapConvention::Strict, tag()).unwrap();
        assert_eq!(strict.row(Condition::IA, ImpactorKind::Edge, 1.0).unwrap().n, 0);
        let inclusive = threshold_summary(&records, DEFAULT_MASS_RANGE_KG, &DEFAULT_CAPS_M_S, CapConvention::Inclusive, tag()).unwrap();
        assert_eq!(inclusive.row(Condition::IA, ImpactorKind::Edge, 1.0).unwrap().n, 1);
    }

    #[test]
    fn rounding_is_one_decimal_half_away() {
        assert_eq!(round_percent(100.0 / 6.0), 16.7);
        assert_eq!(round_percent(12.25), 12.3);
        assert_eq!(round_percent(0.04), 0.0);
        assert_eq!(round_percent(0.05), 0.1);
    }

    #[test]
    fn rejects_bad_caps_and_ranges() {
        assert!(threshold_summary(&[], DEFAULT_MASS_RANGE_KG, &[], CapConvention::Strict, tag()).is_err());
        assert!(threshold_summary(&[], DEFAULT_MASS_RANGE_KG, &[1.0, 0.5], CapConvention::Strict, tag()).is_err());
        assert!(threshold_summary(&[], (9.0, 3.0), &DEFAULT_CAPS_M_S, CapConvention::Strict, tag()).is_err());
    }

    #[test]
    fn force_stats_match_hand_arithmetic() {
        let records = vec![
            record(Condition::IB, ImpactorKind::Wedge, 5.12, 1.0, 100.0, InjuryClass::None),
            record(Condition::IB, ImpactorKind::Wedge, 5.12, 1.0, 128.0, InjuryClass::None),
            record(Condition::IB, ImpactorKind::Wedge, 5.12, 1.5, 560.0, InjuryClass::SkinCut),
        ];
        let stats = force_statistics(&records, tag());
        let none = stats.cell(ImpactorKind::Wedge, InjuryClass::None).unwrap();
        assert_eq!(none.n, 2);
        assert!((none.mean_n - 114.0).abs() < 1e-12);
        assert!((none.std_n - 392.0_f64.sqrt()).abs() < 1e-12);
        assert_eq!(none.saturated, 0);

        let cut = stats.cell(ImpactorKind::Wedge, InjuryClass::SkinCut).unwrap();
        assert_eq!(cut.n, 1);
        assert_eq!(cut.std_n, 0.0);
        assert_eq!(cut.saturated, 1);

        assert!(stats.cell(ImpactorKind::Edge, InjuryClass::None).is_none());
    }
}
