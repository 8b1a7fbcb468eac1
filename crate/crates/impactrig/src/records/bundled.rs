//! The published aggregates shipped with the toolkit: rig data sheet,
//! injury probability summary, force statistics, velocity accuracy, and
//! outcome counts. Values are stored verbatim as published; every item
//! carries a bundled provenance tag.

use crate::model::{
    Condition, ImpactorKind, InjuryClass, PendulumConfig, PendulumRole, Sourced, SourceTag,
    FORCE_SENSOR_RANGE_N,
};
use serde::{Deserialize, Serialize};

/// Velocity caps of the bundled injury probability summary, m/s.
pub const BUNDLED_CAPS_M_S: [f64; 3] = [0.5, 1.0, 2.0];

/// Trials run on the rig, including the ones later voided.
pub const TOTAL_TRIAL_COUNT: usize = 720;

/// Trials voided during evaluation (tissue or logging problems).
pub const INVALID_TRIAL_COUNT: usize = 6;

fn config(
    role: PendulumRole,
    attached_load_kg: f64,
    inertia_kg_mm2: f64,
    cog_mm: f64,
    collision_mm: f64,
    total_mass_kg: f64,
) -> PendulumConfig {
    PendulumConfig {
        role,
        inertia_about_cog_kg_mm2: inertia_kg_mm2,
        cog_distance_mm: cog_mm,
        collision_distance_mm: collision_mm,
        total_mass_kg,
        attached_load_kg,
    }
}

/// The six pendulum builds from the rig data sheet: two struck-side arm
/// configurations and four striker loads.
pub fn rig_configs() -> [Sourced<PendulumConfig>; 6] {
    let tag = || SourceTag::bundled("rig data sheet");
    [
        Sourced { value: config(PendulumRole::Human, 1.0, 409_604.47, 518.0, 794.0, 4.54), source: tag() },
        Sourced { value: config(PendulumRole::Human, 4.0, 648_362.99, 670.0, 794.0, 7.49), source: tag() },
        Sourced { value: config(PendulumRole::Robot, 2.0, 531_378.16, 782.0, 990.0, 4.26), source: tag() },
        Sourced { value: config(PendulumRole::Robot, 4.0, 583_728.08, 842.0, 990.0, 6.26), source: tag() },
        Sourced { value: config(PendulumRole::Robot, 6.0, 612_297.60, 873.0, 990.0, 8.26), source: tag() },
        Sourced { value: config(PendulumRole::Robot, 8.0, 631_599.33, 892.0, 990.0, 10.26), source: tag() },
    ]
}

/// Struck-side arm build for a test condition: the light build (hand and
/// lower arm, ~2.58 kg effective) for the first condition, the heavy build
/// (~6.36 kg effective) for the second.
pub fn human_config(condition: Condition) -> PendulumConfig {
    let configs = rig_configs();
    match condition {
        Condition::IA => configs[0].value,
        Condition::IB => configs[1].value,
    }
}

/// The four striker builds, in ascending load order (nominal effective
/// masses 3.20, 5.12, 7.04, 8.97 kg).
pub fn robot_configs() -> [PendulumConfig; 4] {
    let configs = rig_configs();
    [
        configs[2].value,
        configs[3].value,
        configs[4].value,
        configs[5].value,
    ]
}

/// One cell of the bundled injury probability summary: percentage of skin
/// cuts and of tendon/bone damage among trials with robot effective mass
/// 3-9 kg and collision velocity under the cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BundledThresholdCell {
    pub condition: Condition,
    pub impactor: ImpactorKind,
    pub cap_m_s: f64,
    pub skin_cut_percent: f64,
    pub tendon_bone_percent: f64,
}

/// The bundled injury probability summary, all 18 cells (2 conditions x 3
/// impactors x 3 caps), published values verbatim.
pub fn bundled_threshold_cells() -> Vec<Sourced<BundledThresholdCell>> {
    use Condition::{IA, IB};
    use ImpactorKind::{Edge, Sheet, Wedge};
    // (condition, impactor, [s-c% and t/b% under 0.5, 1.0, 2.0 m/s])
    let rows = [
        (IA, Wedge, [(0.0, 0.0), (0.0, 0.0), (19.8, 1.0)]),
        (IA, Edge, [(0.0, 0.0), (25.0, 0.0), (54.2, 1.0)]),
        (IA, Sheet, [(0.0, 0.0), (6.3, 0.0), (40.6, 0.5)]),
        (IB, Wedge, [(0.0, 0.0), (8.3, 0.0), (31.8, 2.6)]),
        (IB, Edge, [(16.7, 0.0), (31.7, 0.0), (62.7, 4.7)]),
        (IB, Sheet, [(0.0, 0.0), (6.3, 0.0), (39.6, 2.6)]),
    ];
    let mut cells = Vec::with_capacity(18);
    for (condition, impactor, caps) in rows {
        for (cap_m_s, (skin_cut_percent, tendon_bone_percent)) in
            BUNDLED_CAPS_M_S.into_iter().zip(caps)
        {
            cells.push(Sourced {
                value: BundledThresholdCell {
                    condition,
                    impactor,
                    cap_m_s,
                    skin_cut_percent,
                    tendon_bone_percent,
                },
                source: SourceTag::bundled("injury probability summary"),
            });
        }
    }
    cells
}

/// Published peak-force band for one (impactor, injury class) cell.
///
/// The bundled bands come from the heavy-arm test series only; a sensor
/// fault voided the force channel of the light-arm series. No band exists
/// for tendon/bone damage (too few cases to aggregate).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BundledForceStat {
    pub impactor: ImpactorKind,
    pub injury: InjuryClass,
    pub mean_n: f64,
    pub std_n: f64,
}

impl BundledForceStat {
    /// Means at or above the sensor range are lower bounds, not readings.
    pub fn exceeds_sensor_range(&self) -> bool {
        self.mean_n >= FORCE_SENSOR_RANGE_N
    }
}

/// The nine published force bands (3 impactors x {none, s-i, s-c}).
pub fn bundled_force_stats() -> Vec<Sourced<BundledForceStat>> {
    use ImpactorKind::{Edge, Sheet, Wedge};
    use InjuryClass::{None, SkinCut, SkinImprint};
    let rows = [
        (Wedge, None, 114.0, 75.0),
        (Edge, None, 57.0, 27.0),
        (Sheet, None, 122.0, 89.0),
        (Wedge, SkinImprint, 325.0, 179.0),
        (Edge, SkinImprint, 105.0, 97.0),
        (Sheet, SkinImprint, 280.0, 158.0),
        (Wedge, SkinCut, 514.0, 89.0),
        (Edge, SkinCut, 448.0, 246.0),
        (Sheet, SkinCut, 568.0, 100.0),
    ];
    rows.into_iter()
        .map(|(impactor, injury, mean_n, std_n)| Sourced {
            value: BundledForceStat {
                impactor,
                injury,
                mean_n,
                std_n,
            },
            source: SourceTag::bundled("force statistics"),
        })
        .collect()
}

/// Measured collision velocity for one desired velocity setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityAccuracyRow {
    pub desired_m_s: f64,
    pub mean_m_s: f64,
    pub std_m_s: f64,
}

/// The rig's published velocity accuracy at the five tested settings.
pub fn bundled_velocity_accuracy() -> [Sourced<VelocityAccuracyRow>; 5] {
    let row = |desired_m_s, mean_m_s, std_m_s| Sourced {
        value: VelocityAccuracyRow {
            desired_m_s,
            mean_m_s,
            std_m_s,
        },
        source: SourceTag::bundled("velocity accuracy table"),
    };
    [
        row(0.25, 0.34, 0.10),
        row(0.5, 0.54, 0.06),
        row(1.0, 1.03, 0.01),
        row(1.5, 1.56, 0.03),
        row(2.0, 2.03, 0.03),
    ]
}

/// Valid-trial outcome tallies for one condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub condition: Condition,
    pub none: usize,
    pub skin_imprint: usize,
    pub skin_cut: usize,
    pub tendon_bone: usize,
}

impl ClassCounts {
    pub fn total(&self) -> usize {
        self.none + self.skin_imprint + self.skin_cut + self.tendon_bone
    }

    pub fn count(&self, class: InjuryClass) -> usize {
        match class {
            InjuryClass::None => self.none,
            InjuryClass::SkinImprint => self.skin_imprint,
            InjuryClass::SkinCut => self.skin_cut,
            InjuryClass::TendonBone => self.tendon_bone,
        }
    }
}

/// Published outcome counts per condition (valid trials only).
pub fn bundled_class_counts() -> [Sourced<ClassCounts>; 2] {
    let tag = || SourceTag::bundled("outcome counts");
    [
        Sourced {
            value: ClassCounts {
                condition: Condition::IA,
                none: 38,
                skin_imprint: 156,
                skin_cut: 161,
                tendon_bone: 5,
            },
            source: tag(),
        },
        Sourced {
            value: ClassCounts {
                condition: Condition::IB,
                none: 56,
                skin_imprint: 112,
                skin_cut: 172,
                tendon_bone: 14,
            },
            source: tag(),
        },
    ]
}

/// Internal consistency of the bundled counts: per-condition sums plus the
/// voided trials reproduce the campaign total.
pub fn consistency_check() -> Result<(), String> {
    let [ia, ib] = bundled_class_counts();
    let valid = ia.value.total() + ib.value.total();
    if valid + INVALID_TRIAL_COUNT != TOTAL_TRIAL_COUNT {
        return Err(format!(
            "bundled outcome counts sum to {valid} valid trials; expected {} = {} - {}",
            TOTAL_TRIAL_COUNT - INVALID_TRIAL_COUNT,
            TOTAL_TRIAL_COUNT,
            INVALID_TRIAL_COUNT
        ));
    }
    Ok(())
}

/// Everything the toolkit bundles, in one struct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundledDataset {
    pub configs: Vec<Sourced<PendulumConfig>>,
    pub threshold_cells: Vec<Sourced<BundledThresholdCell>>,
    pub force_stats: Vec<Sourced<BundledForceStat>>,
    pub velocity_accuracy: Vec<Sourced<VelocityAccuracyRow>>,
    pub class_counts: Vec<Sourced<ClassCounts>>,
    pub total_trials: usize,
    pub invalid_trials: usize,
}

impl BundledDataset {
    pub fn threshold_cell(
        &self,
        condition: Condition,
        impactor: ImpactorKind,
        cap_m_s: f64,
    ) -> Option<&Sourced<BundledThresholdCell>> {
        self.threshold_cells.iter().find(|c| {
            c.value.condition == condition
                && c.value.impactor == impactor
                && c.value.cap_m_s == cap_m_s
        })
    }

    pub fn force_stat(
        &self,
        impactor: ImpactorKind,
        injury: InjuryClass,
    ) -> Option<&Sourced<BundledForceStat>> {
        self.force_stats
            .iter()
            .find(|s| s.value.impactor == impactor && s.value.injury == injury)
    }
}

pub fn bundled_dataset() -> BundledDataset {
    BundledDataset {
        configs: rig_configs().to_vec(),
        threshold_cells: bundled_threshold_cells(),
        force_stats: bundled_force_stats(),
        velocity_accuracy: bundled_velocity_accuracy().to_vec(),
        class_counts: bundled_class_counts().to_vec(),
        total_trials: TOTAL_TRIAL_COUNT,
        invalid_trials: INVALID_TRIAL_COUNT,
    }
}
