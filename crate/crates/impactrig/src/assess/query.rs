//! Safety queries against a probability source: per-class injury
//! probability and maximum safe velocity, plus the constrained-contact
//! advisory. Queries never panic or extrapolate; anything the source
//! cannot answer comes back as an explicit no-data result.

use crate::model::{
    effective_mass, Condition, ImpactorKind, InjuryClass, SourceTag, Sourced,
    DYNAMIC_PHASE_MAX_S,
};
use crate::records::{
    bundled_threshold_cells, human_config, BinIndex, BundledThresholdCell, ProbabilityMap,
    BUNDLED_CAPS_M_S, DEFAULT_MASS_RANGE_KG,
};
use serde::Serialize;

/// Where queries read probabilities from.
#[derive(Debug, Clone, Copy)]
pub enum ProbabilitySource<'a> {
    /// The bundled injury probability summary (velocity caps 0.5/1.0/2.0,
    /// robot effective mass 3-9 kg, per condition and impactor).
    Bundled,
    /// A user-built mass/velocity probability map.
    Map(&'a ProbabilityMap),
}

impl ProbabilitySource<'_> {
    pub fn tag(&self) -> SourceTag {
        match self {
            ProbabilitySource::Bundled => SourceTag::bundled("injury probability summary"),
            ProbabilitySource::Map(map) => map.source.clone(),
        }
    }

    /// Largest velocity the source covers.
    pub fn max_velocity_m_s(&self) -> f64 {
        match self {
            ProbabilitySource::Bundled => BUNDLED_CAPS_M_S[BUNDLED_CAPS_M_S.len() - 1],
            ProbabilitySource::Map(map) => map.velocity_bins.upper_edge(),
        }
    }
}

/// One safety question: a robot effective mass striking with an impactor
/// at a velocity, under one test condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskQuery {
    pub robot_eff_mass_kg: f64,
    pub velocity_m_s: f64,
    pub impactor: ImpactorKind,
    pub condition: Condition,
}

/// Probability of one injury class. `None` means the source does not
/// report that class (the bundled summary only reports the two severe
/// classes), never probability zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassProbability {
    pub injury: InjuryClass,
    pub probability: Option<f64>,
}

/// A resolved probability row. `resolved_velocity_m_s` is the velocity the
/// numbers actually describe: queries between caps or bin edges resolve
/// upward to the next cap, which overestimates risk below it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassProbabilities {
    pub condition: Condition,
    /// None when the source pools impactors.
    pub impactor: Option<ImpactorKind>,
    pub resolved_velocity_m_s: f64,
    /// Records behind the row, when the source counts them.
    pub sample_size: Option<usize>,
    /// All four classes in severity order.
    pub classes: Vec<ClassProbability>,
}

impl ClassProbabilities {
    pub fn probability_of(&self, injury: InjuryClass) -> Option<f64> {
        self.classes
            .iter()
            .find(|c| c.injury == injury)
            .and_then(|c| c.probability)
    }

    /// Probability of an outcome strictly more severe than `tolerated`, or
    /// None when the source lacks a class needed for the sum.
    pub fn exceedance(&self, tolerated: InjuryClass) -> Option<f64> {
        let mut sum = 0.0;
        for c in &self.classes {
            if c.injury > tolerated {
                sum += c.probability?;
            }
        }
        Some(sum)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ProbabilityAnswer {
    Classes(Sourced<ClassProbabilities>),
    NoData { reason: String },
}

impl ProbabilityAnswer {
    fn no_data(reason: impl Into<String>) -> Self {
        ProbabilityAnswer::NoData {
            reason: reason.into(),
        }
    }

    pub fn classes(&self) -> Option<&Sourced<ClassProbabilities>> {
        match self {
            ProbabilityAnswer::Classes(c) => Some(c),
            ProbabilityAnswer::NoData { .. } => None,
        }
    }
}

fn bundled_mass_in_range(mass_kg: f64) -> bool {
    let (lo, hi) = DEFAULT_MASS_RANGE_KG;
    mass_kg.is_finite() && mass_kg >= lo && mass_kg <= hi
}

fn bundled_cell(
    condition: Condition,
    impactor: ImpactorKind,
    cap_m_s: f64,
) -> Sourced<BundledThresholdCell> {
    bundled_threshold_cells()
        .into_iter()
        .find(|c| {
            c.value.condition == condition
                && c.value.impactor == impactor
                && c.value.cap_m_s == cap_m_s
        })
        .expect("bundled summary covers every condition/impactor/cap")
}

fn bundled_answer(query: &RiskQuery) -> ProbabilityAnswer {
    if !bundled_mass_in_range(query.robot_eff_mass_kg) {
        let (lo, hi) = DEFAULT_MASS_RANGE_KG;
        return ProbabilityAnswer::no_data(format!(
            "no data: mass outside [{lo},{hi}] kg"
        ));
    }
    if !(query.velocity_m_s.is_finite() && query.velocity_m_s >= 0.0) {
        return ProbabilityAnswer::no_data("no data: velocity must be finite and >= 0");
    }
    let top = BUNDLED_CAPS_M_S[BUNDLED_CAPS_M_S.len() - 1];
    let Some(cap) = BUNDLED_CAPS_M_S
        .into_iter()
        .find(|cap| query.velocity_m_s <= *cap)
    else {
        return ProbabilityAnswer::no_data(format!(
            "no data: velocity above the {top} m/s cap"
        ));
    };
    let cell = bundled_cell(query.condition, query.impactor, cap);
    let classes = vec![
        ClassProbability {
            injury: InjuryClass::None,
            probability: None,
        },
        ClassProbability {
            injury: InjuryClass::SkinImprint,
            probability: None,
        },
        ClassProbability {
            injury: InjuryClass::SkinCut,
            probability: Some(cell.value.skin_cut_percent / 100.0),
        },
        ClassProbability {
            injury: InjuryClass::TendonBone,
            probability: Some(cell.value.tendon_bone_percent / 100.0),
        },
    ];
    ProbabilityAnswer::Classes(Sourced::new(
        ClassProbabilities {
            condition: query.condition,
            impactor: Some(query.impactor),
            resolved_velocity_m_s: cap,
            sample_size: None,
            classes,
        },
        cell.source,
    ))
}

fn map_answer(query: &RiskQuery, map: &ProbabilityMap) -> ProbabilityAnswer {
    if map.condition != query.condition {
        return ProbabilityAnswer::no_data(format!(
            "no data: map covers condition {} only",
            map.condition.code()
        ));
    }
    if let Some(map_impactor) = map.impactor {
        if map_impactor != query.impactor {
            return ProbabilityAnswer::no_data(format!(
                "no data: map covers impactor {} only",
                map_impactor.code()
            ));
        }
    }
    if !query.robot_eff_mass_kg.is_finite() || query.robot_eff_mass_kg <= 0.0 {
        return ProbabilityAnswer::no_data("no data: mass must be finite and > 0");
    }
    if !(query.velocity_m_s.is_finite() && query.velocity_m_s >= 0.0) {
        return ProbabilityAnswer::no_data("no data: velocity must be finite and >= 0");
    }
    let BinIndex::InRange(row) = map.mass_grid.index_of(query.robot_eff_mass_kg) else {
        return ProbabilityAnswer::no_data(format!(
            "no data: mass above the map grid (top edge {} kg)",
            map.mass_grid.edges_kg().last().unwrap()
        ));
    };
    let BinIndex::InRange(col) = map.velocity_bins.index_of(query.velocity_m_s) else {
        return ProbabilityAnswer::no_data(format!(
            "no data: velocity above the map bins (top edge {} m/s)",
            map.velocity_bins.upper_edge()
        ));
    };
    let cell = map.cell(BinIndex::InRange(row), BinIndex::InRange(col));
    let (_, hi) = map.velocity_bins.edges(col);
    let Some(p) = cell.probabilities() else {
        return ProbabilityAnswer::no_data(format!(
            "no data: empty bin (mass {}, velocity up to {hi} m/s)",
            map.mass_grid.label(row)
        ));
    };
    let classes = InjuryClass::ALL
        .iter()
        .map(|&injury| ClassProbability {
            injury,
            probability: Some(p[injury as usize]),
        })
        .collect();
    ProbabilityAnswer::Classes(Sourced::new(
        ClassProbabilities {
            condition: query.condition,
            impactor: map.impactor,
            resolved_velocity_m_s: hi,
            sample_size: Some(cell.total()),
            classes,
        },
        map.source.clone(),
    ))
}

/// Per-class injury probabilities for the query, resolved conservatively:
/// a velocity between caps or bin edges is answered by the next cap above
/// it. Out-of-range queries return an explicit no-data answer; the numbers
/// are never extrapolated.
pub fn injury_probability(query: &RiskQuery, source: &ProbabilitySource) -> ProbabilityAnswer {
    match source {
        ProbabilitySource::Bundled => bundled_answer(query),
        ProbabilitySource::Map(map) => map_answer(query, map),
    }
}

/// A maximum-safe-velocity answer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum VelocityAnswer {
    /// Largest covered velocity meeting the constraint.
    Velocity(Sourced<f64>),
    /// The source covers the query but no velocity qualifies; conservative
    /// stand-in for "below the dataset floor".
    NoneInRange,
    NoData { reason: String },
}

impl VelocityAnswer {
    pub fn velocity(&self) -> Option<f64> {
        match self {
            VelocityAnswer::Velocity(v) => Some(v.value),
            _ => None,
        }
    }
}

/// Probability that a bundled cell exceeds `tolerated`, or None when the
/// summary lacks a class the sum needs.
fn bundled_exceedance(cell: &BundledThresholdCell, tolerated: InjuryClass) -> Option<f64> {
    match tolerated {
        InjuryClass::TendonBone => Some(0.0),
        InjuryClass::SkinCut => Some(cell.tendon_bone_percent / 100.0),
        InjuryClass::SkinImprint => {
            Some((cell.skin_cut_percent + cell.tendon_bone_percent) / 100.0)
        }
        InjuryClass::None => None,
    }
}

fn bundled_max_safe(
    robot_eff_mass_kg: f64,
    impactor: ImpactorKind,
    condition: Condition,
    tolerated: InjuryClass,
    p_max: f64,
) -> VelocityAnswer {
    if !bundled_mass_in_range(robot_eff_mass_kg) {
        let (lo, hi) = DEFAULT_MASS_RANGE_KG;
        return VelocityAnswer::NoData {
            reason: format!("no data: mass outside [{lo},{hi}] kg"),
        };
    }
    if tolerated == InjuryClass::None {
        return VelocityAnswer::NoData {
            reason: "no data: the bundled summary reports skin-cut and tendon/bone shares \
                     only, so exceedance of 'none' cannot be computed"
                .to_string(),
        };
    }
    let mut best = None;
    for cap in BUNDLED_CAPS_M_S {
        let cell = bundled_cell(condition, impactor, cap);
        let exceed = bundled_exceedance(&cell.value, tolerated)
            .expect("non-none tolerated classes are computable");
        if exceed <= p_max {
            best = Some(Sourced::new(cap, cell.source));
        }
    }
    match best {
        Some(v) => VelocityAnswer::Velocity(v),
        None => VelocityAnswer::NoneInRange,
    }
}

fn map_max_safe(
    map: &ProbabilityMap,
    robot_eff_mass_kg: f64,
    impactor: ImpactorKind,
    condition: Condition,
    tolerated: InjuryClass,
    p_max: f64,
) -> VelocityAnswer {
    if map.condition != condition {
        return VelocityAnswer::NoData {
            reason: format!("no data: map covers condition {} only", map.condition.code()),
        };
    }
    if let Some(map_impactor) = map.impactor {
        if map_impactor != impactor {
            return VelocityAnswer::NoData {
                reason: format!("no data: map covers impactor {} only", map_impactor.code()),
            };
        }
    }
    if !robot_eff_mass_kg.is_finite() || robot_eff_mass_kg <= 0.0 {
        return VelocityAnswer::NoData {
            reason: "no data: mass must be finite and > 0".to_string(),
        };
    }
    let BinIndex::InRange(row) = map.mass_grid.index_of(robot_eff_mass_kg) else {
        return VelocityAnswer::NoData {
            reason: format!(
                "no data: mass above the map grid (top edge {} kg)",
                map.mass_grid.edges_kg().last().unwrap()
            ),
        };
    };
    // Walk the velocity bins upward; the answer is the top of the longest
    // prefix in which every bin individually satisfies the constraint.
    // Tolerating the most severe class is vacuously safe, data or not; any
    // other tolerated class makes an empty bin an unknown, which blocks.
    let mut qualified = None;
    let mut saw_data = false;
    for col in 0..map.velocity_bins.count {
        let cell = map.cell(BinIndex::InRange(row), BinIndex::InRange(col));
        let ok = match cell.probabilities() {
            _ if tolerated == InjuryClass::TendonBone => true,
            None => false,
            Some(p) => {
                saw_data = true;
                let exceed: f64 = InjuryClass::ALL
                    .iter()
                    .filter(|c| **c > tolerated)
                    .map(|c| p[*c as usize])
                    .sum();
                exceed <= p_max
            }
        };
        if !ok {
            break;
        }
        qualified = Some(map.velocity_bins.edges(col).1);
    }
    match qualified {
        Some(v) => VelocityAnswer::Velocity(Sourced::new(v, map.source.clone())),
        // The walk got nowhere: either the first bin had data and failed,
        // or it was empty and nothing at this mass can be certified.
        None if saw_data => VelocityAnswer::NoneInRange,
        None => VelocityAnswer::NoData {
            reason: format!(
                "no data: mass bin {} has no records in its first velocity bin",
                map.mass_grid.label(row)
            ),
        },
    }
}

/// Largest covered velocity whose probability of injuries strictly more
/// severe than `tolerated` stays at or below `p_max`. Conservative: when
/// no covered velocity qualifies the answer is "none in range", never a
/// value below the dataset floor; a velocity bin without data blocks
/// everything above it.
pub fn max_safe_velocity(
    robot_eff_mass_kg: f64,
    impactor: ImpactorKind,
    condition: Condition,
    tolerated: InjuryClass,
    p_max: f64,
    source: &ProbabilitySource,
) -> VelocityAnswer {
    if !(p_max.is_finite() && (0.0..=1.0).contains(&p_max)) {
        return VelocityAnswer::NoData {
            reason: format!("no data: p_max must be in [0,1], got {p_max}"),
        };
    }
    match source {
        ProbabilitySource::Bundled => {
            bundled_max_safe(robot_eff_mass_kg, impactor, condition, tolerated, p_max)
        }
        ProbabilitySource::Map(map) => map_max_safe(
            map,
            robot_eff_mass_kg,
            impactor,
            condition,
            tolerated,
            p_max,
        ),
    }
}

/// The structured constrained-contact advisory attached to every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstrainedAdvisory {
    /// Unconstrained injury-onset thresholds exceed constrained (clamping)
    /// ones by at least this factor.
    pub threshold_factor_at_least: f64,
    pub summary: String,
    /// Always true: clamping scenarios need clamping data, not this dataset.
    pub constrained_requires_own_data: bool,
    /// Present when the queried velocity is zero (static pressing contact).
    pub static_contact_note: Option<String>,
    pub source: SourceTag,
}

/// Qualitative comparison against clamping scenarios. The dataset behind
/// this toolkit covers unconstrained impacts only; the advisory states the
/// published finding (injury-onset thresholds at least twice as high as in
/// clamping) and redirects constrained assessments to clamping data.
pub fn constrained_comparison(
    robot_eff_mass_kg: f64,
    velocity_m_s: f64,
    impactor: ImpactorKind,
) -> ConstrainedAdvisory {
    let summary = format!(
        "Unconstrained impact ({} impactor, {robot_eff_mass_kg} kg, {velocity_m_s} m/s): \
         injury-onset mass/velocity thresholds in free collisions run at least 2x above \
         clamping scenarios. Do not reuse these probabilities when the struck body part \
         is pinned; clamping must be assessed with clamping data.",
        impactor.code()
    );
    let static_contact_note = (velocity_m_s == 0.0).then(|| {
        format!(
            "static pressing contact is out of scope: sustained contact \
             (>= {DYNAMIC_PHASE_MAX_S} s) is the quasi-static regime, not an impact"
        )
    });
    ConstrainedAdvisory {
        threshold_factor_at_least: 2.0,
        summary,
        constrained_requires_own_data: true,
        static_contact_note,
        source: SourceTag::bundled("constrained-contact comparison"),
    }
}

/// How a human body-part effective mass picks one of the two bundled test
/// conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConditionRule {
    /// Smallest condition mass at or above the query mass; above both,
    /// the heavier condition (conservative).
    #[default]
    NearestNotLower,
    /// Condition with the closest mass.
    Nearest,
}

/// Select the bundled condition standing in for a human body part of the
/// given effective mass. None for non-finite or non-positive masses.
pub fn condition_for_human_mass(human_eff_mass_kg: f64, rule: ConditionRule) -> Option<Condition> {
    if !human_eff_mass_kg.is_finite() || human_eff_mass_kg <= 0.0 {
        return None;
    }
    let mass_of = |condition| {
        effective_mass(&human_config(condition)).expect("bundled configs are valid")
    };
    let light = mass_of(Condition::IA);
    let heavy = mass_of(Condition::IB);
    let condition = match rule {
        ConditionRule::NearestNotLower => {
            if human_eff_mass_kg <= light {
                Condition::IA
            } else {
                Condition::IB
            }
        }
        ConditionRule::Nearest => {
            if (human_eff_mass_kg - light).abs() <= (human_eff_mass_kg - heavy).abs() {
                Condition::IA
            } else {
                Condition::IB
            }
        }
    };
    Some(condition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DataSource, ExperimentRecord, ImpactorGeometry, SurrogateSite};
    use crate::records::{probability_map, MassGrid, VelocityBins};

    fn query(mass: f64, v: f64, impactor: ImpactorKind, condition: Condition) -> RiskQuery {
        RiskQuery {
            robot_eff_mass_kg: mass,
            velocity_m_s: v,
            impactor,
            condition,
        }
    }

    fn pct(answer: &ProbabilityAnswer, injury: InjuryClass) -> f64 {
        answer
            .classes()
            .expect("answer has classes")
            .value
            .probability_of(injury)
            .expect("class is reported")
            * 100.0
    }

    #[test]
    fn bundled_rows_resolve_to_the_next_cap() {
        let q = query(5.0, 0.8, ImpactorKind::Edge, Condition::IA);
        let answer = injury_probability(&q, &ProbabilitySource::Bundled);
        assert!((pct(&answer, InjuryClass::SkinCut) - 25.0).abs() < 1e-9);
        assert!((pct(&answer, InjuryClass::TendonBone) - 0.0).abs() < 1e-9);
        let resolved = answer.classes().unwrap().value.resolved_velocity_m_s;
        assert_eq!(resolved, 1.0);

        let q = query(5.0, 1.6, ImpactorKind::Sheet, Condition::IB);
        let answer = injury_probability(&q, &ProbabilitySource::Bundled);
        assert!((pct(&answer, InjuryClass::SkinCut) - 39.6).abs() < 1e-9);
        assert!((pct(&answer, InjuryClass::TendonBone) - 2.6).abs() < 1e-9);
    }

    #[test]
    fn bundled_range_guards_answer_no_data() {
        let q = query(12.0, 1.0, ImpactorKind::Wedge, Condition::IA);
        match injury_probability(&q, &ProbabilitySource::Bundled) {
            ProbabilityAnswer::NoData { reason } => {
                assert!(reason.contains("mass outside [3,9] kg"), "{reason}");
            }
            other => panic!("expected no data, got {other:?}"),
        }
        let q = query(5.0, 2.5, ImpactorKind::Wedge, Condition::IA);
        assert!(matches!(
            injury_probability(&q, &ProbabilitySource::Bundled),
            ProbabilityAnswer::NoData { .. }
        ));
    }

    #[test]
    fn bundled_max_safe_matches_published_cells() {
        let v = max_safe_velocity(
            5.0,
            ImpactorKind::Edge,
            Condition::IA,
            InjuryClass::SkinImprint,
            0.0,
            &ProbabilitySource::Bundled,
        );
        assert_eq!(v.velocity(), Some(0.5));

        let v = max_safe_velocity(
            5.0,
            ImpactorKind::Edge,
            Condition::IB,
            InjuryClass::SkinImprint,
            0.10,
            &ProbabilitySource::Bundled,
        );
        assert_eq!(v, VelocityAnswer::NoneInRange);

        // Nothing exceeds the most severe class.
        let v = max_safe_velocity(
            5.0,
            ImpactorKind::Edge,
            Condition::IB,
            InjuryClass::TendonBone,
            0.0,
            &ProbabilitySource::Bundled,
        );
        assert_eq!(v.velocity(), Some(2.0));
    }

    #[test]
    fn bundled_max_safe_without_imprint_shares_is_no_data() {
        let v = max_safe_velocity(
            5.0,
            ImpactorKind::Wedge,
            Condition::IA,
            InjuryClass::None,
            0.5,
            &ProbabilitySource::Bundled,
        );
        assert!(matches!(v, VelocityAnswer::NoData { .. }));
    }

    fn record(mass: f64, v: f64, injury: InjuryClass) -> ExperimentRecord {
        ExperimentRecord {
            condition: Condition::IA,
            impactor: ImpactorGeometry::bundled(ImpactorKind::Wedge),
            site: SurrogateSite::ALL[0],
            human_eff_mass_kg: 2.58,
            robot_eff_mass_kg: mass,
            desired_velocity_m_s: v,
            measured_velocity_m_s: v,
            peak_force_n: 100.0,
            force_saturated: false,
            injury,
            valid: true,
            invalid_reason: None,
            specimen_id: "q".into(),
            provenance: DataSource::External,
        }
    }

    fn test_map(records: &[ExperimentRecord]) -> ProbabilityMap {
        probability_map(
            records,
            Condition::IA,
            None,
            MassGrid::bundled(),
            VelocityBins::default(),
            SourceTag::new(DataSource::External, "unit map"),
        )
        .unwrap()
    }

    #[test]
    fn map_answers_come_from_the_containing_bin() {
        let records = vec![
            record(5.0, 0.8, InjuryClass::None),
            record(5.0, 0.9, InjuryClass::SkinCut),
        ];
        let map = test_map(&records);
        let q = query(5.0, 0.75, ImpactorKind::Wedge, Condition::IA);
        let answer = injury_probability(&q, &ProbabilitySource::Map(&map));
        let classes = answer.classes().unwrap();
        assert_eq!(classes.value.sample_size, Some(2));
        assert!((pct(&answer, InjuryClass::SkinCut) - 50.0).abs() < 1e-9);
        assert_eq!(classes.value.resolved_velocity_m_s, 1.0);

        // Empty bin next door is no data, not zero.
        let q = query(5.0, 1.4, ImpactorKind::Wedge, Condition::IA);
        assert!(matches!(
            injury_probability(&q, &ProbabilitySource::Map(&map)),
            ProbabilityAnswer::NoData { .. }
        ));
    }

    #[test]
    fn map_max_safe_stops_at_the_first_unsafe_or_empty_bin() {
        // Bins (0,0.5] and (0.5,1.0] carry safe outcomes, (1.0,1.5] is
        // empty, (1.5,2.0] would qualify but is unreachable.
        let records = vec![
            record(5.0, 0.3, InjuryClass::None),
            record(5.0, 0.8, InjuryClass::SkinImprint),
            record(5.0, 1.8, InjuryClass::None),
        ];
        let map = test_map(&records);
        let source = ProbabilitySource::Map(&map);
        let v = max_safe_velocity(
            5.0,
            ImpactorKind::Wedge,
            Condition::IA,
            InjuryClass::SkinImprint,
            0.0,
            &source,
        );
        assert_eq!(v.velocity(), Some(1.0));

        // Tolerating the top class is vacuous; the hole no longer blocks.
        let v = max_safe_velocity(
            5.0,
            ImpactorKind::Wedge,
            Condition::IA,
            InjuryClass::TendonBone,
            0.0,
            &source,
        );
        assert_eq!(v.velocity(), Some(2.5));

        // An unsafe first bin yields none-in-range, not a made-up floor.
        let records = vec![record(5.0, 0.3, InjuryClass::TendonBone)];
        let map = test_map(&records);
        let v = max_safe_velocity(
            5.0,
            ImpactorKind::Wedge,
            Condition::IA,
            InjuryClass::SkinImprint,
            0.0,
            &ProbabilitySource::Map(&map),
        );
        assert_eq!(v, VelocityAnswer::NoneInRange);
    }

    #[test]
    fn map_respects_its_filters() {
        let records = vec![record(5.0, 0.8, InjuryClass::None)];
        let map = test_map(&records);
        let q = query(5.0, 0.8, ImpactorKind::Wedge, Condition::IB);
        assert!(matches!(
            injury_probability(&q, &ProbabilitySource::Map(&map)),
            ProbabilityAnswer::NoData { .. }
        ));
    }

    #[test]
    fn round_trip_holds_on_the_bundled_source() {
        // The probability at the returned velocity satisfies the cap.
        for &tolerated in &[InjuryClass::SkinImprint, InjuryClass::SkinCut] {
            for &p_max in &[0.0, 0.05, 0.10, 0.30, 1.0] {
                for &condition in &Condition::ALL {
                    for &impactor in &ImpactorKind::ALL {
                        let v = max_safe_velocity(
                            5.0,
                            impactor,
                            condition,
                            tolerated,
                            p_max,
                            &ProbabilitySource::Bundled,
                        );
                        if let Some(v) = v.velocity() {
                            let q = query(5.0, v, impactor, condition);
                            let answer = injury_probability(&q, &ProbabilitySource::Bundled);
                            let exceed = answer
                                .classes()
                                .unwrap()
                                .value
                                .exceedance(tolerated)
                                .unwrap();
                            assert!(exceed <= p_max, "{exceed} > {p_max}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn advisory_is_always_conservative() {
        let advisory = constrained_comparison(5.0, 1.0, ImpactorKind::Edge);
        assert!(advisory.threshold_factor_at_least >= 2.0);
        assert!(advisory.constrained_requires_own_data);
        assert!(advisory.static_contact_note.is_none());
        let advisory = constrained_comparison(5.0, 0.0, ImpactorKind::Edge);
        assert!(advisory.static_contact_note.is_some());
    }

    #[test]
    fn condition_rule_selects_by_human_mass() {
        use ConditionRule::{Nearest, NearestNotLower};
        assert_eq!(
            condition_for_human_mass(2.0, NearestNotLower),
            Some(Condition::IA)
        );
        assert_eq!(
            condition_for_human_mass(3.0, NearestNotLower),
            Some(Condition::IB)
        );
        assert_eq!(
            condition_for_human_mass(12.0, NearestNotLower),
            Some(Condition::IB)
        );
        assert_eq!(condition_for_human_mass(3.0, Nearest), Some(Condition::IA));
        assert_eq!(condition_for_human_mass(6.0, Nearest), Some(Condition::IB));
        assert_eq!(condition_for_human_mass(f64::NAN, Nearest), None);
    }
}
