//! Shared domain vocabulary: pendulum geometry, impactor and surrogate
//! descriptors, injury grades, collision taxonomy, experiment records, and
//! data-provenance tags.
//!
//! All types here are immutable value objects; construct them, validate them,
//! share them freely across threads.

use serde::{Deserialize, Serialize};
use std::borrow::Cow;
use std::fmt;

/// Gravitational acceleration used by the release dynamics, m/s².
pub const GRAVITY_M_S2: f64 = 9.81;

/// Force sensor measuring range, N. Peaks at or above this value are only
/// partially observable and are flagged as saturated.
pub const FORCE_SENSOR_RANGE_N: f64 = 500.0;

/// Contacts shorter than this are in the dynamic impact phase; at or above
/// it they enter the quasi-static phase.
pub const DYNAMIC_PHASE_MAX_S: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("{field}: {reason}")]
    InvalidField { field: &'static str, reason: String },
    #[error("unknown {what} code {code:?}")]
    UnknownCode { what: &'static str, code: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ModelError {
    ModelError::InvalidField {
        field,
        reason: reason.into(),
    }
}

/// Contact geometry families mounted on the robot pendulum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ImpactorKind {
    #[serde(rename = "W")]
    Wedge,
    #[serde(rename = "E")]
    Edge,
    #[serde(rename = "S")]
    Sheet,
}

impl ImpactorKind {
    pub const ALL: [ImpactorKind; 3] = [ImpactorKind::Wedge, ImpactorKind::Edge, ImpactorKind::Sheet];

    /// Single-letter code used in record files and report tables.
    pub fn code(self) -> &'static str {
        match self {
            ImpactorKind::Wedge => "W",
            ImpactorKind::Edge => "E",
            ImpactorKind::Sheet => "S",
        }
    }

    pub fn parse_code(code: &str) -> Result<Self, ModelError> {
        match code {
            "W" => Ok(ImpactorKind::Wedge),
            "E" => Ok(ImpactorKind::Edge),
            "S" => Ok(ImpactorKind::Sheet),
            other => Err(ModelError::UnknownCode {
                what: "impactor",
                code: other.to_string(),
            }),
        }
    }
}

impl fmt::Display for ImpactorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// An impactor: geometry family plus a free-text shape descriptor.
///
/// The three bundled impactors are aluminium (alloy EN AW-7075, 150 HB);
/// see [`ImpactorGeometry::MATERIAL`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpactorGeometry {
    pub kind: ImpactorKind,
    pub descriptor: String,
}

impl ImpactorGeometry {
    /// Material of the bundled impactor set.
    pub const MATERIAL: &'static str = "aluminium alloy EN AW-7075, hardness 150 HB";

    /// The bundled impactor for a geometry family.
    pub fn bundled(kind: ImpactorKind) -> Self {
        let descriptor = match kind {
            ImpactorKind::Wedge => "prism 90°, boned",
            ImpactorKind::Edge => "tetrahedron 90°, boned",
            ImpactorKind::Sheet => "width 1.5 mm, boned",
        };
        ImpactorGeometry {
            kind,
            descriptor: descriptor.to_string(),
        }
    }
}

/// Tissue surrogate mounted on the human pendulum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Surrogate {
    #[serde(rename = "dew-claw")]
    DewClaw,
    #[serde(rename = "middle-foot")]
    MiddleFoot,
}

impl Surrogate {
    pub fn code(self) -> &'static str {
        match self {
            Surrogate::DewClaw => "dew-claw",
            Surrogate::MiddleFoot => "middle-foot",
        }
    }

    pub fn parse_code(code: &str) -> Result<Self, ModelError> {
        match code {
            "dew-claw" => Ok(Surrogate::DewClaw),
            "middle-foot" => Ok(Surrogate::MiddleFoot),
            other => Err(ModelError::UnknownCode {
                what: "surrogate",
                code: other.to_string(),
            }),
        }
    }
}

/// Collision location on the surrogate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Location {
    #[serde(rename = "proximal")]
    Proximal,
    #[serde(rename = "distal")]
    Distal,
}

impl Location {
    pub fn code(self) -> &'static str {
        match self {
            Location::Proximal => "proximal",
            Location::Distal => "distal",
        }
    }

    pub fn parse_code(code: &str) -> Result<Self, ModelError> {
        match code {
            "proximal" => Ok(Location::Proximal),
            "distal" => Ok(Location::Distal),
            other => Err(ModelError::UnknownCode {
                what: "location",
                code: other.to_string(),
            }),
        }
    }
}

/// One of the four surrogate/location combinations a trial can target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SurrogateSite {
    pub surrogate: Surrogate,
    pub location: Location,
}

impl SurrogateSite {
    pub const ALL: [SurrogateSite; 4] = [
        SurrogateSite {
            surrogate: Surrogate::DewClaw,
            location: Location::Proximal,
        },
        SurrogateSite {
            surrogate: Surrogate::DewClaw,
            location: Location::Distal,
        },
        SurrogateSite {
            surrogate: Surrogate::MiddleFoot,
            location: Location::Proximal,
        },
        SurrogateSite {
            surrogate: Surrogate::MiddleFoot,
            location: Location::Distal,
        },
    ];
}

impl fmt::Display for SurrogateSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.surrogate.code(), self.location.code())
    }
}

/// Injury severity grades, ordered from least to most severe.
///
/// The derived `Ord` is the severity order; `max` over a record set is the
/// worst observed outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum InjuryClass {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "s-i")]
    SkinImprint,
    #[serde(rename = "s-c")]
    SkinCut,
    #[serde(rename = "t-b")]
    TendonBone,
}

impl InjuryClass {
    pub const ALL: [InjuryClass; 4] = [
        InjuryClass::None,
        InjuryClass::SkinImprint,
        InjuryClass::SkinCut,
        InjuryClass::TendonBone,
    ];

    pub fn code(self) -> &'static str {
        match self {
            InjuryClass::None => "none",
            InjuryClass::SkinImprint => "s-i",
            InjuryClass::SkinCut => "s-c",
            InjuryClass::TendonBone => "t-b",
        }
    }

    pub fn parse_code(code: &str) -> Result<Self, ModelError> {
        match code {
            "none" => Ok(InjuryClass::None),
            "s-i" => Ok(InjuryClass::SkinImprint),
            "s-c" => Ok(InjuryClass::SkinCut),
            "t-b" => Ok(InjuryClass::TendonBone),
            other => Err(ModelError::UnknownCode {
                what: "injury class",
                code: other.to_string(),
            }),
        }
    }
}

impl fmt::Display for InjuryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Whether the struck body is free to recoil or backed by a rigid support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContactConstraint {
    #[serde(rename = "unconstrained")]
    Unconstrained,
    #[serde(rename = "constrained")]
    Constrained,
}

/// Temporal contact phase: dynamic (short impact) or quasi-static (sustained).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContactPhase {
    #[serde(rename = "dynamic")]
    Dynamic,
    #[serde(rename = "quasi-static")]
    QuasiStatic,
}

/// Classify a contact duration. Durations below `threshold_s` are dynamic.
pub fn phase_for_duration(contact_duration_s: f64, threshold_s: f64) -> ContactPhase {
    if contact_duration_s < threshold_s {
        ContactPhase::Dynamic
    } else {
        ContactPhase::QuasiStatic
    }
}

/// Spatial/temporal collision taxonomy for a contact event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionScenario {
    pub constraint: ContactConstraint,
    pub phase: ContactPhase,
    pub phase_threshold_s: f64,
}

impl CollisionScenario {
    /// Build a scenario from a constraint and a measured contact duration,
    /// using the standard 0.5 s phase threshold.
    pub fn classify(constraint: ContactConstraint, contact_duration_s: f64) -> Self {
        CollisionScenario {
            constraint,
            phase: phase_for_duration(contact_duration_s, DYNAMIC_PHASE_MAX_S),
            phase_threshold_s: DYNAMIC_PHASE_MAX_S,
        }
    }
}

/// Which side of the rig a pendulum stands in for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PendulumRole {
    #[serde(rename = "human")]
    Human,
    #[serde(rename = "robot")]
    Robot,
}

/// Geometric and inertial description of one rig pendulum.
///
/// Lengths are stored in mm and inertia in kg·mm², matching the rig's own
/// data sheets; SI accessors convert at the boundary. The pendulum (arm plus
/// attached load) is one rigid body of mass `total_mass_kg` with its centre
/// of gravity `cog_distance_mm` below the pivot; `inertia_about_cog_kg_mm2`
/// is taken about that centre of gravity. `attached_load_kg` is the nominal
/// load label and does not enter any physics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PendulumConfig {
    pub role: PendulumRole,
    pub inertia_about_cog_kg_mm2: f64,
    pub cog_distance_mm: f64,
    pub collision_distance_mm: f64,
    pub total_mass_kg: f64,
    pub attached_load_kg: f64,
}

impl PendulumConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        let finite = [
            ("inertia_about_cog_kg_mm2", self.inertia_about_cog_kg_mm2),
            ("cog_distance_mm", self.cog_distance_mm),
            ("collision_distance_mm", self.collision_distance_mm),
            ("total_mass_kg", self.total_mass_kg),
            ("attached_load_kg", self.attached_load_kg),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(invalid(name, format!("must be finite, got {value}")));
            }
        }
        if self.inertia_about_cog_kg_mm2 < 0.0 {
            return Err(invalid("inertia_about_cog_kg_mm2", "must be >= 0"));
        }
        if self.cog_distance_mm <= 0.0 {
            return Err(invalid("cog_distance_mm", "must be > 0"));
        }
        if self.collision_distance_mm <= 0.0 {
            return Err(invalid("collision_distance_mm", "must be > 0"));
        }
        if self.total_mass_kg <= 0.0 {
            return Err(invalid("total_mass_kg", "must be > 0"));
        }
        if self.attached_load_kg < 0.0 {
            return Err(invalid("attached_load_kg", "must be >= 0"));
        }
        Ok(())
    }

    pub fn cog_distance_m(&self) -> f64 {
        self.cog_distance_mm / 1000.0
    }

    pub fn collision_distance_m(&self) -> f64 {
        self.collision_distance_mm / 1000.0
    }

    /// Moment of inertia about the pivot, kg·m².
    pub fn pivot_inertia_kg_m2(&self) -> f64 {
        (self.inertia_about_cog_kg_mm2
            + self.total_mass_kg * self.cog_distance_mm * self.cog_distance_mm)
            * 1e-6
    }
}

/// Equivalent point mass of the pendulum at its collision point, kg.
///
/// Computed as J/l_col² + m·(l/l_col)², which equals (J + m·l²)/l_col² but
/// is exact in the point-mass case l == l_col.
pub fn effective_mass(config: &PendulumConfig) -> Result<f64, ModelError> {
    config.validate()?;
    let l_col = config.collision_distance_mm;
    let ratio = config.cog_distance_mm / l_col;
    Ok(config.inertia_about_cog_kg_mm2 / (l_col * l_col) + config.total_mass_kg * ratio * ratio)
}

/// Human body parts with standardized effective masses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BodyPart {
    #[serde(rename = "hand")]
    Hand,
    #[serde(rename = "lower-arm")]
    LowerArm,
    #[serde(rename = "upper-arm")]
    UpperArm,
}

/// Standardized effective mass of a human body part, kg.
pub fn body_part_mass(part: BodyPart) -> f64 {
    match part {
        BodyPart::Hand => 0.6,
        BodyPart::LowerArm => 2.0,
        BodyPart::UpperArm => 3.0,
    }
}

/// A body part paired with its standardized effective mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyPartMass {
    pub part: BodyPart,
    pub effective_mass_kg: f64,
}

impl BodyPartMass {
    pub fn standard(part: BodyPart) -> Self {
        BodyPartMass {
            part,
            effective_mass_kg: body_part_mass(part),
        }
    }
}

/// Experimental series, keyed by the human-pendulum load configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Condition {
    #[serde(rename = "I-a")]
    IA,
    #[serde(rename = "I-b")]
    IB,
}

impl Condition {
    pub const ALL: [Condition; 2] = [Condition::IA, Condition::IB];

    pub fn code(self) -> &'static str {
        match self {
            Condition::IA => "I-a",
            Condition::IB => "I-b",
        }
    }

    pub fn parse_code(code: &str) -> Result<Self, ModelError> {
        match code {
            "I-a" => Ok(Condition::IA),
            "I-b" => Ok(Condition::IB),
            other => Err(ModelError::UnknownCode {
                what: "condition",
                code: other.to_string(),
            }),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Where a value or record came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DataSource {
    /// Published aggregates shipped with the toolkit.
    #[serde(rename = "bundled")]
    Bundled,
    /// Generated by this toolkit's protocol simulator.
    #[serde(rename = "synthetic")]
    Synthetic,
    /// Ingested from a user-supplied file.
    #[serde(rename = "external")]
    External,
}

impl DataSource {
    pub fn code(self) -> &'static str {
        match self {
            DataSource::Bundled => "bundled",
            DataSource::Synthetic => "synthetic",
            DataSource::External => "external",
        }
    }

    pub fn parse_code(code: &str) -> Result<Self, ModelError> {
        match code {
            "bundled" => Ok(DataSource::Bundled),
            "synthetic" => Ok(DataSource::Synthetic),
            "external" => Ok(DataSource::External),
            other => Err(ModelError::UnknownCode {
                what: "provenance",
                code: other.to_string(),
            }),
        }
    }
}

impl fmt::Display for DataSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Provenance tag attached to every aggregate value the toolkit reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceTag {
    pub origin: DataSource,
    /// What the value is, e.g. "threshold summary" or "force statistics".
    pub detail: Cow<'static, str>,
}

impl SourceTag {
    pub fn bundled(detail: &'static str) -> Self {
        SourceTag {
            origin: DataSource::Bundled,
            detail: Cow::Borrowed(detail),
        }
    }

    pub fn new(origin: DataSource, detail: impl Into<String>) -> Self {
        SourceTag {
            origin,
            detail: Cow::Owned(detail.into()),
        }
    }
}

impl fmt::Display for SourceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.origin, self.detail)
    }
}

/// A value paired with its provenance tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sourced<T> {
    pub value: T,
    pub source: SourceTag,
}

impl<T> Sourced<T> {
    pub fn new(value: T, source: SourceTag) -> Self {
        Sourced { value, source }
    }
}

/// One impact trial: grid coordinates, measured quantities, and outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub condition: Condition,
    pub impactor: ImpactorGeometry,
    pub site: SurrogateSite,
    pub human_eff_mass_kg: f64,
    pub robot_eff_mass_kg: f64,
    pub desired_velocity_m_s: f64,
    pub measured_velocity_m_s: f64,
    /// Model/sensed peak contact force before any sensor clipping, N.
    pub peak_force_n: f64,
    /// True when the peak reached the sensor's measuring range; the stored
    /// peak is then only partially observable.
    pub force_saturated: bool,
    pub injury: InjuryClass,
    /// False for trials excluded from aggregation (e.g. pre-existing tissue
    /// abnormality). Invalid records always carry `invalid_reason`.
    pub valid: bool,
    /// Present iff `valid` is false. Not part of the record file schema;
    /// ingestion reconstructs a generic reason for invalid rows.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub invalid_reason: Option<String>,
    pub specimen_id: String,
    pub provenance: DataSource,
}

/// Structural validation and normalization of a record.
///
/// Checks value ranges and internal consistency, marks `force_saturated`
/// when the peak reaches `sensor_range_n`, and guarantees the
/// invalid-implies-reason invariant (an explicit reason such as "prior skin
/// abnormality" is passed through unchanged). Returns the normalized record,
/// or a field-level rejection for structurally malformed input.
pub fn validate_record(
    mut record: ExperimentRecord,
    sensor_range_n: f64,
) -> Result<ExperimentRecord, ModelError> {
    let finite = [
        ("human_eff_mass_kg", record.human_eff_mass_kg),
        ("robot_eff_mass_kg", record.robot_eff_mass_kg),
        ("v_desired_m_s", record.desired_velocity_m_s),
        ("v_measured_m_s", record.measured_velocity_m_s),
        ("peak_force_N", record.peak_force_n),
    ];
    for (name, value) in finite {
        if !value.is_finite() {
            return Err(invalid(name, format!("must be finite, got {value}")));
        }
    }
    if record.human_eff_mass_kg <= 0.0 {
        return Err(invalid("human_eff_mass_kg", "must be > 0"));
    }
    if record.robot_eff_mass_kg <= 0.0 {
        return Err(invalid("robot_eff_mass_kg", "must be > 0"));
    }
    if record.desired_velocity_m_s < 0.0 {
        return Err(invalid("v_desired_m_s", "must be >= 0"));
    }
    if record.measured_velocity_m_s < 0.0 {
        return Err(invalid("v_measured_m_s", "must be >= 0"));
    }
    if record.peak_force_n < 0.0 {
        return Err(invalid("peak_force_N", "must be >= 0"));
    }
    if record.specimen_id.is_empty() {
        return Err(invalid("specimen_id", "must not be empty"));
    }
    if record.peak_force_n >= sensor_range_n {
        record.force_saturated = true;
    } else if record.force_saturated {
        return Err(invalid(
            "force_saturated",
            format!(
                "claimed saturated but peak_force_N {} is below the sensor range {}",
                record.peak_force_n, sensor_range_n
            ),
        ));
    }
    if record.valid {
        record.invalid_reason = None;
    } else if record.invalid_reason.is_none() {
        record.invalid_reason = Some("flagged invalid in source data".to_string());
    }
    Ok(record)
}
