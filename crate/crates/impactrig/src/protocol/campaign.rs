//! Trial execution and campaign orchestration: drives the state machine
//! per trial, derives per-trial RNG streams from one campaign seed, and
//! runs grids in parallel with deterministic, grid-ordered output.

use super::injury::InjuryOutcomeModel;
use super::noise::VelocityNoiseModel;
use super::state::{TrialState, TrialStateMachine};
use super::ProtocolError;
use crate::dynamics::{simulate_impact, CalibrationCurve, ContactModel, SensorProfile};
use crate::model::{
    effective_mass, validate_record, Condition, DataSource, ExperimentRecord, ImpactorGeometry,
    ImpactorKind, PendulumConfig, SurrogateSite,
};
use crate::records::{human_config, robot_configs};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Coordinates and apparatus for one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSpec {
    pub condition: Condition,
    pub impactor: ImpactorKind,
    pub site: SurrogateSite,
    pub robot_config: PendulumConfig,
    pub human_config: PendulumConfig,
    pub desired_velocity_m_s: f64,
    pub specimen_id: String,
}

/// Models shared by every trial of a campaign. The default is the fully
/// bundled rig: its calibration curve, characterized velocity noise,
/// per-impactor contact presets, fitted injury bands, and stock sensors.
#[derive(Debug, Clone)]
pub struct TrialOptions {
    pub calibration: CalibrationCurve,
    pub noise: VelocityNoiseModel,
    pub injury: InjuryOutcomeModel,
    /// None selects the bundled per-impactor contact preset.
    pub contact: Option<ContactModel>,
    pub sensors: SensorProfile,
}

impl Default for TrialOptions {
    fn default() -> Self {
        TrialOptions {
            calibration: CalibrationCurve::default(),
            noise: VelocityNoiseModel::bundled(),
            injury: InjuryOutcomeModel::bundled(),
            contact: None,
            sensors: SensorProfile::default(),
        }
    }
}

fn fault(machine: &mut TrialStateMachine, reason: String) -> ProtocolError {
    // Recording the fault cannot itself fail from a non-fault state.
    machine
        .fault(reason.clone())
        .expect("fault is legal from any active state");
    ProtocolError::TrialFault {
        state: TrialState::Fault,
        reason,
    }
}

/// Run one trial: wind to the release angle for the desired velocity,
/// release, collide, classify the outcome.
///
/// Deterministic in (spec, options, seed). The released pendulum's arrival
/// speed is drawn from the noise model (that is what the calibration's
/// accuracy table characterizes); the contact model turns it into a peak
/// force, and the injury model grades that force. Unreachable velocities
/// fault the trial rather than erroring the campaign.
pub fn run_trial(
    spec: &TrialSpec,
    options: &TrialOptions,
    seed: u64,
) -> Result<ExperimentRecord, ProtocolError> {
    let mut machine = TrialStateMachine::new();
    machine.advance(TrialState::Wind)?;

    if !(spec.desired_velocity_m_s.is_finite() && spec.desired_velocity_m_s > 0.0) {
        return Err(fault(&mut machine, format!(
            "desired velocity {} m/s is not a positive number",
            spec.desired_velocity_m_s
        )));
    }
    let l_col = spec.robot_config.collision_distance_m();
    if let Err(e) = options
        .calibration
        .required_angle(spec.desired_velocity_m_s, l_col)
    {
        return Err(fault(&mut machine, e.to_string()));
    }

    machine.advance(TrialState::BrakeHold)?;
    machine.advance(TrialState::Unwind)?;
    machine.advance(TrialState::Release)?;

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let measured_velocity_m_s = options.noise.sample(spec.desired_velocity_m_s, &mut rng);
    let robot_eff_mass_kg = effective_mass(&spec.robot_config)?;
    let human_eff_mass_kg = effective_mass(&spec.human_config)?;

    machine.advance(TrialState::Collide)?;
    let contact = options
        .contact
        .unwrap_or_else(|| ContactModel::bundled_preset(spec.impactor));
    let outcome = simulate_impact(
        robot_eff_mass_kg,
        measured_velocity_m_s,
        human_eff_mass_kg,
        0.0,
        &contact,
    )?;
    machine.advance(TrialState::Catch)?;

    let injury = options
        .injury
        .assign(spec.impactor, spec.site, outcome.peak_force_n)?;
    machine.advance(TrialState::Done)?;
    debug_assert_eq!(machine.collide_entries(), 1);

    let record = ExperimentRecord {
        condition: spec.condition,
        impactor: ImpactorGeometry::bundled(spec.impactor),
        site: spec.site,
        human_eff_mass_kg,
        robot_eff_mass_kg,
        desired_velocity_m_s: spec.desired_velocity_m_s,
        measured_velocity_m_s,
        peak_force_n: outcome.peak_force_n,
        force_saturated: false,
        injury,
        valid: true,
        invalid_reason: None,
        specimen_id: spec.specimen_id.clone(),
        provenance: DataSource::Synthetic,
    };
    Ok(validate_record(record, options.sensors.force_range_n)?)
}

/// How many trials each grid cell receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RepeatRule {
    #[serde(rename = "fixed")]
    Fixed(usize),
    /// 2, 1, 2, 1, ... by cell order: an average of 1.5 repeats, which
    /// takes the reference grid's 480 cells to 720 trials.
    #[serde(rename = "alternate-two-one")]
    AlternateTwoOne,
}

impl RepeatRule {
    pub fn count(self, cell_index: usize) -> usize {
        match self {
            RepeatRule::Fixed(n) => n,
            RepeatRule::AlternateTwoOne => {
                if cell_index.is_multiple_of(2) {
                    2
                } else {
                    1
                }
            }
        }
    }
}

/// Cartesian trial grid. The struck-side arm build follows the condition
/// (light build for the first condition, heavy for the second); campaigns
/// with custom struck-side builds run [`run_trial`] directly.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignGrid {
    pub conditions: Vec<Condition>,
    pub impactors: Vec<ImpactorKind>,
    pub sites: Vec<SurrogateSite>,
    pub robot_configs: Vec<PendulumConfig>,
    pub velocities_m_s: Vec<f64>,
    pub repeats: RepeatRule,
}

impl CampaignGrid {
    /// The full published campaign: 2 conditions x 3 impactors x 4 sites x
    /// 4 robot builds x 5 velocities, alternating 2/1 repeats = 720 trials.
    pub fn reference_grid() -> Self {
        CampaignGrid {
            conditions: Condition::ALL.to_vec(),
            impactors: ImpactorKind::ALL.to_vec(),
            sites: SurrogateSite::ALL.to_vec(),
            robot_configs: robot_configs().to_vec(),
            velocities_m_s: vec![0.25, 0.5, 1.0, 1.5, 2.0],
            repeats: RepeatRule::AlternateTwoOne,
        }
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        let invalid = |reason: &str| ProtocolError::InvalidGrid {
            reason: reason.to_string(),
        };
        if self.conditions.is_empty() {
            return Err(invalid("no conditions"));
        }
        if self.impactors.is_empty() {
            return Err(invalid("no impactors"));
        }
        if self.sites.is_empty() {
            return Err(invalid("no sites"));
        }
        if self.robot_configs.is_empty() {
            return Err(invalid("no robot configurations"));
        }
        if self.velocities_m_s.is_empty() {
            return Err(invalid("no velocities"));
        }
        if self
            .velocities_m_s
            .iter()
            .any(|v| !(v.is_finite() && *v > 0.0))
        {
            return Err(invalid("velocities must be finite and > 0"));
        }
        if let RepeatRule::Fixed(0) = self.repeats {
            return Err(invalid("fixed repeat count must be >= 1"));
        }
        for config in &self.robot_configs {
            config.validate()?;
        }
        Ok(())
    }

    /// Flatten the grid into trial specs, in grid order (condition,
    /// impactor, site, robot, velocity, repeat), with sequential specimen
    /// ids `sim-000001`, ...
    pub fn expand(&self) -> Vec<TrialSpec> {
        let mut specs = Vec::new();
        let mut cell_index = 0usize;
        for &condition in &self.conditions {
            let human = human_config(condition);
            for &impactor in &self.impactors {
                for &site in &self.sites {
                    for robot in &self.robot_configs {
                        for &v in &self.velocities_m_s {
                            for _ in 0..self.repeats.count(cell_index) {
                                specs.push(TrialSpec {
                                    condition,
                                    impactor,
                                    site,
                                    robot_config: *robot,
                                    human_config: human,
                                    desired_velocity_m_s: v,
                                    specimen_id: format!("sim-{:06}", specs.len() + 1),
                                });
                            }
                            cell_index += 1;
                        }
                    }
                }
            }
        }
        specs
    }
}

/// One non-fatal trial failure inside a campaign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignFault {
    pub trial_index: usize,
    pub specimen_id: String,
    pub reason: String,
}

/// Reproducibility sidecar written next to campaign output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignManifest {
    pub toolkit_version: String,
    pub campaign_seed: u64,
    pub trial_count: usize,
    pub record_count: usize,
    pub fault_count: usize,
    pub conditions: Vec<Condition>,
    pub impactors: Vec<ImpactorKind>,
    pub sites: Vec<SurrogateSite>,
    pub robot_loads_kg: Vec<f64>,
    pub velocities_m_s: Vec<f64>,
    pub repeats: RepeatRule,
}

#[derive(Debug, Clone)]
pub struct CampaignOutcome {
    /// In grid order; faulted trials leave no record.
    pub records: Vec<ExperimentRecord>,
    pub faults: Vec<CampaignFault>,
    pub manifest: CampaignManifest,
}

const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent per-trial seed stream; trial index picks the stream
/// position, so execution order cannot change any trial's draw.
fn trial_seed(campaign_seed: u64, trial_index: usize) -> u64 {
    splitmix64(campaign_seed.wrapping_add((trial_index as u64 + 1).wrapping_mul(SEED_STRIDE)))
}

/// Run every trial of the grid. Trials execute in parallel; records come
/// back in grid order regardless of scheduling, and the same seed yields
/// the same records on every run. Faults are collected, not propagated.
pub fn run_campaign(
    grid: &CampaignGrid,
    options: &TrialOptions,
    campaign_seed: u64,
) -> Result<CampaignOutcome, ProtocolError> {
    grid.validate()?;
    let specs = grid.expand();
    let results: Vec<Result<ExperimentRecord, ProtocolError>> = specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| run_trial(spec, options, trial_seed(campaign_seed, i)))
        .collect();

    let mut records = Vec::with_capacity(specs.len());
    let mut faults = Vec::new();
    for (i, result) in results.into_iter().enumerate() {
        match result {
            Ok(record) => records.push(record),
            Err(e) => faults.push(CampaignFault {
                trial_index: i,
                specimen_id: specs[i].specimen_id.clone(),
                reason: e.to_string(),
            }),
        }
    }
    let manifest = CampaignManifest {
        toolkit_version: crate::TOOLKIT_VERSION.to_string(),
        campaign_seed,
        trial_count: specs.len(),
        record_count: records.len(),
        fault_count: faults.len(),
        conditions: grid.conditions.clone(),
        impactors: grid.impactors.clone(),
        sites: grid.sites.clone(),
        robot_loads_kg: grid.robot_configs.iter().map(|c| c.attached_load_kg).collect(),
        velocities_m_s: grid.velocities_m_s.clone(),
        repeats: grid.repeats,
    };
    Ok(CampaignOutcome {
        records,
        faults,
        manifest,
    })
}
