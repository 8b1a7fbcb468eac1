//! The automated trial protocol: the per-trial state machine, the
//! characterized velocity-accuracy noise model, the synthetic
//! injury-outcome model, and the seeded campaign runner that strings
//! them together into reproducible record sets.

mod campaign;
mod injury;
mod noise;
mod state;

pub use campaign::{
    run_campaign, run_trial, CampaignFault, CampaignGrid, CampaignManifest, CampaignOutcome,
    RepeatRule, TrialOptions, TrialSpec,
};
pub use injury::{fit_injury_model, ClassForceStat, InjuryModelCell, InjuryOutcomeModel};
pub use noise::VelocityNoiseModel;
pub use state::{TrialState, TrialStateMachine};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("illegal transition {from:?} -> {to:?}")]
    IllegalTransition { from: TrialState, to: TrialState },
    #[error("trial fault in {state:?}: {reason}")]
    TrialFault { state: TrialState, reason: String },
    #[error("{what}: {reason}")]
    InvalidConfig { what: &'static str, reason: String },
    #[error("campaign grid: {reason}")]
    InvalidGrid { reason: String },
    #[error(transparent)]
    Dynamics(#[from] crate::dynamics::DynamicsError),
    #[error("model config: {0}")]
    Model(#[from] crate::model::ModelError),
}
