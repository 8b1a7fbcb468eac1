//! Safety queries and assessment reports over a probability source: the
//! bundled injury probability summary or a user-built probability map.

mod query;
mod report;

pub use query::{
    condition_for_human_mass, constrained_comparison, injury_probability, max_safe_velocity,
    ClassProbabilities, ClassProbability, ConditionRule, ConstrainedAdvisory, ProbabilityAnswer,
    ProbabilitySource, RiskQuery, VelocityAnswer,
};
pub use report::{assessment_report, AssessmentReport, ReportCell, RobotProfile};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AssessError {
    #[error("invalid robot profile: {reason}")]
    InvalidProfile { reason: String },
}
