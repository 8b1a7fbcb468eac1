//! Rig physics: the empirical release-angle calibration curve, the release
//! swing ODE, 1-D contact models, and virtual sensors.

mod calibration;
mod impact;
mod release;
mod sensors;

pub use calibration::CalibrationCurve;
pub use impact::{simulate_impact, ContactModel, ForcePoint, ImpactOutcome};
pub use release::{
    fit_device_friction, frictionless_collision_speed, simulate_release, FrictionFit,
    FrictionModel, ReleaseTrajectory, TrajectorySample, RELEASE_TIME_CAP_S,
};
pub use sensors::{
    sample_sensors, write_force_csv, write_trajectory_csv, EncoderSample, ForceSample,
    SensorCapture, SensorProfile,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("{context}: {reason}")]
    Domain { context: &'static str, reason: String },
    #[error("release angle {alpha_rad} rad is outside the calibrated domain [0, {max_rad}] rad")]
    AngleOutsideCurve { alpha_rad: f64, max_rad: f64 },
    #[error("velocity {v_m_s} m/s exceeds rig capability ({max_m_s} m/s at this collision distance)")]
    VelocityExceedsRig { v_m_s: f64, max_m_s: f64 },
    #[error("release stalled: pendulum did not reach the collision point within {cap_s} s (angle {angle_rad} rad)")]
    ReleaseStall { cap_s: f64, angle_rad: f64 },
    #[error("contact integration exceeded its time cap of {cap_s} s")]
    ContactTimeCap { cap_s: f64 },
    #[error("model config: {0}")]
    Model(#[from] crate::model::ModelError),
}

pub(crate) fn domain_error(context: &'static str, reason: impl Into<String>) -> DynamicsError {
    DynamicsError::Domain {
        context,
        reason: reason.into(),
    }
}
