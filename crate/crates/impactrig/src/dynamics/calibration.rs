//! Empirical release-angle calibration: the device curve mapping deflection
//! angle to angular velocity at the collision point, and its inverse.
//!
//! The curve is measured device behaviour, not conservative dynamics; the
//! frictionless swing would be faster than the fitted amplitude allows (see
//! [`super::fit_device_friction`] for the reconciliation).

use super::{domain_error, DynamicsError};
use serde::{Deserialize, Serialize};

/// Angular velocity at the collision point as a function of release angle:
/// `amplitude · sqrt(1 − cos(angle_scale · α))`.
///
/// Valid for α ∈ [0, π/angle_scale]; beyond that the fitted form bends back
/// down and is non-physical. Targets below
/// [`CalibrationCurve::LOW_CONFIDENCE_BELOW_M_S`] are reachable but the
/// device's velocity tracking there is poor (wind drive cannot set very
/// small angles precisely).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCurve {
    pub amplitude_rad_s: f64,
    pub angle_scale: f64,
}

impl Default for CalibrationCurve {
    /// The bundled device fit.
    fn default() -> Self {
        CalibrationCurve {
            amplitude_rad_s: 3.8122,
            angle_scale: 1.1628,
        }
    }
}

impl CalibrationCurve {
    /// Below this collision velocity the device's accuracy is degraded;
    /// queries are answered but flagged low-confidence.
    pub const LOW_CONFIDENCE_BELOW_M_S: f64 = 0.5;

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.amplitude_rad_s.is_finite() && self.amplitude_rad_s > 0.0) {
            return Err(domain_error("calibration", "amplitude must be > 0"));
        }
        if !(self.angle_scale.is_finite() && self.angle_scale > 0.0) {
            return Err(domain_error("calibration", "angle scale must be > 0"));
        }
        Ok(())
    }

    /// Upper end of the valid release-angle domain, rad.
    pub fn max_angle_rad(&self) -> f64 {
        std::f64::consts::PI / self.angle_scale
    }

    /// Largest collision velocity the curve can produce at `l_col`, m/s.
    pub fn max_velocity_m_s(&self, collision_distance_m: f64) -> f64 {
        self.amplitude_rad_s * collision_distance_m * std::f64::consts::SQRT_2
    }

    /// Angular velocity at the collision point for release angle `alpha_rad`.
    pub fn angular_velocity(&self, alpha_rad: f64) -> Result<f64, DynamicsError> {
        self.validate()?;
        if !alpha_rad.is_finite() || alpha_rad < 0.0 || alpha_rad > self.max_angle_rad() {
            return Err(DynamicsError::AngleOutsideCurve {
                alpha_rad,
                max_rad: self.max_angle_rad(),
            });
        }
        // sqrt(1 - cos x) = sqrt(2)·sin(x/2) on [0, pi]; the half-angle form
        // keeps full precision at small angles where 1 - cos x cancels.
        Ok(self.amplitude_rad_s
            * std::f64::consts::SQRT_2
            * (0.5 * self.angle_scale * alpha_rad).sin())
    }

    /// Linear collision velocity at `collision_distance_m` for release angle
    /// `alpha_rad`.
    pub fn collision_velocity(
        &self,
        alpha_rad: f64,
        collision_distance_m: f64,
    ) -> Result<f64, DynamicsError> {
        if !(collision_distance_m.is_finite() && collision_distance_m > 0.0) {
            return Err(domain_error("collision_velocity", "collision distance must be > 0"));
        }
        Ok(self.angular_velocity(alpha_rad)? * collision_distance_m)
    }

    /// Release angle needed for a desired collision velocity; inverse of
    /// [`CalibrationCurve::collision_velocity`]. Round-trips within 1e-9
    /// relative over the valid domain.
    pub fn required_angle(
        &self,
        desired_velocity_m_s: f64,
        collision_distance_m: f64,
    ) -> Result<f64, DynamicsError> {
        self.validate()?;
        if !(collision_distance_m.is_finite() && collision_distance_m > 0.0) {
            return Err(domain_error("required_angle", "collision distance must be > 0"));
        }
        if !desired_velocity_m_s.is_finite() || desired_velocity_m_s < 0.0 {
            return Err(domain_error("required_angle", "velocity must be >= 0"));
        }
        let max = self.max_velocity_m_s(collision_distance_m);
        if desired_velocity_m_s > max {
            return Err(DynamicsError::VelocityExceedsRig {
                v_m_s: desired_velocity_m_s,
                max_m_s: max,
            });
        }
        let ratio = desired_velocity_m_s / (self.amplitude_rad_s * collision_distance_m);
        // Inverse of the half-angle form; the clamp only absorbs float
        // overshoot when the target sits exactly at the rig maximum.
        let half_sine = (ratio / std::f64::consts::SQRT_2).min(1.0);
        Ok(2.0 * half_sine.asin() / self.angle_scale)
    }

    /// True when the device's velocity tracking at this target is known to
    /// be imprecise.
    pub fn is_low_confidence_target(&self, desired_velocity_m_s: f64) -> bool {
        desired_velocity_m_s < Self::LOW_CONFIDENCE_BELOW_M_S
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const L_COL_M: f64 = 0.990;

    #[test]
    fn zero_angle_gives_exactly_zero() {
        let curve = CalibrationCurve::default();
        assert_eq!(curve.angular_velocity(0.0).unwrap(), 0.0);
        assert_eq!(curve.collision_velocity(0.0, L_COL_M).unwrap(), 0.0);
        assert_eq!(curve.required_angle(0.0, L_COL_M).unwrap(), 0.0);
    }

    #[test]
    fn frozen_curve_values() {
        let curve = CalibrationCurve::default();
        let v_half = curve.angular_velocity(0.5).unwrap();
        assert!((v_half - 1.545_260_131_062_012).abs() < 1e-12, "got {v_half}");
        let v_quarter_pi = curve.angular_velocity(std::f64::consts::FRAC_PI_2).unwrap();
        assert!((v_quarter_pi - 4.267_191_343_412_473).abs() < 1e-12, "got {v_quarter_pi}");
        let lin = curve.collision_velocity(0.5, L_COL_M).unwrap();
        assert!((lin - 1.529_807_529_751_392).abs() < 1e-12, "got {lin}");
    }

    #[test]
    fn frozen_inverse_value() {
        let curve = CalibrationCurve::default();
        let alpha = curve.required_angle(0.5, L_COL_M).unwrap();
        assert!((alpha - 0.161_363_898_317_681_1).abs() < 1e-12, "got {alpha}");
        let back = curve.collision_velocity(alpha, L_COL_M).unwrap();
        assert!((back - 0.5).abs() < 1e-12);
    }

    #[test]
    fn domain_limits() {
        let curve = CalibrationCurve::default();
        let max_angle = curve.max_angle_rad();
        assert!((max_angle - 2.701_748_068_102_677).abs() < 1e-12);
        assert!(curve.angular_velocity(max_angle + 1e-6).is_err());
        assert!(curve.angular_velocity(-0.1).is_err());

        let max_v = curve.max_velocity_m_s(L_COL_M);
        assert!((max_v - 5.337_352_293_053_926).abs() < 1e-12);
        assert!(curve.required_angle(max_v + 1e-9, L_COL_M).is_err());
        match curve.required_angle(10.0, L_COL_M) {
            Err(DynamicsError::VelocityExceedsRig { .. }) => {}
            other => panic!("expected rig-capability error, got {other:?}"),
        }
    }

    #[test]
    fn low_confidence_marker() {
        let curve = CalibrationCurve::default();
        assert!(curve.is_low_confidence_target(0.25));
        assert!(!curve.is_low_confidence_target(0.5));
        assert!(!curve.is_low_confidence_target(2.0));
    }

    proptest! {
        #[test]
        fn round_trip_angle(alpha in 1e-6..2.70) {
            let curve = CalibrationCurve::default();
            let v = curve.collision_velocity(alpha, L_COL_M).unwrap();
            let back = curve.required_angle(v, L_COL_M).unwrap();
            prop_assert!((back - alpha).abs() <= 1e-9 * alpha.abs());
        }

        #[test]
        fn strictly_increasing(a in 1e-6..2.70, b in 1e-6..2.70) {
            prop_assume!(a != b);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let curve = CalibrationCurve::default();
            let v_lo = curve.angular_velocity(lo).unwrap();
            let v_hi = curve.angular_velocity(hi).unwrap();
            prop_assert!(v_lo < v_hi);
        }
    }
}
