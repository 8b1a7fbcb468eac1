//! One-dimensional collision between the robot and human effective masses:
//! instantaneous restitution algebra, or a linear spring-damper contact
//! integrated over the reduced coordinate.
//!
//! Sign convention: the robot approaches with positive velocity; rebound is
//! negative. The human mass may be infinite (a rigidly backed, constrained
//! contact).

use super::{domain_error, DynamicsError};
use crate::model::ImpactorKind;
use serde::{Deserialize, Serialize};

/// Fixed integration step for spring-damper contact, s.
pub const CONTACT_DT_S: f64 = 1e-6;

/// Spring-damper contact that lasts longer than this is aborted (the model
/// is meant for millisecond impacts).
pub const CONTACT_TIME_CAP_S: f64 = 10.0;

/// Reference condition used to fit the bundled stiffness presets: the 4 kg
/// robot load against the 4 kg human load, at 1 m/s.
const PRESET_REDUCED_MASS_KG: f64 = 5.12 * 6.36 / (5.12 + 6.36);

/// Contact force law for [`simulate_impact`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ContactModel {
    /// Instantaneous momentum/restitution exchange; no force information.
    #[serde(rename = "restitution")]
    RestitutionOnly { restitution: f64 },
    /// Linear spring-damper over the contact compression, force clamped to
    /// be non-negative (the surfaces can only push).
    #[serde(rename = "spring-damper")]
    LinearSpringDamper {
        stiffness_n_m: f64,
        damping_n_s_m: f64,
    },
}

impl ContactModel {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        match self {
            ContactModel::RestitutionOnly { restitution } => {
                if !(restitution.is_finite() && (0.0..=1.0).contains(restitution)) {
                    return Err(domain_error("contact", "restitution must be in [0, 1]"));
                }
            }
            ContactModel::LinearSpringDamper {
                stiffness_n_m,
                damping_n_s_m,
            } => {
                if !(stiffness_n_m.is_finite() && *stiffness_n_m > 0.0) {
                    return Err(domain_error("contact", "stiffness must be > 0"));
                }
                if !(damping_n_s_m.is_finite() && *damping_n_s_m >= 0.0) {
                    return Err(domain_error("contact", "damping must be >= 0"));
                }
            }
        }
        Ok(())
    }

    /// Undamped spring preset per impactor geometry.
    ///
    /// Stiffnesses are fitted, not measured: each is chosen so that the
    /// simulated peak force at the reference condition (5.12 kg robot vs
    /// 6.36 kg human, 1 m/s) equals the bundled mean skin-imprint force for
    /// that impactor, placing desk-scale peaks inside the bundled
    /// force-statistics bands.
    pub fn bundled_preset(kind: ImpactorKind) -> ContactModel {
        let si_mean_force_n: f64 = match kind {
            ImpactorKind::Wedge => 325.0,
            ImpactorKind::Edge => 105.0,
            ImpactorKind::Sheet => 280.0,
        };
        ContactModel::LinearSpringDamper {
            stiffness_n_m: si_mean_force_n * si_mean_force_n / PRESET_REDUCED_MASS_KG,
            damping_n_s_m: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForcePoint {
    pub t_s: f64,
    pub force_n: f64,
}

/// Post-impact state and the contact force history.
///
/// `force_profile` is empty and `contact_duration_s` zero for the
/// instantaneous restitution model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactOutcome {
    pub post_velocity_robot_m_s: f64,
    pub post_velocity_human_m_s: f64,
    pub peak_force_n: f64,
    pub contact_duration_s: f64,
    pub force_profile: Vec<ForcePoint>,
}

/// Reduced mass of the colliding pair; `m_human` may be infinite.
pub fn reduced_mass(m_robot_kg: f64, m_human_kg: f64) -> f64 {
    if m_human_kg.is_infinite() {
        m_robot_kg
    } else {
        m_robot_kg * m_human_kg / (m_robot_kg + m_human_kg)
    }
}

fn check_masses_and_velocities(
    m_robot_kg: f64,
    v_robot_m_s: f64,
    m_human_kg: f64,
    v_human_m_s: f64,
) -> Result<(), DynamicsError> {
    if !(m_robot_kg.is_finite() && m_robot_kg > 0.0) {
        return Err(domain_error("simulate_impact", "robot mass must be finite and > 0"));
    }
    if m_human_kg.is_nan() || m_human_kg <= 0.0 {
        return Err(domain_error(
            "simulate_impact",
            "human mass must be > 0 (infinity allowed)",
        ));
    }
    if !v_robot_m_s.is_finite() || !v_human_m_s.is_finite() {
        return Err(domain_error("simulate_impact", "velocities must be finite"));
    }
    if v_robot_m_s - v_human_m_s <= 0.0 {
        return Err(domain_error(
            "simulate_impact",
            "bodies are not approaching; no impact occurs",
        ));
    }
    Ok(())
}

/// Collide the robot effective mass into the human effective mass.
///
/// Momentum is conserved exactly for finite masses; kinetic energy never
/// increases (restitution ≤ 1, damping ≥ 0, and the clamped spring force
/// does no work while the surfaces separate).
pub fn simulate_impact(
    m_robot_kg: f64,
    v_robot_m_s: f64,
    m_human_kg: f64,
    v_human_m_s: f64,
    model: &ContactModel,
) -> Result<ImpactOutcome, DynamicsError> {
    model.validate()?;
    check_masses_and_velocities(m_robot_kg, v_robot_m_s, m_human_kg, v_human_m_s)?;
    match *model {
        ContactModel::RestitutionOnly { restitution } => Ok(restitution_outcome(
            m_robot_kg,
            v_robot_m_s,
            m_human_kg,
            v_human_m_s,
            restitution,
        )),
        ContactModel::LinearSpringDamper {
            stiffness_n_m,
            damping_n_s_m,
        } => spring_damper_outcome(
            m_robot_kg,
            v_robot_m_s,
            m_human_kg,
            v_human_m_s,
            stiffness_n_m,
            damping_n_s_m,
        ),
    }
}

fn restitution_outcome(
    m1: f64,
    v1: f64,
    m2: f64,
    v2: f64,
    e: f64,
) -> ImpactOutcome {
    let (post_robot, post_human) = if m2.is_infinite() {
        (v2 - e * (v1 - v2), v2)
    } else {
        let total = m1 + m2;
        (
            v1 - (1.0 + e) * m2 / total * (v1 - v2),
            v2 + (1.0 + e) * m1 / total * (v1 - v2),
        )
    };
    ImpactOutcome {
        post_velocity_robot_m_s: post_robot,
        post_velocity_human_m_s: post_human,
        peak_force_n: 0.0,
        contact_duration_s: 0.0,
        force_profile: Vec::new(),
    }
}

struct ContactParams {
    m_red: f64,
    k: f64,
    c: f64,
}

impl ContactParams {
    /// State is (compression δ, compression rate δ̇).
    fn force(&self, delta: f64, rate: f64) -> f64 {
        (self.k * delta + self.c * rate).max(0.0)
    }

    fn rk4_step(&self, delta: f64, rate: f64, dt: f64) -> (f64, f64) {
        let accel = |d: f64, r: f64| -self.force(d, r) / self.m_red;
        let (k1d, k1r) = (rate, accel(delta, rate));
        let (k2d, k2r) = (
            rate + 0.5 * dt * k1r,
            accel(delta + 0.5 * dt * k1d, rate + 0.5 * dt * k1r),
        );
        let (k3d, k3r) = (
            rate + 0.5 * dt * k2r,
            accel(delta + 0.5 * dt * k2d, rate + 0.5 * dt * k2r),
        );
        let (k4d, k4r) = (rate + dt * k3r, accel(delta + dt * k3d, rate + dt * k3r));
        (
            delta + dt / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d),
            rate + dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r),
        )
    }
}

fn spring_damper_outcome(
    m1: f64,
    v1: f64,
    m2: f64,
    v2: f64,
    k: f64,
    c: f64,
) -> Result<ImpactOutcome, DynamicsError> {
    let params = ContactParams {
        m_red: reduced_mass(m1, m2),
        k,
        c,
    };
    let mut t = 0.0;
    let mut delta = 0.0;
    let mut rate = v1 - v2;
    let mut profile = Vec::with_capacity(8 * 1024);
    let mut peak = 0.0_f64;
    profile.push(ForcePoint {
        t_s: t,
        force_n: params.force(delta, rate),
    });
    loop {
        let (next_delta, next_rate) = params.rk4_step(delta, rate, CONTACT_DT_S);
        if next_delta <= 0.0 {
            // Bisect the final step for the separation instant.
            let (mut lo, mut hi) = (0.0, CONTACT_DT_S);
            let mut cross = (next_delta, next_rate);
            for _ in 0..64 {
                let mid = 0.5 * (lo + hi);
                let state = params.rk4_step(delta, rate, mid);
                if state.0 <= 0.0 {
                    hi = mid;
                    cross = state;
                } else {
                    lo = mid;
                }
            }
            t += hi;
            profile.push(ForcePoint {
                t_s: t,
                force_n: params.force(cross.0, cross.1),
            });
            let rel_post = cross.1;
            let (post_robot, post_human) = if m2.is_infinite() {
                (v2 + rel_post, v2)
            } else {
                let total = m1 + m2;
                let v_cm = (m1 * v1 + m2 * v2) / total;
                (v_cm + m2 / total * rel_post, v_cm - m1 / total * rel_post)
            };
            return Ok(ImpactOutcome {
                post_velocity_robot_m_s: post_robot,
                post_velocity_human_m_s: post_human,
                peak_force_n: peak,
                contact_duration_s: t,
                force_profile: profile,
            });
        }
        delta = next_delta;
        rate = next_rate;
        t += CONTACT_DT_S;
        let force = params.force(delta, rate);
        peak = peak.max(force);
        profile.push(ForcePoint { t_s: t, force_n: force });
        if t > CONTACT_TIME_CAP_S {
            return Err(DynamicsError::ContactTimeCap {
                cap_s: CONTACT_TIME_CAP_S,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn momentum(m1: f64, v1: f64, m2: f64, v2: f64) -> f64 {
        m1 * v1 + m2 * v2
    }

    fn kinetic(m1: f64, v1: f64, m2: f64, v2: f64) -> f64 {
        0.5 * m1 * v1 * v1 + 0.5 * m2 * v2 * v2
    }

    #[test]
    fn elastic_equal_mass_exchange() {
        let out = simulate_impact(
            2.58,
            1.0,
            2.58,
            0.0,
            &ContactModel::RestitutionOnly { restitution: 1.0 },
        )
        .unwrap();
        assert_eq!(out.post_velocity_robot_m_s, 0.0);
        assert_eq!(out.post_velocity_human_m_s, 1.0);
    }

    #[test]
    fn elastic_wall_rebound() {
        let out = simulate_impact(
            5.12,
            1.0,
            f64::INFINITY,
            0.0,
            &ContactModel::RestitutionOnly { restitution: 1.0 },
        )
        .unwrap();
        assert_eq!(out.post_velocity_robot_m_s, -1.0);
        assert_eq!(out.post_velocity_human_m_s, 0.0);
    }

    #[test]
    fn plastic_impact_reaches_common_velocity() {
        let out = simulate_impact(
            5.12,
            1.0,
            2.58,
            0.0,
            &ContactModel::RestitutionOnly { restitution: 0.0 },
        )
        .unwrap();
        let expected = 5.12 / (5.12 + 2.58);
        assert!((out.post_velocity_robot_m_s - expected).abs() < 1e-12);
        assert!((out.post_velocity_robot_m_s - out.post_velocity_human_m_s).abs() < 1e-12);
    }

    #[test]
    fn restitution_conserves_momentum_and_bounds_energy() {
        let cases = [
            (5.12, 1.0, 2.58, 0.0, 0.0),
            (5.12, 2.0, 2.58, -0.5, 0.3),
            (8.97, 0.25, 6.36, 0.0, 0.7),
            (3.20, 1.7, 2.58, 0.2, 1.0),
        ];
        for (m1, v1, m2, v2, e) in cases {
            let out = simulate_impact(m1, v1, m2, v2, &ContactModel::RestitutionOnly {
                restitution: e,
            })
            .unwrap();
            let p_pre = momentum(m1, v1, m2, v2);
            let p_post = momentum(
                m1,
                out.post_velocity_robot_m_s,
                m2,
                out.post_velocity_human_m_s,
            );
            assert!((p_post - p_pre).abs() <= 1e-9 * p_pre.abs().max(1.0));
            let ke_pre = kinetic(m1, v1, m2, v2);
            let ke_post = kinetic(
                m1,
                out.post_velocity_robot_m_s,
                m2,
                out.post_velocity_human_m_s,
            );
            assert!(ke_post <= ke_pre * (1.0 + 1e-12));
        }
    }

    #[test]
    fn undamped_spring_peak_matches_closed_form() {
        let model = ContactModel::LinearSpringDamper {
            stiffness_n_m: 10_000.0,
            damping_n_s_m: 0.0,
        };
        let out = simulate_impact(5.12, 1.0, 2.58, 0.0, &model).unwrap();
        let m_red = reduced_mass(5.12, 2.58);
        let expected_peak = 1.0 * (10_000.0 * m_red).sqrt();
        assert!((expected_peak - 130.978_336_664_215_87).abs() < 1e-9);
        let rel = (out.peak_force_n - expected_peak).abs() / expected_peak;
        assert!(rel < 0.005, "peak deviation {rel}");
        let expected_duration = std::f64::consts::PI * (m_red / 10_000.0).sqrt();
        let rel_dur = (out.contact_duration_s - expected_duration).abs() / expected_duration;
        assert!(rel_dur < 0.005, "duration deviation {rel_dur}");
        assert!(out.contact_duration_s > 0.0);
        assert!(!out.force_profile.is_empty());
    }

    #[test]
    fn undamped_spring_is_elastic() {
        let model = ContactModel::LinearSpringDamper {
            stiffness_n_m: 10_000.0,
            damping_n_s_m: 0.0,
        };
        let out = simulate_impact(5.12, 1.0, 2.58, 0.0, &model).unwrap();
        let p_pre = momentum(5.12, 1.0, 2.58, 0.0);
        let p_post = momentum(
            5.12,
            out.post_velocity_robot_m_s,
            2.58,
            out.post_velocity_human_m_s,
        );
        assert!((p_post - p_pre).abs() <= 1e-9 * p_pre);
        let ke_pre = kinetic(5.12, 1.0, 2.58, 0.0);
        let ke_post = kinetic(
            5.12,
            out.post_velocity_robot_m_s,
            2.58,
            out.post_velocity_human_m_s,
        );
        assert!(ke_post <= ke_pre * (1.0 + 1e-9));
        assert!(ke_post >= ke_pre * (1.0 - 1e-6), "undamped contact lost energy");
    }

    #[test]
    fn damped_spring_dissipates_energy() {
        let model = ContactModel::LinearSpringDamper {
            stiffness_n_m: 10_000.0,
            damping_n_s_m: 50.0,
        };
        let out = simulate_impact(5.12, 1.0, 2.58, 0.0, &model).unwrap();
        let ke_pre = kinetic(5.12, 1.0, 2.58, 0.0);
        let ke_post = kinetic(
            5.12,
            out.post_velocity_robot_m_s,
            2.58,
            out.post_velocity_human_m_s,
        );
        assert!(ke_post < ke_pre * 0.999);
        let p_pre = momentum(5.12, 1.0, 2.58, 0.0);
        let p_post = momentum(
            5.12,
            out.post_velocity_robot_m_s,
            2.58,
            out.post_velocity_human_m_s,
        );
        assert!((p_post - p_pre).abs() <= 1e-9 * p_pre);
    }

    #[test]
    fn huge_human_mass_converges_to_wall_case() {
        for e in [0.0, 0.5, 1.0] {
            let model = ContactModel::RestitutionOnly { restitution: e };
            let wall = simulate_impact(5.12, 1.0, f64::INFINITY, 0.0, &model).unwrap();
            let huge = simulate_impact(5.12, 1.0, 1e6 * 5.12, 0.0, &model).unwrap();
            let denom = wall.post_velocity_robot_m_s.abs().max(1.0);
            assert!(
                (huge.post_velocity_robot_m_s - wall.post_velocity_robot_m_s).abs() / denom
                    <= 1e-4
            );
        }
    }

    #[test]
    fn spring_wall_contact_rebounds() {
        let model = ContactModel::LinearSpringDamper {
            stiffness_n_m: 10_000.0,
            damping_n_s_m: 0.0,
        };
        let out = simulate_impact(5.12, 1.0, f64::INFINITY, 0.0, &model).unwrap();
        assert!((out.post_velocity_robot_m_s + 1.0).abs() < 1e-4);
        let expected_peak = (10_000.0_f64 * 5.12).sqrt();
        assert!((out.peak_force_n - expected_peak).abs() / expected_peak < 0.005);
    }

    #[test]
    fn rejects_invalid_inputs() {
        let elastic = ContactModel::RestitutionOnly { restitution: 1.0 };
        assert!(simulate_impact(0.0, 1.0, 2.58, 0.0, &elastic).is_err());
        assert!(simulate_impact(5.12, 1.0, -2.0, 0.0, &elastic).is_err());
        assert!(simulate_impact(5.12, 0.0, 2.58, 0.0, &elastic).is_err()); // not approaching
        assert!(
            simulate_impact(5.12, 1.0, 2.58, 0.0, &ContactModel::RestitutionOnly {
                restitution: 1.5
            })
            .is_err()
        );
        assert!(
            simulate_impact(5.12, 1.0, 2.58, 0.0, &ContactModel::LinearSpringDamper {
                stiffness_n_m: 0.0,
                damping_n_s_m: 0.0
            })
            .is_err()
        );
    }

    #[test]
    fn bundled_presets_hit_reference_forces() {
        // At the preset reference condition the undamped peak equals the
        // bundled mean skin-imprint force by construction.
        let cases = [
            (ImpactorKind::Wedge, 325.0),
            (ImpactorKind::Edge, 105.0),
            (ImpactorKind::Sheet, 280.0),
        ];
        for (kind, expected) in cases {
            let model = ContactModel::bundled_preset(kind);
            let out = simulate_impact(5.12, 1.0, 6.36, 0.0, &model).unwrap();
            let rel = (out.peak_force_n - expected).abs() / expected;
            assert!(rel < 0.005, "{kind:?}: peak {} vs {expected}", out.peak_force_n);
        }
    }
}
