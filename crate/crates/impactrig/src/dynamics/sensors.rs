//! Virtual instrumentation: resamples simulated trajectories and contact
//! force histories at the rig's acquisition rates, and clips force readings
//! at the sensor range the way the physical amplifier does.

use super::{domain_error, DynamicsError};
use super::impact::ForcePoint;
use super::release::TrajectorySample;
use crate::model::FORCE_SENSOR_RANGE_N;
use serde::{Deserialize, Serialize};
use std::io::{self, Write};

/// Acquisition rates and force range of the rig instrumentation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorProfile {
    pub encoder_rate_hz: f64,
    pub force_rate_hz: f64,
    pub force_range_n: f64,
}

impl Default for SensorProfile {
    fn default() -> Self {
        SensorProfile {
            encoder_rate_hz: 2000.0,
            force_rate_hz: 300.0,
            force_range_n: FORCE_SENSOR_RANGE_N,
        }
    }
}

impl SensorProfile {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        for (name, v) in [
            ("encoder_rate_hz", self.encoder_rate_hz),
            ("force_rate_hz", self.force_rate_hz),
            ("force_range_n", self.force_range_n),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(domain_error("sensors", name));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncoderSample {
    pub t_s: f64,
    pub angle_rad: f64,
    pub omega_rad_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceSample {
    pub t_s: f64,
    pub force_n: f64,
    pub saturated: bool,
}

/// Resampled sensor channels for one trial.
///
/// `peak_force_n` is the true profile peak before clipping; a saturated
/// peak means the physical sensor would have reported the range limit
/// instead of this value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorCapture {
    pub encoder: Vec<EncoderSample>,
    pub force: Vec<ForceSample>,
    pub peak_force_n: f64,
    pub peak_saturated: bool,
}

/// Uniform sample instants covering [t0, t1] at `rate_hz`, endpoint included.
fn sample_times(t0: f64, t1: f64, rate_hz: f64) -> Vec<f64> {
    let span = t1 - t0;
    // The epsilon keeps an exact-multiple span from losing its last sample
    // to rounding.
    let n = (span * rate_hz + 1e-9).floor() as usize + 1;
    (0..n).map(|i| t0 + i as f64 / rate_hz).collect()
}

/// Piecewise-linear lookup over samples sorted by time.
fn interpolate<T>(samples: &[T], time_of: impl Fn(&T) -> f64, value_of: impl Fn(&T) -> f64, t: f64) -> f64 {
    let last = samples.len() - 1;
    if t <= time_of(&samples[0]) {
        return value_of(&samples[0]);
    }
    if t >= time_of(&samples[last]) {
        return value_of(&samples[last]);
    }
    let hi = samples.partition_point(|s| time_of(s) < t);
    let lo = hi - 1;
    let (t0, t1) = (time_of(&samples[lo]), time_of(&samples[hi]));
    let (v0, v1) = (value_of(&samples[lo]), value_of(&samples[hi]));
    if t1 <= t0 {
        return v0;
    }
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

fn check_channel(len: usize, first: f64, last: f64, what: &str) -> Result<(), DynamicsError> {
    if len < 2 {
        return Err(domain_error(
            "sample_sensors",
            format!("{what} needs at least two points"),
        ));
    }
    if !(first.is_finite() && last.is_finite() && last > first) {
        return Err(domain_error(
            "sample_sensors",
            format!("{what} times must be finite and increasing"),
        ));
    }
    Ok(())
}

/// Resample a release trajectory and a contact force history at the rig
/// acquisition rates.
///
/// The force channel may be empty (instantaneous contact models produce no
/// force history); the trajectory may not.
pub fn sample_sensors(
    trajectory: &[TrajectorySample],
    force_profile: &[ForcePoint],
    profile: &SensorProfile,
) -> Result<SensorCapture, DynamicsError> {
    profile.validate()?;
    check_channel(
        trajectory.len(),
        trajectory.first().map_or(f64::NAN, |s| s.t_s),
        trajectory.last().map_or(f64::NAN, |s| s.t_s),
        "trajectory",
    )?;

    let encoder = sample_times(
        trajectory[0].t_s,
        trajectory[trajectory.len() - 1].t_s,
        profile.encoder_rate_hz,
    )
    .into_iter()
    .map(|t| EncoderSample {
        t_s: t,
        angle_rad: interpolate(trajectory, |s| s.t_s, |s| s.angle_rad, t),
        omega_rad_s: interpolate(trajectory, |s| s.t_s, |s| s.omega_rad_s, t),
    })
    .collect();

    let mut force = Vec::new();
    let mut peak = 0.0_f64;
    if !force_profile.is_empty() {
        check_channel(
            force_profile.len(),
            force_profile[0].t_s,
            force_profile[force_profile.len() - 1].t_s,
            "force profile",
        )?;
        for p in force_profile {
            peak = peak.max(p.force_n);
        }
        force = sample_times(
            force_profile[0].t_s,
            force_profile[force_profile.len() - 1].t_s,
            profile.force_rate_hz,
        )
        .into_iter()
        .map(|t| {
            let raw = interpolate(force_profile, |p| p.t_s, |p| p.force_n, t);
            let saturated = raw >= profile.force_range_n;
            ForceSample {
                t_s: t,
                force_n: if saturated { profile.force_range_n } else { raw },
                saturated,
            }
        })
        .collect();
    }

    Ok(SensorCapture {
        encoder,
        force,
        peak_force_n: peak,
        peak_saturated: peak >= profile.force_range_n,
    })
}

/// Write an encoder trajectory as CSV (`t_s,angle_rad,omega_rad_s`).
pub fn write_trajectory_csv<W: Write>(out: &mut W, samples: &[EncoderSample]) -> io::Result<()> {
    writeln!(out, "t_s,angle_rad,omega_rad_s")?;
    for s in samples {
        writeln!(out, "{:.6},{:.9},{:.9}", s.t_s, s.angle_rad, s.omega_rad_s)?;
    }
    Ok(())
}

/// Write a force channel as CSV (`t_s,force_N,saturated`).
pub fn write_force_csv<W: Write>(out: &mut W, samples: &[ForceSample]) -> io::Result<()> {
    writeln!(out, "t_s,force_N,saturated")?;
    for s in samples {
        writeln!(out, "{:.6},{:.3},{}", s.t_s, s.force_n, s.saturated)?;
    }
    Ok(())
}
