//! Measured-velocity noise: the rig hits desired velocities with a bias
//! and spread that were characterized at five settings; sampling draws
//! from a truncated-at-zero Gaussian around the characterized mean.

use super::ProtocolError;
use crate::records::bundled_velocity_accuracy;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct NoiseRow {
    desired_m_s: f64,
    mean_m_s: f64,
    std_m_s: f64,
}

/// Per-target measured-velocity distribution, linearly interpolated between
/// characterized settings.
///
/// Between table rows the bias (mean minus desired) and the spread are
/// interpolated; outside the table both are clamped to the nearest row.
/// At a characterized setting the table values apply exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityNoiseModel {
    rows: Vec<NoiseRow>,
}

impl VelocityNoiseModel {
    /// (desired, mean, std) triples, ascending in desired velocity.
    pub fn new(table: Vec<(f64, f64, f64)>) -> Result<Self, ProtocolError> {
        let invalid = |reason: &str| ProtocolError::InvalidConfig {
            what: "velocity noise model",
            reason: reason.to_string(),
        };
        if table.is_empty() {
            return Err(invalid("table must not be empty"));
        }
        for &(desired, mean, std) in &table {
            if !(desired.is_finite() && desired > 0.0) {
                return Err(invalid("desired velocities must be finite and > 0"));
            }
            if !(mean.is_finite() && mean > 0.0) {
                return Err(invalid("mean velocities must be finite and > 0"));
            }
            if !(std.is_finite() && std >= 0.0) {
                return Err(invalid("std must be finite and >= 0"));
            }
        }
        if table.windows(2).any(|p| p[1].0 <= p[0].0) {
            return Err(invalid("desired velocities must be strictly increasing"));
        }
        Ok(VelocityNoiseModel {
            rows: table
                .into_iter()
                .map(|(desired_m_s, mean_m_s, std_m_s)| NoiseRow {
                    desired_m_s,
                    mean_m_s,
                    std_m_s,
                })
                .collect(),
        })
    }

    /// The rig's characterized accuracy at its five tested settings.
    pub fn bundled() -> Self {
        let rows = bundled_velocity_accuracy()
            .into_iter()
            .map(|row| NoiseRow {
                desired_m_s: row.value.desired_m_s,
                mean_m_s: row.value.mean_m_s,
                std_m_s: row.value.std_m_s,
            })
            .collect();
        VelocityNoiseModel { rows }
    }

    /// Distribution parameters (mean, std) for a desired velocity.
    pub fn parameters_for(&self, desired_m_s: f64) -> (f64, f64) {
        let first = &self.rows[0];
        let last = &self.rows[self.rows.len() - 1];
        if desired_m_s <= first.desired_m_s {
            return (
                desired_m_s + (first.mean_m_s - first.desired_m_s),
                first.std_m_s,
            );
        }
        if desired_m_s >= last.desired_m_s {
            return (
                desired_m_s + (last.mean_m_s - last.desired_m_s),
                last.std_m_s,
            );
        }
        let hi = self.rows.partition_point(|r| r.desired_m_s < desired_m_s);
        let (a, b) = (&self.rows[hi - 1], &self.rows[hi]);
        if desired_m_s == b.desired_m_s {
            return (b.mean_m_s, b.std_m_s);
        }
        let t = (desired_m_s - a.desired_m_s) / (b.desired_m_s - a.desired_m_s);
        let bias_a = a.mean_m_s - a.desired_m_s;
        let bias_b = b.mean_m_s - b.desired_m_s;
        let bias = bias_a + t * (bias_b - bias_a);
        let std = a.std_m_s + t * (b.std_m_s - a.std_m_s);
        (desired_m_s + bias, std)
    }

    /// Draw a measured velocity: Gaussian around the characterized mean,
    /// redrawn until positive (a pendulum cannot arrive with speed <= 0).
    pub fn sample<R: Rng + ?Sized>(&self, desired_m_s: f64, rng: &mut R) -> f64 {
        let (mean, std) = self.parameters_for(desired_m_s);
        if std == 0.0 {
            return mean;
        }
        let normal = Normal::new(mean, std).expect("validated parameters");
        loop {
            let v = normal.sample(rng);
            if v > 0.0 {
                return v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn table_points_are_exact() {
        let model = VelocityNoiseModel::bundled();
        assert_eq!(model.parameters_for(0.25), (0.34, 0.10));
        assert_eq!(model.parameters_for(0.5), (0.54, 0.06));
        assert_eq!(model.parameters_for(1.0), (1.03, 0.01));
        assert_eq!(model.parameters_for(1.5), (1.56, 0.03));
        assert_eq!(model.parameters_for(2.0), (2.03, 0.03));
    }

    #[test]
    fn off_table_targets_interpolate_bias_and_spread() {
        let model = VelocityNoiseModel::bundled();
        // Midway between the 0.5 (+0.04, 0.06) and 1.0 (+0.03, 0.01) rows.
        let (mean, std) = model.parameters_for(0.75);
        assert!((mean - 0.785).abs() < 1e-12);
        assert!((std - 0.035).abs() < 1e-12);
        // Beyond the table the nearest row's bias and spread apply.
        let (mean, std) = model.parameters_for(0.1);
        assert!((mean - 0.19).abs() < 1e-12);
        assert_eq!(std, 0.10);
        let (mean, std) = model.parameters_for(2.4);
        assert!((mean - 2.43).abs() < 1e-12);
        assert_eq!(std, 0.03);
    }

    #[test]
    fn seeded_sampling_reproduces_the_low_speed_band() {
        let model = VelocityNoiseModel::bundled();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let samples: Vec<f64> = (0..10_000).map(|_| model.sample(0.25, &mut rng)).collect();
        assert!(samples.iter().all(|v| *v > 0.0));
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let var = samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / (samples.len() - 1) as f64;
        let std = var.sqrt();
        assert!((mean - 0.34).abs() < 0.01, "sample mean {mean}");
        assert!((std - 0.10).abs() < 0.01, "sample std {std}");
    }

    #[test]
    fn truncation_keeps_samples_positive() {
        let model = VelocityNoiseModel::new(vec![(0.1, 0.05, 0.5)]).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..2_000 {
            assert!(model.sample(0.1, &mut rng) > 0.0);
        }
    }

    #[test]
    fn zero_spread_returns_the_mean() {
        let model = VelocityNoiseModel::new(vec![(1.0, 1.02, 0.0)]).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        assert_eq!(model.sample(1.0, &mut rng), 1.02);
    }

    #[test]
    fn rejects_malformed_tables() {
        assert!(VelocityNoiseModel::new(vec![]).is_err());
        assert!(VelocityNoiseModel::new(vec![(1.0, 1.0, -0.1)]).is_err());
        assert!(VelocityNoiseModel::new(vec![(1.0, 1.0, 0.1), (0.5, 0.5, 0.1)]).is_err());
        assert!(VelocityNoiseModel::new(vec![(0.0, 0.3, 0.1)]).is_err());
    }
}
