//! Synthetic injury assignment: class-conditional Gaussian force bands per
//! impactor (optionally per site), collapsed into monotone force
//! thresholds. This is a data-generation device for exercising the
//! analytics pipeline, not a validated injury criterion; records produced
//! with it are tagged as synthetic.

use super::ProtocolError;
use crate::model::{ImpactorKind, InjuryClass, SurrogateSite};
use std::collections::HashMap;

/// Force band of one injury class within one model cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassForceStat {
    pub injury: InjuryClass,
    pub mean_n: f64,
    pub std_n: f64,
}

/// One fitted (impactor, site) table used to build the model.
#[derive(Debug, Clone, PartialEq)]
pub struct InjuryModelCell {
    pub impactor: ImpactorKind,
    /// None is the impactor-wide fallback used when no site-specific table
    /// exists.
    pub site: Option<SurrogateSite>,
    pub classes: Vec<ClassForceStat>,
}

#[derive(Debug, Clone)]
struct ClassTable {
    /// Ascending severity; means strictly increasing.
    classes: Vec<ClassForceStat>,
    /// `thresholds[i]` separates `classes[i]` from `classes[i+1]`; forces
    /// at or below a threshold take the less severe side.
    thresholds: Vec<f64>,
}

/// Assigns an injury class to a peak contact force.
///
/// Assignment uses fixed thresholds placed where adjacent classes'
/// Gaussian likelihoods cross, so it is monotone in force: between two
/// adjacent classes the threshold is exactly the maximum-likelihood
/// boundary, and a global likelihood argmax that would break monotonicity
/// (a wide band outscoring a narrow one far above its mean) is deliberately
/// not used.
#[derive(Debug, Clone)]
pub struct InjuryOutcomeModel {
    tables: HashMap<(ImpactorKind, Option<SurrogateSite>), ClassTable>,
}

/// Floor applied to zero spreads so likelihood crossings stay defined; a
/// zero-std class acts as a near-point band.
fn effective_std(std_n: f64, scale: f64) -> f64 {
    std_n.max(1e-9 * scale.max(1.0))
}

fn log_density(force: f64, mean: f64, std: f64) -> f64 {
    let z = (force - mean) / std;
    -0.5 * z * z - std.ln()
}

/// Force in [lower.mean, upper.mean] where the two class likelihoods are
/// equal, found by bisection on the log-density difference.
fn crossing(lower: &ClassForceStat, upper: &ClassForceStat) -> f64 {
    let scale = upper.mean_n - lower.mean_n;
    let sigma_lo = effective_std(lower.std_n, scale);
    let sigma_hi = effective_std(upper.std_n, scale);
    let diff = |f: f64| log_density(f, upper.mean_n, sigma_hi) - log_density(f, lower.mean_n, sigma_lo);
    let (mut lo, mut hi) = (lower.mean_n, upper.mean_n);
    if diff(lo) >= 0.0 {
        return lo;
    }
    if diff(hi) <= 0.0 {
        return hi;
    }
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if diff(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Build an assignment model from per-cell class force bands.
///
/// Each cell needs at least two classes, strictly increasing means in
/// severity order, and at least one non-zero spread.
pub fn fit_injury_model(cells: &[InjuryModelCell]) -> Result<InjuryOutcomeModel, ProtocolError> {
    let invalid = |reason: String| ProtocolError::InvalidConfig {
        what: "injury model",
        reason,
    };
    if cells.is_empty() {
        return Err(invalid("at least one (impactor, site) cell is required".into()));
    }
    let mut tables = HashMap::new();
    for cell in cells {
        let mut classes = cell.classes.clone();
        classes.sort_by_key(|c| c.injury);
        if classes.len() < 2 {
            return Err(invalid(format!(
                "{:?}/{:?}: at least two classes are required",
                cell.impactor, cell.site
            )));
        }
        if classes.windows(2).any(|p| p[0].injury == p[1].injury) {
            return Err(invalid(format!(
                "{:?}/{:?}: duplicate class entry",
                cell.impactor, cell.site
            )));
        }
        for c in &classes {
            if !(c.mean_n.is_finite() && c.mean_n >= 0.0) {
                return Err(invalid(format!(
                    "{:?}/{:?}: class means must be finite and >= 0",
                    cell.impactor, cell.site
                )));
            }
            if !(c.std_n.is_finite() && c.std_n >= 0.0) {
                return Err(invalid(format!(
                    "{:?}/{:?}: class spreads must be finite and >= 0",
                    cell.impactor, cell.site
                )));
            }
        }
        if classes.windows(2).any(|p| p[1].mean_n <= p[0].mean_n) {
            return Err(invalid(format!(
                "{:?}/{:?}: class mean forces must increase with severity",
                cell.impactor, cell.site
            )));
        }
        if classes.iter().all(|c| c.std_n == 0.0) {
            return Err(invalid(format!(
                "{:?}/{:?}: all class spreads are zero",
                cell.impactor, cell.site
            )));
        }
        let thresholds = classes.windows(2).map(|p| crossing(&p[0], &p[1])).collect();
        if tables
            .insert((cell.impactor, cell.site), ClassTable { classes, thresholds })
            .is_some()
        {
            return Err(invalid(format!(
                "{:?}/{:?}: duplicate cell",
                cell.impactor, cell.site
            )));
        }
    }
    Ok(InjuryOutcomeModel { tables })
}

impl InjuryOutcomeModel {
    /// Model fitted to the bundled force statistics. Site-independent, and
    /// covers {none, s-i, s-c} only: the bundled data has no tendon/bone
    /// force band, so synthetic outcomes never reach that class.
    pub fn bundled() -> Self {
        let mut by_impactor: HashMap<ImpactorKind, Vec<ClassForceStat>> = HashMap::new();
        for stat in crate::records::bundled_force_stats() {
            by_impactor
                .entry(stat.value.impactor)
                .or_default()
                .push(ClassForceStat {
                    injury: stat.value.injury,
                    mean_n: stat.value.mean_n,
                    std_n: stat.value.std_n,
                });
        }
        let cells: Vec<InjuryModelCell> = by_impactor
            .into_iter()
            .map(|(impactor, classes)| InjuryModelCell {
                impactor,
                site: None,
                classes,
            })
            .collect();
        fit_injury_model(&cells).expect("bundled statistics form a valid model")
    }

    fn table(
        &self,
        impactor: ImpactorKind,
        site: SurrogateSite,
    ) -> Result<&ClassTable, ProtocolError> {
        self.tables
            .get(&(impactor, Some(site)))
            .or_else(|| self.tables.get(&(impactor, None)))
            .ok_or_else(|| ProtocolError::InvalidConfig {
                what: "injury model",
                reason: format!("no class table for impactor {impactor:?}"),
            })
    }

    /// Injury class for a peak force; ties at a threshold take the less
    /// severe class. Monotone in force for a fixed (impactor, site).
    pub fn assign(
        &self,
        impactor: ImpactorKind,
        site: SurrogateSite,
        peak_force_n: f64,
    ) -> Result<InjuryClass, ProtocolError> {
        let table = self.table(impactor, site)?;
        let index = table
            .thresholds
            .iter()
            .take_while(|t| peak_force_n > **t)
            .count();
        Ok(table.classes[index].injury)
    }

    /// Normalized class likelihoods at a peak force (equal priors); sums
    /// to 1.
    pub fn class_probabilities(
        &self,
        impactor: ImpactorKind,
        site: SurrogateSite,
        peak_force_n: f64,
    ) -> Result<Vec<(InjuryClass, f64)>, ProtocolError> {
        let table = self.table(impactor, site)?;
        let span = table.classes[table.classes.len() - 1].mean_n - table.classes[0].mean_n;
        let logs: Vec<f64> = table
            .classes
            .iter()
            .map(|c| log_density(peak_force_n, c.mean_n, effective_std(c.std_n, span)))
            .collect();
        let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = weights.iter().sum();
        Ok(table
            .classes
            .iter()
            .zip(weights)
            .map(|(c, w)| (c.injury, w / total))
            .collect())
    }

    /// Class force bands behind a cell, severity-ascending.
    pub fn classes(
        &self,
        impactor: ImpactorKind,
        site: SurrogateSite,
    ) -> Result<&[ClassForceStat], ProtocolError> {
        Ok(&self.table(impactor, site)?.classes)
    }

    /// The fitted thresholds of a cell (one fewer than classes).
    pub fn thresholds(
        &self,
        impactor: ImpactorKind,
        site: SurrogateSite,
    ) -> Result<&[f64], ProtocolError> {
        Ok(&self.table(impactor, site)?.thresholds)
    }
}
