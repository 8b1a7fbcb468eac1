//! Assessment reports: evaluate a robot profile against a probability
//! source and render the result as Markdown or JSON, every number carrying
//! its provenance tag.

use super::query::{
    constrained_comparison, injury_probability, max_safe_velocity, ConstrainedAdvisory,
    ProbabilityAnswer, ProbabilitySource, RiskQuery, VelocityAnswer,
};
use super::AssessError;
use crate::model::{Condition, ImpactorKind, InjuryClass, SourceTag, Sourced};
use serde::Serialize;
use std::fmt::Write as _;

/// The robot under assessment: its reflected (effective) mass range at the
/// contact point and its speed ceiling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobotProfile {
    pub name: String,
    pub reflected_mass_range_kg: (f64, f64),
    pub max_cartesian_speed_m_s: f64,
}

impl RobotProfile {
    pub fn validate(&self) -> Result<(), AssessError> {
        let invalid = |reason: String| AssessError::InvalidProfile { reason };
        let (lo, hi) = self.reflected_mass_range_kg;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return Err(invalid(format!(
                "reflected mass range must be ordered and > 0 kg, got [{lo},{hi}]"
            )));
        }
        if !(self.max_cartesian_speed_m_s.is_finite() && self.max_cartesian_speed_m_s > 0.0) {
            return Err(invalid(format!(
                "max Cartesian speed must be > 0 m/s, got {}",
                self.max_cartesian_speed_m_s
            )));
        }
        Ok(())
    }
}

/// One (condition, impactor) slice of the report. Probabilities are taken
/// at the profile's speed and both mass endpoints; max-safe velocities at
/// the heavy endpoint for tolerated classes "none" and skin imprint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportCell {
    pub condition: Condition,
    /// None when the source pools impactors.
    pub impactor: Option<ImpactorKind>,
    pub at_mass_low: ProbabilityAnswer,
    pub at_mass_high: ProbabilityAnswer,
    pub max_safe_none_tolerated: VelocityAnswer,
    pub max_safe_imprint_tolerated: VelocityAnswer,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssessmentReport {
    pub toolkit_version: String,
    pub profile: RobotProfile,
    pub source: SourceTag,
    /// Mass the max-safe columns are evaluated at (the heavy end of the
    /// profile's range).
    pub max_safe_mass_kg: f64,
    pub cells: Vec<ReportCell>,
    pub advisory: ConstrainedAdvisory,
    pub site_speed_note: Sourced<String>,
    pub disclaimer: String,
}

const DISCLAIMER: &str = "All injury probabilities derive from impact trials on ex-vivo \
    pig tissue surrogates under laboratory conditions. They characterize the test rig and \
    surrogates, not human injury guarantees, and cover unconstrained (free) impacts only; \
    clamping scenarios require clamping data.";

const SITE_SPEED_NOTE: &str = "Tolerable collision speeds varied strongly across surrogate \
    sites: from the most delicate to the most robust tested site they increased by up to 8 \
    times. Quoted as a published observation; the per-site breakdown is not part of the \
    bundled summary and is never recomputed here.";

/// Evaluate a profile against a probability source. Source gaps come back
/// inside the report as no-data answers; the only error is an invalid
/// profile.
pub fn assessment_report(
    profile: &RobotProfile,
    source: &ProbabilitySource,
) -> Result<AssessmentReport, AssessError> {
    profile.validate()?;
    let (mass_lo, mass_hi) = profile.reflected_mass_range_kg;
    let speed = profile.max_cartesian_speed_m_s;

    let keys: Vec<(Condition, Option<ImpactorKind>)> = match source {
        ProbabilitySource::Bundled => Condition::ALL
            .iter()
            .flat_map(|&c| ImpactorKind::ALL.iter().map(move |&i| (c, Some(i))))
            .collect(),
        ProbabilitySource::Map(map) => vec![(map.condition, map.impactor)],
    };

    let cells = keys
        .into_iter()
        .map(|(condition, impactor)| {
            // A pooled map ignores the query's impactor; any stands in.
            let query_impactor = impactor.unwrap_or(ImpactorKind::ALL[0]);
            let at = |mass| {
                injury_probability(
                    &RiskQuery {
                        robot_eff_mass_kg: mass,
                        velocity_m_s: speed,
                        impactor: query_impactor,
                        condition,
                    },
                    source,
                )
            };
            let safe = |tolerated| {
                max_safe_velocity(mass_hi, query_impactor, condition, tolerated, 0.0, source)
            };
            ReportCell {
                condition,
                impactor,
                at_mass_low: at(mass_lo),
                at_mass_high: at(mass_hi),
                max_safe_none_tolerated: safe(InjuryClass::None),
                max_safe_imprint_tolerated: safe(InjuryClass::SkinImprint),
            }
        })
        .collect();

    Ok(AssessmentReport {
        toolkit_version: crate::TOOLKIT_VERSION.to_string(),
        profile: profile.clone(),
        source: source.tag(),
        max_safe_mass_kg: mass_hi,
        cells,
        advisory: constrained_comparison(mass_hi, speed, ImpactorKind::ALL[0]),
        site_speed_note: Sourced::new(
            SITE_SPEED_NOTE.to_string(),
            SourceTag::bundled("site speed observation"),
        ),
        disclaimer: DISCLAIMER.to_string(),
    })
}

fn percent(p: f64) -> String {
    format!("{:.1}%", p * 100.0)
}

fn velocity_line(answer: &VelocityAnswer) -> String {
    match answer {
        VelocityAnswer::Velocity(v) => format!("{:.2} m/s [{}]", v.value, v.source),
        VelocityAnswer::NoneInRange => {
            "none in range (no covered velocity satisfies the constraint)".to_string()
        }
        VelocityAnswer::NoData { reason } => reason.clone(),
    }
}

fn impactor_label(impactor: Option<ImpactorKind>) -> &'static str {
    match impactor {
        Some(k) => k.code(),
        None => "all impactors pooled",
    }
}

impl AssessmentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn render_markdown(&self) -> String {
        let mut out = String::new();
        let (mass_lo, mass_hi) = self.profile.reflected_mass_range_kg;
        let speed = self.profile.max_cartesian_speed_m_s;
        let _ = writeln!(out, "# Robot safety assessment: {}\n", self.profile.name);
        let _ = writeln!(out, "- toolkit version: {}", self.toolkit_version);
        let _ = writeln!(out, "- probability source: {}", self.source);
        let _ = writeln!(
            out,
            "- profile: reflected mass {mass_lo:.2}-{mass_hi:.2} kg, max Cartesian speed {speed:.2} m/s"
        );
        let _ = writeln!(
            out,
            "- max-safe velocities evaluated at {:.2} kg (heavy end of the range), p_max = 0\n",
            self.max_safe_mass_kg
        );

        for cell in &self.cells {
            let heading = match cell.impactor {
                Some(k) => format!("impactor {}", k.code()),
                None => impactor_label(None).to_string(),
            };
            let _ = writeln!(out, "## Condition {} / {}\n", cell.condition.code(), heading);
            self.render_probability_table(&mut out, cell, mass_lo, mass_hi, speed);
            let _ = writeln!(
                out,
                "- max safe velocity, no injury tolerated: {}",
                velocity_line(&cell.max_safe_none_tolerated)
            );
            let _ = writeln!(
                out,
                "- max safe velocity, skin imprint tolerated: {}\n",
                velocity_line(&cell.max_safe_imprint_tolerated)
            );
        }

        let _ = writeln!(out, "## Constrained-contact advisory\n");
        let _ = writeln!(out, "{} [{}]", self.advisory.summary, self.advisory.source);
        if let Some(note) = &self.advisory.static_contact_note {
            let _ = writeln!(out, "\n{note}");
        }
        let _ = writeln!(out, "\n## Site-to-site speed sensitivity\n");
        let _ = writeln!(
            out,
            "{} [{}]",
            self.site_speed_note.value, self.site_speed_note.source
        );
        let _ = writeln!(out, "\n## Scope\n");
        let _ = writeln!(out, "{}", self.disclaimer);
        out
    }

    fn render_probability_table(
        &self,
        out: &mut String,
        cell: &ReportCell,
        mass_lo: f64,
        mass_hi: f64,
        speed: f64,
    ) {
        let answers = [
            (mass_lo, &cell.at_mass_low),
            (mass_hi, &cell.at_mass_high),
        ];
        // A no-data endpoint renders as a note instead of a column.
        let mut notes = Vec::new();
        let mut columns = Vec::new();
        for (mass, answer) in answers {
            match answer {
                ProbabilityAnswer::Classes(c) => columns.push((mass, c)),
                ProbabilityAnswer::NoData { reason } => {
                    notes.push(format!("- at {mass:.2} kg: {reason}"));
                }
            }
        }
        if !columns.is_empty() {
            let _ = write!(out, "| injury class |");
            for (mass, _) in &columns {
                let _ = write!(out, " P at {mass:.2} kg, {speed:.2} m/s |");
            }
            let _ = writeln!(out);
            let _ = writeln!(out, "|---|{}", "---|".repeat(columns.len()));
            for injury in InjuryClass::ALL {
                let _ = write!(out, "| {} |", injury.code());
                for (_, sourced) in &columns {
                    let text = match sourced.value.probability_of(injury) {
                        Some(p) => percent(p),
                        None => "n/r".to_string(),
                    };
                    let _ = write!(out, " {text} |");
                }
                let _ = writeln!(out);
            }
            let (_, first) = columns[0];
            let _ = writeln!(
                out,
                "\nresolved to {:.2} m/s [{}]\n",
                first.value.resolved_velocity_m_s, first.source
            );
        }
        for note in notes {
            let _ = writeln!(out, "{note}");
        }
        if !out.ends_with("\n\n") {
            let _ = writeln!(out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DataSource, ExperimentRecord, ImpactorGeometry, SurrogateSite};
    use crate::records::{probability_map, MassGrid, ProbabilityMap, VelocityBins};

    fn fe_profile() -> RobotProfile {
        RobotProfile {
            name: "tactile-arm".into(),
            reflected_mass_range_kg: (3.0, 6.0),
            max_cartesian_speed_m_s: 2.0,
        }
    }

    #[test]
    fn bundled_report_carries_published_cells() {
        let report = assessment_report(&fe_profile(), &ProbabilitySource::Bundled).unwrap();
        assert_eq!(report.cells.len(), 6);
        let markdown = report.render_markdown();
        // Heavy-arm edge impactor at full speed.
        assert!(markdown.contains("54.2%"), "{markdown}");
        assert!(markdown.contains(&report.toolkit_version));
        assert!(markdown.contains("pig tissue surrogates"));
        assert!(markdown.contains("up to 8"));
        // Bundled summary cannot answer a tolerated class of "none".
        assert!(markdown.contains("skin-cut and tendon/bone shares"));
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["max_safe_mass_kg"], 6.0);
    }

    #[test]
    fn slow_profile_reports_zero_cut_risk_everywhere() {
        let mut profile = fe_profile();
        profile.max_cartesian_speed_m_s = 0.3;
        let report = assessment_report(&profile, &ProbabilitySource::Bundled).unwrap();
        for cell in report
            .cells
            .iter()
            .filter(|c| c.condition == Condition::IA)
        {
            for answer in [&cell.at_mass_low, &cell.at_mass_high] {
                let classes = answer.classes().expect("in range");
                assert_eq!(classes.value.probability_of(InjuryClass::SkinCut), Some(0.0));
                assert_eq!(classes.value.resolved_velocity_m_s, 0.5);
            }
        }
    }

    fn empty_map() -> ProbabilityMap {
        probability_map(
            &[],
            Condition::IA,
            Some(ImpactorKind::Wedge),
            MassGrid::bundled(),
            VelocityBins::default(),
            SourceTag::new(DataSource::External, "empty map"),
        )
        .unwrap()
    }

    #[test]
    fn empty_source_reports_no_data_cells() {
        let map = empty_map();
        let report = assessment_report(&fe_profile(), &ProbabilitySource::Map(&map)).unwrap();
        assert_eq!(report.cells.len(), 1);
        let cell = &report.cells[0];
        assert!(matches!(cell.at_mass_low, ProbabilityAnswer::NoData { .. }));
        assert!(matches!(cell.at_mass_high, ProbabilityAnswer::NoData { .. }));
        assert!(matches!(
            cell.max_safe_imprint_tolerated,
            VelocityAnswer::NoData { .. }
        ));
        // Still renders.
        let markdown = report.render_markdown();
        assert!(markdown.contains("no data"), "{markdown}");
    }

    #[test]
    fn map_with_full_classes_answers_the_none_tolerated_column() {
        let record = ExperimentRecord {
            condition: Condition::IA,
            impactor: ImpactorGeometry::bundled(ImpactorKind::Wedge),
            site: SurrogateSite::ALL[0],
            human_eff_mass_kg: 2.58,
            robot_eff_mass_kg: 5.0,
            desired_velocity_m_s: 0.3,
            measured_velocity_m_s: 0.3,
            peak_force_n: 50.0,
            force_saturated: false,
            injury: InjuryClass::None,
            valid: true,
            invalid_reason: None,
            specimen_id: "r".into(),
            provenance: DataSource::External,
        };
        let map = probability_map(
            &[record],
            Condition::IA,
            Some(ImpactorKind::Wedge),
            MassGrid::bundled(),
            VelocityBins::default(),
            SourceTag::new(DataSource::External, "unit map"),
        )
        .unwrap();
        let mut profile = fe_profile();
        profile.reflected_mass_range_kg = (5.0, 5.0);
        profile.max_cartesian_speed_m_s = 0.3;
        let report = assessment_report(&profile, &ProbabilitySource::Map(&map)).unwrap();
        let cell = &report.cells[0];
        // One all-clear record in the first bin certifies it at p_max 0.
        assert_eq!(cell.max_safe_none_tolerated.velocity(), Some(0.5));
    }

    #[test]
    fn invalid_profiles_are_rejected() {
        let mut profile = fe_profile();
        profile.reflected_mass_range_kg = (6.0, 3.0);
        assert!(assessment_report(&profile, &ProbabilitySource::Bundled).is_err());
        let mut profile = fe_profile();
        profile.max_cartesian_speed_m_s = 0.0;
        assert!(assessment_report(&profile, &ProbabilitySource::Bundled).is_err());
    }
}
