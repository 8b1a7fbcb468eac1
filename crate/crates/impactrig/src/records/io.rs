//! Record file I/O. The schema is versioned by a magic first line and the
//! column set is fixed; output is byte-deterministic (UTF-8, LF, fixed
//! float formatting) so identical record sets produce identical files.

use super::RecordsError;
use crate::model::{
    validate_record, Condition, DataSource, ExperimentRecord, ImpactorGeometry, ImpactorKind,
    InjuryClass, Location, Surrogate, SurrogateSite, FORCE_SENSOR_RANGE_N,
};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub const RECORDS_CSV_MAGIC: &str = "# impactrig records v1";
pub const RECORDS_CSV_HEADER: &str = "condition,impactor,surrogate,location,human_eff_mass_kg,robot_eff_mass_kg,v_desired_m_s,v_measured_m_s,peak_force_N,force_saturated,injury,valid,specimen_id,provenance";

const COLUMN_COUNT: usize = 14;
const MAGIC_PREFIX: &str = "# impactrig records v";

/// One row that could not become a record, with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowRejection {
    pub line: usize,
    pub reason: String,
}

/// Ingestion result: accepted records (including ones flagged invalid in
/// the data, which are kept for bookkeeping) plus per-row rejections.
#[derive(Debug, Clone, Default)]
pub struct IngestReport {
    pub records: Vec<ExperimentRecord>,
    pub rejections: Vec<RowRejection>,
    /// Set when the file lacks the schema magic line; parsed best-effort.
    pub missing_magic: bool,
    pub data_rows: usize,
}

impl IngestReport {
    pub fn accepted(&self) -> usize {
        self.records.len()
    }
}

pub fn write_records_csv<W: Write>(
    out: &mut W,
    records: &[ExperimentRecord],
) -> std::io::Result<()> {
    writeln!(out, "{RECORDS_CSV_MAGIC}")?;
    writeln!(out, "{RECORDS_CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{:.3},{:.3},{:.3},{:.3},{:.3},{},{},{},{},{}",
            r.condition.code(),
            r.impactor.kind.code(),
            r.site.surrogate.code(),
            r.site.location.code(),
            r.human_eff_mass_kg,
            r.robot_eff_mass_kg,
            r.desired_velocity_m_s,
            r.measured_velocity_m_s,
            r.peak_force_n,
            r.force_saturated,
            r.injury.code(),
            r.valid,
            sanitize_field(&r.specimen_id),
            r.provenance.code(),
        )?;
    }
    Ok(())
}

pub fn write_records_path(
    path: impl AsRef<Path>,
    records: &[ExperimentRecord],
) -> Result<(), RecordsError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_records_csv(&mut out, records)?;
    out.flush()?;
    Ok(())
}

/// Field separators and line breaks cannot survive inside a CSV field.
fn sanitize_field(value: &str) -> String {
    value.replace([',', '\n', '\r'], ";")
}

/// Parse a record file. Schema problems (bad magic version, wrong header)
/// are fatal; row problems become [`RowRejection`]s and parsing continues.
pub fn ingest_csv<R: BufRead>(input: R) -> Result<IngestReport, RecordsError> {
    let mut report = IngestReport::default();
    let mut lines = input.lines().enumerate();

    let (first_number, first) = match lines.next() {
        Some((n, line)) => (n + 1, line?),
        None => {
            return Err(RecordsError::Schema {
                line: 1,
                reason: "empty file".to_string(),
            })
        }
    };

    let header_line;
    let header_number;
    if let Some(version) = first.strip_prefix(MAGIC_PREFIX) {
        if version.trim() != "1" {
            return Err(RecordsError::Schema {
                line: first_number,
                reason: format!("unsupported record schema version {}", version.trim()),
            });
        }
        match lines.next() {
            Some((n, line)) => {
                header_number = n + 1;
                header_line = line?;
            }
            None => {
                return Err(RecordsError::Schema {
                    line: first_number + 1,
                    reason: "missing column header".to_string(),
                })
            }
        }
    } else if first.starts_with('#') {
        return Err(RecordsError::Schema {
            line: first_number,
            reason: "unrecognized preamble line".to_string(),
        });
    } else {
        report.missing_magic = true;
        header_number = first_number;
        header_line = first;
    }

    if header_line != RECORDS_CSV_HEADER {
        return Err(RecordsError::Schema {
            line: header_number,
            reason: "column header does not match the record schema".to_string(),
        });
    }

    for (n, line) in lines {
        let line = line?;
        let number = n + 1;
        report.data_rows += 1;
        match parse_row(&line) {
            Ok(record) => report.records.push(record),
            Err(reason) => report.rejections.push(RowRejection {
                line: number,
                reason,
            }),
        }
    }
    Ok(report)
}

pub fn ingest_path(path: impl AsRef<Path>) -> Result<IngestReport, RecordsError> {
    ingest_csv(BufReader::new(File::open(path)?))
}

fn parse_row(line: &str) -> Result<ExperimentRecord, String> {
    if line.is_empty() {
        return Err("empty row".to_string());
    }
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != COLUMN_COUNT {
        return Err(format!(
            "expected {COLUMN_COUNT} columns, found {}",
            fields.len()
        ));
    }
    let float = |index: usize, name: &str| -> Result<f64, String> {
        fields[index]
            .parse::<f64>()
            .map_err(|_| format!("{name}: not a number: {:?}", fields[index]))
    };
    let boolean = |index: usize, name: &str| -> Result<bool, String> {
        match fields[index] {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(format!("{name}: expected true|false, found {other:?}")),
        }
    };

    let condition = Condition::parse_code(fields[0]).map_err(|e| e.to_string())?;
    let kind = ImpactorKind::parse_code(fields[1]).map_err(|e| e.to_string())?;
    let site = SurrogateSite {
        surrogate: Surrogate::parse_code(fields[2]).map_err(|e| e.to_string())?,
        location: Location::parse_code(fields[3]).map_err(|e| e.to_string())?,
    };
    let record = ExperimentRecord {
        condition,
        impactor: ImpactorGeometry::bundled(kind),
        site,
        human_eff_mass_kg: float(4, "human_eff_mass_kg")?,
        robot_eff_mass_kg: float(5, "robot_eff_mass_kg")?,
        desired_velocity_m_s: float(6, "v_desired_m_s")?,
        measured_velocity_m_s: float(7, "v_measured_m_s")?,
        peak_force_n: float(8, "peak_force_N")?,
        force_saturated: boolean(9, "force_saturated")?,
        injury: InjuryClass::parse_code(fields[10]).map_err(|e| e.to_string())?,
        valid: boolean(11, "valid")?,
        invalid_reason: None,
        specimen_id: fields[12].to_string(),
        provenance: DataSource::parse_code(fields[13]).map_err(|e| e.to_string())?,
    };
    validate_record(record, FORCE_SENSOR_RANGE_N).map_err(|e| e.to_string())
}
