//! Record aggregation: CSV ingestion, mass/velocity binning, probability
//! maps, threshold summaries, force statistics, and the bundled published
//! dataset.

mod binning;
mod bundled;
mod io;
mod map;
mod summary;

pub use binning::{BinIndex, MassGrid, VelocityBins, MASS_SNAP_REL};
pub use bundled::{
    bundled_class_counts, bundled_dataset, bundled_force_stats, bundled_threshold_cells,
    bundled_velocity_accuracy, consistency_check, human_config, rig_configs, robot_configs,
    BundledDataset, BundledForceStat, BundledThresholdCell, ClassCounts, VelocityAccuracyRow,
    BUNDLED_CAPS_M_S, INVALID_TRIAL_COUNT, TOTAL_TRIAL_COUNT,
};
pub use io::{
    ingest_csv, ingest_path, write_records_csv, write_records_path, IngestReport, RowRejection,
    RECORDS_CSV_HEADER, RECORDS_CSV_MAGIC,
};
pub use map::{probability_map, CellStats, ProbabilityMap};
pub use summary::{
    force_statistics, threshold_summary, CapConvention, ForceCell, ForceStatistics, ThresholdRow,
    ThresholdSummary, DEFAULT_CAPS_M_S, DEFAULT_MASS_RANGE_KG,
};

#[derive(Debug, thiserror::Error)]
pub enum RecordsError {
    #[error("invalid binning: {reason}")]
    InvalidBinning { reason: String },
    #[error("invalid aggregation request: {reason}")]
    InvalidRequest { reason: String },
    #[error("unsupported record schema (line {line}): {reason}")]
    Schema { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
