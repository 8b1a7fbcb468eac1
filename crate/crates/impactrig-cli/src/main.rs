//! impactrig: batch front end for the collision test-rig toolkit.
//!
//! Exit codes: 0 success, 1 completed with data warnings (rejected rows,
//! no-data cells, faulted trials), 2 usage or input error.

mod svg;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use impactrig::assess::{
    assessment_report, AssessmentReport, ProbabilityAnswer, ProbabilitySource, RobotProfile,
};
use impactrig::dynamics::CalibrationCurve;
use impactrig::model::{
    Condition, DataSource, ExperimentRecord, ImpactorKind, InjuryClass, PendulumConfig,
    PendulumRole, SourceTag, Sourced,
};
use impactrig::protocol::{
    run_campaign, CampaignFault, CampaignGrid, CampaignManifest, RepeatRule, TrialOptions,
};
use impactrig::records::{
    bundled_class_counts, bundled_dataset, bundled_force_stats, bundled_threshold_cells,
    bundled_velocity_accuracy, force_statistics, ingest_path, probability_map, rig_configs,
    robot_configs, threshold_summary, write_records_path, BinIndex, BundledForceStat,
    BundledThresholdCell, CapConvention, ForceCell, MassGrid, ProbabilityMap, ThresholdRow,
    VelocityBins, DEFAULT_CAPS_M_S,
};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const DATA_DIR_ENV: &str = "IMPACTRIG_DATA_DIR";

/// Status line to stdout. Write errors (e.g. a downstream `head` closing the
/// pipe) are deliberately ignored so file side effects still complete.
macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

/// Warning or diagnostic to stderr; same pipe tolerance as [`outln`].
macro_rules! warnln {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stderr(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(
    name = "impactrig",
    version,
    about = "Collision test-rig simulation and injury risk analytics",
    after_help = "Exit codes: 0 success, 1 completed with data warnings, 2 usage or input error.\n\
                  IMPACTRIG_DATA_DIR names the default directory for record files and outputs."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert between release angle and collision velocity via the rig's calibration curve
    Calibrate(CalibrateArgs),
    /// Run a seeded synthetic campaign; writes records.csv and manifest.json
    Simulate(SimulateArgs),
    /// Validate a record file, reporting per-row rejections
    Ingest(IngestArgs),
    /// Bin records into an injury probability map (csv, json, or svg heatmap)
    Map(MapArgs),
    /// Injury shares per condition, impactor, and velocity cap
    Summary(SummaryArgs),
    /// Peak-force statistics per impactor and injury class
    Stats(StatsArgs),
    /// Robot safety assessment report (markdown or json)
    Assess(AssessArgs),
    /// Export the bundled published dataset
    Export(ExportArgs),
}

#[derive(Args)]
struct CalibrateArgs {
    /// Desired collision velocity, m/s
    #[arg(long = "v", value_name = "M_PER_S", conflicts_with = "alpha")]
    velocity: Option<f64>,
    /// Release angle, rad
    #[arg(long, value_name = "RAD")]
    alpha: Option<f64>,
    /// Collision distance, m (default: the bundled striker arm)
    #[arg(long = "lcol", value_name = "M")]
    lcol: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output directory (default: $IMPACTRIG_DATA_DIR or .)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Condition codes, e.g. I-a,I-b
    #[arg(long, value_delimiter = ',', value_name = "CODE")]
    conditions: Option<Vec<String>>,
    /// Impactor codes, e.g. W,E,S
    #[arg(long, value_delimiter = ',', value_name = "CODE")]
    impactors: Option<Vec<String>>,
    /// Striker attached-load labels in kg, e.g. 2,4,6,8
    #[arg(long, value_delimiter = ',', value_name = "KG")]
    loads: Option<Vec<f64>>,
    /// Desired velocities in m/s
    #[arg(long, value_delimiter = ',', value_name = "M_PER_S")]
    velocities: Option<Vec<f64>>,
    /// "alt" (2/1 alternating per cell) or a fixed repeat count
    #[arg(long, default_value = "alt")]
    repeats: String,
}

#[derive(Args)]
struct IngestArgs {
    /// Record CSV (default: $IMPACTRIG_DATA_DIR/records.csv)
    records: Option<PathBuf>,
    /// Rewrite the accepted records, normalized, to this path
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct BinArgs {
    /// Velocity bin origin, m/s
    #[arg(long, default_value_t = 0.0, value_name = "M_PER_S")]
    vel_start: f64,
    /// Velocity bin width, m/s
    #[arg(long, default_value_t = 0.5, value_name = "M_PER_S")]
    vel_width: f64,
    /// Number of velocity bins
    #[arg(long, default_value_t = 5, value_name = "N")]
    vel_bins: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum MapFormat {
    Csv,
    Json,
    Svg,
}

#[derive(Args)]
struct MapArgs {
    /// Record CSV (default: $IMPACTRIG_DATA_DIR/records.csv)
    records: Option<PathBuf>,
    /// Condition code (I-a or I-b)
    #[arg(long, value_name = "CODE")]
    condition: String,
    /// Restrict to one impactor code; omit to pool impactors
    #[arg(long, value_name = "CODE")]
    impactor: Option<String>,
    /// Mass bin upper edges in kg (default: the bundled 3.20,5.12,7.04,8.97)
    #[arg(long, value_delimiter = ',', value_name = "KG")]
    mass_edges: Option<Vec<f64>>,
    #[command(flatten)]
    bins: BinArgs,
    #[arg(long, value_enum, default_value_t = MapFormat::Csv)]
    format: MapFormat,
    /// Output file (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// svg only: color cells by the probability of injuries more severe than this class
    #[arg(long, default_value = "none", value_name = "CLASS")]
    tolerated: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    /// velocity < cap
    Strict,
    /// velocity <= cap
    Inclusive,
}

#[derive(Args)]
struct SummaryArgs {
    /// Record CSV (default: $IMPACTRIG_DATA_DIR/records.csv)
    records: Option<PathBuf>,
    /// Print the bundled published summary instead of computing one
    #[arg(long, conflicts_with = "records")]
    bundled: bool,
    /// Velocity caps in m/s (default 0.5,1,2)
    #[arg(long, value_delimiter = ',', value_name = "M_PER_S")]
    caps: Option<Vec<f64>>,
    /// Robot effective mass filter, "lo:hi" in kg
    #[arg(long, default_value = "3:9", value_name = "LO:HI")]
    mass_range: String,
    #[arg(long, value_enum, default_value_t = Convention::Strict)]
    convention: Convention,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    /// Record CSV (default: $IMPACTRIG_DATA_DIR/records.csv)
    records: Option<PathBuf>,
    /// Print the bundled published force bands instead of computing them
    #[arg(long, conflicts_with = "records")]
    bundled: bool,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Md,
    Json,
}

#[derive(Args)]
struct AssessArgs {
    /// Reflected (effective) mass range at the contact point, "lo:hi" in kg
    #[arg(long, default_value = "3:6", value_name = "LO:HI")]
    mass_range: String,
    /// Maximum Cartesian speed, m/s
    #[arg(long, value_name = "M_PER_S")]
    speed: f64,
    #[arg(long, default_value = "robot under assessment")]
    name: String,
    /// Assess against a record file instead of the bundled summary
    #[arg(long, value_name = "FILE")]
    records: Option<PathBuf>,
    /// Condition code for the record-built map (required with --records)
    #[arg(long, requires = "records", value_name = "CODE")]
    condition: Option<String>,
    /// Impactor code for the record-built map; omit to pool impactors
    #[arg(long, requires = "records", value_name = "CODE")]
    impactor: Option<String>,
    /// Mass bin upper edges for the record-built map, kg
    #[arg(long, value_delimiter = ',', requires = "records", value_name = "KG")]
    mass_edges: Option<Vec<f64>>,
    #[command(flatten)]
    bins: BinArgs,
    #[arg(long, value_enum, default_value_t = ReportFormat::Md)]
    format: ReportFormat,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long, value_enum, default_value_t = ExportFormat::Json)]
    format: ExportFormat,
    /// json: output file (stdout when omitted); csv: output directory
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            warnln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Calibrate(args) => cmd_calibrate(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Ingest(args) => cmd_ingest(args),
        Command::Map(args) => cmd_map(args),
        Command::Summary(args) => cmd_summary(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Assess(args) => cmd_assess(args),
        Command::Export(args) => cmd_export(args),
    }
}

// ---- shared plumbing ----

fn data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn resolve_records(path: Option<PathBuf>) -> Result<PathBuf> {
    if let Some(path) = path {
        return Ok(path);
    }
    let fallback = data_dir().join("records.csv");
    if std::env::var_os(DATA_DIR_ENV).is_some() || fallback.exists() {
        Ok(fallback)
    } else {
        bail!("no record file given and {DATA_DIR_ENV} is unset");
    }
}

/// Load records for aggregation; per-row rejections are warned about, not
/// fatal. Returns the retained records and whether anything was rejected.
fn load_records(path: &Path) -> Result<(Vec<ExperimentRecord>, bool)> {
    let report = ingest_path(path)
        .with_context(|| format!("reading records from {}", path.display()))?;
    if report.missing_magic {
        warnln!("warning: {}: missing schema magic line, parsed best-effort", path.display());
    }
    for rejection in &report.rejections {
        warnln!(
            "warning: {}: line {}: {}",
            path.display(),
            rejection.line,
            rejection.reason
        );
    }
    let warned = report.missing_magic || !report.rejections.is_empty();
    Ok((report.records, warned))
}

fn write_output(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("writing {}", path.display()))?,
        None => {
            use std::io::Write as _;
            // A closed pipe means the reader has all it wants; anything else
            // (full disk, redirection failure) is a real error.
            if let Err(e) = std::io::stdout().write_all(content.as_bytes()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(anyhow::Error::new(e).context("writing to stdout"));
                }
            }
        }
    }
    Ok(())
}

fn parse_pair(text: &str, what: &str) -> Result<(f64, f64)> {
    let Some((lo, hi)) = text.split_once(':') else {
        bail!("{what} must be \"lo:hi\", got \"{text}\"");
    };
    let lo: f64 = lo.trim().parse().with_context(|| format!("parsing {what}"))?;
    let hi: f64 = hi.trim().parse().with_context(|| format!("parsing {what}"))?;
    Ok((lo, hi))
}

fn mass_grid(edges: Option<Vec<f64>>) -> Result<MassGrid> {
    match edges {
        Some(edges) => Ok(MassGrid::new(edges)?),
        None => Ok(MassGrid::bundled()),
    }
}

fn velocity_bins(bins: BinArgs) -> Result<VelocityBins> {
    Ok(VelocityBins::new(bins.vel_start, bins.vel_width, bins.vel_bins)?)
}

/// Provenance for aggregates built from a record file: synthetic when every
/// record is, external otherwise.
fn records_tag(records: &[ExperimentRecord], path: &Path) -> SourceTag {
    let origin = if !records.is_empty()
        && records.iter().all(|r| r.provenance == DataSource::Synthetic)
    {
        DataSource::Synthetic
    } else {
        DataSource::External
    };
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    SourceTag::new(origin, format!("records: {name}"))
}

// ---- calibrate ----

fn cmd_calibrate(args: CalibrateArgs) -> Result<u8> {
    let curve = CalibrationCurve::default();
    let lcol = args
        .lcol
        .unwrap_or_else(|| robot_configs()[0].collision_distance_m());
    let (alpha, velocity) = match (args.velocity, args.alpha) {
        (Some(v), None) => (curve.required_angle(v, lcol)?, v),
        (None, Some(alpha)) => (alpha, curve.collision_velocity(alpha, lcol)?),
        _ => bail!("pass exactly one of --v or --alpha"),
    };
    outln!("release angle:      {alpha:.6} rad");
    outln!("collision velocity: {velocity:.3} m/s");
    outln!("collision distance: {lcol:.3} m");
    Ok(0)
}

// ---- simulate ----

#[derive(serde::Serialize)]
struct ManifestFile<'a> {
    #[serde(flatten)]
    manifest: &'a CampaignManifest,
    faults: &'a [CampaignFault],
}

fn parse_codes<T>(
    given: Option<Vec<String>>,
    parse: impl Fn(&str) -> Result<T, impactrig::model::ModelError>,
    default: Vec<T>,
) -> Result<Vec<T>> {
    match given {
        Some(codes) => codes
            .iter()
            .map(|c| parse(c.trim()).map_err(Into::into))
            .collect(),
        None => Ok(default),
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<u8> {
    let reference = CampaignGrid::reference_grid();
    let conditions = parse_codes(args.conditions, Condition::parse_code, reference.conditions)?;
    let impactors = parse_codes(args.impactors, ImpactorKind::parse_code, reference.impactors)?;
    let robot_configs = match args.loads {
        Some(loads) => loads
            .iter()
            .map(|load| {
                robot_configs()
                    .into_iter()
                    .find(|c| c.attached_load_kg == *load)
                    .with_context(|| {
                        format!("no striker build with load {load} kg (available: 2, 4, 6, 8)")
                    })
            })
            .collect::<Result<Vec<PendulumConfig>>>()?,
        None => reference.robot_configs,
    };
    let velocities_m_s = args.velocities.unwrap_or(reference.velocities_m_s);
    let repeats = match args.repeats.as_str() {
        "alt" => RepeatRule::AlternateTwoOne,
        n => RepeatRule::Fixed(
            n.parse()
                .with_context(|| format!("--repeats takes \"alt\" or an integer, got \"{n}\""))?,
        ),
    };
    let grid = CampaignGrid {
        conditions,
        impactors,
        sites: reference.sites,
        robot_configs,
        velocities_m_s,
        repeats,
    };
    let outcome = run_campaign(&grid, &TrialOptions::default(), args.seed)?;

    let dir = args.out.unwrap_or_else(data_dir);
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let records_path = dir.join("records.csv");
    let manifest_path = dir.join("manifest.json");
    write_records_path(&records_path, &outcome.records)?;
    let manifest = serde_json::to_string_pretty(&ManifestFile {
        manifest: &outcome.manifest,
        faults: &outcome.faults,
    })?;
    std::fs::write(&manifest_path, manifest + "\n")
        .with_context(|| format!("writing {}", manifest_path.display()))?;

    outln!(
        "wrote {} records to {} (seed {}, {} trials, {} faults)",
        outcome.records.len(),
        records_path.display(),
        args.seed,
        outcome.manifest.trial_count,
        outcome.faults.len()
    );
    outln!("manifest: {}", manifest_path.display());
    for fault in &outcome.faults {
        warnln!(
            "warning: trial {} ({}) faulted: {}",
            fault.trial_index, fault.specimen_id, fault.reason
        );
    }
    Ok(if outcome.faults.is_empty() { 0 } else { 1 })
}

// ---- ingest ----

fn cmd_ingest(args: IngestArgs) -> Result<u8> {
    let path = resolve_records(args.records)?;
    let report = ingest_path(&path)
        .with_context(|| format!("reading records from {}", path.display()))?;
    if report.missing_magic {
        warnln!("warning: missing schema magic line, parsed best-effort");
    }
    for rejection in &report.rejections {
        warnln!("rejected line {}: {}", rejection.line, rejection.reason);
    }
    let valid = report.records.iter().filter(|r| r.valid).count();
    outln!("data rows:        {}", report.data_rows);
    outln!("accepted records: {}", report.records.len());
    outln!("  valid:          {valid}");
    outln!("  invalid kept:   {}", report.records.len() - valid);
    outln!("rejected rows:    {}", report.rejections.len());
    if let Some(out) = args.out {
        write_records_path(&out, &report.records)?;
        outln!("normalized records written to {}", out.display());
    }
    Ok(if report.rejections.is_empty() && !report.missing_magic {
        0
    } else {
        1
    })
}

// ---- map ----

/// True when some in-grid cell has no records (overflow bins excluded).
fn has_no_data_cells(map: &ProbabilityMap) -> bool {
    (0..map.mass_grid.len()).any(|row| {
        (0..map.velocity_bins.count)
            .any(|col| map.cell(BinIndex::InRange(row), BinIndex::InRange(col)).total() == 0)
    })
}

fn cmd_map(args: MapArgs) -> Result<u8> {
    let path = resolve_records(args.records)?;
    let (records, input_warned) = load_records(&path)?;
    let condition = Condition::parse_code(&args.condition)?;
    let impactor = args
        .impactor
        .as_deref()
        .map(ImpactorKind::parse_code)
        .transpose()?;
    let tolerated = InjuryClass::parse_code(&args.tolerated)?;
    let map = probability_map(
        &records,
        condition,
        impactor,
        mass_grid(args.mass_edges)?,
        velocity_bins(args.bins)?,
        records_tag(&records, &path),
    )?;

    let content = match args.format {
        MapFormat::Csv => {
            let mut buffer = Vec::new();
            map.write_csv(&mut buffer)?;
            String::from_utf8(buffer).expect("map csv is utf-8")
        }
        MapFormat::Json => map.to_json() + "\n",
        MapFormat::Svg => svg::render_map(&map, tolerated),
    };
    write_output(args.out.as_deref(), &content)?;

    if map.total_valid == 0 {
        warnln!("warning: empty map ({} matching valid records)", map.total_valid);
        return Ok(0);
    }
    if has_no_data_cells(&map) {
        warnln!("warning: map contains no-data cells");
        return Ok(1);
    }
    Ok(if input_warned { 1 } else { 0 })
}

// ---- summary ----

fn fmt_opt_percent(p: Option<f64>) -> String {
    match p {
        Some(p) => format!("{p:.1}"),
        None => "NA".to_string(),
    }
}

fn summary_csv(rows: &[ThresholdRow]) -> String {
    let mut out = String::from("condition,impactor,cap_m_s,n,skin_cut_percent,tendon_bone_percent\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:.3},{},{},{}",
            r.condition.code(),
            r.impactor.code(),
            r.cap_m_s,
            r.n,
            fmt_opt_percent(r.skin_cut_percent),
            fmt_opt_percent(r.tendon_bone_percent)
        );
    }
    out
}

fn bundled_summary_csv(cells: &[Sourced<BundledThresholdCell>]) -> String {
    let mut out = String::from("condition,impactor,cap_m_s,n,skin_cut_percent,tendon_bone_percent\n");
    for c in cells {
        let _ = writeln!(
            out,
            "{},{},{:.3},NA,{:.1},{:.1}",
            c.value.condition.code(),
            c.value.impactor.code(),
            c.value.cap_m_s,
            c.value.skin_cut_percent,
            c.value.tendon_bone_percent
        );
    }
    out
}

fn cmd_summary(args: SummaryArgs) -> Result<u8> {
    if args.bundled {
        let cells = bundled_threshold_cells();
        let content = match args.format {
            TableFormat::Csv => bundled_summary_csv(&cells),
            TableFormat::Json => serde_json::to_string_pretty(&cells)? + "\n",
        };
        write_output(args.out.as_deref(), &content)?;
        return Ok(0);
    }
    let path = resolve_records(args.records)?;
    let (records, input_warned) = load_records(&path)?;
    let mass_range = parse_pair(&args.mass_range, "--mass-range")?;
    let caps = args.caps.unwrap_or_else(|| DEFAULT_CAPS_M_S.to_vec());
    let convention = match args.convention {
        Convention::Strict => CapConvention::Strict,
        Convention::Inclusive => CapConvention::Inclusive,
    };
    let summary = threshold_summary(
        &records,
        mass_range,
        &caps,
        convention,
        records_tag(&records, &path),
    )?;
    let content = match args.format {
        TableFormat::Csv => summary_csv(&summary.rows),
        TableFormat::Json => serde_json::to_string_pretty(&summary)? + "\n",
    };
    write_output(args.out.as_deref(), &content)?;

    if records.iter().filter(|r| r.valid).count() == 0 {
        warnln!("warning: no valid records; every cell is empty");
        return Ok(0);
    }
    if summary.rows.iter().any(|r| r.n == 0) {
        warnln!("warning: summary contains empty cells (n = 0)");
        return Ok(1);
    }
    Ok(if input_warned { 1 } else { 0 })
}

// ---- stats ----

fn stats_csv(cells: &[ForceCell]) -> String {
    let mut out = String::from("impactor,injury,n,mean_N,std_N,saturated_n\n");
    for c in cells {
        let _ = writeln!(
            out,
            "{},{},{},{:.1},{:.1},{}",
            c.impactor.code(),
            c.injury.code(),
            c.n,
            c.mean_n,
            c.std_n,
            c.saturated
        );
    }
    out
}

fn bundled_stats_csv(stats: &[Sourced<BundledForceStat>]) -> String {
    let mut out = String::from("impactor,injury,mean_N,std_N,exceeds_sensor_range\n");
    for s in stats {
        let _ = writeln!(
            out,
            "{},{},{:.1},{:.1},{}",
            s.value.impactor.code(),
            s.value.injury.code(),
            s.value.mean_n,
            s.value.std_n,
            s.value.exceeds_sensor_range()
        );
    }
    out
}

fn cmd_stats(args: StatsArgs) -> Result<u8> {
    if args.bundled {
        let stats = bundled_force_stats();
        let content = match args.format {
            TableFormat::Csv => bundled_stats_csv(&stats),
            TableFormat::Json => serde_json::to_string_pretty(&stats)? + "\n",
        };
        write_output(args.out.as_deref(), &content)?;
        return Ok(0);
    }
    let path = resolve_records(args.records)?;
    let (records, input_warned) = load_records(&path)?;
    let stats = force_statistics(&records, records_tag(&records, &path));
    let content = match args.format {
        TableFormat::Csv => stats_csv(&stats.cells),
        TableFormat::Json => serde_json::to_string_pretty(&stats)? + "\n",
    };
    write_output(args.out.as_deref(), &content)?;
    if stats.cells.is_empty() {
        warnln!("warning: no valid records; no force cells to report");
        return Ok(0);
    }
    Ok(if input_warned { 1 } else { 0 })
}

// ---- assess ----

fn report_has_no_data(report: &AssessmentReport) -> bool {
    report.cells.iter().any(|cell| {
        matches!(cell.at_mass_low, ProbabilityAnswer::NoData { .. })
            || matches!(cell.at_mass_high, ProbabilityAnswer::NoData { .. })
    })
}

fn cmd_assess(args: AssessArgs) -> Result<u8> {
    let (lo, hi) = parse_pair(&args.mass_range, "--mass-range")?;
    let profile = RobotProfile {
        name: args.name.clone(),
        reflected_mass_range_kg: (lo, hi),
        max_cartesian_speed_m_s: args.speed,
    };

    // The map, when used, must outlive the source borrowing it.
    let map_storage;
    let source = match &args.records {
        None => ProbabilitySource::Bundled,
        Some(path) => {
            let (records, _input_warned) = load_records(path)?;
            let condition = args
                .condition
                .as_deref()
                .context("--condition is required with --records")?;
            let impactor = args
                .impactor
                .as_deref()
                .map(ImpactorKind::parse_code)
                .transpose()?;
            map_storage = probability_map(
                &records,
                Condition::parse_code(condition)?,
                impactor,
                mass_grid(args.mass_edges.clone())?,
                velocity_bins(args.bins)?,
                records_tag(&records, path),
            )?;
            ProbabilitySource::Map(&map_storage)
        }
    };

    let report = assessment_report(&profile, &source)?;
    let content = match args.format {
        ReportFormat::Md => report.render_markdown(),
        ReportFormat::Json => report.to_json() + "\n",
    };
    write_output(args.out.as_deref(), &content)?;

    if report_has_no_data(&report) {
        warnln!("warning: report contains no-data cells");
        return Ok(1);
    }
    Ok(0)
}

// ---- export ----

#[derive(serde::Serialize)]
struct DatasetExport {
    toolkit_version: &'static str,
    dataset: impactrig::records::BundledDataset,
}

fn velocity_accuracy_csv() -> String {
    let mut out = String::from("desired_m_s,mean_m_s,std_m_s\n");
    for row in bundled_velocity_accuracy() {
        let _ = writeln!(
            out,
            "{:.3},{:.3},{:.3}",
            row.value.desired_m_s, row.value.mean_m_s, row.value.std_m_s
        );
    }
    out
}

fn class_counts_csv() -> String {
    let mut out = String::from("condition,none,skin_imprint,skin_cut,tendon_bone,total\n");
    for row in bundled_class_counts() {
        let c = row.value;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            c.condition.code(),
            c.none,
            c.skin_imprint,
            c.skin_cut,
            c.tendon_bone,
            c.total()
        );
    }
    out
}

fn rig_configs_csv() -> String {
    let mut out = String::from(
        "role,attached_load_kg,total_mass_kg,inertia_about_cog_kg_mm2,cog_distance_mm,collision_distance_mm\n",
    );
    for row in rig_configs() {
        let c = row.value;
        let role = match c.role {
            PendulumRole::Human => "human",
            PendulumRole::Robot => "robot",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            role,
            c.attached_load_kg,
            c.total_mass_kg,
            c.inertia_about_cog_kg_mm2,
            c.cog_distance_mm,
            c.collision_distance_mm
        );
    }
    out
}

fn cmd_export(args: ExportArgs) -> Result<u8> {
    match args.format {
        ExportFormat::Json => {
            let export = DatasetExport {
                toolkit_version: impactrig::TOOLKIT_VERSION,
                dataset: bundled_dataset(),
            };
            let content = serde_json::to_string_pretty(&export)? + "\n";
            write_output(args.out.as_deref(), &content)?;
        }
        ExportFormat::Csv => {
            let dir = args.out.unwrap_or_else(data_dir);
            std::fs::create_dir_all(&dir)
                .with_context(|| format!("creating {}", dir.display()))?;
            let files: [(&str, String); 5] = [
                ("threshold_summary.csv", bundled_summary_csv(&bundled_threshold_cells())),
                ("force_stats.csv", bundled_stats_csv(&bundled_force_stats())),
                ("velocity_accuracy.csv", velocity_accuracy_csv()),
                ("class_counts.csv", class_counts_csv()),
                ("rig_configs.csv", rig_configs_csv()),
            ];
            for (name, content) in &files {
                let path = dir.join(name);
                std::fs::write(&path, content)
                    .with_context(|| format!("writing {}", path.display()))?;
                outln!("wrote {}", path.display());
            }
            let manifest = serde_json::json!({
                "toolkit_version": impactrig::TOOLKIT_VERSION,
                "files": files.iter().map(|(name, _)| name).collect::<Vec<_>>(),
            });
            let manifest_path = dir.join("export_manifest.json");
            std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)? + "\n")
                .with_context(|| format!("writing {}", manifest_path.display()))?;
            outln!("wrote {}", manifest_path.display());
        }
    }
    Ok(0)
}
