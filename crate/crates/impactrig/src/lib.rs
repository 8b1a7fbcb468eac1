//! Simulation and risk analytics for a two-pendulum collision test rig.
//!
//! The rig swings an instrumented "robot" pendulum into a passive "human"
//! pendulum that carries a tissue surrogate. This crate models the rig's
//! physics (calibration curve, release dynamics, contact, virtual sensors),
//! replays the automated trial protocol to generate synthetic experiment
//! records, aggregates records into injury-probability datasets, and answers
//! robot-safety queries against either the bundled published dataset or
//! user-supplied data.
//!
//! Module layout mirrors the data flow:
//!
//! * [`model`] - shared vocabulary: pendulum geometry, impactors, surrogate
//!   sites, injury grades, experiment records, provenance tags.
//! * [`dynamics`] - rig physics: calibration curve, release ODE, 1-D contact
//!   models, virtual encoder/force sensors.
//! * [`records`] - record ingestion and aggregation: CSV I/O, binning,
//!   probability maps, threshold summaries, force statistics, and the
//!   bundled published dataset.
//! * [`protocol`] - the automated trial state machine, velocity noise,
//!   synthetic injury-outcome model, and the campaign runner.
//! * [`assess`] - safety queries and assessment reports.

pub mod assess;
pub mod dynamics;
pub mod model;
pub mod protocol;
pub mod records;

/// Toolkit version embedded in every manifest, report, and export.
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
