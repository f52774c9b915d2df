//! Scenario files, parameter sweeps and their CSV / SVG renderings.
//!
//! A scenario is one JSON document describing a rig, an operating point and
//! a one-dimensional sweep. [`load_config`] validates it, [`run_sweep`]
//! evaluates the error budget over the grid, and [`write_csv`] /
//! [`render_svg`] turn the result into files.

mod config;
mod plot;
mod sweep;
mod table;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{
    load_config, parse_config, MonteCarloConfig, QueryConfig, RigConfig, ScenarioConfig,
    SweepConfig, SweepVariable, ValidationConfig, FOCAL_MISMATCH_TOLERANCE_PX,
    MAX_MONTE_CARLO_SAMPLES, MAX_SWEEP_STEPS,
};
pub use plot::{nice_ticks, render_svg, SVG_HEIGHT, SVG_WIDTH};
pub use sweep::{
    run_sweep, run_sweep_with_model, MonteCarloReport, SweepResult, SweepRow, SweepSummary,
};
pub use table::{parse_csv, write_csv, CsvRecord, CSV_HEADER};

/// Failures surfaced by the scenario layer, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config parse error at line {line}, column {column} (field `{field}`): {message}")]
    Parse {
        line: usize,
        column: usize,
        field: String,
        message: String,
    },

    #[error("invalid config: {0}")]
    Invalid(String),

    #[error("every sweep row failed; first failure: {first}")]
    AllRowsFailed { first: crate::Error },

    #[error("monte carlo check failed: {0}")]
    MonteCarlo(crate::Error),

    #[error("results cannot share one plot: {0}")]
    MismatchedGrids(String),

    #[error("write failed: {0}")]
    Write(#[from] std::io::Error),

    #[error("malformed CSV: {0}")]
    Csv(String),
}

impl ScenarioError {
    /// 2 for bad configuration, 3 for runtime domain failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Parse { .. } | ScenarioError::Invalid(_) => 2,
            ScenarioError::AllRowsFailed { .. }
            | ScenarioError::MonteCarlo(_)
            | ScenarioError::MismatchedGrids(_)
            | ScenarioError::Csv(_) => 3,
            ScenarioError::Read { .. } | ScenarioError::Write(_) => 4,
        }
    }
}
