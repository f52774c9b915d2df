use rayon::prelude::*;
use serde::Serialize;

use super::{ScenarioConfig, ScenarioError, SweepVariable};
use crate::analytic::{ErrorBudgetRow, ErrorQuery};
use crate::oracle::{
    attach_oracle, monte_carlo_range_error, range_error_fd_with_step, MonteCarloSummary,
};
use crate::projection::LensProjection;
use crate::{Error, ObjectPose, StereoRig};

/// One grid point of a sweep.
///
/// Analytic columns are always filled. `error` records why the oracle could
/// not be evaluated at this point, if it could not.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub baseline_m: f64,
    pub budget: ErrorBudgetRow,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "display")]
    pub error: Option<Error>,
}

fn display<S: serde::Serializer>(e: &Option<Error>, s: S) -> Result<S::Ok, S::Error> {
    match e {
        Some(e) => s.serialize_str(&e.to_string()),
        None => s.serialize_none(),
    }
}

impl SweepRow {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSummary {
    pub max_analytic_range_error_m: f64,
    pub bearing_at_max_rad: f64,
    pub sweep_value_at_max: f64,
    pub max_oracle_deviation: Option<f64>,
    pub sweep_value_at_max_deviation: Option<f64>,
    pub failed_rows: usize,
}

/// Monte Carlo check at the midpoint of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub sweep_value: f64,
    pub bearing_rad: f64,
    pub depth_m: f64,
    pub summary: MonteCarloSummary,
    pub oracle_range_error_m: f64,
    pub relative_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub config: ScenarioConfig,
    pub model: LensProjection,
    pub variable: SweepVariable,
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
    pub monte_carlo: Option<MonteCarloReport>,
}

/// Sweep the configured rig with its own projection model.
pub fn run_sweep(config: &ScenarioConfig) -> Result<SweepResult, ScenarioError> {
    run_sweep_with_model(config, config.rig.projection)
}

struct GridPoint {
    rig: StereoRig,
    depth_m: f64,
    bearing_rad: f64,
}

fn grid_point(config: &ScenarioConfig, base: &StereoRig, value: f64) -> crate::Result<GridPoint> {
    let q = &config.query;
    Ok(match config.sweep.variable {
        SweepVariable::BearingDeg => GridPoint {
            rig: *base,
            depth_m: q.depth_m,
            bearing_rad: value.to_radians(),
        },
        SweepVariable::DepthM => GridPoint {
            rig: *base,
            depth_m: value,
            bearing_rad: q.bearing_deg.to_radians(),
        },
        SweepVariable::BaselineM => GridPoint {
            rig: base.with_baseline(value)?,
            depth_m: q.depth_m,
            bearing_rad: q.bearing_deg.to_radians(),
        },
    })
}

/// Sweep the configured rig behind the given lens law.
pub fn run_sweep_with_model(
    config: &ScenarioConfig,
    model: LensProjection,
) -> Result<SweepResult, ScenarioError> {
    let base = config
        .stereo_rig(Some(model))
        .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
    let dd = config.query.disparity_error_px;
    let validation = &config.validation;

    let rows: Vec<SweepRow> = config
        .sweep
        .grid()
        .into_par_iter()
        .map(|value| {
            let point = grid_point(config, &base, value)
                .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
            let q = ErrorQuery::new(point.rig, point.depth_m, point.bearing_rad, dd)
                .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
            let mut budget = ErrorBudgetRow::analytic(&q);
            let mut error = None;
            if validation.enabled {
                let oracle =
                    ObjectPose::from_depth(point.depth_m, point.bearing_rad).and_then(|pose| {
                        attach_oracle(&mut budget, &point.rig, &pose, dd, validation.fd_step_rel)
                    });
                error = oracle.err();
            }
            Ok(SweepRow {
                sweep_value: value,
                baseline_m: point.rig.baseline_m,
                budget,
                error,
            })
        })
        .collect::<Result<_, ScenarioError>>()?;

    let failed_rows = rows.iter().filter(|r| r.failed()).count();
    if failed_rows == rows.len() {
        let first = rows[0].error.clone().expect("every row failed");
        return Err(ScenarioError::AllRowsFailed { first });
    }

    let peak = rows
        .iter()
        .max_by(|a, b| {
            a.budget
                .analytic_range_error_m
                .total_cmp(&b.budget.analytic_range_error_m)
        })
        .expect("grid has at least two points");
    let worst = rows
        .iter()
        .filter_map(|r| {
            r.budget
                .oracle_relative_deviation
                .map(|d| (d, r.sweep_value))
        })
        .max_by(|a, b| a.0.total_cmp(&b.0));
    let summary = SweepSummary {
        max_analytic_range_error_m: peak.budget.analytic_range_error_m,
        bearing_at_max_rad: peak.budget.bearing_rad,
        sweep_value_at_max: peak.sweep_value,
        max_oracle_deviation: worst.map(|w| w.0),
        sweep_value_at_max_deviation: worst.map(|w| w.1),
        failed_rows,
    };

    let monte_carlo = match (&validation.monte_carlo, validation.enabled) {
        (Some(mc), true) => {
            let value = config.sweep.midpoint();
            let point = grid_point(config, &base, value).map_err(ScenarioError::MonteCarlo)?;
            let pose = ObjectPose::from_depth(point.depth_m, point.bearing_rad)
                .map_err(ScenarioError::MonteCarlo)?;
            let summary =
                monte_carlo_range_error(&point.rig, &pose, mc.sigma_px, mc.samples, mc.seed)
                    .map_err(ScenarioError::MonteCarlo)?;
            let oracle =
                range_error_fd_with_step(&point.rig, &pose, mc.sigma_px, validation.fd_step_rel)
                    .map_err(ScenarioError::MonteCarlo)?;
            Some(MonteCarloReport {
                sweep_value: value,
                bearing_rad: point.bearing_rad,
                depth_m: point.depth_m,
                summary,
                oracle_range_error_m: oracle,
                relative_deviation: (summary.std_range_m - oracle).abs() / oracle,
            })
        }
        _ => None,
    };

    Ok(SweepResult {
        config: config.clone(),
        model,
        variable: config.sweep.variable,
        rows,
        summary,
        monte_carlo,
    })
}
