//! Numerical checks of the closed-form errors against the exact rig geometry.
//!
//! Two independent routes are provided:
//!
//! * central finite differences of the exact disparity with respect to range,
//!   which give the first-order range error without any small-baseline
//!   approximation;
//! * Monte Carlo propagation of Gaussian disparity noise through the exact
//!   inverse [`range_from_disparity`].
//!
//! Monte Carlo draws use ChaCha8 with one stream per sample index, so draw `i`
//! depends only on `(seed, i)` and results do not depend on thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{ErrorBudgetRow, ErrorQuery};
use crate::error::{domain, Error, Result};
use crate::geometry::{disparity, range_from_disparity, ObjectPose, StereoRig};

/// Default finite-difference step, relative to the pose range.
pub const DEFAULT_FD_STEP_REL: f64 = 1e-5;

/// Fewest samples a Monte Carlo run accepts.
pub const MIN_MONTE_CARLO_SAMPLES: usize = 100;

/// Central-difference derivative of disparity with respect to range at
/// fixed bearing, in pixels per meter.
pub fn disparity_range_derivative_fd(
    rig: &StereoRig,
    pose: &ObjectPose,
    step_m: f64,
) -> Result<f64> {
    if !(step_m.is_finite() && step_m > 0.0) {
        return Err(domain(format!(
            "finite-difference step must be positive, got {step_m} m"
        )));
    }
    let range = pose.range_m();
    let bearing = pose.bearing_rad();
    if step_m >= range {
        return Err(domain(format!(
            "step {step_m} m would move the pose behind the rig (range {range} m)"
        )));
    }
    let ahead = ObjectPose::from_range(range + step_m, bearing)?;
    let behind = ObjectPose::from_range(range - step_m, bearing)?;
    let span = ahead.range_m() - behind.range_m();
    Ok((disparity(rig, &ahead)? - disparity(rig, &behind)?) / span)
}

/// First-order range error from the finite-difference slope, `|Δd / (dd/dR)|`.
pub fn range_error_fd(rig: &StereoRig, pose: &ObjectPose, disparity_error_px: f64) -> Result<f64> {
    range_error_fd_with_step(rig, pose, disparity_error_px, DEFAULT_FD_STEP_REL)
}

pub fn range_error_fd_with_step(
    rig: &StereoRig,
    pose: &ObjectPose,
    disparity_error_px: f64,
    step_rel: f64,
) -> Result<f64> {
    if !(disparity_error_px.is_finite() && disparity_error_px > 0.0) {
        return Err(domain(format!(
            "disparity error must be positive, got {disparity_error_px} px"
        )));
    }
    let slope = disparity_range_derivative_fd(rig, pose, step_rel * pose.range_m())?;
    Ok((disparity_error_px / slope).abs())
}

/// Sample statistics of ranges recovered from noisy disparities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub mean_range_m: f64,
    pub std_range_m: f64,
    /// Samples that inverted successfully and entered the statistics.
    pub sample_count: usize,
    pub rejected_count: usize,
}

fn standard_normal_draw(seed: u64, index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    StandardNormal.sample(&mut rng)
}

/// Propagate `Normal(0, sigma²)` disparity noise at `pose` through the exact inverse.
///
/// Noisy disparities that no range can produce are rejected; more than 1%
/// rejections is an error.
pub fn monte_carlo_range_error(
    rig: &StereoRig,
    pose: &ObjectPose,
    disparity_sigma_px: f64,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloSummary> {
    if samples < MIN_MONTE_CARLO_SAMPLES {
        return Err(domain(format!(
            "monte carlo needs at least {MIN_MONTE_CARLO_SAMPLES} samples, got {samples}"
        )));
    }
    if !(disparity_sigma_px.is_finite() && disparity_sigma_px > 0.0) {
        return Err(domain(format!(
            "noise sigma must be positive, got {disparity_sigma_px} px"
        )));
    }
    let truth = disparity(rig, pose)?;
    let bearing = pose.bearing_rad();

    let ranges: Vec<Option<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let noisy = truth + disparity_sigma_px * standard_normal_draw(seed, i);
            match range_from_disparity(rig, bearing, noisy) {
                Ok(r) => Ok(Some(r)),
                Err(Error::NoSolution { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;

    let accepted: Vec<f64> = ranges.iter().flatten().copied().collect();
    let rejected = samples - accepted.len();
    if rejected * 100 > samples {
        return Err(Error::TooManyRejected { rejected, samples });
    }
    let n = accepted.len() as f64;
    let mean = accepted.iter().sum::<f64>() / n;
    let var = accepted
        .iter()
        .map(|r| (r - mean) * (r - mean))
        .sum::<f64>()
        / (n - 1.0);
    Ok(MonteCarloSummary {
        mean_range_m: mean,
        std_range_m: var.sqrt(),
        sample_count: accepted.len(),
        rejected_count: rejected,
    })
}

/// Analytic range error next to the finite-difference oracle for each pose.
///
/// The analytic value follows the rig's own projection model. Deviation is
/// `|analytic - oracle| / oracle`. Poses the oracle cannot evaluate yield an
/// `Err` entry in place; the rest of the report is unaffected.
pub fn deviation_report(
    rig: &StereoRig,
    sweep: &[ObjectPose],
    disparity_error_px: f64,
    step_rel: f64,
) -> Result<Vec<Result<ErrorBudgetRow>>> {
    if sweep.is_empty() {
        return Err(domain("deviation report needs at least one pose"));
    }
    Ok(sweep
        .iter()
        .map(|pose| {
            let q = ErrorQuery::new(*rig, pose.depth_m(), pose.bearing_rad(), disparity_error_px)?;
            let mut row = ErrorBudgetRow::analytic(&q);
            row.range_m = pose.range_m();
            attach_oracle(&mut row, rig, pose, disparity_error_px, step_rel)?;
            Ok(row)
        })
        .collect())
}

pub(crate) fn attach_oracle(
    row: &mut ErrorBudgetRow,
    rig: &StereoRig,
    pose: &ObjectPose,
    disparity_error_px: f64,
    step_rel: f64,
) -> Result<()> {
    let oracle = range_error_fd_with_step(rig, pose, disparity_error_px, step_rel)?;
    row.oracle_range_error_m = Some(oracle);
    row.oracle_relative_deviation = Some((row.analytic_range_error_m - oracle).abs() / oracle);
    Ok(())
}
