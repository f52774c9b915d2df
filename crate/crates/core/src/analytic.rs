//! Closed-form first-order depth and range errors.
//!
//! With depth `Z`, bearing `θ`, disparity error `Δd`, focal length `f` and
//! baseline `B`:
//!
//! | model   | depth error                    | range error                       |
//! |---------|--------------------------------|-----------------------------------|
//! | pinhole | `Z² Δd / (f B)`                | `Z² Δd / (f B cos θ)`             |
//! | fisheye | `Z² Δd / (f B) · (1 + tan² θ)` | `Z² Δd / (f B cos θ) · (1 + tan² θ)` |
//!
//! The pinhole range error grows only through the foreshortened baseline
//! `B cos θ`. The fisheye law adds the `1 + tan² θ` loss of angular
//! resolution towards the edge of the sensor. All errors are reported as
//! magnitudes.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::{effective_baseline, StereoRig};
use crate::projection::LensProjection;

/// Inputs shared by the four error formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorQuery {
    depth_m: f64,
    bearing_rad: f64,
    disparity_error_px: f64,
    rig: StereoRig,
}

impl ErrorQuery {
    pub fn new(
        rig: StereoRig,
        depth_m: f64,
        bearing_rad: f64,
        disparity_error_px: f64,
    ) -> Result<Self> {
        if !(depth_m.is_finite() && depth_m > 0.0) {
            return Err(domain(format!("depth must be positive, got {depth_m} m")));
        }
        if !(disparity_error_px.is_finite() && disparity_error_px > 0.0) {
            return Err(domain(format!(
                "disparity error must be positive, got {disparity_error_px} px"
            )));
        }
        if bearing_rad.is_nan() || bearing_rad.abs() >= FRAC_PI_2 {
            return Err(domain(format!(
                "bearing must lie strictly inside (-pi/2, pi/2), got {bearing_rad} rad"
            )));
        }
        Ok(ErrorQuery {
            depth_m,
            bearing_rad,
            disparity_error_px,
            rig,
        })
    }

    pub fn depth_m(&self) -> f64 {
        self.depth_m
    }

    pub fn bearing_rad(&self) -> f64 {
        self.bearing_rad
    }

    pub fn disparity_error_px(&self) -> f64 {
        self.disparity_error_px
    }

    pub fn rig(&self) -> &StereoRig {
        &self.rig
    }

    fn on_axis_depth_error(&self) -> f64 {
        self.depth_m * self.depth_m * self.disparity_error_px
            / (self.rig.focal_px() * self.rig.baseline_m)
    }

    fn fisheye_gain(&self) -> f64 {
        let t = self.bearing_rad.tan();
        1.0 + t * t
    }
}

/// One evaluated sample of an error sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudgetRow {
    pub bearing_rad: f64,
    pub depth_m: f64,
    pub range_m: f64,
    pub model: LensProjection,
    pub analytic_depth_error_m: f64,
    pub analytic_range_error_m: f64,
    pub oracle_range_error_m: Option<f64>,
    pub oracle_relative_deviation: Option<f64>,
}

impl ErrorBudgetRow {
    /// Analytic columns for the rig's own projection model; oracle columns empty.
    pub fn analytic(q: &ErrorQuery) -> Self {
        let model = q.rig.projection;
        ErrorBudgetRow {
            bearing_rad: q.bearing_rad,
            depth_m: q.depth_m,
            range_m: crate::geometry::depth_to_range(q.depth_m, q.bearing_rad),
            model,
            analytic_depth_error_m: depth_error(model, q),
            analytic_range_error_m: range_error(model, q),
            oracle_range_error_m: None,
            oracle_relative_deviation: None,
        }
    }
}

/// `Z² Δd / (f B)`
pub fn depth_error_pinhole(q: &ErrorQuery) -> f64 {
    q.on_axis_depth_error()
}

/// `Z² Δd / (f B')` with `B' = B cos θ`
pub fn range_error_pinhole(q: &ErrorQuery) -> f64 {
    let b_eff = effective_baseline(q.rig.baseline_m, q.bearing_rad);
    q.depth_m * q.depth_m * q.disparity_error_px / (q.rig.focal_px() * b_eff)
}

/// `Z² Δd / (f B) · (1 + tan² θ)`
pub fn depth_error_fisheye(q: &ErrorQuery) -> f64 {
    q.on_axis_depth_error() * q.fisheye_gain()
}

/// `Z² Δd / (f B') · (1 + tan² θ)`
pub fn range_error_fisheye(q: &ErrorQuery) -> f64 {
    range_error_pinhole(q) * q.fisheye_gain()
}

/// Convert a depth error at `bearing_rad` into the matching range error.
pub fn depth_to_range_error(depth_error_m: f64, bearing_rad: f64) -> f64 {
    depth_error_m / bearing_rad.cos()
}

pub fn depth_error(model: LensProjection, q: &ErrorQuery) -> f64 {
    match model {
        LensProjection::Pinhole => depth_error_pinhole(q),
        LensProjection::EquidistantFisheye => depth_error_fisheye(q),
    }
}

pub fn range_error(model: LensProjection, q: &ErrorQuery) -> f64 {
    match model {
        LensProjection::Pinhole => range_error_pinhole(q),
        LensProjection::EquidistantFisheye => range_error_fisheye(q),
    }
}
