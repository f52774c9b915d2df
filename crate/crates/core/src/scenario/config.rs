use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::oracle::{DEFAULT_FD_STEP_REL, MIN_MONTE_CARLO_SAMPLES};
use crate::projection::{focal_from_fov, CameraIntrinsics, LensProjection};
use crate::StereoRig;

/// Largest allowed gap between a configured focal length and the one implied
/// by the sensor width and field of view.
pub const FOCAL_MISMATCH_TOLERANCE_PX: f64 = 0.5;

/// Upper bound on `sweep.steps`.
pub const MAX_SWEEP_STEPS: usize = 1_000_000;

/// Upper bound on `validation.monte_carlo.samples`.
pub const MAX_MONTE_CARLO_SAMPLES: usize = 100_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigConfig {
    pub projection: LensProjection,
    pub sensor_width_px: u32,
    pub hfov_deg: f64,
    pub pixel_pitch_um: f64,
    pub baseline_m: f64,
    /// Derived from `sensor_width_px` and `hfov_deg` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub focal_px: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryConfig {
    pub depth_m: f64,
    pub disparity_error_px: f64,
    /// Bearing held fixed by depth and baseline sweeps.
    #[serde(default)]
    pub bearing_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    BearingDeg,
    DepthM,
    BaselineM,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::BearingDeg => "bearing_deg",
            SweepVariable::DepthM => "depth_m",
            SweepVariable::BaselineM => "baseline_m",
        }
    }

    pub fn axis_label(self) -> &'static str {
        match self {
            SweepVariable::BearingDeg => "angle of incidence (deg)",
            SweepVariable::DepthM => "depth Z (m)",
            SweepVariable::BaselineM => "baseline B (m)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepConfig {
    /// Evenly spaced grid from `start` to `stop` inclusive.
    pub fn grid(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / last
                }
            })
            .collect()
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.start + self.stop)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    pub sigma_px: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationConfig {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default = "default_fd_step_rel")]
    pub fd_step_rel: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarloConfig>,
}

fn default_fd_step_rel() -> f64 {
    DEFAULT_FD_STEP_REL
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            enabled: false,
            fd_step_rel: DEFAULT_FD_STEP_REL,
            monte_carlo: None,
        }
    }
}

/// One validated scenario. After [`parse_config`], `rig.focal_px` is always set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub rig: RigConfig,
    pub query: QueryConfig,
    pub sweep: SweepConfig,
    #[serde(default)]
    pub validation: ValidationConfig,
}

impl ScenarioConfig {
    pub fn focal_px(&self) -> f64 {
        self.rig
            .focal_px
            .expect("focal length is filled in by validation")
    }

    /// The configured rig, optionally behind a different lens law.
    ///
    /// Overriding the projection keeps the focal length and sensor, so both
    /// models are compared at the same `f`.
    pub fn stereo_rig(&self, model: Option<LensProjection>) -> crate::Result<StereoRig> {
        let intrinsics = CameraIntrinsics::new(
            self.focal_px(),
            self.rig.sensor_width_px,
            self.rig.pixel_pitch_um,
            self.rig.hfov_deg.to_radians(),
        )?;
        let rig = StereoRig::new(self.rig.baseline_m, intrinsics, self.rig.projection)?;
        match model {
            Some(m) if m != rig.projection => rig.with_projection(m),
            _ => Ok(rig),
        }
    }

    fn validate(&mut self) -> Result<(), String> {
        let rig = &mut self.rig;
        positive("rig.baseline_m", rig.baseline_m)?;
        positive("rig.pixel_pitch_um", rig.pixel_pitch_um)?;
        if rig.sensor_width_px < 2 {
            return Err(format!(
                "rig.sensor_width_px must be at least 2, got {}",
                rig.sensor_width_px
            ));
        }
        if !(rig.hfov_deg > 0.0 && rig.hfov_deg <= 180.0) {
            return Err(format!(
                "rig.hfov_deg must lie in (0, 180], got {}",
                rig.hfov_deg
            ));
        }
        if rig.projection == LensProjection::Pinhole && rig.hfov_deg >= 180.0 {
            return Err(
                "rig.hfov_deg must be below 180 for a pinhole camera (tan diverges at 90 degrees)"
                    .into(),
            );
        }
        let derived = focal_from_fov(
            rig.projection,
            rig.sensor_width_px as f64 / 2.0,
            rig.hfov_deg.to_radians() / 2.0,
        )
        .map_err(|e| format!("rig.hfov_deg: {e}"))?;
        match rig.focal_px {
            None => rig.focal_px = Some(derived),
            Some(f) => {
                positive("rig.focal_px", f)?;
                if (f - derived).abs() > FOCAL_MISMATCH_TOLERANCE_PX {
                    return Err(format!(
                        "rig.focal_px = {f} disagrees with the {derived} px implied by sensor_width_px and hfov_deg \
                         (tolerance {FOCAL_MISMATCH_TOLERANCE_PX} px)"
                    ));
                }
            }
        }

        positive("query.depth_m", self.query.depth_m)?;
        positive("query.disparity_error_px", self.query.disparity_error_px)?;
        bearing("query.bearing_deg", self.query.bearing_deg)?;

        let sweep = &self.sweep;
        if !(2..=MAX_SWEEP_STEPS).contains(&sweep.steps) {
            return Err(format!(
                "sweep.steps must lie in [2, {MAX_SWEEP_STEPS}], got {}",
                sweep.steps
            ));
        }
        if !(sweep.start.is_finite() && sweep.stop.is_finite() && sweep.start < sweep.stop) {
            return Err(format!(
                "sweep.start ({}) must be below sweep.stop ({})",
                sweep.start, sweep.stop
            ));
        }
        match sweep.variable {
            SweepVariable::BearingDeg => {
                bearing("sweep.start", sweep.start)?;
                bearing("sweep.stop", sweep.stop)?;
            }
            SweepVariable::DepthM | SweepVariable::BaselineM => {
                positive("sweep.start", sweep.start)?
            }
        }

        let v = &self.validation;
        if !(v.fd_step_rel > 0.0 && v.fd_step_rel < 0.5) {
            return Err(format!(
                "validation.fd_step_rel must lie in (0, 0.5), got {}",
                v.fd_step_rel
            ));
        }
        if let Some(mc) = &v.monte_carlo {
            positive("validation.monte_carlo.sigma_px", mc.sigma_px)?;
            if !(MIN_MONTE_CARLO_SAMPLES..=MAX_MONTE_CARLO_SAMPLES).contains(&mc.samples) {
                return Err(format!(
                    "validation.monte_carlo.samples must lie in [{MIN_MONTE_CARLO_SAMPLES}, {MAX_MONTE_CARLO_SAMPLES}], got {}",
                    mc.samples
                ));
            }
        }
        Ok(())
    }
}

fn positive(field: &str, value: f64) -> Result<(), String> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(format!("{field} must be positive, got {value}"))
    }
}

fn bearing(field: &str, deg: f64) -> Result<(), String> {
    if deg.is_finite() && deg.abs() < 90.0 {
        Ok(())
    } else {
        Err(format!(
            "{field} must lie strictly between -90 and 90 degrees, got {deg}"
        ))
    }
}

/// Parse and validate a scenario from JSON text.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let mut config: ScenarioConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        ScenarioError::Parse {
            line: inner.line(),
            column: inner.column(),
            field,
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| ScenarioError::Parse {
        line: e.line(),
        column: e.column(),
        field: ".".into(),
        message: e.to_string(),
    })?;
    config.validate().map_err(ScenarioError::Invalid)?;
    Ok(config)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}
