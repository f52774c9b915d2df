//! Exact geometry of a parallel two-camera rig in the horizontal epipolar
//! plane.
//!
//! The rig's cameras sit at `x = -B/2` (left) and `x = +B/2` (right) with
//! parallel optical axes along `+z`. Object poses are anchored at the rig
//! midpoint: `range` is the distance from the midpoint and `bearing` the angle
//! from the forward axis, positive towards `+x`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::projection::{project, CameraIntrinsics, LensProjection};

/// Lower end of the range search interval, in baselines.
pub const MIN_SEARCH_RANGE_BASELINES: f64 = 1.0;
/// Upper end of the range search interval, in meters.
pub const MAX_SEARCH_RANGE_M: f64 = 1e7;
/// Disparity residual at which the range search stops.
pub const RANGE_SEARCH_TOLERANCE_PX: f64 = 1e-12;
pub const RANGE_SEARCH_MAX_ITERATIONS: usize = 200;

/// Two identical cameras separated by a horizontal baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StereoRig {
    pub baseline_m: f64,
    pub intrinsics: CameraIntrinsics,
    pub projection: LensProjection,
}

impl StereoRig {
    pub fn new(
        baseline_m: f64,
        intrinsics: CameraIntrinsics,
        projection: LensProjection,
    ) -> Result<Self> {
        if !(baseline_m.is_finite() && baseline_m > 0.0) {
            return Err(domain(format!(
                "baseline must be positive, got {baseline_m} m"
            )));
        }
        if projection == LensProjection::Pinhole && intrinsics.hfov_rad >= std::f64::consts::PI {
            return Err(domain(
                "a pinhole camera cannot have a 180 degree field of view",
            ));
        }
        Ok(StereoRig {
            baseline_m,
            intrinsics,
            projection,
        })
    }

    pub fn focal_px(&self) -> f64 {
        self.intrinsics.focal_px
    }

    /// The same rig with a different baseline.
    pub fn with_baseline(&self, baseline_m: f64) -> Result<Self> {
        Self::new(baseline_m, self.intrinsics, self.projection)
    }

    /// The same sensor and focal length behind the other lens law.
    pub fn with_projection(&self, projection: LensProjection) -> Result<Self> {
        Self::new(
            self.baseline_m,
            self.intrinsics.with_projection(projection)?,
            projection,
        )
    }
}

/// Target location relative to the rig midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectPose {
    range_m: f64,
    bearing_rad: f64,
}

fn check_bearing(bearing_rad: f64) -> Result<()> {
    if bearing_rad.abs() < FRAC_PI_2 {
        Ok(())
    } else {
        Err(domain(format!(
            "bearing must lie strictly inside (-pi/2, pi/2), got {bearing_rad} rad"
        )))
    }
}

impl ObjectPose {
    pub fn from_range(range_m: f64, bearing_rad: f64) -> Result<Self> {
        check_bearing(bearing_rad)?;
        if !(range_m.is_finite() && range_m > 0.0) {
            return Err(domain(format!("range must be positive, got {range_m} m")));
        }
        Ok(ObjectPose {
            range_m,
            bearing_rad,
        })
    }

    pub fn from_depth(depth_m: f64, bearing_rad: f64) -> Result<Self> {
        check_bearing(bearing_rad)?;
        if !(depth_m.is_finite() && depth_m > 0.0) {
            return Err(domain(format!("depth must be positive, got {depth_m} m")));
        }
        Self::from_range(depth_to_range(depth_m, bearing_rad), bearing_rad)
    }

    pub fn range_m(&self) -> f64 {
        self.range_m
    }

    pub fn bearing_rad(&self) -> f64 {
        self.bearing_rad
    }

    pub fn depth_m(&self) -> f64 {
        range_to_depth(self.range_m, self.bearing_rad)
    }

    /// Lateral offset from the rig midpoint.
    pub fn lateral_m(&self) -> f64 {
        self.range_m * self.bearing_rad.sin()
    }
}

/// Line-of-sight range for a point at `depth_m` seen at `bearing_rad`.
pub fn depth_to_range(depth_m: f64, bearing_rad: f64) -> f64 {
    depth_m / bearing_rad.cos()
}

/// Perpendicular depth for a point at `range_m` seen at `bearing_rad`.
pub fn range_to_depth(range_m: f64, bearing_rad: f64) -> f64 {
    range_m * bearing_rad.cos()
}

/// Baseline component perpendicular to the line of sight, `B cos θ`.
pub fn effective_baseline(baseline_m: f64, bearing_rad: f64) -> f64 {
    baseline_m * bearing_rad.cos()
}

/// Ray angles from the left and right camera centers to the object, each
/// measured from that camera's optical axis.
pub fn camera_bearings(rig: &StereoRig, pose: &ObjectPose) -> (f64, f64) {
    let half = rig.baseline_m / 2.0;
    let x = pose.lateral_m();
    let z = pose.depth_m();
    ((x + half).atan2(z), (x - half).atan2(z))
}

/// Total disparity: the left image radius minus the right one.
///
/// Evaluated through the angle the baseline subtends at the object rather than
/// by subtracting two radii, which would cancel catastrophically off-axis:
///
/// * fisheye: `f (θl - θr)`
/// * pinhole: `f (tan θl - tan θr) = f sin(θl - θr) / (cos θl cos θr)`
pub fn disparity(rig: &StereoRig, pose: &ObjectPose) -> Result<f64> {
    let (left, right) = camera_bearings(rig, pose);
    let f = rig.focal_px();
    // Domain check on each ray only; the radii themselves are not used.
    project(rig.projection, f, left)?;
    project(rig.projection, f, right)?;

    let half = rig.baseline_m / 2.0;
    let x = pose.lateral_m();
    let z = pose.depth_m();
    let r = pose.range_m();
    let subtended = (rig.baseline_m * z).atan2((r - half) * (r + half));
    Ok(match rig.projection {
        LensProjection::EquidistantFisheye => f * subtended,
        LensProjection::Pinhole => {
            let to_left = (x + half).hypot(z);
            let to_right = (x - half).hypot(z);
            f * subtended.sin() * (to_left / z) * (to_right / z)
        }
    })
}

fn disparity_at_range(rig: &StereoRig, bearing_rad: f64, range_m: f64) -> Result<f64> {
    disparity(rig, &ObjectPose::from_range(range_m, bearing_rad)?)
}

/// Range at which an object on `bearing_rad` produces disparity `d`.
///
/// Bisection over `[B, 1e7 m]`; disparity falls strictly with range along a
/// fixed bearing, so the bracket holds exactly one root.
pub fn range_from_disparity(rig: &StereoRig, bearing_rad: f64, d: f64) -> Result<f64> {
    check_bearing(bearing_rad)?;
    let mut near = MIN_SEARCH_RANGE_BASELINES * rig.baseline_m;
    let mut far = MAX_SEARCH_RANGE_M.max(2.0 * near);
    let max_px = disparity_at_range(rig, bearing_rad, near)?;
    let min_px = disparity_at_range(rig, bearing_rad, far)?;
    if !(d.is_finite() && d > min_px && d <= max_px) {
        return Err(Error::NoSolution {
            disparity_px: d,
            min_px,
            max_px,
        });
    }
    if d == max_px {
        return Ok(near);
    }

    let mut mid = 0.5 * (near + far);
    for _ in 0..RANGE_SEARCH_MAX_ITERATIONS {
        mid = 0.5 * (near + far);
        if mid <= near || mid >= far {
            break;
        }
        let residual = disparity_at_range(rig, bearing_rad, mid)? - d;
        if residual.abs() <= RANGE_SEARCH_TOLERANCE_PX {
            break;
        }
        if residual > 0.0 {
            near = mid;
        } else {
            far = mid;
        }
    }
    Ok(mid)
}
