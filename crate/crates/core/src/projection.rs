//! Radial projection laws mapping the angle of an incident ray to its
//! signed distance from the image center, and back.
//!
//! Two laws are supported:
//!
//! * [`LensProjection::Pinhole`]: rectilinear, `r = f tan θ`.
//! * [`LensProjection::EquidistantFisheye`]: f-theta, `r = f θ`.
//!
//! Angles are radians and radii are pixels. Radii are signed, so a ray to the
//! left of the optical axis lands at a negative radius.
//!
//! The two laws agree to first order on-axis and part ways towards the
//! periphery; rays beyond roughly 1.16 rad are where the f-theta image is
//! visibly different from a rectilinear one.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Distance from the pole at which the pinhole law is treated as diverged.
pub const PINHOLE_POLE_GUARD: f64 = 1e-9;

/// Which projection law maps ray angle to image radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LensProjection {
    Pinhole,
    #[serde(rename = "fisheye", alias = "equidistant_fisheye")]
    EquidistantFisheye,
}

impl LensProjection {
    pub const ALL: [LensProjection; 2] =
        [LensProjection::Pinhole, LensProjection::EquidistantFisheye];

    /// Short lowercase identifier used in CSV output and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            LensProjection::Pinhole => "pinhole",
            LensProjection::EquidistantFisheye => "fisheye",
        }
    }

    /// Largest ray angle magnitude the law accepts.
    ///
    /// The pinhole bound is open (the guard band is excluded), the fisheye
    /// bound is closed.
    pub fn max_angle(self) -> f64 {
        match self {
            LensProjection::Pinhole => FRAC_PI_2 - PINHOLE_POLE_GUARD,
            LensProjection::EquidistantFisheye => PI,
        }
    }

    /// Whether `theta` lies inside the projection domain.
    pub fn accepts_angle(self, theta: f64) -> bool {
        match self {
            LensProjection::Pinhole => theta.abs() < self.max_angle(),
            LensProjection::EquidistantFisheye => theta.abs() <= self.max_angle(),
        }
    }
}

impl fmt::Display for LensProjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for LensProjection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "pinhole" => Ok(LensProjection::Pinhole),
            "fisheye" | "equidistant_fisheye" => Ok(LensProjection::EquidistantFisheye),
            other => Err(format!(
                "unknown projection `{other}` (expected pinhole or fisheye)"
            )),
        }
    }
}

fn check_focal(focal_px: f64) -> Result<()> {
    if focal_px.is_finite() && focal_px > 0.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "focal length must be positive and finite, got {focal_px}"
        )))
    }
}

/// Image radius of a ray at `theta` radians from the optical axis.
pub fn project(proj: LensProjection, focal_px: f64, theta: f64) -> Result<f64> {
    check_focal(focal_px)?;
    if !proj.accepts_angle(theta) {
        return Err(domain(format!(
            "ray angle {theta} rad is outside the {proj} projection domain (|theta| must stay within {})",
            proj.max_angle()
        )));
    }
    Ok(match proj {
        LensProjection::Pinhole => focal_px * theta.tan(),
        LensProjection::EquidistantFisheye => focal_px * theta,
    })
}

/// Ray angle that lands at image radius `radius`.
///
/// Inverse of [`project`] on the projection's domain.
pub fn unproject(proj: LensProjection, focal_px: f64, radius: f64) -> Result<f64> {
    check_focal(focal_px)?;
    if !radius.is_finite() {
        return Err(domain(format!("radius must be finite, got {radius}")));
    }
    match proj {
        LensProjection::Pinhole => Ok((radius / focal_px).atan()),
        LensProjection::EquidistantFisheye => {
            if radius.abs() > focal_px * PI {
                return Err(domain(format!(
                    "radius {radius} px exceeds the fisheye image circle of {} px",
                    focal_px * PI
                )));
            }
            Ok(radius / focal_px)
        }
    }
}

/// Focal length that maps a half field of view onto a half sensor width.
pub fn focal_from_fov(proj: LensProjection, half_width_px: f64, half_hfov_rad: f64) -> Result<f64> {
    if !(half_width_px.is_finite() && half_width_px > 0.0) {
        return Err(domain(format!(
            "half sensor width must be positive, got {half_width_px}"
        )));
    }
    let upper_ok = match proj {
        LensProjection::Pinhole => half_hfov_rad < proj.max_angle(),
        LensProjection::EquidistantFisheye => half_hfov_rad <= FRAC_PI_2,
    };
    if !(half_hfov_rad > 0.0 && upper_ok) {
        return Err(domain(match proj {
            LensProjection::Pinhole => format!(
                "a pinhole camera cannot cover a half field of view of {half_hfov_rad} rad; \
                 it would need an infinitely large sensor at pi/2"
            ),
            LensProjection::EquidistantFisheye => {
                format!("half field of view must lie in (0, pi/2], got {half_hfov_rad} rad")
            }
        }));
    }
    Ok(match proj {
        LensProjection::Pinhole => half_width_px / half_hfov_rad.tan(),
        LensProjection::EquidistantFisheye => half_width_px / half_hfov_rad,
    })
}

/// Focal length plus sensor geometry of one camera.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub focal_px: f64,
    pub sensor_width_px: u32,
    /// Carried for documentation; none of the error math depends on it.
    pub pixel_pitch_um: f64,
    pub hfov_rad: f64,
}

impl CameraIntrinsics {
    pub fn new(
        focal_px: f64,
        sensor_width_px: u32,
        pixel_pitch_um: f64,
        hfov_rad: f64,
    ) -> Result<Self> {
        check_focal(focal_px)?;
        if sensor_width_px < 2 {
            return Err(domain(format!(
                "sensor width must be at least 2 px, got {sensor_width_px}"
            )));
        }
        if !(pixel_pitch_um.is_finite() && pixel_pitch_um > 0.0) {
            return Err(domain(format!(
                "pixel pitch must be positive, got {pixel_pitch_um} um"
            )));
        }
        if !(hfov_rad > 0.0 && hfov_rad <= PI) {
            return Err(domain(format!(
                "horizontal field of view must lie in (0, pi], got {hfov_rad} rad"
            )));
        }
        Ok(CameraIntrinsics {
            focal_px,
            sensor_width_px,
            pixel_pitch_um,
            hfov_rad,
        })
    }

    /// Intrinsics whose focal length makes the field of view span the sensor width.
    pub fn from_fov(
        proj: LensProjection,
        sensor_width_px: u32,
        pixel_pitch_um: f64,
        hfov_rad: f64,
    ) -> Result<Self> {
        let focal = focal_from_fov(proj, sensor_width_px as f64 / 2.0, hfov_rad / 2.0)?;
        Self::new(focal, sensor_width_px, pixel_pitch_um, hfov_rad)
    }

    /// Same sensor and focal length behind a different lens law.
    ///
    /// The field of view is recomputed from the sensor edge, clamped to the
    /// `(0, pi]` range the type allows.
    pub fn with_projection(&self, proj: LensProjection) -> Result<Self> {
        let half = unproject(proj, self.focal_px, self.sensor_width_px as f64 / 2.0)
            .unwrap_or(FRAC_PI_2)
            .min(FRAC_PI_2);
        Self::new(
            self.focal_px,
            self.sensor_width_px,
            self.pixel_pitch_um,
            2.0 * half,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    use proptest::prelude::*;

    const FISHEYE_4K_FOCAL: f64 = 1222.3;

    /// Taylor series for arctan, independent of libm.
    fn atan_series(x: f64) -> f64 {
        assert!(x.abs() < 0.5);
        let mut sum = 0.0;
        let mut term = x;
        let mut n = 0;
        while term.abs() > 1e-20 {
            sum += term / (2 * n + 1) as f64;
            term *= -x * x;
            n += 1;
        }
        sum
    }

    #[test]
    fn pinhole_at_45_degrees() {
        let r = project(LensProjection::Pinhole, 1000.0, FRAC_PI_4).unwrap();
        assert!((r - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn fisheye_edge_of_4k_sensor() {
        let r = project(
            LensProjection::EquidistantFisheye,
            FISHEYE_4K_FOCAL,
            FRAC_PI_2,
        )
        .unwrap();
        assert!((r - 1920.0).abs() <= 0.5, "{r}");
        assert_eq!(
            project(LensProjection::EquidistantFisheye, FISHEYE_4K_FOCAL, 0.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn pinhole_pole_is_rejected() {
        for theta in [FRAC_PI_2, -FRAC_PI_2, FRAC_PI_2 - 1e-10, 2.0] {
            assert!(matches!(
                project(LensProjection::Pinhole, 1000.0, theta),
                Err(crate::Error::Domain(_))
            ));
        }
        assert!(project(LensProjection::Pinhole, 1000.0, FRAC_PI_2 - 1e-8).is_ok());
    }

    #[test]
    fn non_positive_focal_is_rejected() {
        for proj in LensProjection::ALL {
            assert!(project(proj, 0.0, 0.1).is_err());
            assert!(project(proj, -1.0, 0.1).is_err());
            assert!(unproject(proj, 0.0, 1.0).is_err());
        }
    }

    #[test]
    fn fisheye_domain_is_closed_at_pi() {
        assert!(project(LensProjection::EquidistantFisheye, 10.0, PI).is_ok());
        assert!(project(LensProjection::EquidistantFisheye, 10.0, PI + 1e-12).is_err());
        assert!(unproject(LensProjection::EquidistantFisheye, 10.0, 10.0 * PI + 1e-9).is_err());
    }

    #[test]
    fn unproject_examples() {
        assert_eq!(
            unproject(LensProjection::Pinhole, 1000.0, 0.0).unwrap(),
            0.0
        );
        let t = unproject(LensProjection::EquidistantFisheye, FISHEYE_4K_FOCAL, 1920.0).unwrap();
        // 1222.3 is the rounded focal length, which leaves the edge ~1.1e-5 rad past pi/2.
        assert!((t - FRAC_PI_2).abs() < 2e-5, "{t}");
        let t = unproject(LensProjection::Pinhole, 1222.3, 122.23 / 2.0).unwrap();
        let expected = atan_series(0.05);
        assert!((expected - 0.0499584).abs() < 1e-7);
        assert!((t - expected).abs() < 1e-15);
    }

    #[test]
    fn fisheye_unproject_of_exact_focal_is_half_pi() {
        let f = focal_from_fov(LensProjection::EquidistantFisheye, 1920.0, FRAC_PI_2).unwrap();
        let t = unproject(LensProjection::EquidistantFisheye, f, 1920.0).unwrap();
        assert!((t - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn focal_from_fov_examples() {
        let f = focal_from_fov(LensProjection::EquidistantFisheye, 1920.0, FRAC_PI_2).unwrap();
        assert!((f - 1222.31).abs() < 0.05, "{f}");
        assert!(focal_from_fov(LensProjection::Pinhole, 1920.0, FRAC_PI_2).is_err());
        let f = focal_from_fov(LensProjection::Pinhole, 1000.0, FRAC_PI_4).unwrap();
        assert!((f - 1000.0).abs() < 1e-9);
        assert!(focal_from_fov(LensProjection::EquidistantFisheye, 1920.0, 0.0).is_err());
        assert!(focal_from_fov(LensProjection::EquidistantFisheye, 1920.0, 1.6).is_err());
        assert!(focal_from_fov(LensProjection::EquidistantFisheye, 0.0, 1.0).is_err());
    }

    #[test]
    fn intrinsics_from_fov_reach_the_sensor_edge() {
        let cam =
            CameraIntrinsics::from_fov(LensProjection::EquidistantFisheye, 3840, 2.1, PI).unwrap();
        let edge = project(
            LensProjection::EquidistantFisheye,
            cam.focal_px,
            cam.hfov_rad / 2.0,
        )
        .unwrap();
        assert!((edge - 1920.0).abs() <= 0.5);
        assert!(CameraIntrinsics::from_fov(LensProjection::Pinhole, 3840, 2.1, PI).is_err());
        assert!(CameraIntrinsics::new(1000.0, 1, 2.1, 1.0).is_err());
        assert!(CameraIntrinsics::new(1000.0, 640, 0.0, 1.0).is_err());
        assert!(CameraIntrinsics::new(1000.0, 640, 2.1, PI + 0.1).is_err());
    }

    #[test]
    fn swapping_to_pinhole_narrows_the_field_of_view() {
        let cam =
            CameraIntrinsics::from_fov(LensProjection::EquidistantFisheye, 3840, 2.1, PI).unwrap();
        let pin = cam.with_projection(LensProjection::Pinhole).unwrap();
        assert_eq!(pin.focal_px, cam.focal_px);
        assert!((pin.hfov_rad - 2.0 * (1920.0 / cam.focal_px).atan()).abs() < 1e-15);
        assert!(pin.hfov_rad < PI);
    }

    #[test]
    fn projection_names_parse_back() {
        for proj in LensProjection::ALL {
            assert_eq!(proj.name().parse::<LensProjection>().unwrap(), proj);
        }
        assert!("stereographic".parse::<LensProjection>().is_err());
    }

    fn angle_in(proj: LensProjection) -> impl Strategy<Value = f64> {
        match proj {
            LensProjection::Pinhole => -1.5..1.5f64,
            LensProjection::EquidistantFisheye => -PI..PI,
        }
    }

    proptest! {
        #[test]
        fn round_trip(theta in -1.5..1.5f64, focal in 1.0..5000.0f64, fisheye in any::<bool>()) {
            let proj = if fisheye { LensProjection::EquidistantFisheye } else { LensProjection::Pinhole };
            let r = project(proj, focal, theta).unwrap();
            let back = unproject(proj, focal, r).unwrap();
            prop_assert!((back - theta).abs() <= 1e-12 * theta.abs().max(1.0));
        }

        #[test]
        fn fisheye_round_trip_full_circle(theta in angle_in(LensProjection::EquidistantFisheye), focal in 1.0..5000.0f64) {
            let proj = LensProjection::EquidistantFisheye;
            let back = unproject(proj, focal, project(proj, focal, theta).unwrap()).unwrap();
            prop_assert!((back - theta).abs() <= 1e-12 * theta.abs().max(1.0));
        }

        #[test]
        fn radius_round_trip(frac in -1.0..1.0f64, focal in 500.0..5000.0f64, fisheye in any::<bool>()) {
            let proj = if fisheye { LensProjection::EquidistantFisheye } else { LensProjection::Pinhole };
            let radius = frac * focal * if fisheye { PI } else { 10.0 };
            let theta = unproject(proj, focal, radius).unwrap();
            let back = project(proj, focal, theta).unwrap();
            prop_assert!((back - radius).abs() <= 1e-12 * radius.abs().max(1.0));
        }

        #[test]
        fn odd_and_increasing(a in -1.5..1.5f64, b in -1.5..1.5f64, focal in 1.0..5000.0f64) {
            for proj in LensProjection::ALL {
                prop_assert_eq!(project(proj, focal, -a).unwrap(), -project(proj, focal, a).unwrap());
                if a < b {
                    prop_assert!(project(proj, focal, a).unwrap() < project(proj, focal, b).unwrap());
                }
            }
        }

        #[test]
        fn models_agree_on_axis(theta in -0.01..0.01f64, focal in 1.0..5000.0f64) {
            prop_assume!(theta != 0.0);
            let pin = project(LensProjection::Pinhole, focal, theta).unwrap();
            let fish = project(LensProjection::EquidistantFisheye, focal, theta).unwrap();
            prop_assert!(((pin - fish) / fish).abs() <= 1e-4);
        }
    }
}
