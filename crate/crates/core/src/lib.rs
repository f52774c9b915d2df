//! Depth and range error budgets for stereo rigs built from pinhole or
//! equidistant (f-theta) fisheye cameras.
//!
//! The crate is layered bottom-up:
//!
//! 1. [`projection`]: the two radial projection laws and focal length derivation.
//! 2. [`geometry`]: exact two-camera geometry, disparity and its inverse.
//! 3. [`analytic`]: closed-form first-order depth and range errors.
//! 4. [`oracle`]: finite-difference and Monte Carlo checks of those formulas.
//! 5. [`scenario`]: JSON scenarios, parameter sweeps, CSV tables and SVG plots.
//!
//! A word on terms: "error" here is whatever the disparity error `Δd` is taken
//! to be. Reading `Δd` as the standard deviation of repeated disparity
//! measurements makes the outputs precision figures, which is how the Monte
//! Carlo oracle uses it. Reading it as a bias or as one pixel of resolution
//! gives accuracy or resolution figures instead.

pub mod analytic;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod projection;
pub mod scenario;

pub use analytic::{ErrorBudgetRow, ErrorQuery};
pub use error::{Error, Result};
pub use geometry::{ObjectPose, StereoRig};
pub use oracle::MonteCarloSummary;
pub use projection::{CameraIntrinsics, LensProjection};
