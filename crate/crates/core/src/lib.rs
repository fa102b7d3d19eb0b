//! Evaluation stack for stereo point-tracking benchmarks.
//!
//! The crate is organised around the measurement pipeline:
//!
//! - [`dataset`] reads the on-disk benchmark layout and streams frames.
//! - [`imaging`] holds the pixel primitives used to turn infrared tattoo
//!   images into labelled point sets.
//! - [`geometry`] matches segments across the stereo pair and lifts them to
//!   millimetre-scale 3D positions.
//! - [`groundtruth`] wires the above into the `make-gt` pipeline.
//! - [`metrics`] computes threshold accuracy and latency scores.
//! - [`harness`] drives trackers frame by frame without lookahead.
//! - [`trackers`] contains the classical baselines.
//! - [`synth`] renders datasets with analytically known motion and depth.
//!
//! Data-parallel loops go through [`exec::Execution`], which uses rayon when
//! the `parallel` feature is enabled and falls back to plain iteration
//! otherwise.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod exec;
pub mod geometry;
pub mod groundtruth;
pub mod harness;
pub mod imaging;
pub mod metrics;
pub mod point;
pub mod synth;
pub mod trackers;

pub use exec::Execution;
pub use point::{Point2, Point3};
