//! Rotation representations and 6D pose geometry.
//!
//! The crate covers the classic rotation parameterisations and the flexible
//! vector-based rotation (FVR), the rotation losses used to train them,
//! a small dense regressor that fits rotations of synthetic point clouds,
//! box-cage point cloud augmentation, residual pose targets with the
//! Umeyama solver, and the usual pose-estimation metrics.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar for the common cases.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod augment;
pub mod error;
pub mod fvr;
pub mod io;
pub mod losses;
pub mod metrics;
pub mod pose;
pub mod real;
pub mod regressor;
pub mod seed;
pub mod so3;

pub use error::{Error, Result};
pub use real::Real;

pub type RotationMatrix64 = so3::RotationMatrix<f64>;
pub type RotationMatrix32 = so3::RotationMatrix<f32>;
pub type Quaternion64 = so3::Quaternion<f64>;
pub type Quaternion32 = so3::Quaternion<f32>;
pub type EulerAngles64 = so3::EulerAngles<f64>;
pub type AxisAngle64 = so3::AxisAngle<f64>;
pub type R6d64 = so3::R6d<f64>;

pub type FvrParams64 = fvr::FvrParams<f64>;
pub type FvrParams32 = fvr::FvrParams<f32>;
pub type FvrEncoding64 = fvr::FvrEncoding<f64>;
pub type FvrEncoding32 = fvr::FvrEncoding<f32>;

pub type ModelPoints64 = losses::ModelPoints<f64>;
pub type PointCloud64 = augment::PointCloud<f64>;
pub type PointCloud32 = augment::PointCloud<f32>;
pub type Pose64 = augment::Pose<f64>;
pub type Pose32 = augment::Pose<f32>;
pub type DepthImage64 = augment::DepthImage<f64>;
pub type OrientedBox64 = metrics::OrientedBox<f64>;

pub type DenseNet64 = regressor::DenseNet<f64>;
pub type DenseNet32 = regressor::DenseNet<f32>;
