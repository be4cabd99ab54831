//! Scalar abstraction shared by every module.
//!
//! All geometry is generic over [`Real`], which is implemented for `f32` and
//! `f64`. Tolerances live on the trait because a single numeric threshold
//! cannot serve both precisions.

use nalgebra::RealField;
use num_traits::{FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + FloatConst + Send + Sync + 'static
{
    /// Per-entry tolerance for `mᵀm = I` and `det(m) = 1`.
    fn orthonormal_tol() -> Self;
    /// Accepted deviation of a unit quaternion / unit axis norm from 1.
    fn unit_tol() -> Self;
    /// Norm below which a vector is treated as zero or two vectors as parallel.
    fn degenerate_tol() -> Self;

    /// Converts an `f64` literal. Infallible for the provided implementations.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f64 {
    fn orthonormal_tol() -> Self {
        1e-9
    }
    fn unit_tol() -> Self {
        1e-6
    }
    fn degenerate_tol() -> Self {
        1e-9
    }
}

impl Real for f32 {
    fn orthonormal_tol() -> Self {
        1e-4
    }
    fn unit_tol() -> Self {
        1e-4
    }
    fn degenerate_tol() -> Self {
        1e-6
    }
}
