//! Flexible vector-based rotation (FVR).
//!
//! A rotation `R` is carried by two vectors built from its base axes
//! `g0 = R·e_y` (green, the object's up/symmetry axis) and `r0 = R·e_x` (red):
//!
//! 1. green is rotated by `θ_r` about `r0` and scaled to `L_g`;
//! 2. red is rotated by `θ_g` about the rotated green direction and scaled
//!    to `L_r`.
//!
//! Step 2 rotates about the already-rotated green, so the two vectors stay
//! orthogonal for every parameter choice and the encoding is invertible on
//! the whole angle grid. With `θ_g = θ_r = 0` and unit lengths the vectors are
//! the first two columns of `R`, i.e. the R6D representation.
//!
//! Predictions carry a start and an end point per vector. Only `end − start`
//! enters the decode, so a common shift of all four points is invisible.

use std::f64::consts::TAU;

use nalgebra::Vector3;

use crate::error::{invalid, Error, Result};
use crate::real::Real;
use crate::so3::{gram_schmidt, rotate_about_axis, RotationMatrix};

/// The four free FVR parameters. Angles are in radians, stored in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FvrParams<T: Real> {
    /// Rotation of the red vector about the green one.
    pub theta_g: T,
    /// Rotation of the green vector about the red one.
    pub theta_r: T,
    pub l_g: T,
    pub l_r: T,
}

fn wrap_angle<T: Real>(a: T) -> T {
    let w = a.as_f64().rem_euclid(TAU);
    // rem_euclid may round up to exactly tau for tiny negative inputs.
    if w >= TAU {
        T::zero()
    } else {
        T::lit(w)
    }
}

impl<T: Real> FvrParams<T> {
    pub fn new(theta_g: T, theta_r: T, l_g: T, l_r: T) -> Result<Self> {
        if !(l_g > T::zero() && l_r > T::zero()) || !l_g.is_finite() || !l_r.is_finite() {
            return Err(invalid("FVR lengths must be positive and finite"));
        }
        if !theta_g.is_finite() || !theta_r.is_finite() {
            return Err(invalid("FVR angles must be finite"));
        }
        Ok(Self {
            theta_g: wrap_angle(theta_g),
            theta_r: wrap_angle(theta_r),
            l_g,
            l_r,
        })
    }

    /// Shared length `L` for both vectors, angles in degrees.
    pub fn from_degrees(length: T, theta_g_deg: T, theta_r_deg: T) -> Result<Self> {
        Self::new(
            theta_g_deg * T::pi() / T::lit(180.0),
            theta_r_deg * T::pi() / T::lit(180.0),
            length,
            length,
        )
    }

    /// `(0, 0, 1, 1)`: the parameters under which FVR coincides with R6D.
    pub fn r6d() -> Self {
        Self {
            theta_g: T::zero(),
            theta_r: T::zero(),
            l_g: T::one(),
            l_r: T::one(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymmetryClass {
    Asymmetric,
    /// Rotationally symmetric about the green axis; only green constrains R.
    AxisSymmetric,
}

/// Start and end points of the green and red vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FvrEncoding<T: Real> {
    pub green_start: Vector3<T>,
    pub green_end: Vector3<T>,
    pub red_start: Vector3<T>,
    pub red_end: Vector3<T>,
}

impl<T: Real> FvrEncoding<T> {
    /// Both vectors anchored at the origin.
    pub fn from_vectors(green: Vector3<T>, red: Vector3<T>) -> Self {
        Self {
            green_start: Vector3::zeros(),
            green_end: green,
            red_start: Vector3::zeros(),
            red_end: red,
        }
    }

    pub fn green(&self) -> Vector3<T> {
        self.green_end - self.green_start
    }

    pub fn red(&self) -> Vector3<T> {
        self.red_end - self.red_start
    }

    /// Flat layout: green start, green end, red start, red end (12 values).
    pub fn to_flat(&self) -> [T; 12] {
        let mut out = [T::zero(); 12];
        for (i, v) in [self.green_start, self.green_end, self.red_start, self.red_end]
            .iter()
            .enumerate()
        {
            out[3 * i..3 * i + 3].copy_from_slice(v.as_slice());
        }
        out
    }

    pub fn from_flat(v: &[T]) -> Result<Self> {
        if v.len() != 12 {
            return Err(invalid(format!("FVR encoding needs 12 values, got {}", v.len())));
        }
        let p = |i: usize| Vector3::new(v[3 * i], v[3 * i + 1], v[3 * i + 2]);
        Ok(Self {
            green_start: p(0),
            green_end: p(1),
            red_start: p(2),
            red_end: p(3),
        })
    }

    pub fn translated(&self, offset: &Vector3<T>) -> Self {
        Self {
            green_start: self.green_start + offset,
            green_end: self.green_end + offset,
            red_start: self.red_start + offset,
            red_end: self.red_end + offset,
        }
    }
}

pub fn fvr_encode<T: Real>(r: &RotationMatrix<T>, p: &FvrParams<T>) -> FvrEncoding<T> {
    let g0 = r.column(1);
    let r0 = r.column(0);
    let green = rotate_about_axis(&g0, &r0, p.theta_r);
    let red = rotate_about_axis(&r0, &green, p.theta_g);
    FvrEncoding::from_vectors(green * p.l_g, red * p.l_r)
}

/// Inverts [`fvr_encode`], also for noisy predictions.
///
/// The red direction is rotated back by `−θ_g` about the predicted green
/// direction, then the green direction back by `−θ_r` about the recovered red
/// axis, and the pair is orthonormalized red-first. Clean encodings are
/// recovered exactly; at `θ_g = θ_r = 0` this is the R6D Gram–Schmidt decode
/// of `(red, green)`. Lengths do not enter the result.
pub fn fvr_decode<T: Real>(e: &FvrEncoding<T>, p: &FvrParams<T>) -> Result<RotationMatrix<T>> {
    let tol = T::degenerate_tol();
    let green = e.green();
    let red = e.red();
    let (ng, nr) = (green.norm(), red.norm());
    if !(ng > tol) || !ng.is_finite() {
        return Err(Error::Degenerate("green vector has (near) zero length".into()));
    }
    if !(nr > tol) || !nr.is_finite() {
        return Err(Error::Degenerate("red vector has (near) zero length".into()));
    }
    let green_dir = green / ng;
    let red_base = rotate_about_axis(&(red / nr), &green_dir, -p.theta_g);
    let red_axis = red_base.normalize();
    let green_base = rotate_about_axis(&green_dir, &red_axis, -p.theta_r);
    gram_schmidt(&red_axis, &green_base).map_err(|_| {
        Error::Degenerate("green and red vectors are parallel after back-rotation".into())
    })
}

/// Angle between two green (up) vectors; the rotation error of an
/// axis-symmetric object.
pub fn rotation_from_green_only<T: Real>(green: &Vector3<T>, reference_green: &Vector3<T>) -> Result<T> {
    let (a, b) = (green.norm(), reference_green.norm());
    if !(a > T::zero()) || !(b > T::zero()) || !a.is_finite() || !b.is_finite() {
        return Err(invalid("green vectors must be non-zero"));
    }
    let (u, v) = (green / a, reference_green / b);
    // atan2 form keeps precision for nearly (anti)parallel vectors.
    Ok(u.cross(&v).norm().atan2(u.dot(&v)))
}
