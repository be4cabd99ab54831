//! Baseline rotation representations and conversions.
//!
//! Every representation converts through [`RotationMatrix`]. Conventions:
//!
//! * Euler angles are ZYX intrinsic: `R = Rz(yaw) · Ry(pitch) · Rx(roll)`.
//! * Quaternions are `(w, x, y, z)` and are canonicalized to `w ≥ 0` whenever
//!   they are produced by a decode, so regression targets are single-valued.
//!   When `w == 0` the first non-zero vector component is made positive.
//! * Axis-angle decodes return an angle in `[0, π]`; at zero angle the axis is
//!   `(0, 0, 1)`.
//! * R6D holds the first two columns of the matrix and decodes with
//!   Gram–Schmidt, first column first.

use std::fmt;
use std::ops::Mul;

use nalgebra::{Matrix3, Vector3};
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::real::Real;

/// A 3×3 orthonormal, right-handed matrix.
#[derive(Clone, Copy, PartialEq)]
pub struct RotationMatrix<T: Real>(Matrix3<T>);

impl<T: Real> fmt::Debug for RotationMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("RotationMatrix").field(&self.to_row_major()).finish()
    }
}

impl<T: Real> Default for RotationMatrix<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Real> RotationMatrix<T> {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Validates orthonormality and `det = +1` within [`Real::orthonormal_tol`].
    pub fn new(m: Matrix3<T>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(invalid("rotation matrix has non-finite entries"));
        }
        let tol = T::orthonormal_tol();
        let gram = m.transpose() * m - Matrix3::identity();
        if gram.iter().any(|v| v.abs() > tol) {
            return Err(invalid("matrix is not orthonormal"));
        }
        if (m.determinant() - T::one()).abs() > tol {
            return Err(invalid("matrix determinant is not +1"));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix the caller guarantees to be a rotation.
    pub fn new_unchecked(m: Matrix3<T>) -> Self {
        Self(m)
    }

    pub fn from_row_major(m: &[T; 9]) -> Result<Self> {
        Self::new(Matrix3::from_row_slice(m))
    }

    /// Builds a rotation from three column vectors without validation.
    pub(crate) fn from_columns_unchecked(x: Vector3<T>, y: Vector3<T>, z: Vector3<T>) -> Self {
        Self(Matrix3::from_columns(&[x, y, z]))
    }

    /// Closest rotation in the Frobenius sense, via SVD with reflection fix.
    pub fn nearest(m: &Matrix3<T>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(invalid("matrix has non-finite entries"));
        }
        let svd = m.svd(true, true);
        let (u, v_t) = match (svd.u, svd.v_t) {
            (Some(u), Some(v_t)) => (u, v_t),
            _ => return Err(Error::Degenerate("SVD did not converge".into())),
        };
        let mut d = Matrix3::identity();
        if (u * v_t).determinant() < T::zero() {
            d[(2, 2)] = -T::one();
        }
        Ok(Self(u * d * v_t))
    }

    pub fn matrix(&self) -> &Matrix3<T> {
        &self.0
    }

    pub fn into_inner(self) -> Matrix3<T> {
        self.0
    }

    pub fn to_row_major(&self) -> [T; 9] {
        let m = &self.0;
        [
            m[(0, 0)],
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 0)],
            m[(1, 1)],
            m[(1, 2)],
            m[(2, 0)],
            m[(2, 1)],
            m[(2, 2)],
        ]
    }

    pub fn column(&self, i: usize) -> Vector3<T> {
        self.0.column(i).into_owned()
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn apply(&self, v: &Vector3<T>) -> Vector3<T> {
        self.0 * v
    }

    pub fn about_x(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Self(Matrix3::new(o, z, z, z, c, -s, z, s, c))
    }

    pub fn about_y(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Self(Matrix3::new(c, z, s, z, o, z, -s, z, c))
    }

    pub fn about_z(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Self(Matrix3::new(c, -s, z, s, c, z, z, z, o))
    }

    /// Rotation by `angle` about a unit `axis` (Rodrigues).
    pub fn about_axis(axis: &Vector3<T>, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let k = axis;
        let skew = Matrix3::new(
            T::zero(),
            -k.z,
            k.y,
            k.z,
            T::zero(),
            -k.x,
            -k.y,
            k.x,
            T::zero(),
        );
        Self(Matrix3::identity() * c + k * k.transpose() * (T::one() - c) + skew * s)
    }

    /// Casts to another scalar precision without re-validating.
    pub fn cast<U: Real>(&self) -> RotationMatrix<U> {
        RotationMatrix(self.0.map(|v| U::lit(v.as_f64())))
    }
}

impl<T: Real> Mul for RotationMatrix<T> {
    type Output = RotationMatrix<T>;

    fn mul(self, rhs: Self) -> Self::Output {
        RotationMatrix(self.0 * rhs.0)
    }
}

impl<T: Real> Mul<&RotationMatrix<T>> for &RotationMatrix<T> {
    type Output = RotationMatrix<T>;

    fn mul(self, rhs: &RotationMatrix<T>) -> Self::Output {
        RotationMatrix(self.0 * rhs.0)
    }
}

/// Unit quaternion `(w, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion<T: Real> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Quaternion<T> {
    pub fn new(w: T, x: T, y: T, z: T) -> Self {
        Self { w, x, y, z }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::zero())
    }

    pub fn norm(&self) -> T {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn to_array(&self) -> [T; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn from_slice(v: &[T]) -> Result<Self> {
        match v {
            [w, x, y, z] => Ok(Self::new(*w, *x, *y, *z)),
            _ => Err(invalid(format!("quaternion needs 4 values, got {}", v.len()))),
        }
    }

    /// Divides by the norm. Used to renormalize independently predicted
    /// components jointly.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > T::degenerate_tol()) || !n.is_finite() {
            return Err(Error::Degenerate("quaternion has zero norm".into()));
        }
        Ok(Self::new(self.w / n, self.x / n, self.y / n, self.z / n))
    }

    /// Picks the representative with `w ≥ 0` (first non-zero of x, y, z
    /// positive when `w == 0`).
    pub fn canonical(&self) -> Self {
        let flip = if self.w != T::zero() {
            self.w < T::zero()
        } else {
            [self.x, self.y, self.z]
                .into_iter()
                .find(|c| *c != T::zero())
                .is_some_and(|c| c < T::zero())
        };
        if flip {
            Self::new(-self.w, -self.x, -self.y, -self.z)
        } else {
            *self
        }
    }
}

/// ZYX intrinsic Euler angles in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles<T: Real> {
    pub yaw: T,
    pub pitch: T,
    pub roll: T,
}

impl<T: Real> EulerAngles<T> {
    pub fn new(yaw: T, pitch: T, roll: T) -> Self {
        Self { yaw, pitch, roll }
    }

    pub fn to_array(&self) -> [T; 3] {
        [self.yaw, self.pitch, self.roll]
    }
}

/// Result of [`matrix_to_euler`]. At gimbal lock (pitch within 1e-7 rad of
/// ±π/2) `roll` is set to zero and all of the remaining rotation about the
/// vertical is reported in `yaw`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerDecode<T: Real> {
    pub angles: EulerAngles<T>,
    pub gimbal_lock: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAngle<T: Real> {
    pub axis: Vector3<T>,
    pub angle: T,
}

impl<T: Real> AxisAngle<T> {
    pub fn new(axis: Vector3<T>, angle: T) -> Self {
        Self { axis, angle }
    }

    /// Splits a rotation vector into axis and angle. A zero vector yields the
    /// default axis `(0, 0, 1)`.
    pub fn from_rotation_vector(v: &Vector3<T>) -> Self {
        let angle = v.norm();
        if angle > T::zero() {
            Self::new(v / angle, angle)
        } else {
            Self::new(Vector3::z(), T::zero())
        }
    }

    pub fn rotation_vector(&self) -> Vector3<T> {
        self.axis * self.angle
    }
}

/// First two columns of a rotation matrix (unnormalized when predicted).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct R6d<T: Real> {
    pub a1: Vector3<T>,
    pub a2: Vector3<T>,
}

impl<T: Real> R6d<T> {
    pub fn new(a1: Vector3<T>, a2: Vector3<T>) -> Self {
        Self { a1, a2 }
    }

    pub fn to_array(&self) -> [T; 6] {
        [self.a1.x, self.a1.y, self.a1.z, self.a2.x, self.a2.y, self.a2.z]
    }

    pub fn from_slice(v: &[T]) -> Result<Self> {
        if v.len() != 6 {
            return Err(invalid(format!("r6d needs 6 values, got {}", v.len())));
        }
        Ok(Self::new(
            Vector3::new(v[0], v[1], v[2]),
            Vector3::new(v[3], v[4], v[5]),
        ))
    }
}

fn check_unit<T: Real>(norm: T, what: &str) -> Result<()> {
    if !norm.is_finite() || (norm - T::one()).abs() > T::unit_tol() {
        return Err(invalid(format!("{what} is not unit length (norm {norm})")));
    }
    Ok(())
}

pub fn quat_to_matrix<T: Real>(q: &Quaternion<T>) -> Result<RotationMatrix<T>> {
    check_unit(q.norm(), "quaternion")?;
    let q = q.normalized()?;
    let (w, x, y, z) = (q.w, q.x, q.y, q.z);
    let one = T::one();
    let two = T::lit(2.0);
    Ok(RotationMatrix(Matrix3::new(
        one - two * (y * y + z * z),
        two * (x * y - w * z),
        two * (x * z + w * y),
        two * (x * y + w * z),
        one - two * (x * x + z * z),
        two * (y * z - w * x),
        two * (x * z - w * y),
        two * (y * z + w * x),
        one - two * (x * x + y * y),
    )))
}

/// Shepperd's method, canonicalized to `w ≥ 0`.
pub fn matrix_to_quat<T: Real>(r: &RotationMatrix<T>) -> Quaternion<T> {
    let m = &r.0;
    let one = T::one();
    let two = T::lit(2.0);
    let quarter = T::lit(0.25);
    let trace = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
    let q = if trace > T::zero() {
        let s = (trace + one).sqrt() * two;
        Quaternion::new(
            quarter * s,
            (m[(2, 1)] - m[(1, 2)]) / s,
            (m[(0, 2)] - m[(2, 0)]) / s,
            (m[(1, 0)] - m[(0, 1)]) / s,
        )
    } else if m[(0, 0)] > m[(1, 1)] && m[(0, 0)] > m[(2, 2)] {
        let s = (one + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt() * two;
        Quaternion::new(
            (m[(2, 1)] - m[(1, 2)]) / s,
            quarter * s,
            (m[(0, 1)] + m[(1, 0)]) / s,
            (m[(0, 2)] + m[(2, 0)]) / s,
        )
    } else if m[(1, 1)] > m[(2, 2)] {
        let s = (one + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]).sqrt() * two;
        Quaternion::new(
            (m[(0, 2)] - m[(2, 0)]) / s,
            (m[(0, 1)] + m[(1, 0)]) / s,
            quarter * s,
            (m[(1, 2)] + m[(2, 1)]) / s,
        )
    } else {
        let s = (one + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).sqrt() * two;
        Quaternion::new(
            (m[(1, 0)] - m[(0, 1)]) / s,
            (m[(0, 2)] + m[(2, 0)]) / s,
            (m[(1, 2)] + m[(2, 1)]) / s,
            quarter * s,
        )
    };
    let n = q.norm();
    Quaternion::new(q.w / n, q.x / n, q.y / n, q.z / n).canonical()
}

pub fn euler_to_matrix<T: Real>(e: &EulerAngles<T>) -> RotationMatrix<T> {
    let (sy, cy) = e.yaw.sin_cos();
    let (sp, cp) = e.pitch.sin_cos();
    let (sr, cr) = e.roll.sin_cos();
    RotationMatrix(Matrix3::new(
        cy * cp,
        cy * sp * sr - sy * cr,
        cy * sp * cr + sy * sr,
        sy * cp,
        sy * sp * sr + cy * cr,
        sy * sp * cr - cy * sr,
        -sp,
        cp * sr,
        cp * cr,
    ))
}

/// Pitch distance from ±π/2 below which the decode reports gimbal lock.
pub const GIMBAL_LOCK_TOL: f64 = 1e-7;

pub fn matrix_to_euler<T: Real>(r: &RotationMatrix<T>) -> EulerDecode<T> {
    let m = &r.0;
    let cos_pitch = (m[(0, 0)] * m[(0, 0)] + m[(1, 0)] * m[(1, 0)]).sqrt();
    let pitch = (-m[(2, 0)]).atan2(cos_pitch);
    if cos_pitch < T::lit(GIMBAL_LOCK_TOL.sin()) {
        // Only yaw − roll (or yaw + roll) is observable; fold it into yaw.
        let yaw = (-m[(0, 1)]).atan2(m[(1, 1)]);
        return EulerDecode {
            angles: EulerAngles::new(yaw, pitch, T::zero()),
            gimbal_lock: true,
        };
    }
    EulerDecode {
        angles: EulerAngles::new(
            m[(1, 0)].atan2(m[(0, 0)]),
            pitch,
            m[(2, 1)].atan2(m[(2, 2)]),
        ),
        gimbal_lock: false,
    }
}

pub fn axis_angle_to_matrix<T: Real>(aa: &AxisAngle<T>) -> Result<RotationMatrix<T>> {
    let n = aa.axis.norm();
    check_unit(n, "rotation axis")?;
    if !aa.angle.is_finite() {
        return Err(invalid("rotation angle is not finite"));
    }
    Ok(RotationMatrix::about_axis(&(aa.axis / n), aa.angle))
}

/// Decodes through the quaternion, which stays accurate near 0 and π where
/// `acos` of the trace does not.
pub fn matrix_to_axis_angle<T: Real>(r: &RotationMatrix<T>) -> AxisAngle<T> {
    let q = matrix_to_quat(r);
    let v = Vector3::new(q.x, q.y, q.z);
    let s = v.norm();
    if s <= T::default_epsilon() {
        return AxisAngle::new(Vector3::z(), T::zero());
    }
    AxisAngle::new(v / s, T::lit(2.0) * s.atan2(q.w))
}

/// Gram–Schmidt on two column vectors: `b1 = a1/‖a1‖`, `b2` is `a2` with its
/// `b1` component removed, `b3 = b1 × b2`.
pub fn gram_schmidt<T: Real>(a1: &Vector3<T>, a2: &Vector3<T>) -> Result<RotationMatrix<T>> {
    let tol = T::degenerate_tol();
    let n1 = a1.norm();
    if !(n1 > tol) || !n1.is_finite() {
        return Err(invalid("first vector has (near) zero length"));
    }
    let b1 = a1 / n1;
    let perp = a2 - b1 * b1.dot(a2);
    let n2 = perp.norm();
    if !(n2 > tol * a2.norm().max(T::one())) || !n2.is_finite() {
        return Err(invalid("vectors are (near) parallel"));
    }
    let b2 = perp / n2;
    let b3 = b1.cross(&b2);
    Ok(RotationMatrix::from_columns_unchecked(b1, b2, b3))
}

pub fn r6d_to_matrix<T: Real>(r: &R6d<T>) -> Result<RotationMatrix<T>> {
    gram_schmidt(&r.a1, &r.a2)
}

pub fn matrix_to_r6d<T: Real>(r: &RotationMatrix<T>) -> R6d<T> {
    R6d::new(r.column(0), r.column(1))
}

/// Angle of `R1ᵀR2`, in `[0, π]`.
///
/// Evaluated as `atan2(sin θ, cos θ)` with `sin θ` taken from the
/// antisymmetric part, which equals `acos((tr − 1)/2)` on SO(3) but keeps
/// full precision near 0 where `acos` loses half the digits.
pub fn geodesic_error<T: Real>(r1: &RotationMatrix<T>, r2: &RotationMatrix<T>) -> T {
    let d = r1.0.transpose() * r2.0;
    let two = T::lit(2.0);
    let sin = Vector3::new(
        d[(2, 1)] - d[(1, 2)],
        d[(0, 2)] - d[(2, 0)],
        d[(1, 0)] - d[(0, 1)],
    )
    .norm()
        / two;
    let cos = ((d.trace() - T::one()) / two).clamp(-T::one(), T::one());
    sin.atan2(cos)
}

/// Rodrigues rotation of `v` about unit `axis`. `angle == 0` returns `v`.
pub fn rotate_about_axis<T: Real>(v: &Vector3<T>, axis: &Vector3<T>, angle: T) -> Vector3<T> {
    if angle == T::zero() {
        return *v;
    }
    let (s, c) = angle.sin_cos();
    v * c + axis.cross(v) * s + axis * (axis.dot(v) * (T::one() - c))
}

/// Haar-uniform unit quaternion (Shoemake's subgroup algorithm), canonical.
pub fn random_quaternion<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Quaternion<T> {
    let tau = std::f64::consts::TAU;
    let u1: f64 = rng.gen();
    let u2: f64 = rng.gen();
    let u3: f64 = rng.gen();
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let q = Quaternion::new(
        T::lit(b * (tau * u3).cos()),
        T::lit(a * (tau * u2).sin()),
        T::lit(a * (tau * u2).cos()),
        T::lit(b * (tau * u3).sin()),
    );
    q.normalized().unwrap_or_else(|_| Quaternion::identity()).canonical()
}

pub fn random_rotation<T: Real, R: Rng + ?Sized>(rng: &mut R) -> RotationMatrix<T> {
    let q = random_quaternion::<T, R>(rng);
    quat_to_matrix(&q).expect("sampled quaternion is unit")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};

    fn assert_rotation(r: &RotationMatrix<f64>) {
        RotationMatrix::new(*r.matrix()).expect("valid rotation");
    }

    #[test]
    fn identity_quaternion() {
        let r = quat_to_matrix(&Quaternion::<f64>::identity()).unwrap();
        assert_eq!(r.into_inner(), Matrix3::identity());
    }

    #[test]
    fn quarter_turn_about_z() {
        let h = 2f64.sqrt() / 2.0;
        let r = quat_to_matrix(&Quaternion::new(h, 0.0, 0.0, h)).unwrap();
        let expected = Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        assert_abs_diff_eq!(r.into_inner(), expected, epsilon = 1e-15);
    }

    #[test]
    fn non_unit_quaternion_rejected() {
        let err = quat_to_matrix(&Quaternion::new(1.0, 0.1, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn canonical_sign() {
        let q = Quaternion::new(-0.5, 0.5, -0.5, 0.5).canonical();
        assert_eq!(q.to_array(), [0.5, -0.5, 0.5, -0.5]);
        let q = Quaternion::new(0.0, -1.0, 0.0, 0.0).canonical();
        assert_eq!(q.to_array(), [0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn euler_zero_is_identity() {
        let r = euler_to_matrix(&EulerAngles::new(0.0, 0.0, 0.0));
        assert_eq!(r.into_inner(), Matrix3::identity());
    }

    #[test]
    fn euler_order_is_zyx() {
        let e = EulerAngles::new(0.3, -0.4, 1.1);
        let expected = RotationMatrix::about_z(0.3) * RotationMatrix::about_y(-0.4)
            * RotationMatrix::about_x(1.1);
        assert_abs_diff_eq!(
            euler_to_matrix(&e).into_inner(),
            expected.into_inner(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn gimbal_lock_is_flagged() {
        for pitch in [FRAC_PI_2, -FRAC_PI_2] {
            let r = euler_to_matrix(&EulerAngles::new(0.7, pitch, 0.2));
            let d = matrix_to_euler(&r);
            assert!(d.gimbal_lock);
            assert_eq!(d.angles.roll, 0.0);
            assert!(geodesic_error(&euler_to_matrix(&d.angles), &r) < 1e-12);
        }
        let d = matrix_to_euler(&euler_to_matrix(&EulerAngles::new(0.7, 1.5, 0.2)));
        assert!(!d.gimbal_lock);
    }

    #[test]
    fn r6d_orthonormal_input() {
        let r = r6d_to_matrix(&R6d::<f64>::new(Vector3::x(), Vector3::y())).unwrap();
        assert_eq!(r.into_inner(), Matrix3::identity());
    }

    #[test]
    fn r6d_hand_gram_schmidt() {
        // b1 = e1, b2 = normalize((1,1,0) − e1) = e2, b3 = e3
        let r = r6d_to_matrix(&R6d::new(Vector3::new(2.0, 0.0, 0.0), Vector3::new(1.0, 1.0, 0.0)))
            .unwrap();
        assert_abs_diff_eq!(r.into_inner(), Matrix3::identity(), epsilon = 1e-15);
    }

    #[test]
    fn r6d_parallel_rejected() {
        let p = R6d::new(Vector3::new(1.0, 2.0, 3.0), Vector3::new(-2.0, -4.0, -6.0));
        assert!(matches!(r6d_to_matrix(&p), Err(Error::InvalidInput(_))));
        let z = R6d::<f64>::new(Vector3::zeros(), Vector3::y());
        assert!(r6d_to_matrix(&z).is_err());
    }

    #[test]
    fn axis_angle_zero_uses_default_axis() {
        let aa = matrix_to_axis_angle(&RotationMatrix::<f64>::identity());
        assert_eq!(aa.angle, 0.0);
        assert_eq!(aa.axis, Vector3::z());
    }

    #[test]
    fn axis_angle_half_turn() {
        let axis = Vector3::new(1.0, 2.0, -2.0) / 3.0;
        let r = axis_angle_to_matrix(&AxisAngle::new(axis, PI)).unwrap();
        let aa = matrix_to_axis_angle(&r);
        assert_abs_diff_eq!(aa.angle, PI, epsilon = 1e-12);
        assert!(geodesic_error(&axis_angle_to_matrix(&aa).unwrap(), &r) < 1e-12);
    }

    #[test]
    fn geodesic_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r: RotationMatrix<f64> = random_rotation(&mut rng);
        assert_eq!(geodesic_error(&r, &r), 0.0);
        let axis = Vector3::new(0.2, -0.5, 0.9).normalize();
        let r30 = RotationMatrix::about_axis(&axis, FRAC_PI_6);
        assert_abs_diff_eq!(
            geodesic_error(&RotationMatrix::identity(), &r30),
            FRAC_PI_6,
            epsilon = 1e-15
        );
        let flip = RotationMatrix::about_x(PI);
        assert_abs_diff_eq!(geodesic_error(&RotationMatrix::identity(), &flip), PI, epsilon = 1e-15);
    }

    #[test]
    fn rodrigues_examples() {
        let v = rotate_about_axis(&Vector3::x(), &Vector3::z(), FRAC_PI_2);
        assert_abs_diff_eq!(v, Vector3::y(), epsilon = 1e-16);
        let v = Vector3::new(0.3, -1.2, 4.0);
        assert_eq!(rotate_about_axis(&v, &Vector3::y(), 0.0), v);
    }

    #[test]
    fn nearest_rotation_recovers_perturbed() {
        let r = RotationMatrix::about_axis(&Vector3::new(0.0, 0.6, 0.8), 1.0);
        let noisy = r.into_inner() * 1.5 + Matrix3::from_element(1e-3);
        let p = RotationMatrix::nearest(&noisy).unwrap();
        assert_rotation(&p);
        assert!(geodesic_error(&p, &r) < 1e-2);
    }

    #[test]
    fn validation_rejects_reflection() {
        let m = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        assert!(RotationMatrix::new(m).is_err());
        assert!(RotationMatrix::new(Matrix3::identity() * 1.01).is_err());
    }

    #[test]
    fn f32_conversions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let r: RotationMatrix<f32> = random_rotation(&mut rng);
            RotationMatrix::new(*r.matrix()).unwrap();
            let back = quat_to_matrix(&matrix_to_quat(&r)).unwrap();
            assert!(geodesic_error(&r, &back) < 1e-3);
        }
    }
}
