//! Residual translation/size targets and the Umeyama similarity solver.

use nalgebra::{Matrix3, Vector3};

use crate::augment::{PointCloud, Pose};
use crate::error::{invalid, Error, Result};
use crate::real::Real;
use crate::so3::RotationMatrix;

/// Mean object size `(x̄, ȳ, z̄)` of one category, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CategoryStats<T: Real> {
    pub mean_size: Vector3<T>,
}

impl<T: Real> CategoryStats<T> {
    pub fn new(mean_size: Vector3<T>) -> Result<Self> {
        if mean_size.iter().any(|s| !(*s > T::zero()) || !s.is_finite()) {
            return Err(invalid("category mean size must be positive"));
        }
        Ok(Self { mean_size })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualTargets<T: Real> {
    /// `t_gt − mean(object points)`
    pub translation_residual: Vector3<T>,
    /// `size_gt − mean_size`
    pub size_residual: Vector3<T>,
}

fn object_mean<T: Real>(cloud: &PointCloud<T>) -> Result<Vector3<T>> {
    cloud
        .object_mean()
        .ok_or_else(|| invalid("cloud has no object points"))
}

pub fn residual_targets<T: Real>(
    cloud: &PointCloud<T>,
    pose_gt: &Pose<T>,
    stats: &CategoryStats<T>,
) -> Result<ResidualTargets<T>> {
    let mean = object_mean(cloud)?;
    Ok(ResidualTargets {
        translation_residual: pose_gt.t - mean,
        size_residual: pose_gt.size - stats.mean_size,
    })
}

/// Inverse of [`residual_targets`].
pub fn assemble_pose<T: Real>(
    cloud: &PointCloud<T>,
    residuals: &ResidualTargets<T>,
    rotation: &RotationMatrix<T>,
    stats: &CategoryStats<T>,
) -> Result<Pose<T>> {
    let mean = object_mean(cloud)?;
    let size = stats.mean_size + residuals.size_residual;
    if size.iter().any(|s| !(*s > T::zero())) {
        return Err(Error::InvalidPrediction(format!(
            "assembled size {:?} is not positive",
            size.as_slice()
        )));
    }
    Pose::new(*rotation, mean + residuals.translation_residual, size)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity<T: Real> {
    pub scale: T,
    pub rotation: RotationMatrix<T>,
    pub translation: Vector3<T>,
}

impl<T: Real> Similarity<T> {
    pub fn apply(&self, p: &Vector3<T>) -> Vector3<T> {
        self.rotation.apply(p) * self.scale + self.translation
    }
}

/// Least-squares similarity `dst ≈ s·R·src + t` (Umeyama). With
/// `with_scale == false` the scale is fixed to exactly 1.
pub fn umeyama<T: Real>(src: &[Vector3<T>], dst: &[Vector3<T>], with_scale: bool) -> Result<Similarity<T>> {
    if src.len() != dst.len() {
        return Err(invalid(format!(
            "{} source points for {} destination points",
            src.len(),
            dst.len()
        )));
    }
    if src.len() < 3 {
        return Err(Error::RankDeficient("need at least 3 correspondences".into()));
    }
    let n = T::lit(src.len() as f64);
    let mu_s = src.iter().fold(Vector3::zeros(), |a, p| a + p) / n;
    let mu_d = dst.iter().fold(Vector3::zeros(), |a, p| a + p) / n;
    let mut cov = Matrix3::zeros();
    let mut var_s = T::zero();
    for (s, d) in src.iter().zip(dst) {
        let (cs, cd) = (s - mu_s, d - mu_d);
        cov += cd * cs.transpose();
        var_s += cs.norm_squared();
    }
    cov /= n;
    var_s /= n;

    // Collinear sources leave the rotation about their line undetermined.
    let mut src_cov = Matrix3::zeros();
    for s in src {
        let cs = s - mu_s;
        src_cov += cs * cs.transpose();
    }
    let mut ev: Vec<T> = src_cov.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    if !(ev[0] > T::zero()) || !(ev[1] > T::lit(1e-10) * ev[0]) {
        return Err(Error::RankDeficient("source points are collinear or coincident".into()));
    }

    let svd = cov.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::RankDeficient("SVD did not converge".into())),
    };
    let mut signs = Vector3::repeat(T::one());
    if (u * v_t).determinant() < T::zero() {
        // nalgebra sorts singular values in decreasing order.
        signs[2] = -T::one();
    }
    let r = u * Matrix3::from_diagonal(&signs) * v_t;
    let scale = if with_scale {
        svd.singular_values.component_mul(&signs).sum() / var_s
    } else {
        T::one()
    };
    let rotation = RotationMatrix::new_unchecked(r);
    let translation = mu_d - rotation.apply(&mu_s) * scale;
    Ok(Similarity {
        scale,
        rotation,
        translation,
    })
}
