//! Point cloud augmentation: box-cage deformation of object points and
//! relabelling of points back-projected from a jittered 2D box.

mod deform;
mod depth;

pub use deform::{
    canonical_face_map, deform, sample_deformation, DeformBounds, DeformCage, DeformParams,
};
pub use depth::{backproject, fast_relabel, project, Box2d, DepthImage, Intrinsics};

use nalgebra::Vector3;

use crate::error::{invalid, Result};
use crate::real::Real;
use crate::so3::RotationMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Background,
    Object,
}

impl Label {
    pub fn as_u8(self) -> u8 {
        match self {
            Label::Background => 0,
            Label::Object => 1,
        }
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(Label::Background),
            1 => Some(Label::Object),
            _ => None,
        }
    }
}

/// N×3 points in meters with optional per-point labels.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<T: Real> {
    points: Vec<Vector3<T>>,
    labels: Option<Vec<Label>>,
}

impl<T: Real> PointCloud<T> {
    pub fn new(points: Vec<Vector3<T>>) -> Result<Self> {
        if points.iter().any(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(invalid("point cloud has non-finite coordinates"));
        }
        Ok(Self { points, labels: None })
    }

    pub fn with_labels(points: Vec<Vector3<T>>, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != points.len() {
            return Err(invalid(format!(
                "{} labels for {} points",
                labels.len(),
                points.len()
            )));
        }
        let mut cloud = Self::new(points)?;
        cloud.labels = Some(labels);
        Ok(cloud)
    }

    pub fn points(&self) -> &[Vector3<T>] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Whether point `i` is an object point. Unlabelled clouds are treated
    /// as already segmented, i.e. all object.
    pub fn is_object(&self, i: usize) -> bool {
        self.labels
            .as_ref()
            .is_none_or(|l| l[i] == Label::Object)
    }

    pub fn object_points(&self) -> impl Iterator<Item = &Vector3<T>> + '_ {
        self.points
            .iter()
            .enumerate()
            .filter(|(i, _)| self.is_object(*i))
            .map(|(_, p)| p)
    }

    /// Mean of the object points, `None` if there are none.
    pub fn object_mean(&self) -> Option<Vector3<T>> {
        let (sum, n) = self
            .object_points()
            .fold((Vector3::zeros(), 0usize), |(s, n), p| (s + p, n + 1));
        (n > 0).then(|| sum / T::lit(n as f64))
    }

    pub fn translated(&self, offset: &Vector3<T>) -> Self {
        Self {
            points: self.points.iter().map(|p| p + offset).collect(),
            labels: self.labels.clone(),
        }
    }

    pub(crate) fn map_object_points(&self, mut f: impl FnMut(&Vector3<T>) -> Vector3<T>) -> Self {
        let points = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| if self.is_object(i) { f(p) } else { *p })
            .collect();
        Self {
            points,
            labels: self.labels.clone(),
        }
    }
}

/// Rotation, translation (m) and box size `(x_o, y_o, z_o)` (m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose<T: Real> {
    pub r: RotationMatrix<T>,
    pub t: Vector3<T>,
    pub size: Vector3<T>,
}

impl<T: Real> Pose<T> {
    pub fn new(r: RotationMatrix<T>, t: Vector3<T>, size: Vector3<T>) -> Result<Self> {
        if size.iter().any(|s| !(*s > T::zero()) || !s.is_finite()) {
            return Err(invalid("pose size components must be positive"));
        }
        if t.iter().any(|c| !c.is_finite()) {
            return Err(invalid("pose translation is not finite"));
        }
        Ok(Self { r, t, size })
    }

    /// `R·x + t`
    pub fn transform(&self, x: &Vector3<T>) -> Vector3<T> {
        self.r.apply(x) + self.t
    }

    /// `Rᵀ(p − t)`
    pub fn to_canonical(&self, p: &Vector3<T>) -> Vector3<T> {
        self.r.matrix().tr_mul(&(p - self.t))
    }
}
