//! Pinhole back-projection and point-wise relabelling for jittered 2D boxes.

use nalgebra::Vector3;

use super::{Label, PointCloud};
use crate::error::{invalid, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intrinsics<T: Real> {
    pub fx: T,
    pub fy: T,
    pub cx: T,
    pub cy: T,
}

/// Row-major depth in meters; 0 marks an invalid pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthImage<T: Real> {
    width: usize,
    height: usize,
    depth: Vec<T>,
    intrinsics: Intrinsics<T>,
}

impl<T: Real> DepthImage<T> {
    pub fn new(width: usize, height: usize, depth: Vec<T>, intrinsics: Intrinsics<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(invalid("depth image must be at least 1×1"));
        }
        if depth.len() != width * height {
            return Err(invalid(format!(
                "depth buffer has {} values, expected {}",
                depth.len(),
                width * height
            )));
        }
        if depth.iter().any(|z| !(*z >= T::zero()) || !z.is_finite()) {
            return Err(invalid("depth values must be finite and non-negative"));
        }
        let Intrinsics { fx, fy, cx, cy } = intrinsics;
        if !(fx > T::zero() && fy > T::zero()) || !cx.is_finite() || !cy.is_finite() {
            return Err(invalid("focal lengths must be positive"));
        }
        Ok(Self {
            width,
            height,
            depth,
            intrinsics,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn intrinsics(&self) -> &Intrinsics<T> {
        &self.intrinsics
    }

    pub fn depth(&self) -> &[T] {
        &self.depth
    }

    pub fn at(&self, u: usize, v: usize) -> T {
        self.depth[v * self.width + u]
    }

    fn zero_region(&mut self, region: &Box2d) {
        for v in region.rows() {
            for u in region.cols() {
                self.depth[v * self.width + u] = T::zero();
            }
        }
    }
}

/// Half-open pixel box `[x_min, x_max) × [y_min, y_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Box2d {
    pub x_min: i64,
    pub y_min: i64,
    pub x_max: i64,
    pub y_max: i64,
}

impl Box2d {
    pub fn new(x_min: i64, y_min: i64, x_max: i64, y_max: i64) -> Result<Self> {
        let b = Self {
            x_min,
            y_min,
            x_max,
            y_max,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.x_min >= self.x_max || self.y_min >= self.y_max {
            return Err(invalid(format!("degenerate box {self:?}")));
        }
        Ok(())
    }

    pub fn contains(&self, u: i64, v: i64) -> bool {
        (self.x_min..self.x_max).contains(&u) && (self.y_min..self.y_max).contains(&v)
    }

    pub fn intersect(&self, other: &Box2d) -> Option<Box2d> {
        let b = Box2d {
            x_min: self.x_min.max(other.x_min),
            y_min: self.y_min.max(other.y_min),
            x_max: self.x_max.min(other.x_max),
            y_max: self.y_max.min(other.y_max),
        };
        (b.x_min < b.x_max && b.y_min < b.y_max).then_some(b)
    }

    /// Clamps to a `width × height` image; `None` if nothing is left.
    pub fn clamp_to(&self, width: usize, height: usize) -> Option<Box2d> {
        self.intersect(&Box2d {
            x_min: 0,
            y_min: 0,
            x_max: width as i64,
            y_max: height as i64,
        })
    }

    fn rows(&self) -> std::ops::Range<usize> {
        self.y_min as usize..self.y_max as usize
    }

    fn cols(&self) -> std::ops::Range<usize> {
        self.x_min as usize..self.x_max as usize
    }
}

/// Back-projects every pixel of `region` with `z > 0` as
/// `((u − cx)z/fx, (v − cy)z/fy, z)`, in row-major pixel order.
pub fn backproject<T: Real>(d: &DepthImage<T>, region: &Box2d) -> Result<PointCloud<T>> {
    region.validate()?;
    let region = region
        .clamp_to(d.width, d.height)
        .ok_or_else(|| invalid("region does not overlap the image"))?;
    PointCloud::new(backproject_pixels(d, &region))
}

fn backproject_pixels<T: Real>(d: &DepthImage<T>, region: &Box2d) -> Vec<Vector3<T>> {
    let Intrinsics { fx, fy, cx, cy } = d.intrinsics;
    let mut points = Vec::new();
    for v in region.rows() {
        for u in region.cols() {
            let z = d.at(u, v);
            if z > T::zero() {
                let (uf, vf) = (T::lit(u as f64), T::lit(v as f64));
                points.push(Vector3::new((uf - cx) * z / fx, (vf - cy) * z / fy, z));
            }
        }
    }
    points
}

/// Pinhole projection to continuous pixel coordinates `(u, v)`.
pub fn project<T: Real>(p: &Vector3<T>, k: &Intrinsics<T>) -> (T, T) {
    (k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy)
}

/// Labels the points inside an augmented box `aug` against the ground-truth
/// box `gt`.
///
/// Pixels of `gt ∩ aug` become object points. That region is then zeroed in a
/// working copy of the depth, so back-projecting `aug` from the copy yields
/// exactly the `aug ∖ gt` points, which are labelled background. Pixels of
/// `gt ∖ aug` never enter the sample. Object points come first.
pub fn fast_relabel<T: Real>(d: &DepthImage<T>, gt: &Box2d, aug: &Box2d) -> Result<PointCloud<T>> {
    gt.validate()?;
    aug.validate()?;
    let aug = aug
        .clamp_to(d.width, d.height)
        .ok_or_else(|| invalid("augmented box does not overlap the image"))?;
    let mut points = Vec::new();
    let mut working;
    let mut source = d;
    if let Some(inter) = gt.intersect(&aug) {
        points = backproject_pixels(d, &inter);
        working = d.clone();
        working.zero_region(&inter);
        source = &working;
    }
    let n_object = points.len();
    points.extend(backproject_pixels(source, &aug));
    let labels = (0..points.len())
        .map(|i| if i < n_object { Label::Object } else { Label::Background })
        .collect();
    PointCloud::with_labels(points, labels)
}
