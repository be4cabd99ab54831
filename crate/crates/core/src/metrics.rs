//! Pose evaluation metrics: ADD / ADD-S, oriented 3D IoU, n° m cm
//! acceptance, symmetric-aware rotation error, Chamfer distance and
//! accuracy-vs-threshold curves.
//!
//! All threshold comparisons are strict.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::augment::{PointCloud, Pose};
use crate::error::{invalid, Result};
use crate::fvr::{rotation_from_green_only, SymmetryClass};
use crate::losses::ModelPoints;
use crate::real::Real;
use crate::so3::{geodesic_error, RotationMatrix};

pub const DEFAULT_IOU_THRESHOLDS: [f64; 4] = [0.25, 0.50, 0.75, 0.90];
/// `(degrees, centimeters)`
pub const DEFAULT_POSE_THRESHOLDS: [(f64, f64); 3] = [(5.0, 5.0), (10.0, 5.0), (10.0, 10.0)];
pub const DEFAULT_IOU_SAMPLES: usize = 200_000;
pub const MIN_IOU_SAMPLES: usize = 10_000;

/// Mean distance between corresponding model points under the two poses.
pub fn add<T: Real>(model: &ModelPoints<T>, pred: &Pose<T>, gt: &Pose<T>) -> Result<T> {
    if model.is_empty() {
        return Err(invalid("model has no points"));
    }
    let sum = model
        .points()
        .iter()
        .fold(T::zero(), |s, x| s + (pred.transform(x) - gt.transform(x)).norm());
    Ok(sum / T::lit(model.len() as f64))
}

/// Mean distance from each ground-truth-posed point to the closest
/// prediction-posed point. Brute force.
pub fn add_s<T: Real>(model: &ModelPoints<T>, pred: &Pose<T>, gt: &Pose<T>) -> Result<T> {
    if model.is_empty() {
        return Err(invalid("model has no points"));
    }
    let predicted: Vec<_> = model.points().iter().map(|x| pred.transform(x)).collect();
    let sum = model.points().iter().fold(T::zero(), |s, x| {
        let g = gt.transform(x);
        s + nearest_sq(&g, &predicted).sqrt()
    });
    Ok(sum / T::lit(model.len() as f64))
}

fn nearest_sq<T: Real>(p: &Vector3<T>, set: &[Vector3<T>]) -> T {
    set.iter()
        .map(|q| (q - p).norm_squared())
        .fold(T::max_value().unwrap_or_else(T::one), |a, b| if b < a { b } else { a })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedBox<T: Real> {
    pub center: Vector3<T>,
    pub half_extents: Vector3<T>,
    pub rotation: RotationMatrix<T>,
}

impl<T: Real> OrientedBox<T> {
    pub fn new(center: Vector3<T>, half_extents: Vector3<T>, rotation: RotationMatrix<T>) -> Result<Self> {
        if half_extents.iter().any(|h| !(*h > T::zero()) || !h.is_finite()) {
            return Err(invalid("box half extents must be positive"));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(invalid("box center is not finite"));
        }
        Ok(Self {
            center,
            half_extents,
            rotation,
        })
    }

    pub fn axis_aligned(center: Vector3<T>, half_extents: Vector3<T>) -> Result<Self> {
        Self::new(center, half_extents, RotationMatrix::identity())
    }

    /// Box of a pose: centre `t`, extents `size / 2`, orientation `R`.
    pub fn from_pose(pose: &Pose<T>) -> Self {
        Self {
            center: pose.t,
            half_extents: pose.size / T::lit(2.0),
            rotation: pose.r,
        }
    }

    pub fn contains(&self, p: &Vector3<T>) -> bool {
        let local = self.rotation.matrix().tr_mul(&(p - self.center));
        (0..3).all(|a| local[a].abs() <= self.half_extents[a])
    }

    pub fn volume(&self) -> T {
        T::lit(8.0) * self.half_extents.x * self.half_extents.y * self.half_extents.z
    }

    /// Half extents of the world-axis-aligned bound.
    pub fn aabb_half_extents(&self) -> Vector3<T> {
        self.rotation.matrix().abs() * self.half_extents
    }
}

/// Monte Carlo IoU of two oriented boxes.
///
/// Points are drawn uniformly in the axis-aligned bound of both boxes and
/// tested against each box analytically.
pub fn iou_3d<T: Real>(a: &OrientedBox<T>, b: &OrientedBox<T>, samples: usize, seed: u64) -> Result<T> {
    if samples < MIN_IOU_SAMPLES {
        return Err(invalid(format!("IoU needs at least {MIN_IOU_SAMPLES} samples")));
    }
    for bx in [a, b] {
        if bx.half_extents.iter().any(|h| !(*h > T::zero())) {
            return Err(invalid("degenerate box"));
        }
    }
    let (ha, hb) = (a.aabb_half_extents(), b.aabb_half_extents());
    let lo = (a.center - ha).inf(&(b.center - hb));
    let hi = (a.center + ha).sup(&(b.center + hb));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut in_a, mut in_b, mut both) = (0usize, 0usize, 0usize);
    for _ in 0..samples {
        let p = Vector3::from_fn(|i, _| {
            let u: f64 = rng.gen();
            lo[i] + (hi[i] - lo[i]) * T::lit(u)
        });
        let (ia, ib) = (a.contains(&p), b.contains(&p));
        in_a += ia as usize;
        in_b += ib as usize;
        both += (ia && ib) as usize;
    }
    let union = in_a + in_b - both;
    if union == 0 {
        return Ok(T::zero());
    }
    Ok(T::lit(both as f64 / union as f64))
}

/// Exact IoU of two world-axis-aligned boxes by interval intersection.
pub fn iou_axis_aligned<T: Real>(
    center_a: &Vector3<T>,
    half_a: &Vector3<T>,
    center_b: &Vector3<T>,
    half_b: &Vector3<T>,
) -> T {
    let mut inter = T::one();
    for i in 0..3 {
        let lo = (center_a[i] - half_a[i]).max(center_b[i] - half_b[i]);
        let hi = (center_a[i] + half_a[i]).min(center_b[i] + half_b[i]);
        inter *= (hi - lo).max(T::zero());
    }
    let eight = T::lit(8.0);
    let va = eight * half_a.x * half_a.y * half_a.z;
    let vb = eight * half_b.x * half_b.y * half_b.z;
    inter / (va + vb - inter)
}

/// `rot_err < n` and `trans_err < m`.
pub fn pose_accept(rot_err_deg: f64, trans_err_cm: f64, n_deg: f64, m_cm: f64) -> bool {
    rot_err_deg < n_deg && trans_err_cm < m_cm
}

/// Rotation error in degrees. Axis-symmetric objects only compare their
/// green (y) axes.
pub fn rotation_error_symmetric_aware<T: Real>(pred: &Pose<T>, gt: &Pose<T>, sym: SymmetryClass) -> T {
    let rad = match sym {
        SymmetryClass::Asymmetric => geodesic_error(&pred.r, &gt.r),
        SymmetryClass::AxisSymmetric => {
            rotation_from_green_only(&pred.r.column(1), &gt.r.column(1)).expect("unit columns")
        }
    };
    rad * T::lit(180.0) / T::pi()
}

/// Symmetric Chamfer distance: squared nearest-neighbour distances summed
/// in both directions.
pub fn chamfer<T: Real>(a: &PointCloud<T>, b: &PointCloud<T>) -> Result<T> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("chamfer needs two non-empty clouds"));
    }
    let one_way = |x: &[Vector3<T>], y: &[Vector3<T>]| {
        x.iter().fold(T::zero(), |s, p| s + nearest_sq(p, y))
    };
    Ok(one_way(a.points(), b.points()) + one_way(b.points(), a.points()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyCurve {
    pub thresholds: Vec<f64>,
    pub accuracy: Vec<f64>,
    pub auc: f64,
}

/// Accuracy `P(error < τ)` at `steps + 1` evenly spaced thresholds in
/// `[0, max_threshold]`, and the trapezoidal area under it divided by
/// `max_threshold`.
///
/// Because the comparison is strict, accuracy at `τ = 0` is always 0; with
/// all errors zero the AUC is therefore `1 − 1/(2·steps)`.
pub fn auc_curve(errors: &[f64], max_threshold: f64, steps: usize) -> Result<AccuracyCurve> {
    if !(max_threshold > 0.0) || !max_threshold.is_finite() {
        return Err(invalid("max threshold must be positive"));
    }
    if steps == 0 {
        return Err(invalid("curve needs at least one step"));
    }
    if errors.iter().any(|e| !(*e >= 0.0)) {
        return Err(invalid("errors must be non-negative"));
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len().max(1) as f64;
    let thresholds: Vec<f64> = (0..=steps)
        .map(|k| max_threshold * k as f64 / steps as f64)
        .collect();
    let accuracy: Vec<f64> = thresholds
        .iter()
        .map(|&tau| sorted.partition_point(|e| *e < tau) as f64 / n)
        .collect();
    let dt = max_threshold / steps as f64;
    let area: f64 = accuracy.windows(2).map(|w| 0.5 * (w[0] + w[1]) * dt).sum();
    Ok(AccuracyCurve {
        thresholds,
        accuracy,
        auc: (area / max_threshold).clamp(0.0, 1.0),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleMetrics {
    pub add: f64,
    pub add_s: f64,
    pub iou: f64,
    pub rot_err_deg: f64,
    pub trans_err_cm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub iou_thresholds: Vec<f64>,
    pub pose_thresholds: Vec<(f64, f64)>,
    pub iou_samples: usize,
    pub seed: u64,
    pub rot_auc_max_deg: f64,
    pub add_auc_max: f64,
    pub auc_steps: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            iou_thresholds: DEFAULT_IOU_THRESHOLDS.to_vec(),
            pose_thresholds: DEFAULT_POSE_THRESHOLDS.to_vec(),
            iou_samples: DEFAULT_IOU_SAMPLES,
            seed: 0,
            rot_auc_max_deg: 60.0,
            add_auc_max: 0.1,
            auc_steps: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub samples: Vec<SampleMetrics>,
    /// `(threshold, accuracy)` with `iou > threshold` accepted.
    pub iou_accuracy: Vec<(f64, f64)>,
    /// `(degrees, centimeters, accuracy)`
    pub pose_accuracy: Vec<(f64, f64, f64)>,
    pub rot_auc: f64,
    pub add_auc: f64,
}

pub struct EvalSample<T: Real> {
    pub pred: Pose<T>,
    pub gt: Pose<T>,
    pub symmetry: SymmetryClass,
}

/// Per-sample metrics plus aggregates. Symmetric samples use ADD-S for the
/// ADD curve and the green-axis rotation error.
pub fn evaluate<T: Real>(
    samples: &[EvalSample<T>],
    model: &ModelPoints<T>,
    cfg: &EvalConfig,
) -> Result<MetricReport> {
    if samples.is_empty() {
        return Err(invalid("nothing to evaluate"));
    }
    let mut records = Vec::with_capacity(samples.len());
    let mut add_for_curve = Vec::with_capacity(samples.len());
    for (i, s) in samples.iter().enumerate() {
        let iou = iou_3d(
            &OrientedBox::from_pose(&s.pred),
            &OrientedBox::from_pose(&s.gt),
            cfg.iou_samples,
            crate::seed::derive_seed(&format!("iou/{i}"), cfg.seed),
        )?;
        let rec = SampleMetrics {
            add: add(model, &s.pred, &s.gt)?.as_f64(),
            add_s: add_s(model, &s.pred, &s.gt)?.as_f64(),
            iou: iou.as_f64(),
            rot_err_deg: rotation_error_symmetric_aware(&s.pred, &s.gt, s.symmetry).as_f64(),
            trans_err_cm: (s.pred.t - s.gt.t).norm().as_f64() * 100.0,
        };
        add_for_curve.push(match s.symmetry {
            SymmetryClass::Asymmetric => rec.add,
            SymmetryClass::AxisSymmetric => rec.add_s,
        });
        records.push(rec);
    }
    let n = records.len() as f64;
    let iou_accuracy = cfg
        .iou_thresholds
        .iter()
        .map(|&x| (x, records.iter().filter(|r| r.iou > x).count() as f64 / n))
        .collect();
    let pose_accuracy = cfg
        .pose_thresholds
        .iter()
        .map(|&(deg, cm)| {
            let hits = records
                .iter()
                .filter(|r| pose_accept(r.rot_err_deg, r.trans_err_cm, deg, cm))
                .count();
            (deg, cm, hits as f64 / n)
        })
        .collect();
    let rot: Vec<f64> = records.iter().map(|r| r.rot_err_deg).collect();
    Ok(MetricReport {
        iou_accuracy,
        pose_accuracy,
        rot_auc: auc_curve(&rot, cfg.rot_auc_max_deg, cfg.auc_steps)?.auc,
        add_auc: auc_curve(&add_for_curve, cfg.add_auc_max, cfg.auc_steps)?.auc,
        samples: records,
    })
}
