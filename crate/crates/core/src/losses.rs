//! Rotation losses with analytic gradients.
//!
//! Gradients are always with respect to the prediction. For
//! [`point_matching_loss`] that is the nine row-major entries of the predicted
//! matrix; for [`fvr_point_matching_loss`] the twelve values of
//! [`FvrEncoding::to_flat`].

use nalgebra::Vector3;

use crate::error::{invalid, Result};
use crate::fvr::FvrEncoding;
use crate::real::Real;
use crate::so3::RotationMatrix;

/// Object model points, object frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPoints<T: Real> {
    points: Vec<Vector3<T>>,
}

impl<T: Real> ModelPoints<T> {
    pub fn new(points: Vec<Vector3<T>>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("model has no points"));
        }
        if points.iter().any(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(invalid("model has non-finite coordinates"));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Vector3<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossValue<T: Real> {
    pub value: T,
    pub gradient: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LossKind {
    #[default]
    Mse,
    SmoothL1,
}

impl LossKind {
    pub fn eval<T: Real>(self, pred: &[T], target: &[T]) -> Result<LossValue<T>> {
        match self {
            LossKind::Mse => mse_loss(pred, target),
            LossKind::SmoothL1 => smooth_l1_loss(pred, target),
        }
    }
}

fn check_lengths<T>(pred: &[T], target: &[T]) -> Result<()> {
    if pred.len() != target.len() {
        return Err(invalid(format!(
            "prediction has {} values, target has {}",
            pred.len(),
            target.len()
        )));
    }
    if pred.is_empty() {
        return Err(invalid("empty prediction"));
    }
    Ok(())
}

pub fn mse_loss<T: Real>(pred: &[T], target: &[T]) -> Result<LossValue<T>> {
    check_lengths(pred, target)?;
    let n = T::lit(pred.len() as f64);
    let two = T::lit(2.0);
    let mut value = T::zero();
    let gradient = pred
        .iter()
        .zip(target)
        .map(|(&p, &t)| {
            let d = p - t;
            value += d * d;
            two * d / n
        })
        .collect();
    Ok(LossValue { value: value / n, gradient })
}

/// Mean smooth-L1 (Huber with transition at 1).
pub fn smooth_l1_loss<T: Real>(pred: &[T], target: &[T]) -> Result<LossValue<T>> {
    check_lengths(pred, target)?;
    let n = T::lit(pred.len() as f64);
    let half = T::lit(0.5);
    let mut value = T::zero();
    let gradient = pred
        .iter()
        .zip(target)
        .map(|(&p, &t)| {
            let d = p - t;
            if d.abs() < T::one() {
                value += half * d * d;
                d / n
            } else {
                value += d.abs() - half;
                d.signum() / n
            }
        })
        .collect();
    Ok(LossValue { value: value / n, gradient })
}

/// Per-point distance used by [`point_matching_loss`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PointMatchNorm {
    /// `‖R̂x − R̄x‖`, the plain point-matching loss.
    #[default]
    L2,
    /// `‖R̂x − R̄x‖²`, smooth at zero.
    SquaredL2,
}

/// Average displacement of the model points under the two rotations.
pub fn point_matching_loss<T: Real>(
    pred: &RotationMatrix<T>,
    gt: &RotationMatrix<T>,
    model: &ModelPoints<T>,
) -> Result<LossValue<T>> {
    point_matching_loss_with(pred, gt, model, PointMatchNorm::L2)
}

pub fn point_matching_loss_with<T: Real>(
    pred: &RotationMatrix<T>,
    gt: &RotationMatrix<T>,
    model: &ModelPoints<T>,
    norm: PointMatchNorm,
) -> Result<LossValue<T>> {
    if model.is_empty() {
        return Err(invalid("model has no points"));
    }
    let diff = pred.matrix() - gt.matrix();
    let mut value = T::zero();
    let mut gradient = vec![T::zero(); 9];
    for x in model.points() {
        let d = diff * x;
        let (v, scale) = match norm {
            PointMatchNorm::L2 => {
                let n = d.norm();
                // Subgradient 0 where the point does not move.
                (n, if n > T::zero() { T::one() / n } else { T::zero() })
            }
            PointMatchNorm::SquaredL2 => (d.norm_squared(), T::lit(2.0)),
        };
        value += v;
        for j in 0..3 {
            for k in 0..3 {
                gradient[3 * j + k] += d[j] * x[k] * scale;
            }
        }
    }
    let n = T::lit(model.len() as f64);
    gradient.iter_mut().for_each(|g| *g /= n);
    Ok(LossValue { value: value / n, gradient })
}

/// Chord length swept by a point at radius `r` rotated by `theta`.
pub fn chord_distance<T: Real>(r: T, theta: T) -> T {
    T::lit(2.0) * r * (theta / T::lit(2.0)).sin()
}

/// Point-matching loss on FVR vectors: every model point is shifted along
/// the predicted and the target vectors and the shifted copies are compared.
///
/// The model cancels, so the value equals `‖v_g − v̂_g‖ + ‖v_r − v̂_r‖` with
/// `v = end − start`. It is still evaluated over the model points as
/// written; the equality is checked in tests.
pub fn fvr_point_matching_loss<T: Real>(
    pred: &FvrEncoding<T>,
    target: &FvrEncoding<T>,
    model: &ModelPoints<T>,
) -> Result<LossValue<T>> {
    if model.is_empty() {
        return Err(invalid("model has no points"));
    }
    let vectors = [
        (pred.green(), target.green()),
        (pred.red(), target.red()),
    ];
    let mut value = T::zero();
    // d/d(pred vector) per vector, averaged over points.
    let mut grad_vec = [Vector3::zeros(); 2];
    for x in model.points() {
        for (i, (p, t)) in vectors.iter().enumerate() {
            let d = (x + t) - (x + p);
            let n = d.norm();
            value += n;
            if n > T::zero() {
                grad_vec[i] -= d / n;
            }
        }
    }
    let count = T::lit(model.len() as f64);
    let mut gradient = vec![T::zero(); 12];
    for (i, g) in grad_vec.iter().enumerate() {
        let g = g / count;
        // vector = end − start
        for k in 0..3 {
            gradient[6 * i + k] = -g[k];
            gradient[6 * i + 3 + k] = g[k];
        }
    }
    Ok(LossValue { value: value / count, gradient })
}
