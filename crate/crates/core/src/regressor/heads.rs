//! Regression targets and decoding for each rotation representation.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};

use crate::error::{invalid, Error, Result};
use crate::fvr::{fvr_decode, fvr_encode, rotation_from_green_only, FvrEncoding, FvrParams, SymmetryClass};
use crate::real::Real;
use crate::so3::{
    axis_angle_to_matrix, euler_to_matrix, geodesic_error, matrix_to_axis_angle, matrix_to_euler,
    matrix_to_quat, matrix_to_r6d, quat_to_matrix, r6d_to_matrix, AxisAngle, EulerAngles, Quaternion, R6d,
    RotationMatrix,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Representation {
    Matrix,
    Euler,
    Quaternion,
    AxisAngle,
    R6d,
    Fvr,
}

impl Representation {
    pub const ALL: [Representation; 6] = [
        Representation::Matrix,
        Representation::Euler,
        Representation::Quaternion,
        Representation::AxisAngle,
        Representation::R6d,
        Representation::Fvr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Representation::Matrix => "matrix",
            Representation::Euler => "euler",
            Representation::Quaternion => "quaternion",
            Representation::AxisAngle => "axis_angle",
            Representation::R6d => "r6d",
            Representation::Fvr => "fvr",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Representation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| invalid(format!("unknown representation `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HeadMode {
    /// One output branch for the whole representation.
    Whole,
    /// One branch per sub-term.
    Decoupled,
}

impl HeadMode {
    pub fn name(self) -> &'static str {
        match self {
            HeadMode::Whole => "whole",
            HeadMode::Decoupled => "decoupled",
        }
    }
}

impl fmt::Display for HeadMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HeadMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "whole" => Ok(HeadMode::Whole),
            "decoupled" => Ok(HeadMode::Decoupled),
            _ => Err(invalid(format!("unknown head mode `{s}`"))),
        }
    }
}

/// What the regressor predicts and how its outputs are split into branches.
///
/// Target layouts:
///
/// | representation | whole | decoupled heads |
/// |---|---|---|
/// | matrix | 9, column-major | 3 columns |
/// | euler | yaw, pitch, roll | 1 + 1 + 1 |
/// | quaternion | w, x, y, z (w ≥ 0) | 1 + 1 + 1 + 1 |
/// | axis_angle | rotation vector (3) | axis (3) + angle (1) |
/// | r6d | columns 0 and 1 | 3 + 3 |
/// | fvr | green start/end, red start/end | green (6) + red (6) |
///
/// An axis-symmetric FVR head predicts the green vector only (6 values).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadConfig<T: Real> {
    pub mode: HeadMode,
    pub representation: Representation,
    pub fvr_params: Option<FvrParams<T>>,
    pub symmetry: SymmetryClass,
}

impl<T: Real> HeadConfig<T> {
    pub fn new(mode: HeadMode, representation: Representation) -> Self {
        Self {
            mode,
            representation,
            fvr_params: None,
            symmetry: SymmetryClass::Asymmetric,
        }
    }

    pub fn fvr(mode: HeadMode, params: FvrParams<T>) -> Self {
        Self {
            fvr_params: Some(params),
            ..Self::new(mode, Representation::Fvr)
        }
    }

    pub fn with_symmetry(self, symmetry: SymmetryClass) -> Self {
        Self { symmetry, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.representation, self.fvr_params) {
            (Representation::Fvr, None) => Err(invalid("FVR head needs FVR parameters")),
            (Representation::Fvr, Some(_)) => Ok(()),
            (r, Some(_)) => Err(invalid(format!("FVR parameters given for a {r} head"))),
            (_, None) => Ok(()),
        }
    }

    fn green_only(&self) -> bool {
        self.representation == Representation::Fvr && self.symmetry == SymmetryClass::AxisSymmetric
    }

    fn params(&self) -> Result<FvrParams<T>> {
        self.fvr_params.ok_or_else(|| invalid("FVR head needs FVR parameters"))
    }

    /// Output width of each branch.
    pub fn head_sizes(&self) -> Vec<usize> {
        use Representation::*;
        let split: &[usize] = match self.representation {
            Matrix => &[3, 3, 3],
            Euler => &[1, 1, 1],
            Quaternion => &[1, 1, 1, 1],
            AxisAngle => match self.mode {
                HeadMode::Whole => &[3],
                HeadMode::Decoupled => &[3, 1],
            },
            R6d => &[3, 3],
            Fvr if self.green_only() => &[6],
            Fvr => &[6, 6],
        };
        match self.mode {
            HeadMode::Whole => vec![split.iter().sum()],
            HeadMode::Decoupled => split.to_vec(),
        }
    }

    pub fn output_dim(&self) -> usize {
        self.head_sizes().iter().sum()
    }

    pub fn target(&self, r: &RotationMatrix<T>) -> Result<Vec<T>> {
        self.validate()?;
        Ok(match self.representation {
            Representation::Matrix => r.matrix().as_slice().to_vec(),
            Representation::Euler => matrix_to_euler(r).angles.to_array().to_vec(),
            Representation::Quaternion => matrix_to_quat(r).to_array().to_vec(),
            Representation::AxisAngle => {
                let aa = matrix_to_axis_angle(r);
                match self.mode {
                    HeadMode::Whole => aa.rotation_vector().as_slice().to_vec(),
                    HeadMode::Decoupled => {
                        let mut v = aa.axis.as_slice().to_vec();
                        v.push(aa.angle);
                        v
                    }
                }
            }
            Representation::R6d => matrix_to_r6d(r).to_array().to_vec(),
            Representation::Fvr => {
                let flat = fvr_encode(r, &self.params()?).to_flat();
                let keep = if self.green_only() { 6 } else { 12 };
                flat[..keep].to_vec()
            }
        })
    }

    /// Rotation from raw network outputs.
    pub fn decode(&self, out: &[T]) -> Result<RotationMatrix<T>> {
        self.validate()?;
        if out.len() != self.output_dim() {
            return Err(invalid(format!(
                "{} outputs for a {}-wide head",
                out.len(),
                self.output_dim()
            )));
        }
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPrediction("non-finite network output".into()));
        }
        let v3 = |i: usize| Vector3::new(out[i], out[i + 1], out[i + 2]);
        match self.representation {
            Representation::Matrix => RotationMatrix::nearest(&Matrix3::from_columns(&[v3(0), v3(3), v3(6)])),
            Representation::Euler => Ok(euler_to_matrix(&EulerAngles::new(out[0], out[1], out[2]))),
            Representation::Quaternion => {
                quat_to_matrix(&Quaternion::new(out[0], out[1], out[2], out[3]).normalized()?)
            }
            Representation::AxisAngle => {
                let aa = match self.mode {
                    HeadMode::Whole => AxisAngle::from_rotation_vector(&v3(0)),
                    HeadMode::Decoupled => {
                        let axis = v3(0);
                        let n = axis.norm();
                        if !(n > T::degenerate_tol()) {
                            return Err(Error::Degenerate("predicted axis has zero length".into()));
                        }
                        AxisAngle::new(axis / n, out[3])
                    }
                };
                axis_angle_to_matrix(&aa)
            }
            Representation::R6d => r6d_to_matrix(&R6d::new(v3(0), v3(3))),
            Representation::Fvr => {
                if self.green_only() {
                    return Err(invalid("a green-only FVR head does not determine a full rotation"));
                }
                fvr_decode(&FvrEncoding::from_flat(out)?, &self.params()?)
            }
        }
    }

    /// Rotation error in radians. Axis-symmetric heads are scored by the
    /// angle between the predicted and true green (y) axes. Outputs that
    /// cannot be decoded score the maximum error π.
    pub fn rotation_error(&self, out: &[T], gt: &RotationMatrix<T>) -> Result<T> {
        self.validate()?;
        if out.len() != self.output_dim() {
            return Err(invalid(format!(
                "{} outputs for a {}-wide head",
                out.len(),
                self.output_dim()
            )));
        }
        let err = if self.green_only() {
            let green = Vector3::new(out[3] - out[0], out[4] - out[1], out[5] - out[2]);
            let reference = fvr_encode(gt, &self.params()?).green();
            rotation_from_green_only(&green, &reference)
        } else {
            self.decode(out).and_then(|r| match self.symmetry {
                SymmetryClass::Asymmetric => Ok(geodesic_error(&r, gt)),
                SymmetryClass::AxisSymmetric => rotation_from_green_only(&r.column(1), &gt.column(1)),
            })
        };
        Ok(err.unwrap_or_else(|_| T::pi()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::task_rng;
    use crate::so3::random_rotation;

    fn all_heads() -> Vec<HeadConfig<f64>> {
        let p = FvrParams::from_degrees(10.0, 30.0, 60.0).unwrap();
        let mut v = Vec::new();
        for mode in [HeadMode::Whole, HeadMode::Decoupled] {
            for rep in Representation::ALL {
                v.push(if rep == Representation::Fvr {
                    HeadConfig::fvr(mode, p)
                } else {
                    HeadConfig::new(mode, rep)
                });
            }
        }
        v
    }

    #[test]
    fn targets_decode_to_the_rotation() {
        let mut rng = task_rng("heads", 1);
        for head in all_heads() {
            for _ in 0..50 {
                let r = random_rotation::<f64, _>(&mut rng);
                let t = head.target(&r).unwrap();
                assert_eq!(t.len(), head.output_dim());
                let err = head.rotation_error(&t, &r).unwrap();
                assert!(err < 1e-9, "{:?}/{:?}: {err}", head.representation, head.mode);
            }
        }
    }

    #[test]
    fn head_split_sizes() {
        let h = |m, r| HeadConfig::<f64>::new(m, r).head_sizes();
        assert_eq!(h(HeadMode::Whole, Representation::Quaternion), vec![4]);
        assert_eq!(h(HeadMode::Decoupled, Representation::Quaternion), vec![1, 1, 1, 1]);
        assert_eq!(h(HeadMode::Decoupled, Representation::Euler), vec![1, 1, 1]);
        assert_eq!(h(HeadMode::Decoupled, Representation::AxisAngle), vec![3, 1]);
        assert_eq!(h(HeadMode::Whole, Representation::AxisAngle), vec![3]);
        assert_eq!(h(HeadMode::Decoupled, Representation::R6d), vec![3, 3]);
        let fvr = HeadConfig::<f64>::fvr(HeadMode::Decoupled, FvrParams::r6d());
        assert_eq!(fvr.head_sizes(), vec![6, 6]);
        assert_eq!(fvr.with_symmetry(SymmetryClass::AxisSymmetric).head_sizes(), vec![6]);
    }

    #[test]
    fn r6d_params_fvr_target_pads_r6d_with_zero_starts() {
        let mut rng = task_rng("heads-r6d", 2);
        let r = random_rotation::<f64, _>(&mut rng);
        let fvr = HeadConfig::fvr(HeadMode::Whole, FvrParams::r6d()).target(&r).unwrap();
        let r6d = HeadConfig::new(HeadMode::Whole, Representation::R6d).target(&r).unwrap();
        assert_eq!(fvr.len(), 12);
        assert_eq!(r6d.len(), 6);
        assert!(fvr[0..3].iter().chain(&fvr[6..9]).all(|v| *v == 0.0));
        // red (column 0) first in r6d order, green (column 1) second
        assert_eq!(&fvr[9..12], &r6d[0..3]);
        assert_eq!(&fvr[3..6], &r6d[3..6]);
    }

    #[test]
    fn symmetric_head_scores_green_only() {
        let head = HeadConfig::fvr(HeadMode::Whole, FvrParams::from_degrees(1.0, 0.0, 0.0).unwrap())
            .with_symmetry(SymmetryClass::AxisSymmetric);
        let r = RotationMatrix::<f64>::identity();
        // spinning about the green axis costs nothing
        let spun = RotationMatrix::about_y(1.2);
        let t = head.target(&spun).unwrap();
        assert!(head.rotation_error(&t, &r).unwrap() < 1e-12);
        let tilted = head.target(&RotationMatrix::about_x(0.3)).unwrap();
        assert!((head.rotation_error(&tilted, &r).unwrap() - 0.3).abs() < 1e-12);
        assert!(head.decode(&t).is_err());
    }

    #[test]
    fn undecodable_outputs_score_pi() {
        let head = HeadConfig::<f64>::new(HeadMode::Whole, Representation::Quaternion);
        let e = head.rotation_error(&[0.0; 4], &RotationMatrix::identity()).unwrap();
        assert_eq!(e, std::f64::consts::PI);
        assert!(head.rotation_error(&[0.0; 3], &RotationMatrix::identity()).is_err());
    }

    #[test]
    fn config_validation_and_names() {
        assert!(HeadConfig::<f64>::new(HeadMode::Whole, Representation::Fvr).validate().is_err());
        let mut h = HeadConfig::<f64>::new(HeadMode::Whole, Representation::Euler);
        h.fvr_params = Some(FvrParams::r6d());
        assert!(h.validate().is_err());
        for r in Representation::ALL {
            assert_eq!(r.name().parse::<Representation>().unwrap(), r);
        }
        assert!("rodrigues".parse::<Representation>().is_err());
        assert_eq!("decoupled".parse::<HeadMode>().unwrap(), HeadMode::Decoupled);
    }
}
