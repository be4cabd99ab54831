use fvr_core::fvr::{fvr_decode, fvr_encode, FvrEncoding, FvrParams};
use fvr_core::regressor::Representation;
use fvr_core::so3::{
    axis_angle_to_matrix, euler_to_matrix, matrix_to_axis_angle, matrix_to_euler, matrix_to_quat, matrix_to_r6d,
    quat_to_matrix, r6d_to_matrix, AxisAngle, EulerAngles, Quaternion, R6d, RotationMatrix,
};
use nalgebra::{Matrix3, Vector3};

use crate::error::{compute, usage, CliResult};

/// Values per representation: matrix 9 (row-major), quaternion 4 (w x y z),
/// euler 3 (yaw pitch roll, radians), axis_angle 4 (axis, angle), r6d 6
/// (two columns), fvr 12 (green start/end, red start/end).
pub fn arity(r: Representation) -> usize {
    match r {
        Representation::Matrix => 9,
        Representation::Quaternion => 4,
        Representation::Euler => 3,
        Representation::AxisAngle => 4,
        Representation::R6d => 6,
        Representation::Fvr => 12,
    }
}

pub fn to_rotation(r: Representation, v: &[f64], fvr: &FvrParams<f64>) -> CliResult<RotationMatrix<f64>> {
    if v.len() != arity(r) {
        return Err(usage(format!("{r} takes {} values, got {}", arity(r), v.len())));
    }
    let v3 = |i: usize| Vector3::new(v[i], v[i + 1], v[i + 2]);
    match r {
        Representation::Matrix => RotationMatrix::new(Matrix3::from_row_slice(v)),
        Representation::Quaternion => quat_to_matrix(&Quaternion::new(v[0], v[1], v[2], v[3])),
        Representation::Euler => Ok(euler_to_matrix(&EulerAngles::new(v[0], v[1], v[2]))),
        Representation::AxisAngle => axis_angle_to_matrix(&AxisAngle::new(v3(0), v[3])),
        Representation::R6d => r6d_to_matrix(&R6d::new(v3(0), v3(3))),
        Representation::Fvr => FvrEncoding::from_flat(v).and_then(|e| fvr_decode(&e, fvr)),
    }
    .map_err(compute)
}

/// Returns the converted values and whether an Euler decode hit gimbal lock.
pub fn from_rotation(r: Representation, m: &RotationMatrix<f64>, fvr: &FvrParams<f64>) -> (Vec<f64>, bool) {
    match r {
        Representation::Matrix => (m.to_row_major().to_vec(), false),
        Representation::Quaternion => (matrix_to_quat(m).to_array().to_vec(), false),
        Representation::Euler => {
            let d = matrix_to_euler(m);
            (d.angles.to_array().to_vec(), d.gimbal_lock)
        }
        Representation::AxisAngle => {
            let aa = matrix_to_axis_angle(m);
            let mut v = aa.axis.as_slice().to_vec();
            v.push(aa.angle);
            (v, false)
        }
        Representation::R6d => (matrix_to_r6d(m).to_array().to_vec(), false),
        Representation::Fvr => (fvr_encode(m, fvr).to_flat().to_vec(), false),
    }
}

pub fn run(from: Representation, to: Representation, values: &[f64], fvr: &FvrParams<f64>) -> CliResult<String> {
    let m = to_rotation(from, values, fvr)?;
    let (out, gimbal) = from_rotation(to, &m, fvr);
    if gimbal {
        eprintln!("warning: gimbal lock, roll fixed to 0");
    }
    let mut line = out.iter().map(f64::to_string).collect::<Vec<_>>().join(" ");
    line.push('\n');
    Ok(line)
}
