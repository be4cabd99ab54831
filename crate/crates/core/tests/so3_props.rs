use fvr_core::so3::*;
use fvr_core::seed::task_rng;
use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;

fn unit_quat() -> impl Strategy<Value = Quaternion<f64>> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("non-zero", |(w, x, y, z)| w * w + x * x + y * y + z * z > 1e-3)
        .prop_map(|(w, x, y, z)| Quaternion::new(w, x, y, z).normalized().unwrap())
}

fn rotation() -> impl Strategy<Value = RotationMatrix<f64>> {
    unit_quat().prop_map(|q| quat_to_matrix(&q).unwrap())
}

/// Independent rotation-distance oracle: angle of the relative quaternion.
fn quat_angle(a: &Quaternion<f64>, b: &Quaternion<f64>) -> f64 {
    let dot = (a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z).abs().min(1.0);
    2.0 * dot.acos()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn matrix_is_orthonormal(r in rotation()) {
        let m = r.matrix();
        prop_assert!((m.transpose() * m - Matrix3::identity()).abs().max() < 1e-12);
        prop_assert!((m.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quaternion_round_trip(r in rotation()) {
        let back = quat_to_matrix(&matrix_to_quat(&r)).unwrap();
        prop_assert!(geodesic_error(&r, &back) < 1e-9);
        prop_assert!(matrix_to_quat(&r).w >= 0.0);
    }

    #[test]
    fn euler_round_trip_off_gimbal(r in rotation()) {
        let d = matrix_to_euler(&r);
        prop_assume!(!d.gimbal_lock);
        prop_assume!(r.matrix()[(2, 0)].abs() < 1.0 - 1e-6);
        let back = euler_to_matrix(&d.angles);
        prop_assert!(geodesic_error(&r, &back) < 1e-9);
        prop_assert!(d.angles.pitch.abs() <= std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn axis_angle_round_trip(r in rotation()) {
        let aa = matrix_to_axis_angle(&r);
        prop_assert!((0.0..=std::f64::consts::PI + 1e-12).contains(&aa.angle));
        let back = axis_angle_to_matrix(&aa).unwrap();
        prop_assert!(geodesic_error(&r, &back) < 1e-9);
    }

    #[test]
    fn r6d_round_trip(r in rotation()) {
        let back = r6d_to_matrix(&matrix_to_r6d(&r)).unwrap();
        prop_assert!(geodesic_error(&r, &back) < 1e-12);
    }

    #[test]
    fn gram_schmidt_is_scale_invariant(r in rotation(), s1 in 0.01..100.0f64, s2 in 0.01..100.0f64) {
        let a = matrix_to_r6d(&r);
        let scaled = R6d::new(a.a1 * s1, a.a2 * s2 + a.a1 * 0.3);
        let back = r6d_to_matrix(&scaled).unwrap();
        prop_assert!(geodesic_error(&r, &back) < 1e-9);
    }

    #[test]
    fn geodesic_matches_quaternion_oracle(a in unit_quat(), b in unit_quat()) {
        let (ra, rb) = (quat_to_matrix(&a).unwrap(), quat_to_matrix(&b).unwrap());
        let d = geodesic_error(&ra, &rb);
        prop_assert!((d - quat_angle(&a, &b)).abs() < 1e-6);
        prop_assert!((d - geodesic_error(&rb, &ra)).abs() < 1e-12);
    }

    #[test]
    fn geodesic_triangle_inequality(a in rotation(), b in rotation(), c in rotation()) {
        let ab = geodesic_error(&a, &b);
        let bc = geodesic_error(&b, &c);
        let ac = geodesic_error(&a, &c);
        prop_assert!(ac <= ab + bc + 1e-12);
        prop_assert!(geodesic_error(&a, &a) < 1e-12);
    }

    #[test]
    fn about_axis_matches_rodrigues_vector(axis in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), angle in -6.0..6.0f64,
                                           v in (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64)) {
        let axis = Vector3::new(axis.0, axis.1, axis.2);
        prop_assume!(axis.norm() > 1e-3);
        let axis = axis.normalize();
        let v = Vector3::new(v.0, v.1, v.2);
        let a = RotationMatrix::about_axis(&axis, angle).apply(&v);
        let b = rotate_about_axis(&v, &axis, angle);
        prop_assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn uniform_sampler_has_zero_mean_trace() {
    // Haar measure on SO(3): E[tr R] = 0 and E[R] = 0.
    let mut rng = task_rng("sampler-mean", 5);
    let n = 40_000;
    let mut sum = Matrix3::zeros();
    for _ in 0..n {
        sum += random_rotation::<f64, _>(&mut rng).into_inner();
    }
    let mean = sum / n as f64;
    assert!(mean.trace().abs() < 0.05, "mean trace {}", mean.trace());
    assert!(mean.abs().max() < 0.02, "mean entry {}", mean.abs().max());
}

#[test]
fn uniform_sampler_angle_distribution() {
    // Haar density of the rotation angle is (1 − cos θ)/π, so P(θ < π/2) = 1/2 − 1/π.
    let mut rng = task_rng("sampler-angle", 6);
    let n = 40_000;
    let below = (0..n)
        .filter(|_| matrix_to_axis_angle(&random_rotation::<f64, _>(&mut rng)).angle < std::f64::consts::FRAC_PI_2)
        .count();
    let expected = 0.5 - 1.0 / std::f64::consts::PI;
    assert!((below as f64 / n as f64 - expected).abs() < 0.01);
}

#[test]
fn f32_round_trips_at_single_precision() {
    let mut rng = task_rng("f32", 1);
    for _ in 0..1000 {
        let r = random_rotation::<f32, _>(&mut rng);
        let q = quat_to_matrix(&matrix_to_quat(&r)).unwrap();
        let s = r6d_to_matrix(&matrix_to_r6d(&r)).unwrap();
        assert!(geodesic_error(&r, &q) < 1e-3);
        assert!(geodesic_error(&r, &s) < 1e-3);
    }
}
