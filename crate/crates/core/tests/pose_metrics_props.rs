use fvr_core::augment::{Label, PointCloud, Pose};
use fvr_core::losses::ModelPoints;
use fvr_core::metrics::*;
use fvr_core::pose::*;
use fvr_core::seed::task_rng;
use fvr_core::so3::{geodesic_error, random_rotation, RotationMatrix};
use nalgebra::Vector3;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn point(rng: &mut ChaCha8Rng, s: f64) -> Vector3<f64> {
    Vector3::new(rng.gen_range(-s..s), rng.gen_range(-s..s), rng.gen_range(-s..s))
}

#[test]
fn umeyama_recovers_random_similarities() {
    let mut rng = task_rng("umeyama", 0);
    for _ in 0..200 {
        let src: Vec<_> = (0..50).map(|_| point(&mut rng, 1.0)).collect();
        let r = random_rotation::<f64, _>(&mut rng);
        let s = rng.gen_range(0.1..10.0);
        let t = point(&mut rng, 5.0);
        let dst: Vec<_> = src.iter().map(|p| r.apply(p) * s + t).collect();
        let est = umeyama(&src, &dst, true).unwrap();
        assert!((est.scale - s).abs() < 1e-9);
        assert!(geodesic_error(&est.rotation, &r) < 1e-9);
        assert!((est.translation - t).norm() < 1e-9);
        let rigid: Vec<_> = src.iter().map(|p| r.apply(p) + t).collect();
        let est = umeyama(&src, &rigid, false).unwrap();
        assert!(geodesic_error(&est.rotation, &r) < 1e-9);
    }
}

#[test]
fn iou_monte_carlo_matches_exact_axis_aligned() {
    let mut rng = task_rng("iou", 0);
    for i in 0..40 {
        let ha = Vector3::new(rng.gen_range(0.05..0.5), rng.gen_range(0.05..0.5), rng.gen_range(0.05..0.5));
        let hb = Vector3::new(rng.gen_range(0.05..0.5), rng.gen_range(0.05..0.5), rng.gen_range(0.05..0.5));
        let ca = point(&mut rng, 0.2);
        let cb = point(&mut rng, 0.2);
        let a = OrientedBox::axis_aligned(ca, ha).unwrap();
        let b = OrientedBox::axis_aligned(cb, hb).unwrap();
        let mc = iou_3d(&a, &b, DEFAULT_IOU_SAMPLES, i).unwrap();
        let exact = iou_axis_aligned(&ca, &ha, &cb, &hb);
        assert!((mc - exact).abs() < 0.01, "{mc} vs {exact}");
    }
}

#[test]
fn iou_is_rotation_invariant_for_a_shared_rotation() {
    // Rotating both boxes together leaves the exact IoU unchanged.
    let mut rng = task_rng("iou-rot", 0);
    for i in 0..20 {
        let r = random_rotation::<f64, _>(&mut rng);
        let (ha, hb) = (Vector3::new(0.3, 0.2, 0.1), Vector3::new(0.25, 0.2, 0.15));
        let (ca, cb) = (Vector3::zeros(), point(&mut rng, 0.1));
        let exact = iou_axis_aligned(&ca, &ha, &cb, &hb);
        let a = OrientedBox::new(r.apply(&ca), ha, r).unwrap();
        let b = OrientedBox::new(r.apply(&cb), hb, r).unwrap();
        let mc = iou_3d(&a, &b, DEFAULT_IOU_SAMPLES, 100 + i).unwrap();
        assert!((mc - exact).abs() < 0.01);
    }
}

fn rigid_pose(rng: &mut ChaCha8Rng) -> Pose<f64> {
    Pose::new(random_rotation(rng), point(rng, 1.0), Vector3::repeat(0.2)).unwrap()
}

#[test]
fn add_properties() {
    let mut rng = task_rng("add", 0);
    let model = ModelPoints::new((0..30).map(|_| point(&mut rng, 0.1)).collect()).unwrap();
    for _ in 0..50 {
        let (a, b) = (rigid_pose(&mut rng), rigid_pose(&mut rng));
        assert!(add(&model, &a, &a).unwrap() < 1e-12);
        let d = add(&model, &a, &b).unwrap();
        assert!(add_s(&model, &a, &b).unwrap() <= d + 1e-12);
        assert!((d - add(&model, &b, &a).unwrap()).abs() < 1e-12);
        // a common rigid motion of both poses leaves ADD unchanged
        let g = random_rotation::<f64, _>(&mut rng);
        let move_pose = |p: &Pose<f64>| Pose::new(g * p.r, g.apply(&p.t), p.size).unwrap();
        let moved = add(&model, &move_pose(&a), &move_pose(&b)).unwrap();
        assert!((moved - d).abs() < 1e-9);
        // pure translation offset
        let shifted = Pose::new(a.r, a.t + Vector3::new(0.03, 0.0, 0.04), a.size).unwrap();
        assert!((add(&model, &shifted, &a).unwrap() - 0.05).abs() < 1e-12);
    }
}

#[test]
fn chamfer_matches_brute_force() {
    let mut rng = task_rng("chamfer", 0);
    for _ in 0..30 {
        let a: Vec<_> = (0..rng.gen_range(1..40)).map(|_| point(&mut rng, 1.0)).collect();
        let b: Vec<_> = (0..rng.gen_range(1..40)).map(|_| point(&mut rng, 1.0)).collect();
        let one_way = |x: &[Vector3<f64>], y: &[Vector3<f64>]| {
            x.iter()
                .map(|p| y.iter().map(|q| (p - q).norm_squared()).fold(f64::INFINITY, f64::min))
                .sum::<f64>()
        };
        let want = one_way(&a, &b) + one_way(&b, &a);
        let (a_copy, b_copy) = (a.clone(), b.clone());
        let got = chamfer(&PointCloud::new(a).unwrap(), &PointCloud::new(b).unwrap()).unwrap();
        assert!((got - want).abs() < 1e-12 * want.max(1.0), "{got} vs {want}");
        let back = chamfer(&PointCloud::new(b_copy).unwrap(), &PointCloud::new(a_copy).unwrap()).unwrap();
        assert_eq!(got, back);
    }
}

proptest! {
    #[test]
    fn residual_round_trip(tx in -2.0..2.0f64, ty in -2.0..2.0f64, tz in 0.1..3.0f64,
                           sx in 0.01..1.0f64, sy in 0.01..1.0f64, sz in 0.01..1.0f64,
                           mx in 0.01..1.0f64, my in 0.01..1.0f64, mz in 0.01..1.0f64,
                           n in 1usize..20, seed in any::<u64>()) {
        let mut rng = task_rng("residual", seed);
        let pts: Vec<_> = (0..n + 2).map(|_| point(&mut rng, 1.0)).collect();
        let labels = (0..n + 2).map(|i| if i < n { Label::Object } else { Label::Background }).collect();
        let cloud = PointCloud::with_labels(pts, labels).unwrap();
        let r = random_rotation::<f64, _>(&mut rng);
        let pose = Pose::new(r, Vector3::new(tx, ty, tz), Vector3::new(sx, sy, sz)).unwrap();
        let stats = CategoryStats::new(Vector3::new(mx, my, mz)).unwrap();
        let res = residual_targets(&cloud, &pose, &stats).unwrap();
        let back = assemble_pose(&cloud, &res, &r, &stats).unwrap();
        prop_assert!((back.t - pose.t).norm() < 1e-12);
        prop_assert!((back.size - pose.size).norm() < 1e-12);
    }
}

#[test]
fn auc_of_uniform_errors_is_about_half() {
    let errors: Vec<f64> = (0..10_000).map(|i| (i as f64 + 0.5) / 10_000.0).collect();
    let c = auc_curve(&errors, 1.0, 1000).unwrap();
    assert!((c.auc - 0.5).abs() < 1e-3);
    let rot = RotationMatrix::<f64>::identity();
    assert!(geodesic_error(&rot, &rot) == 0.0);
}
