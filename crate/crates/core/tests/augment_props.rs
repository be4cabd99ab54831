use fvr_core::augment::*;
use fvr_core::so3::{quat_to_matrix, Quaternion, RotationMatrix};
use nalgebra::Vector3;
use proptest::prelude::*;

fn cage() -> impl Strategy<Value = DeformCage<f64>> {
    (0.01..1.0f64, 0.01..1.0f64, 0.01..1.0f64).prop_map(|(x, y, z)| DeformCage::new(Vector3::new(x, y, z)).unwrap())
}

fn bounds() -> impl Strategy<Value = DeformBounds> {
    (-0.9..0.0f64, 0.0..0.9f64, 0.3..1.0f64, 1.0..2.0f64).prop_map(|(olo, ohi, tlo, thi)| DeformBounds {
        offset_fraction: (olo, ohi),
        taper: (tlo, thi),
    })
}

fn unit3() -> impl Strategy<Value = Vector3<f64>> {
    (-1.0..=1.0f64, -1.0..=1.0f64, -1.0..=1.0f64).prop_map(|(x, y, z)| Vector3::new(x, y, z))
}

fn corner_aabb(corners: &[Vector3<f64>]) -> (Vector3<f64>, Vector3<f64>) {
    let mut lo = Vector3::repeat(f64::INFINITY);
    let mut hi = Vector3::repeat(f64::NEG_INFINITY);
    for c in corners {
        lo = lo.inf(c);
        hi = hi.sup(c);
    }
    (lo, hi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn deformed_points_stay_in_deformed_cage(c in cage(), b in bounds(), seed in any::<u64>(), u in unit3()) {
        let params = sample_deformation(seed, &b, &c).unwrap();
        let p = u.component_mul(c.half_extents());
        let q = canonical_face_map(&p, &c, &params);
        let (lo, hi) = corner_aabb(&c.deformed_corners(&params));
        for a in 0..3 {
            prop_assert!(q[a] >= lo[a] - 1e-9 && q[a] <= hi[a] + 1e-9);
        }
    }

    #[test]
    fn per_axis_order_is_preserved(c in cage(), b in bounds(), seed in any::<u64>(), u in unit3(),
                                   axis in 0usize..3, s in -1.0..=1.0f64, t in -1.0..=1.0f64) {
        let (s, t) = (s.min(t), s.max(t));
        prop_assume!(t - s > 1e-9);
        let params = sample_deformation(seed, &b, &c).unwrap();
        let mut p = u.component_mul(c.half_extents());
        let mut q = p;
        p[axis] = s * c.half_extents()[axis];
        q[axis] = t * c.half_extents()[axis];
        let (fp, fq) = (canonical_face_map(&p, &c, &params), canonical_face_map(&q, &c, &params));
        prop_assert!(fp[axis] < fq[axis]);
    }

    #[test]
    fn identity_parameters_fix_every_point(c in cage(), u in unit3(), t in unit3(),
                                           q in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, 0.1..1.0f64)) {
        let r = quat_to_matrix(&Quaternion::new(q.3, q.0, q.1, q.2).normalized().unwrap()).unwrap();
        let pose = Pose::new(r, t, c.half_extents() * 2.0).unwrap();
        let p = pose.transform(&u.component_mul(c.half_extents()));
        let cloud = PointCloud::new(vec![p]).unwrap();
        let out = deform(&cloud, &pose, &c, &DeformParams::identity()).unwrap();
        prop_assert!((out.points()[0] - p).norm() < 1e-12);
    }
}

/// Brute-force labels: every pixel of `aug` with valid depth is an object
/// point if it also lies in `gt`.
fn oracle(d: &DepthImage<f64>, gt: &Box2d, aug: &Box2d) -> Vec<(Vector3<f64>, Label)> {
    let k = *d.intrinsics();
    let mut out = Vec::new();
    for v in 0..d.height() as i64 {
        for u in 0..d.width() as i64 {
            let z = d.at(u as usize, v as usize);
            if !aug.contains(u, v) || z <= 0.0 {
                continue;
            }
            let p = Vector3::new((u as f64 - k.cx) * z / k.fx, (v as f64 - k.cy) * z / k.fy, z);
            let label = if gt.contains(u, v) { Label::Object } else { Label::Background };
            out.push((p, label));
        }
    }
    out
}

fn key(p: &Vector3<f64>) -> [u64; 3] {
    [p.x.to_bits(), p.y.to_bits(), p.z.to_bits()]
}

fn any_box(w: i64, h: i64) -> impl Strategy<Value = Box2d> {
    (-3..w + 3, -3..h + 3, 1..w + 4, 1..h + 4).prop_map(|(x, y, dw, dh)| Box2d::new(x, y, x + dw, y + dh).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn fast_relabel_matches_pixel_oracle(gt in any_box(12, 9), aug in any_box(12, 9),
                                         depth in proptest::collection::vec(prop_oneof![Just(0.0), 0.2..3.0f64], 108)) {
        let d = DepthImage::new(12, 9, depth, Intrinsics { fx: 300.0, fy: 310.0, cx: 5.5, cy: 4.0 }).unwrap();
        let fast = fast_relabel(&d, &gt, &aug);
        if aug.clamp_to(12, 9).is_none() {
            prop_assert!(fast.is_err());
            return Ok(());
        }
        let fast = fast.unwrap();
        let mut got: Vec<_> = fast
            .points()
            .iter()
            .zip(fast.labels().unwrap())
            .map(|(p, l)| (key(p), *l))
            .collect();
        let mut want: Vec<_> = oracle(&d, &gt, &aug).iter().map(|(p, l)| (key(p), *l)).collect();
        got.sort_by_key(|(k, l)| (*k, l.as_u8()));
        want.sort_by_key(|(k, l)| (*k, l.as_u8()));
        prop_assert_eq!(got, want);
    }
}

#[test]
fn deform_rejects_empty_and_fold_over() {
    let c = DeformCage::new(Vector3::repeat(0.5)).unwrap();
    let pose = Pose::new(RotationMatrix::identity(), Vector3::zeros(), Vector3::repeat(1.0)).unwrap();
    let empty = PointCloud::<f64>::new(vec![]).unwrap();
    assert!(deform(&empty, &pose, &c, &DeformParams::identity()).is_err());
    let mut fold = DeformParams::identity();
    fold.face_offsets[0] = -0.6;
    fold.face_offsets[1] = -0.6;
    let one = PointCloud::new(vec![Vector3::zeros()]).unwrap();
    assert!(deform(&one, &pose, &c, &fold).is_err());
}
