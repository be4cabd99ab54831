use fvr_core::augment::{Label, PointCloud, Pose};
use fvr_core::fvr::SymmetryClass;
use fvr_core::io::*;
use fvr_core::seed::task_rng;
use fvr_core::so3::random_rotation;
use nalgebra::Vector3;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..1e6f64, -1.0..1.0f64, Just(0.0), Just(-0.0), Just(1e-300)]
}

fn point() -> impl Strategy<Value = Vector3<f64>> {
    (finite(), finite(), finite()).prop_map(|(x, y, z)| Vector3::new(x, y, z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn cloud_text_is_lossless(pts in proptest::collection::vec(point(), 1..30), labelled in any::<bool>()) {
        let cloud = if labelled {
            let labels = (0..pts.len()).map(|i| if i % 3 == 0 { Label::Background } else { Label::Object }).collect();
            PointCloud::with_labels(pts, labels).unwrap()
        } else {
            PointCloud::new(pts).unwrap()
        };
        let text = write_point_cloud(&cloud);
        let back = parse_point_cloud::<f64>(&text).unwrap();
        prop_assert_eq!(&back, &cloud);
        prop_assert_eq!(write_point_cloud(&back), text);
    }

    #[test]
    fn pose_text_is_lossless(seed in any::<u64>(), n in 1usize..6, t in point(),
                             s in (0.01..5.0f64, 0.01..5.0f64, 0.01..5.0f64), tag in 0u8..3) {
        let mut rng = task_rng("io-poses", seed);
        let records: Vec<_> = (0..n)
            .map(|i| PoseRecord {
                pose: Pose::new(random_rotation(&mut rng), t * i as f64, Vector3::new(s.0, s.1, s.2)).unwrap(),
                symmetry: match tag {
                    0 => None,
                    1 => Some(SymmetryClass::Asymmetric),
                    _ => Some(SymmetryClass::AxisSymmetric),
                },
            })
            .collect();
        let text = write_poses(&records);
        let back = parse_poses::<f64>(&text).unwrap();
        prop_assert_eq!(back.len(), records.len());
        for (a, b) in back.iter().zip(&records) {
            prop_assert_eq!(a.symmetry, b.symmetry);
            prop_assert!((a.pose.r.matrix() - b.pose.r.matrix()).abs().max() < 1e-15);
            prop_assert_eq!(a.pose.t, b.pose.t);
            prop_assert_eq!(a.pose.size, b.pose.size);
        }
    }
}

#[test]
fn slightly_rounded_rotation_is_repaired_and_larger_drift_rejected() {
    let rounded = "0.7071 -0.7071 0  0.7071 0.7071 0  0 0 1  0 0 1  1 1 1\n";
    let p = &parse_poses::<f64>(rounded).unwrap()[0].pose;
    let m = p.r.matrix();
    assert!((m.transpose() * m - nalgebra::Matrix3::identity()).abs().max() < 1e-12);
    let drifted = "0.8 -0.7071 0  0.7071 0.7071 0  0 0 1  0 0 1  1 1 1\n";
    assert!(parse_poses::<f64>(drifted).is_err());
}
