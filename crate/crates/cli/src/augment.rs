use std::path::Path;

use fvr_core::augment::{deform, fast_relabel, sample_deformation, Box2d, DeformCage, PointCloud};
use fvr_core::io::{parse_depth_image, parse_point_cloud, parse_poses, write_point_cloud};
use fvr_core::seed::derive_seed;
use serde_json::json;

use crate::config::{resolve, AugmentConfig, InputFormat};
use crate::error::{compute, usage, CliResult};
use crate::output::{ensure_dir, read_text, write_atomic};

fn to_box(b: [i64; 4]) -> CliResult<Box2d> {
    Box2d::new(b[0], b[1], b[2], b[3]).map_err(usage)
}

/// File name of variant `index`; the seed is part of it so runs with
/// different seeds can share a directory.
pub fn variant_name(seed: u64, index: usize) -> String {
    format!("deformed_s{seed}_{index:04}.txt")
}

pub fn run(cfg: &AugmentConfig, config_path: &Path, out_dir: &Path) -> CliResult<()> {
    let bounds = cfg.bounds()?;
    let input_text = read_text(&resolve(config_path, &cfg.input))?;
    let pose_text = read_text(&resolve(config_path, &cfg.pose))?;
    let poses = parse_poses::<f64>(&pose_text).map_err(|e| usage(format!("pose file: {e}")))?;
    let [pose] = poses.as_slice() else {
        return Err(usage(format!("pose file must hold exactly one pose, found {}", poses.len())));
    };
    let pose = pose.pose;
    let cloud: PointCloud<f64> = match cfg.input_format {
        InputFormat::Cloud => parse_point_cloud(&input_text).map_err(|e| usage(format!("input cloud: {e}")))?,
        InputFormat::Depth => {
            let depth = parse_depth_image(&input_text).map_err(|e| usage(format!("input depth: {e}")))?;
            let (gt, aug) = (cfg.gt_box.expect("validated"), cfg.aug_box.expect("validated"));
            fast_relabel(&depth, &to_box(gt)?, &to_box(aug)?).map_err(compute)?
        }
    };
    if cloud.is_empty() {
        return Err(compute("input yields no points"));
    }
    let out_dir = ensure_dir(out_dir)?;
    let cage = DeformCage::from_pose(&pose);
    let mut log = String::new();
    for i in 0..cfg.count {
        let params = sample_deformation(derive_seed(&format!("augment/{i}"), cfg.seed), &bounds, &cage)
            .map_err(compute)?;
        let deformed = deform(&cloud, &pose, &cage, &params).map_err(compute)?;
        let name = variant_name(cfg.seed, i);
        write_atomic(&out_dir.join(&name), &write_point_cloud(&deformed))?;
        let entry = json!({
            "file": name,
            "index": i,
            "seed": cfg.seed,
            "face_offsets": params.face_offsets,
            "taper": params.taper,
        });
        log.push_str(&serde_json::to_string(&entry).map_err(compute)?);
        log.push('\n');
    }
    write_atomic(&out_dir.join(format!("deformations_s{}.jsonl", cfg.seed)), &log)
}
