use std::path::Path;

use fvr_core::fvr::SymmetryClass;
use fvr_core::io::{parse_point_cloud, parse_poses};
use fvr_core::losses::ModelPoints;
use fvr_core::metrics::{evaluate, EvalConfig, EvalSample, MetricReport};
use serde_json::json;

use crate::error::{compute, usage, CliResult};
use crate::output::{csv_line, ensure_dir, read_text, write_atomic};

pub const SAMPLES_HEADER: &str = "index,add,add_s,iou,rot_err_deg,trans_err_cm";

pub struct EvalInputs<'a> {
    pub pred: &'a Path,
    pub gt: &'a Path,
    pub model: &'a Path,
}

pub fn run(inputs: &EvalInputs<'_>, cfg: &EvalConfig, out_dir: &Path) -> CliResult<MetricReport> {
    let pred = parse_poses::<f64>(&read_text(inputs.pred)?).map_err(|e| usage(format!("predictions: {e}")))?;
    let gt = parse_poses::<f64>(&read_text(inputs.gt)?).map_err(|e| usage(format!("ground truth: {e}")))?;
    if pred.len() != gt.len() {
        return Err(usage(format!(
            "{} predicted poses for {} ground-truth poses",
            pred.len(),
            gt.len()
        )));
    }
    let model_cloud =
        parse_point_cloud::<f64>(&read_text(inputs.model)?).map_err(|e| usage(format!("model: {e}")))?;
    let model = ModelPoints::new(model_cloud.points().to_vec()).map_err(usage)?;
    let samples: Vec<EvalSample<f64>> = pred
        .iter()
        .zip(&gt)
        .map(|(p, g)| EvalSample {
            pred: p.pose,
            gt: g.pose,
            symmetry: g.symmetry.unwrap_or(SymmetryClass::Asymmetric),
        })
        .collect();
    let report = evaluate(&samples, &model, cfg).map_err(compute)?;

    let out_dir = ensure_dir(out_dir)?;
    let mut csv = format!("{SAMPLES_HEADER}\n");
    for (i, s) in report.samples.iter().enumerate() {
        csv.push_str(&csv_line(&[
            i.to_string(),
            s.add.to_string(),
            s.add_s.to_string(),
            s.iou.to_string(),
            s.rot_err_deg.to_string(),
            s.trans_err_cm.to_string(),
        ]));
    }
    let summary = json!({
        "count": report.samples.len(),
        "iou_accuracy": report.iou_accuracy.iter()
            .map(|(t, a)| json!({ "threshold": t, "accuracy": a }))
            .collect::<Vec<_>>(),
        "pose_accuracy": report.pose_accuracy.iter()
            .map(|(d, c, a)| json!({ "degrees": d, "centimeters": c, "accuracy": a }))
            .collect::<Vec<_>>(),
        "rot_auc": report.rot_auc,
        "add_auc": report.add_auc,
        "iou_samples": cfg.iou_samples,
        "seed": cfg.seed,
    });
    write_atomic(&out_dir.join("samples.csv"), &csv)?;
    let mut text = serde_json::to_string_pretty(&summary).map_err(compute)?;
    text.push('\n');
    write_atomic(&out_dir.join("report.json"), &text)?;
    Ok(report)
}
