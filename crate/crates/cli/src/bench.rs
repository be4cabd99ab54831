//! Representation benchmark: one training run per representation × mode × seed.

use std::path::Path;

use fvr_core::fvr::SymmetryClass;
use fvr_core::regressor::{run_representation_experiment, FitReport, HeadConfig, HeadMode, Representation};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::BenchPlan;
use crate::error::{compute, CliResult};
use crate::output::{csv_line, ensure_dir, opt, write_atomic};

/// Thresholds (degrees) reported as accuracy columns.
pub const ACCURACY_THRESHOLDS_DEG: [f64; 3] = [5.0, 10.0, 20.0];

pub const RESULTS_HEADER: &str = "experiment_id,representation,mode,length,theta_g_deg,theta_r_deg,symmetric,seed,\
status,mean_deg,median_deg,acc_5deg,acc_10deg,acc_20deg,auc";

#[derive(Debug, Clone, Serialize)]
pub struct ResultRow {
    pub experiment_id: String,
    pub representation: String,
    pub mode: String,
    pub length: Option<f64>,
    pub theta_g_deg: Option<f64>,
    pub theta_r_deg: Option<f64>,
    pub symmetric: bool,
    pub seed: u64,
    pub status: String,
    pub mean_deg: Option<f64>,
    pub median_deg: Option<f64>,
    pub acc_5deg: Option<f64>,
    pub acc_10deg: Option<f64>,
    pub acc_20deg: Option<f64>,
    pub auc: Option<f64>,
    pub error: Option<String>,
}

impl ResultRow {
    fn csv(&self) -> String {
        csv_line(&[
            self.experiment_id.clone(),
            self.representation.clone(),
            self.mode.clone(),
            opt(self.length),
            opt(self.theta_g_deg),
            opt(self.theta_r_deg),
            self.symmetric.to_string(),
            self.seed.to_string(),
            self.status.clone(),
            opt(self.mean_deg),
            opt(self.median_deg),
            opt(self.acc_5deg),
            opt(self.acc_10deg),
            opt(self.acc_20deg),
            opt(self.auc),
        ])
    }
}

pub fn accuracy_below(errors: &[f64], tau: f64) -> f64 {
    errors.iter().filter(|e| **e < tau).count() as f64 / errors.len() as f64
}

struct Cell {
    representation: Representation,
    mode: HeadMode,
    seed_index: usize,
}

pub struct BenchOutcome {
    pub failed: usize,
    pub cells: usize,
}

pub fn run(plan: &BenchPlan, out_dir: &Path, timing: bool) -> CliResult<BenchOutcome> {
    let out_dir = ensure_dir(out_dir)?;
    let mut cells = Vec::new();
    for &representation in &plan.representations {
        for &mode in &plan.modes {
            for seed_index in 0..plan.seeds.len() {
                cells.push(Cell {
                    representation,
                    mode,
                    seed_index,
                });
            }
        }
    }
    let reports: Vec<Result<FitReport, String>> = cells
        .par_iter()
        .map(|c| {
            let head = if c.representation == Representation::Fvr {
                HeadConfig::fvr(c.mode, plan.fvr)
            } else {
                HeadConfig::new(c.mode, c.representation)
            }
            .with_symmetry(plan.symmetry);
            run_representation_experiment(&head, &plan.train[c.seed_index]).map_err(|e| e.to_string())
        })
        .collect();

    let deg = 180.0 / std::f64::consts::PI;
    let mut results = format!("{RESULTS_HEADER}\n");
    let mut jsonl = String::new();
    let mut curves = String::from("experiment_id,representation,mode,seed,threshold_deg,accuracy\n");
    let mut timings = String::from("experiment_id,representation,mode,seed,wall_clock_s\n");
    let mut failed = 0;
    for (c, report) in cells.iter().zip(&reports) {
        let seed = plan.seeds[c.seed_index];
        let is_fvr = c.representation == Representation::Fvr;
        let fvr_field = |v: f64| is_fvr.then_some(v);
        let mut row = ResultRow {
            experiment_id: plan.experiment_id.clone(),
            representation: c.representation.to_string(),
            mode: c.mode.to_string(),
            length: fvr_field(plan.fvr.l_g),
            theta_g_deg: fvr_field(plan.fvr.theta_g * deg),
            theta_r_deg: fvr_field(plan.fvr.theta_r * deg),
            symmetric: plan.symmetry == SymmetryClass::AxisSymmetric,
            seed,
            status: "ok".into(),
            mean_deg: None,
            median_deg: None,
            acc_5deg: None,
            acc_10deg: None,
            acc_20deg: None,
            auc: None,
            error: None,
        };
        match report {
            Ok(r) => {
                let acc: Vec<f64> = ACCURACY_THRESHOLDS_DEG
                    .iter()
                    .map(|&t| accuracy_below(&r.errors_deg, t))
                    .collect();
                row.mean_deg = Some(r.mean_deg);
                row.median_deg = Some(r.median_deg);
                row.acc_5deg = Some(acc[0]);
                row.acc_10deg = Some(acc[1]);
                row.acc_20deg = Some(acc[2]);
                row.auc = Some(r.curve.auc);
                for (t, a) in r.curve.thresholds.iter().zip(&r.curve.accuracy) {
                    curves.push_str(&csv_line(&[
                        plan.experiment_id.clone(),
                        row.representation.clone(),
                        row.mode.clone(),
                        seed.to_string(),
                        t.to_string(),
                        a.to_string(),
                    ]));
                }
                timings.push_str(&csv_line(&[
                    plan.experiment_id.clone(),
                    row.representation.clone(),
                    row.mode.clone(),
                    seed.to_string(),
                    r.wall_clock.as_secs_f64().to_string(),
                ]));
            }
            Err(e) => {
                failed += 1;
                eprintln!("cell {}/{}/seed {seed} failed: {e}", row.representation, row.mode);
                row.status = "failed".into();
                row.error = Some(e.clone());
            }
        }
        results.push_str(&row.csv());
        jsonl.push_str(&serde_json::to_string(&row).map_err(compute)?);
        jsonl.push('\n');
    }
    write_atomic(&out_dir.join("results.csv"), &results)?;
    write_atomic(&out_dir.join("results.jsonl"), &jsonl)?;
    write_atomic(&out_dir.join("curves.csv"), &curves)?;
    if timing {
        write_atomic(&out_dir.join("timing.csv"), &timings)?;
    }
    Ok(BenchOutcome {
        failed,
        cells: cells.len(),
    })
}
