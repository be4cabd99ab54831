use std::path::Path;

use fvr_core::regressor::{fvr_grid_search, GridSpec, TrainConfig};
use serde_json::json;

use crate::error::{compute, CliResult};
use crate::output::{csv_line, ensure_dir, opt, write_atomic};

pub const GRID_HEADER: &str = "experiment_id,sweep,length,theta_g_deg,theta_r_deg,status,mean_deg,median_deg";

/// Writes `grid.csv` (every cell) and `best.json` (the winner).
pub fn run(experiment_id: &str, train: &TrainConfig, spec: &GridSpec, out_dir: &Path) -> CliResult<()> {
    let out_dir = ensure_dir(out_dir)?;
    let search = fvr_grid_search::<f64>(train, spec).map_err(compute)?;
    let mut csv = format!("{GRID_HEADER}\n");
    for c in &search.cells {
        if let Err(e) = &c.outcome {
            eprintln!(
                "cell {} L={} θg={} θr={} failed: {e}",
                c.sweep, c.length, c.theta_g_deg, c.theta_r_deg
            );
        }
        let report = c.outcome.as_ref().ok();
        csv.push_str(&csv_line(&[
            experiment_id.to_string(),
            c.sweep.to_string(),
            c.length.to_string(),
            c.theta_g_deg.to_string(),
            c.theta_r_deg.to_string(),
            if report.is_some() { "ok" } else { "failed" }.to_string(),
            opt(report.map(|r| r.mean_deg)),
            opt(report.map(|r| r.median_deg)),
        ]));
    }
    let best = search.best_cell();
    let report = search.best_report();
    let best_json = json!({
        "experiment_id": experiment_id,
        "mode": spec.mode.to_string(),
        "length": best.length,
        "theta_g_deg": best.theta_g_deg,
        "theta_r_deg": best.theta_r_deg,
        "mean_deg": report.mean_deg,
        "median_deg": report.median_deg,
        "cells": search.cells.len(),
        "failed_cells": search.cells.iter().filter(|c| c.outcome.is_err()).count(),
    });
    write_atomic(&out_dir.join("grid.csv"), &csv)?;
    let mut text = serde_json::to_string_pretty(&best_json).map_err(compute)?;
    text.push('\n');
    write_atomic(&out_dir.join("best.json"), &text)
}
