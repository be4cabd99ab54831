//! Sequential grid search over the FVR parameters.

use std::fmt;

use rayon::prelude::*;

use super::experiment::{run_representation_experiment, FitReport, TrainConfig};
use super::heads::{HeadConfig, HeadMode};
use crate::error::{invalid, Error, Result};
use crate::fvr::{FvrParams, SymmetryClass};
use crate::real::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub lengths: Vec<f64>,
    pub theta_g_deg: Vec<f64>,
    pub theta_r_deg: Vec<f64>,
    pub mode: HeadMode,
    pub symmetry: SymmetryClass,
}

impl Default for GridSpec {
    fn default() -> Self {
        let angles: Vec<f64> = (0..12).map(|k| 30.0 * k as f64).collect();
        Self {
            lengths: vec![1.0, 10.0, 50.0, 100.0, 200.0, 500.0, 1000.0],
            theta_g_deg: angles.clone(),
            theta_r_deg: angles,
            mode: HeadMode::Decoupled,
            symmetry: SymmetryClass::Asymmetric,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.lengths.is_empty() {
            return Err(invalid("grid needs at least one length"));
        }
        if self.lengths.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
            return Err(invalid("grid lengths must be positive"));
        }
        if self.theta_g_deg.iter().chain(&self.theta_r_deg).any(|a| !a.is_finite()) {
            return Err(invalid("grid angles must be finite"));
        }
        Ok(())
    }

    /// Symmetric objects only sweep the length.
    fn angle_sweeps(&self) -> bool {
        self.symmetry == SymmetryClass::Asymmetric
    }

    /// Number of cells the search will emit.
    pub fn cell_count(&self) -> usize {
        if self.angle_sweeps() {
            self.lengths.len() + self.theta_g_deg.len() + self.theta_r_deg.len()
        } else {
            self.lengths.len()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    Length,
    ThetaG,
    ThetaR,
}

impl Sweep {
    pub fn name(self) -> &'static str {
        match self {
            Sweep::Length => "length",
            Sweep::ThetaG => "theta_g",
            Sweep::ThetaR => "theta_r",
        }
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct GridCell {
    pub sweep: Sweep,
    pub length: f64,
    pub theta_g_deg: f64,
    pub theta_r_deg: f64,
    /// Failed cells keep the error message and never win.
    pub outcome: std::result::Result<FitReport, String>,
}

impl GridCell {
    pub fn mean_deg(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|r| r.mean_deg)
    }

    fn swept_value(&self) -> f64 {
        match self.sweep {
            Sweep::Length => self.length,
            Sweep::ThetaG => self.theta_g_deg,
            Sweep::ThetaR => self.theta_r_deg,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GridSearch<T: Real> {
    /// All cells in sweep order.
    pub cells: Vec<GridCell>,
    /// Index of the winning cell.
    pub best: usize,
    pub best_params: FvrParams<T>,
}

impl<T: Real> GridSearch<T> {
    pub fn best_cell(&self) -> &GridCell {
        &self.cells[self.best]
    }

    pub fn best_report(&self) -> &FitReport {
        self.cells[self.best]
            .outcome
            .as_ref()
            .expect("winning cell completed")
    }
}

/// Index of the completed cell with the lowest mean error; ties go to the
/// smaller swept value.
pub fn argmin_cells(cells: &[GridCell]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in cells.iter().enumerate() {
        let Some(m) = c.mean_deg() else { continue };
        let better = match best {
            None => true,
            Some((j, bm)) => m < bm || (m == bm && c.swept_value() < cells[j].swept_value()),
        };
        if better {
            best = Some((i, m));
        }
    }
    best.map(|(i, _)| i)
}

fn params<T: Real>(length: f64, g: f64, r: f64) -> Result<FvrParams<T>> {
    FvrParams::from_degrees(T::lit(length), T::lit(g), T::lit(r))
}

fn run_sweep<T: Real>(
    base: &TrainConfig,
    spec: &GridSpec,
    sweep: Sweep,
    points: Vec<(f64, f64, f64)>,
    done: &[GridCell],
) -> Vec<GridCell> {
    points
        .into_par_iter()
        .map(|(length, g, r)| {
            // Cells repeated from an earlier sweep are reused, not retrained.
            let previous = done
                .iter()
                .find(|c| c.length == length && c.theta_g_deg == g && c.theta_r_deg == r);
            let outcome = match previous {
                Some(c) => c.outcome.clone(),
                None => params::<T>(length, g, r)
                    .and_then(|p| {
                        let head = HeadConfig::fvr(spec.mode, p).with_symmetry(spec.symmetry);
                        run_representation_experiment(&head, base)
                    })
                    .map_err(|e| e.to_string()),
            };
            GridCell {
                sweep,
                length,
                theta_g_deg: g,
                theta_r_deg: r,
                outcome,
            }
        })
        .collect()
}

fn sweep_best(cells: &[GridCell], sweep: Sweep) -> Result<&GridCell> {
    argmin_cells(cells).map(|i| &cells[i]).ok_or_else(|| {
        let reasons: Vec<&str> = cells
            .iter()
            .filter_map(|c| c.outcome.as_ref().err().map(String::as_str))
            .collect();
        Error::TrainingDiverged {
            epoch: 0,
            reason: format!("every {sweep} cell failed: {}", reasons.join("; ")),
        }
    })
}

/// Sweeps the shared length with both angles at 0, then `θ_g` at the best
/// length, then `θ_r` at the best length and `θ_g`. Cells within a sweep
/// train in parallel. The winner is the lowest mean error over every
/// completed cell.
pub fn fvr_grid_search<T: Real>(base: &TrainConfig, spec: &GridSpec) -> Result<GridSearch<T>> {
    base.validate()?;
    spec.validate()?;
    let mut cells = run_sweep::<T>(
        base,
        spec,
        Sweep::Length,
        spec.lengths.iter().map(|&l| (l, 0.0, 0.0)).collect(),
        &[],
    );
    let best_l = sweep_best(&cells, Sweep::Length)?.length;
    if spec.angle_sweeps() {
        let g_cells = run_sweep::<T>(
            base,
            spec,
            Sweep::ThetaG,
            spec.theta_g_deg.iter().map(|&g| (best_l, g, 0.0)).collect(),
            &cells,
        );
        let best_g = match argmin_cells(&g_cells) {
            Some(i) => g_cells[i].theta_g_deg,
            None => 0.0,
        };
        cells.extend(g_cells);
        let r_cells = run_sweep::<T>(
            base,
            spec,
            Sweep::ThetaR,
            spec.theta_r_deg.iter().map(|&r| (best_l, best_g, r)).collect(),
            &cells,
        );
        cells.extend(r_cells);
    }
    let best = argmin_cells(&cells).ok_or_else(|| invalid("no grid cell completed"))?;
    let c = &cells[best];
    let best_params = params(c.length, c.theta_g_deg, c.theta_r_deg)?;
    Ok(GridSearch {
        cells,
        best,
        best_params,
    })
}
