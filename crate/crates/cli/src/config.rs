//! TOML run configurations. Unknown keys are rejected and everything is
//! validated before any computation starts.

use std::path::{Path, PathBuf};

use fvr_core::augment::DeformBounds;
use fvr_core::fvr::{FvrParams, SymmetryClass};
use fvr_core::losses::LossKind;
use fvr_core::metrics::{self, EvalConfig};
use fvr_core::regressor::{GridSpec, HeadMode, Representation, TrainConfig};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::{usage, CliResult};
use crate::output::{check_identifier, read_text};

pub fn load<C: DeserializeOwned>(path: &Path) -> CliResult<C> {
    let text = read_text(path)?;
    toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Resolves `p` against the directory holding the config file.
pub fn resolve(config_path: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        config_path.parent().unwrap_or(Path::new(".")).join(p)
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum LossName {
    Mse,
    SmoothL1,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSection {
    pub learning_rate: f64,
    pub halving_period: usize,
    pub max_epochs: usize,
    pub batch_size: usize,
    pub template_points: usize,
    pub noise: f64,
    pub train_size: usize,
    pub test_size: usize,
    pub hidden_width: usize,
    pub loss: LossName,
}

impl Default for TrainSection {
    fn default() -> Self {
        let d = TrainConfig::default();
        Self {
            learning_rate: d.learning_rate,
            halving_period: d.halving_period,
            max_epochs: d.max_epochs,
            batch_size: d.batch_size,
            template_points: d.template_points,
            noise: d.noise,
            train_size: d.train_size,
            test_size: d.test_size,
            hidden_width: d.hidden_width,
            loss: LossName::Mse,
        }
    }
}

impl TrainSection {
    pub fn to_config(&self, seed: u64) -> CliResult<TrainConfig> {
        let c = TrainConfig {
            learning_rate: self.learning_rate,
            halving_period: self.halving_period,
            max_epochs: self.max_epochs,
            batch_size: self.batch_size,
            seed,
            template_points: self.template_points,
            noise: self.noise,
            train_size: self.train_size,
            test_size: self.test_size,
            hidden_width: self.hidden_width,
            loss: match self.loss {
                LossName::Mse => LossKind::Mse,
                LossName::SmoothL1 => LossKind::SmoothL1,
            },
        };
        c.validate().map_err(|e| usage(format!("[train] {e}")))?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FvrSection {
    pub length: f64,
    pub theta_g_deg: f64,
    pub theta_r_deg: f64,
}

impl Default for FvrSection {
    fn default() -> Self {
        Self {
            length: 1.0,
            theta_g_deg: 0.0,
            theta_r_deg: 0.0,
        }
    }
}

impl FvrSection {
    pub fn params(&self) -> CliResult<FvrParams<f64>> {
        FvrParams::from_degrees(self.length, self.theta_g_deg, self.theta_r_deg)
            .map_err(|e| usage(format!("[fvr] {e}")))
    }
}

fn default_id() -> String {
    "run".into()
}

fn default_modes() -> Vec<String> {
    vec!["whole".into()]
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

pub fn symmetry(symmetric: bool) -> SymmetryClass {
    if symmetric {
        SymmetryClass::AxisSymmetric
    } else {
        SymmetryClass::Asymmetric
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(default = "default_id")]
    pub experiment_id: String,
    pub representations: Vec<String>,
    #[serde(default = "default_modes")]
    pub modes: Vec<String>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub symmetric: bool,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub fvr: FvrSection,
}

pub struct BenchPlan {
    pub experiment_id: String,
    pub representations: Vec<Representation>,
    pub modes: Vec<HeadMode>,
    pub seeds: Vec<u64>,
    pub symmetry: SymmetryClass,
    pub train: Vec<TrainConfig>,
    pub fvr: FvrParams<f64>,
}

fn non_empty<T>(name: &str, v: &[T]) -> CliResult<()> {
    if v.is_empty() {
        Err(usage(format!("`{name}` must not be empty")))
    } else {
        Ok(())
    }
}

fn no_duplicates<T: PartialEq + std::fmt::Debug>(name: &str, v: &[T]) -> CliResult<()> {
    for (i, a) in v.iter().enumerate() {
        if v[..i].contains(a) {
            return Err(usage(format!("`{name}` lists {a:?} twice")));
        }
    }
    Ok(())
}

impl BenchConfig {
    pub fn plan(&self) -> CliResult<BenchPlan> {
        check_identifier(&self.experiment_id)?;
        non_empty("representations", &self.representations)?;
        non_empty("modes", &self.modes)?;
        non_empty("seeds", &self.seeds)?;
        let representations = self
            .representations
            .iter()
            .map(|r| r.parse::<Representation>().map_err(usage))
            .collect::<CliResult<Vec<_>>>()?;
        let modes = self
            .modes
            .iter()
            .map(|m| m.parse::<HeadMode>().map_err(usage))
            .collect::<CliResult<Vec<_>>>()?;
        no_duplicates("representations", &representations)?;
        no_duplicates("modes", &modes)?;
        no_duplicates("seeds", &self.seeds)?;
        let train = self
            .seeds
            .iter()
            .map(|&s| self.train.to_config(s))
            .collect::<CliResult<Vec<_>>>()?;
        Ok(BenchPlan {
            experiment_id: self.experiment_id.clone(),
            representations,
            modes,
            seeds: self.seeds.clone(),
            symmetry: symmetry(self.symmetric),
            train,
            fvr: self.fvr.params()?,
        })
    }
}

fn default_lengths() -> Vec<f64> {
    GridSpec::default().lengths
}

fn default_angles() -> Vec<f64> {
    GridSpec::default().theta_g_deg
}

fn default_grid_mode() -> String {
    "decoupled".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_id")]
    pub experiment_id: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_grid_mode")]
    pub mode: String,
    #[serde(default)]
    pub symmetric: bool,
    #[serde(default = "default_lengths")]
    pub lengths: Vec<f64>,
    #[serde(default = "default_angles")]
    pub theta_g_deg: Vec<f64>,
    #[serde(default = "default_angles")]
    pub theta_r_deg: Vec<f64>,
    #[serde(default)]
    pub train: TrainSection,
}

impl GridConfig {
    pub fn plan(&self) -> CliResult<(TrainConfig, GridSpec)> {
        check_identifier(&self.experiment_id)?;
        let spec = GridSpec {
            lengths: self.lengths.clone(),
            theta_g_deg: self.theta_g_deg.clone(),
            theta_r_deg: self.theta_r_deg.clone(),
            mode: self.mode.parse().map_err(usage)?,
            symmetry: symmetry(self.symmetric),
        };
        spec.validate().map_err(usage)?;
        no_duplicates("lengths", &spec.lengths)?;
        no_duplicates("theta_g_deg", &spec.theta_g_deg)?;
        no_duplicates("theta_r_deg", &spec.theta_r_deg)?;
        Ok((self.train.to_config(self.seed)?, spec))
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    Cloud,
    Depth,
}

fn default_format() -> InputFormat {
    InputFormat::Cloud
}

fn default_offsets() -> [f64; 2] {
    let (lo, hi) = DeformBounds::default().offset_fraction;
    [lo, hi]
}

fn default_taper() -> [f64; 2] {
    let (lo, hi) = DeformBounds::default().taper;
    [lo, hi]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AugmentConfig {
    pub input: PathBuf,
    #[serde(default = "default_format")]
    pub input_format: InputFormat,
    /// File with a single pose line.
    pub pose: PathBuf,
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    /// Face offsets as fractions of the half extent, `[low, high]`.
    #[serde(default = "default_offsets")]
    pub offset_fraction: [f64; 2],
    #[serde(default = "default_taper")]
    pub taper: [f64; 2],
    /// `[x_min, y_min, x_max, y_max]`, depth input only.
    pub gt_box: Option<[i64; 4]>,
    pub aug_box: Option<[i64; 4]>,
}

impl AugmentConfig {
    pub fn bounds(&self) -> CliResult<DeformBounds> {
        let b = DeformBounds {
            offset_fraction: (self.offset_fraction[0], self.offset_fraction[1]),
            taper: (self.taper[0], self.taper[1]),
        };
        b.validate().map_err(usage)?;
        if self.count == 0 {
            return Err(usage("`count` must be positive"));
        }
        match (self.input_format, self.gt_box, self.aug_box) {
            (InputFormat::Depth, Some(_), Some(_)) | (InputFormat::Cloud, None, None) => Ok(b),
            (InputFormat::Depth, _, _) => Err(usage("depth input needs `gt_box` and `aug_box`")),
            (InputFormat::Cloud, _, _) => Err(usage("`gt_box`/`aug_box` only apply to depth input")),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSection {
    pub iou_thresholds: Vec<f64>,
    /// `[degrees, centimeters]` pairs.
    pub pose_thresholds: Vec<[f64; 2]>,
    pub iou_samples: usize,
    pub seed: u64,
    pub rot_auc_max_deg: f64,
    pub add_auc_max: f64,
    pub auc_steps: usize,
}

impl Default for EvalSection {
    fn default() -> Self {
        let d = EvalConfig::default();
        Self {
            iou_thresholds: d.iou_thresholds,
            pose_thresholds: d.pose_thresholds.iter().map(|&(a, b)| [a, b]).collect(),
            iou_samples: d.iou_samples,
            seed: d.seed,
            rot_auc_max_deg: d.rot_auc_max_deg,
            add_auc_max: d.add_auc_max,
            auc_steps: d.auc_steps,
        }
    }
}

impl EvalSection {
    pub fn to_config(&self) -> CliResult<EvalConfig> {
        if self.iou_samples < metrics::MIN_IOU_SAMPLES {
            return Err(usage(format!(
                "iou_samples must be at least {}",
                metrics::MIN_IOU_SAMPLES
            )));
        }
        if self.iou_thresholds.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(usage("IoU thresholds must lie in [0, 1]"));
        }
        if self.pose_thresholds.iter().flatten().any(|t| !(*t > 0.0)) {
            return Err(usage("pose thresholds must be positive"));
        }
        if !(self.rot_auc_max_deg > 0.0) || !(self.add_auc_max > 0.0) || self.auc_steps == 0 {
            return Err(usage("AUC ranges and steps must be positive"));
        }
        Ok(EvalConfig {
            iou_thresholds: self.iou_thresholds.clone(),
            pose_thresholds: self.pose_thresholds.iter().map(|p| (p[0], p[1])).collect(),
            iou_samples: self.iou_samples,
            seed: self.seed,
            rot_auc_max_deg: self.rot_auc_max_deg,
            add_auc_max: self.add_auc_max,
            auc_steps: self.auc_steps,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let r: Result<BenchConfig, _> = toml::from_str("representations = [\"euler\"]\nepochs = 3\n");
        assert!(r.is_err());
        let r: Result<BenchConfig, _> = toml::from_str("representations = [\"euler\"]\n[train]\nlr = 1\n");
        assert!(r.is_err());
    }

    #[test]
    fn bench_defaults_and_validation() {
        let c: BenchConfig = toml::from_str("representations = [\"euler\", \"fvr\"]\n").unwrap();
        let p = c.plan().unwrap();
        assert_eq!(p.modes, vec![HeadMode::Whole]);
        assert_eq!(p.seeds, vec![0]);
        assert_eq!(p.train[0].max_epochs, 50);
        let bad: BenchConfig = toml::from_str("representations = [\"rodrigues\"]\n").unwrap();
        assert!(bad.plan().is_err());
        let dup: BenchConfig = toml::from_str("representations = [\"r6d\", \"r6d\"]\n").unwrap();
        assert!(dup.plan().is_err());
        let id: BenchConfig = toml::from_str("experiment_id = \"a,b\"\nrepresentations = [\"r6d\"]\n").unwrap();
        assert!(id.plan().is_err());
    }

    #[test]
    fn fold_over_bounds_rejected() {
        let c: AugmentConfig = toml::from_str(
            "input = \"c.txt\"\npose = \"p.txt\"\ncount = 2\noffset_fraction = [-1.5, 0.2]\n",
        )
        .unwrap();
        assert!(c.bounds().is_err());
        let ok: AugmentConfig = toml::from_str("input = \"c.txt\"\npose = \"p.txt\"\ncount = 2\n").unwrap();
        assert!(ok.bounds().is_ok());
    }

    #[test]
    fn grid_defaults() {
        let c: GridConfig = toml::from_str("").unwrap();
        let (_, spec) = c.plan().unwrap();
        assert_eq!(spec.cell_count(), 31);
        assert_eq!(spec.mode, HeadMode::Decoupled);
    }
}
