//! Desk-scale rotation regression: rotated template clouds in, rotation
//! representation out.

use std::time::{Duration, Instant};

use nalgebra::Vector3;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::adam::{adam_step, AdamState};
use super::heads::HeadConfig;
use super::net::{Activation, DenseNet, Trace};
use crate::error::{invalid, Error, Result};
use crate::losses::LossKind;
use crate::metrics::{auc_curve, AccuracyCurve};
use crate::real::Real;
use crate::seed::{derive_seed, task_rng};
use crate::so3::{random_rotation, RotationMatrix};

/// Upper end of the accuracy-vs-threshold curve in a [`FitReport`], degrees.
pub const CURVE_MAX_DEG: f64 = 60.0;
pub const CURVE_STEPS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    /// The learning rate halves every this many epochs.
    pub halving_period: usize,
    pub max_epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub template_points: usize,
    /// Standard deviation of Gaussian input noise; 0 disables it.
    pub noise: f64,
    pub train_size: usize,
    pub test_size: usize,
    pub hidden_width: usize,
    pub loss: LossKind,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            halving_period: 10,
            max_epochs: 50,
            batch_size: 32,
            seed: 0,
            template_points: 32,
            noise: 0.0,
            train_size: 2048,
            test_size: 256,
            hidden_width: 128,
            loss: LossKind::Mse,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(invalid("learning rate must be positive"));
        }
        let counts = [
            ("halving_period", self.halving_period),
            ("max_epochs", self.max_epochs),
            ("batch_size", self.batch_size),
            ("template_points", self.template_points),
            ("train_size", self.train_size),
            ("test_size", self.test_size),
            ("hidden_width", self.hidden_width),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(invalid(format!("{name} must be positive")));
        }
        if !(self.noise >= 0.0) || !self.noise.is_finite() {
            return Err(invalid("noise must be a finite non-negative number"));
        }
        Ok(())
    }

    pub fn learning_rate_at(&self, epoch: usize) -> f64 {
        self.learning_rate * 0.5f64.powi((epoch / self.halving_period) as i32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    /// Held-out geodesic errors, degrees, in test-set order.
    pub errors_deg: Vec<f64>,
    pub mean_deg: f64,
    pub median_deg: f64,
    pub curve: AccuracyCurve,
    /// Mean training loss of the last epoch.
    pub final_train_loss: f64,
    pub wall_clock: Duration,
}

impl FitReport {
    pub fn from_errors(errors_deg: Vec<f64>, final_train_loss: f64, wall_clock: Duration) -> Result<Self> {
        if errors_deg.is_empty() {
            return Err(invalid("no test errors"));
        }
        let n = errors_deg.len();
        let mean_deg = errors_deg.iter().sum::<f64>() / n as f64;
        let mut sorted = errors_deg.clone();
        sorted.sort_by(f64::total_cmp);
        let median_deg = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        let curve = auc_curve(&errors_deg, CURVE_MAX_DEG, CURVE_STEPS)?;
        Ok(Self {
            errors_deg,
            mean_deg,
            median_deg,
            curve,
            final_train_loss,
            wall_clock,
        })
    }

    /// Equality of everything except the wall-clock time.
    pub fn same_results(&self, other: &FitReport) -> bool {
        self.errors_deg == other.errors_deg
            && self.final_train_loss == other.final_train_loss
            && self.curve == other.curve
    }
}

/// Shared trunk followed by one branch per head. Each path from input to
/// output has two hidden leaky-ReLU layers.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationRegressor<T: Real> {
    pub trunk: DenseNet<T>,
    pub heads: Vec<DenseNet<T>>,
}

pub struct RegressorTrace<T> {
    trunk: Trace<T>,
    heads: Vec<Trace<T>>,
}

impl<T: Real> RegressorTrace<T> {
    pub fn output(&self) -> Vec<T> {
        self.heads.iter().flat_map(|h| h.output().iter().copied()).collect()
    }
}

impl<T: Real> RotationRegressor<T> {
    pub fn new(input: usize, hidden: usize, head_sizes: &[usize], seed: u64) -> Result<Self> {
        if head_sizes.is_empty() {
            return Err(invalid("regressor needs at least one head"));
        }
        let trunk = DenseNet::new(
            &[input, hidden],
            Activation::LeakyRelu,
            Activation::LeakyRelu,
            derive_seed("trunk", seed),
        )?;
        let heads = head_sizes
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                DenseNet::new(
                    &[hidden, hidden, k],
                    Activation::LeakyRelu,
                    Activation::Identity,
                    derive_seed(&format!("head/{i}"), seed),
                )
            })
            .collect::<Result<_>>()?;
        Ok(Self { trunk, heads })
    }

    pub fn output_dim(&self) -> usize {
        self.heads.iter().map(DenseNet::output_dim).sum()
    }

    pub fn forward(&self, input: &[T]) -> Result<Vec<T>> {
        let h = self.trunk.forward(input)?;
        let mut out = Vec::with_capacity(self.output_dim());
        for head in &self.heads {
            out.extend(head.forward(&h)?);
        }
        Ok(out)
    }

    pub fn forward_trace(&self, input: &[T]) -> Result<RegressorTrace<T>> {
        let trunk = self.trunk.forward_trace(input)?;
        let heads = self
            .heads
            .iter()
            .map(|h| h.forward_trace(trunk.output()))
            .collect::<Result<_>>()?;
        Ok(RegressorTrace { trunk, heads })
    }

    /// Zeroed gradient buffers: trunk first, then each head.
    pub fn zero_grads(&self) -> Vec<Vec<T>> {
        std::iter::once(&self.trunk)
            .chain(&self.heads)
            .map(|n| vec![T::zero(); n.param_count()])
            .collect()
    }

    /// Accumulates `∂loss/∂params` into `acc` (layout of [`Self::zero_grads`]).
    pub fn backward_trace(&self, trace: &RegressorTrace<T>, upstream: &[T], acc: &mut [Vec<T>]) -> Result<()> {
        if upstream.len() != self.output_dim() || acc.len() != self.heads.len() + 1 {
            return Err(invalid("upstream gradient or buffers do not match the regressor"));
        }
        let mut trunk_up = vec![T::zero(); self.trunk.output_dim()];
        let mut offset = 0;
        for (i, head) in self.heads.iter().enumerate() {
            let k = head.output_dim();
            let g = head.backward_trace(&trace.heads[i], &upstream[offset..offset + k], &mut acc[i + 1])?;
            trunk_up.iter_mut().zip(g).for_each(|(a, b)| *a += b);
            offset += k;
        }
        self.trunk.backward_trace(&trace.trunk, &trunk_up, &mut acc[0])?;
        Ok(())
    }

    pub fn backward(&self, input: &[T], upstream: &[T]) -> Result<Vec<Vec<T>>> {
        let trace = self.forward_trace(input)?;
        let mut acc = self.zero_grads();
        self.backward_trace(&trace, upstream, &mut acc)?;
        Ok(acc)
    }

    fn nets_mut(&mut self) -> impl Iterator<Item = &mut DenseNet<T>> {
        std::iter::once(&mut self.trunk).chain(self.heads.iter_mut())
    }
}

/// Canonical template: `n` points uniform in the unit cube centred at 0.
pub fn template_points<T: Real>(n: usize, seed: u64) -> Vec<Vector3<T>> {
    let mut rng = task_rng("template", seed);
    (0..n)
        .map(|_| {
            Vector3::new(
                T::lit(rng.gen_range(-0.5..0.5)),
                T::lit(rng.gen_range(-0.5..0.5)),
                T::lit(rng.gen_range(-0.5..0.5)),
            )
        })
        .collect()
}

/// `n` samples of (flattened rotated template, rotation).
pub fn rotated_samples<T: Real>(
    template: &[Vector3<T>],
    n: usize,
    noise: f64,
    task: &str,
    seed: u64,
) -> Result<Vec<(Vec<T>, RotationMatrix<T>)>> {
    let mut rot_rng = task_rng(&format!("{task}/rotations"), seed);
    let mut noise_rng = task_rng(&format!("{task}/noise"), seed);
    let normal = Normal::new(0.0, noise).map_err(|e| invalid(format!("noise: {e}")))?;
    Ok((0..n)
        .map(|_| {
            let r = random_rotation::<T, _>(&mut rot_rng);
            let mut input = Vec::with_capacity(3 * template.len());
            for p in template {
                let q = r.apply(p);
                for c in q.iter() {
                    let jitter = if noise > 0.0 { normal.sample(&mut noise_rng) } else { 0.0 };
                    input.push(*c + T::lit(jitter));
                }
            }
            (input, r)
        })
        .collect())
}

/// Trains a [`RotationRegressor`] for `head` and scores it on a held-out set.
/// Single-threaded and deterministic in `train.seed`.
pub fn run_representation_experiment<T: Real>(head: &HeadConfig<T>, train: &TrainConfig) -> Result<FitReport> {
    head.validate()?;
    train.validate()?;
    let start = Instant::now();
    let seed = train.seed;
    let template = template_points::<T>(train.template_points, seed);
    let train_set = rotated_samples(&template, train.train_size, train.noise, "train", seed)?;
    let test_set = rotated_samples(&template, train.test_size, train.noise, "test", seed)?;
    let targets = train_set
        .iter()
        .map(|(_, r)| head.target(r))
        .collect::<Result<Vec<_>>>()?;

    let mut model = RotationRegressor::new(
        3 * train.template_points,
        train.hidden_width,
        &head.head_sizes(),
        derive_seed("init", seed),
    )?;
    let mut states: Vec<AdamState<T>> = model.nets_mut().map(|n| AdamState::new(n.param_count())).collect();
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut shuffle_rng = task_rng("shuffle", seed);
    let mut final_loss = f64::NAN;

    for epoch in 0..train.max_epochs {
        let lr = T::lit(train.learning_rate_at(epoch));
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(train.batch_size) {
            let mut acc = model.zero_grads();
            let scale = T::one() / T::lit(batch.len() as f64);
            for &i in batch {
                let trace = model.forward_trace(&train_set[i].0)?;
                let loss = train.loss.eval(&trace.output(), &targets[i])?;
                if !loss.value.is_finite() {
                    return Err(Error::TrainingDiverged {
                        epoch,
                        reason: "non-finite training loss".into(),
                    });
                }
                epoch_loss += loss.value.as_f64();
                let up: Vec<T> = loss.gradient.iter().map(|g| *g * scale).collect();
                model.backward_trace(&trace, &up, &mut acc)?;
            }
            for ((net, state), grads) in model.nets_mut().zip(states.iter_mut()).zip(&acc) {
                adam_step(net.params_mut(), grads, state, lr).map_err(|e| match e {
                    Error::TrainingDiverged { reason, .. } => Error::TrainingDiverged { epoch, reason },
                    other => other,
                })?;
            }
        }
        final_loss = epoch_loss / train_set.len() as f64;
    }

    let deg = 180.0 / std::f64::consts::PI;
    let errors = test_set
        .iter()
        .map(|(x, r)| {
            let out = model.forward(x)?;
            Ok(head.rotation_error(&out, r)?.as_f64() * deg)
        })
        .collect::<Result<Vec<f64>>>()?;
    FitReport::from_errors(errors, final_loss, start.elapsed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fvr::FvrParams;
    use crate::regressor::heads::{HeadMode, Representation};

    fn tiny() -> TrainConfig {
        TrainConfig {
            max_epochs: 2,
            train_size: 64,
            test_size: 16,
            hidden_width: 16,
            template_points: 8,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn same_seed_same_report() {
        let head = HeadConfig::<f64>::new(HeadMode::Whole, Representation::R6d);
        let a = run_representation_experiment(&head, &tiny()).unwrap();
        let b = run_representation_experiment(&head, &tiny()).unwrap();
        assert!(a.same_results(&b));
        let c = run_representation_experiment(&head, &TrainConfig { seed: 1, ..tiny() }).unwrap();
        assert!(!a.same_results(&c));
    }

    #[test]
    fn report_statistics() {
        let r = FitReport::from_errors(vec![4.0, 1.0, 3.0, 2.0], 0.0, Duration::ZERO).unwrap();
        assert_eq!(r.mean_deg, 2.5);
        assert_eq!(r.median_deg, 2.5);
        assert!(FitReport::from_errors(vec![], 0.0, Duration::ZERO).is_err());
    }

    #[test]
    fn errors_stay_in_range() {
        let head = HeadConfig::fvr(HeadMode::Decoupled, FvrParams::<f32>::from_degrees(10.0, 30.0, 0.0).unwrap());
        let r = run_representation_experiment(&head, &tiny()).unwrap();
        assert_eq!(r.errors_deg.len(), 16);
        assert!(r.errors_deg.iter().all(|e| (0.0..=180.0).contains(e)));
    }

    #[test]
    fn lr_schedule_halves() {
        let c = TrainConfig::default();
        assert_eq!(c.learning_rate_at(0), 1e-3);
        assert_eq!(c.learning_rate_at(9), 1e-3);
        assert_eq!(c.learning_rate_at(10), 5e-4);
        assert_eq!(c.learning_rate_at(25), 2.5e-4);
        assert!(TrainConfig { batch_size: 0, ..c.clone() }.validate().is_err());
        assert!(TrainConfig { noise: -1.0, ..c }.validate().is_err());
    }

    #[test]
    fn huge_learning_rate_diverges_with_epoch() {
        let head = HeadConfig::<f64>::new(HeadMode::Whole, Representation::Matrix);
        let cfg = TrainConfig {
            learning_rate: 1e300,
            ..tiny()
        };
        match run_representation_experiment(&head, &cfg) {
            Err(Error::TrainingDiverged { epoch, .. }) => assert!(epoch < cfg.max_epochs),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn regressor_gradient_matches_finite_differences() {
        let model = RotationRegressor::<f64>::new(6, 5, &[3, 1], 4).unwrap();
        let x = [0.2, -0.4, 0.1, 0.9, -0.3, 0.5];
        let t = [0.1, 0.2, -0.3, 0.7];
        let loss = |m: &RotationRegressor<f64>| LossKind::Mse.eval(&m.forward(&x).unwrap(), &t).unwrap().value;
        let up = LossKind::Mse.eval(&model.forward(&x).unwrap(), &t).unwrap().gradient;
        let g = model.backward(&x, &up).unwrap();
        for (net, g_net) in g.iter().enumerate() {
            for (i, &analytic) in g_net.iter().enumerate() {
                let bump = |d: f64| {
                    let mut m = model.clone();
                    let n = if net == 0 { &mut m.trunk } else { &mut m.heads[net - 1] };
                    n.params_mut()[i] += d;
                    loss(&m)
                };
                let h = 1e-6;
                let fd = (bump(h) - bump(-h)) / (2.0 * h);
                let scale = fd.abs().max(analytic.abs()).max(1e-6);
                assert!((fd - analytic).abs() / scale < 1e-4);
            }
        }
    }
}
