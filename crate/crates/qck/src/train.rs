//! Alternating two-step training and prediction.
//!
//! Each epoch first runs `n_kao` full-batch gradient steps on the encoding
//! weights and biases against the working centroid, then flips the working
//! class and runs `n_co` steps on that centroid's coordinates. Per epoch
//! both learning rates decay by `r_decay`. Every loss evaluation touches
//! each training sample's circuit exactly once, which is what keeps the
//! total circuit count linear in the sample count.

use ndarray::ArrayView2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Normalizer};
use crate::encoding::{Centroid, CircuitSpec, EncodingParams};
use crate::grad;
use crate::kernel::centroid_kernel;
use crate::{Error, Phase, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    GradientDescent,
    AdaptiveMoment,
}

/// Schedule and hyperparameters of the alternating optimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub n_epochs: usize,
    pub n_kao: usize,
    pub n_co: usize,
    pub lr_kao: f64,
    pub lr_co: f64,
    /// Multiplied into both learning rates once per epoch.
    pub r_decay: f64,
    pub lambda_kao: f64,
    pub lambda_co: f64,
    /// Weights start uniform on [-init_scale, init_scale].
    pub init_scale: f64,
    pub seed: u64,
    pub optimizer: Optimizer,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_kao == 0 || self.n_co == 0 {
            return Err(Error::InvalidParameter("n_kao and n_co must be >= 1".into()));
        }
        if self.lr_kao <= 0.0 || self.lr_co <= 0.0 {
            return Err(Error::InvalidParameter("learning rates must be > 0".into()));
        }
        if !(self.r_decay > 0.0 && self.r_decay <= 1.0) {
            return Err(Error::InvalidParameter("r_decay must be in (0, 1]".into()));
        }
        if self.lambda_kao < 0.0 || self.lambda_co < 0.0 {
            return Err(Error::InvalidParameter("regularizers must be >= 0".into()));
        }
        if self.init_scale <= 0.0 {
            return Err(Error::InvalidParameter("init_scale must be > 0".into()));
        }
        Ok(())
    }
}

/// One optimization step as recorded in the training history.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub epoch: usize,
    pub phase: Phase,
    /// The working centroid's class during this step.
    pub label: i8,
    pub loss: f64,
    pub ta: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainHistory {
    pub steps: Vec<StepRecord>,
}

impl TrainHistory {
    pub fn final_loss(&self, phase: Phase) -> Option<f64> {
        self.steps
            .iter()
            .rev()
            .find(|s| s.phase == phase)
            .map(|s| s.loss)
    }

    pub fn final_ta(&self) -> Option<f64> {
        self.steps.last().map(|s| s.ta)
    }
}

/// A trained classifier: circuit geometry, learned encoding, the two
/// centroids, the feature normalizer the training data was scaled with,
/// and enough metadata to reproduce the run.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub spec: CircuitSpec,
    pub params: EncodingParams,
    pub centroid_pos: Centroid,
    pub centroid_neg: Centroid,
    pub normalizer: Normalizer,
    pub config: TrainConfig,
    /// Sample-level circuit evaluations spent in training (each loss
    /// evaluation costs one circuit per training sample).
    pub circuit_evaluations: u64,
}

impl Model {
    pub fn seed(&self) -> u64 {
        self.config.seed
    }

    /// Attach the normalizer fitted on the raw training split. `train`
    /// itself sees already-normalized data, so it starts with an identity
    /// normalizer.
    pub fn with_normalizer(mut self, normalizer: Normalizer) -> Self {
        self.normalizer = normalizer;
        self
    }

    /// Score and label new (already normalized) samples. The score is the
    /// kernel against the positive centroid minus the kernel against the
    /// negative one; the label its sign, with an exact zero going to +1.
    pub fn predict(&self, x: ArrayView2<f64>) -> Result<(Vec<i8>, Vec<f64>)> {
        let k_pos = centroid_kernel(&self.spec, &self.params, x, &self.centroid_pos)?;
        let k_neg = centroid_kernel(&self.spec, &self.params, x, &self.centroid_neg)?;
        Ok(labels_from_kernel_columns(&k_pos.values, &k_neg.values))
    }
}

/// Decision rule shared by prediction paths: score_i = K_pos_i - K_neg_i,
/// label_i = sign(score_i) with ties resolved to +1.
pub fn labels_from_kernel_columns(k_pos: &[f64], k_neg: &[f64]) -> (Vec<i8>, Vec<f64>) {
    let scores: Vec<f64> = k_pos.iter().zip(k_neg).map(|(p, n)| p - n).collect();
    let labels = scores.iter().map(|&s| if s >= 0.0 { 1 } else { -1 }).collect();
    (labels, scores)
}

/// Coordinate-wise mean of each class; the centroids' starting positions.
pub fn class_means(x: ArrayView2<f64>, y: &[i8]) -> Result<(Centroid, Centroid)> {
    let d = x.ncols();
    let mut sums = [(vec![0.0; d], 0usize), (vec![0.0; d], 0usize)];
    for (row, &label) in x.rows().into_iter().zip(y) {
        let (sum, count) = &mut sums[usize::from(label != 1)];
        *count += 1;
        for (s, &v) in sum.iter_mut().zip(row.iter()) {
            *s += v;
        }
    }
    let [(mut pos, n_pos), (mut neg, n_neg)] = sums;
    if n_pos == 0 {
        return Err(Error::MissingClass(1));
    }
    if n_neg == 0 {
        return Err(Error::MissingClass(-1));
    }
    pos.iter_mut().for_each(|v| *v /= n_pos as f64);
    neg.iter_mut().for_each(|v| *v /= n_neg as f64);
    Ok((Centroid::new(pos, 1)?, Centroid::new(neg, -1)?))
}

/// First-moment/second-moment state for the adaptive optimizer.
struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(dim: usize) -> Self {
        AdamState {
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            t: 0,
        }
    }

    fn step(&mut self, lr: f64, gradient: &[f64], values: &mut [f64]) {
        self.t += 1;
        let bc1 = 1.0 - Self::BETA1.powi(self.t as i32);
        let bc2 = 1.0 - Self::BETA2.powi(self.t as i32);
        for ((value, &g), (m, v)) in values
            .iter_mut()
            .zip(gradient)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            *m = Self::BETA1 * *m + (1.0 - Self::BETA1) * g;
            *v = Self::BETA2 * *v + (1.0 - Self::BETA2) * g * g;
            *value -= lr * (*m / bc1) / ((*v / bc2).sqrt() + Self::EPS);
        }
    }
}

enum OptState {
    Plain,
    Adaptive(AdamState),
}

impl OptState {
    fn new(optimizer: Optimizer, dim: usize) -> Self {
        match optimizer {
            Optimizer::GradientDescent => OptState::Plain,
            Optimizer::AdaptiveMoment => OptState::Adaptive(AdamState::new(dim)),
        }
    }

    fn step(&mut self, lr: f64, gradient: &[f64], values: &mut [f64]) {
        match self {
            OptState::Plain => {
                for (value, g) in values.iter_mut().zip(gradient) {
                    *value -= lr * g;
                }
            }
            OptState::Adaptive(adam) => adam.step(lr, gradient, values),
        }
    }
}

/// Run the full alternating optimization on an already normalized dataset.
///
/// The working class starts at a seeded random bit, flips between the
/// alignment block and the centroid block of every epoch, and carries over
/// into the next epoch. Gradients are full batch and come from the
/// reverse-mode engine.
pub fn train(
    dataset: &Dataset,
    spec: &CircuitSpec,
    config: &TrainConfig,
) -> Result<(Model, TrainHistory)> {
    config.validate()?;
    if dataset.n_features() != spec.n_features {
        return Err(Error::DimensionMismatch {
            expected: spec.n_features,
            got: dataset.n_features(),
        });
    }
    let n = dataset.n_samples() as u64;
    let d = spec.n_features;
    let (mut centroid_pos, mut centroid_neg) = class_means(dataset.x.view(), &dataset.y)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut working: i8 = if rng.random::<bool>() { 1 } else { -1 };
    let init_seed: u64 = rng.random();
    let mut params = EncodingParams::init(spec, config.init_scale, init_seed)?;

    let mut lr_kao = config.lr_kao;
    let mut lr_co = config.lr_co;
    let mut kao_opt = OptState::new(config.optimizer, 2 * spec.n_params());
    let mut co_opt_pos = OptState::new(config.optimizer, d);
    let mut co_opt_neg = OptState::new(config.optimizer, d);

    let mut history = TrainHistory::default();
    let mut evaluations: u64 = 0;

    for epoch in 0..config.n_epochs {
        for _ in 0..config.n_kao {
            let centroid = if working == 1 { &centroid_pos } else { &centroid_neg };
            let g = grad::kao_reverse(
                spec,
                &params,
                dataset.x.view(),
                &dataset.y,
                centroid,
                config.lambda_kao,
            )
            .map_err(|e| Error::AtStep {
                epoch,
                phase: Phase::KernelAlignment,
                source: Box::new(e),
            })?;
            evaluations += n;
            let mut joined: Vec<f64> = params.w.clone();
            joined.extend_from_slice(&params.b);
            let mut grad_joined = g.d_w.clone();
            grad_joined.extend_from_slice(&g.d_b);
            kao_opt.step(lr_kao, &grad_joined, &mut joined);
            let (w, b) = joined.split_at(spec.n_params());
            params.w.copy_from_slice(w);
            params.b.copy_from_slice(b);
            history.steps.push(StepRecord {
                epoch,
                phase: Phase::KernelAlignment,
                label: working,
                loss: g.loss,
                ta: g.ta,
            });
        }

        working = -working;

        for _ in 0..config.n_co {
            let (centroid, opt) = if working == 1 {
                (&mut centroid_pos, &mut co_opt_pos)
            } else {
                (&mut centroid_neg, &mut co_opt_neg)
            };
            let g = grad::co_reverse(
                spec,
                &params,
                dataset.x.view(),
                &dataset.y,
                centroid,
                config.lambda_co,
            )
            .map_err(|e| Error::AtStep {
                epoch,
                phase: Phase::Centroid,
                source: Box::new(e),
            })?;
            evaluations += n;
            opt.step(lr_co, &g.d_c, &mut centroid.coords);
            history.steps.push(StepRecord {
                epoch,
                phase: Phase::Centroid,
                label: working,
                loss: g.loss,
                ta: g.ta,
            });
        }

        lr_kao *= config.r_decay;
        lr_co *= config.r_decay;
    }

    let model = Model {
        spec: *spec,
        params,
        centroid_pos,
        centroid_neg,
        normalizer: Normalizer {
            mins: vec![0.0; d],
            maxs: vec![1.0; d],
        },
        config: config.clone(),
        circuit_evaluations: evaluations,
    };
    Ok((model, history))
}
