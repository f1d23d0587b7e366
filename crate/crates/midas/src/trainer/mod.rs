//! Desk-scale supervised training: soft-target cross-entropy, SGD with
//! momentum and cosine learning-rate decay, and the train/eval loop over
//! original or freshly mixed batches.
//!
//! All four label regimes share one loop. `hard` trains on one-hot argmax
//! labels, `soft` on the stored soft labels, and the two mixed modes
//! regenerate augmented batches from the whole training split every epoch.
//! Training-time segment sampling is random; evaluation always uses center
//! sampling, so repeated evaluations are identical.

mod model;

pub use model::{pool_clip, DropoutMask, ForwardPass, Gradients, ModelDims, TinyClassifier};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::{argmax, LabeledClip, SoftLabel};
use crate::metrics::{confusion, EvalReport};
use crate::mixing::{midas_batch, LabelMode};
use crate::sampling::{sample_segments, RngStream, SegmentMode};
use crate::synthdata::{Dataset, Split};

/// Label regime for a training run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TrainMode {
    /// One-hot argmax labels.
    Hard,
    /// Annotator-averaged soft labels.
    Soft,
    /// Mixed clips with soft source labels.
    MidasSoft,
    /// Mixed clips with one-hot source labels.
    MidasHard,
}

impl TrainMode {
    pub fn is_mixed(&self) -> bool {
        matches!(self, TrainMode::MidasSoft | TrainMode::MidasHard)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TrainMode::Hard => "hard",
            TrainMode::Soft => "soft",
            TrainMode::MidasSoft => "midas-soft",
            TrainMode::MidasHard => "midas-hard",
        }
    }
}

/// Hyperparameters for one training run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lr0: f64,
    pub momentum: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub dropout_rate: f64,
    /// Beta shape for the mixed modes.
    pub alpha: f64,
    pub mode: TrainMode,
    /// Softmax-normalize combined labels in the mixed modes.
    pub normalize: bool,
    /// Mix one fixed augmented set up front instead of fresh batches every
    /// epoch.
    pub pregenerate: bool,
    pub seed: u64,
    pub hidden_dim: usize,
    /// Spatial pooling target (`pool x pool` per frame).
    pub pool: usize,
    pub num_segments: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr0: 0.02,
            momentum: 0.9,
            epochs: 50,
            batch_size: 8,
            dropout_rate: 0.5,
            alpha: 0.4,
            mode: TrainMode::Soft,
            normalize: true,
            pregenerate: false,
            seed: 42,
            hidden_dim: 64,
            pool: 8,
            num_segments: 8,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.lr0.is_finite() || self.lr0 <= 0.0 {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.lr0
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Config(format!(
                "momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if self.mode.is_mixed() && self.batch_size < 2 {
            return Err(Error::Config(
                "mixed modes need a batch size of at least 2".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::Config(format!(
                "dropout rate must lie in [0, 1), got {}",
                self.dropout_rate
            )));
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return Err(Error::Config(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if self.hidden_dim == 0 || self.pool == 0 || self.num_segments == 0 {
            return Err(Error::Config("model dimensions must all be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-epoch training record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean soft cross-entropy over the epoch's training samples.
    pub loss: f64,
    pub lr: f64,
    pub train_uar: f64,
    pub train_war: f64,
}

/// One record per completed epoch.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epochs: Vec<EpochStats>,
}

impl TrainHistory {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,loss,lr,train_uar,train_war\n");
        for e in &self.epochs {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                e.epoch, e.loss, e.lr, e.train_uar, e.train_war
            ));
        }
        out
    }
}

/// Soft-target cross-entropy: `-sum_c target_c * ln(max(probs_c, 1e-12))`.
pub fn soft_cross_entropy(probs: &[f64], target: &SoftLabel) -> f64 {
    probs
        .iter()
        .zip(target.probs())
        .map(|(&p, &t)| -t * p.max(1e-12).ln())
        .sum()
}

/// Mean soft cross-entropy over a batch.
pub fn batch_loss(probs: &[Vec<f64>], targets: &[SoftLabel]) -> f64 {
    let n = probs.len().max(1);
    probs
        .iter()
        .zip(targets)
        .map(|(p, t)| soft_cross_entropy(p, t))
        .sum::<f64>()
        / n as f64
}

/// Cosine learning-rate decay: `0.5 * lr0 * (1 + cos(pi * epoch / total))`.
pub fn cosine_lr(epoch: usize, total_epochs: usize, lr0: f64) -> f64 {
    debug_assert!(epoch <= total_epochs && total_epochs > 0);
    0.5 * lr0 * (1.0 + (std::f64::consts::PI * epoch as f64 / total_epochs as f64).cos())
}

/// One SGD-with-momentum update: `v <- momentum * v + g; p <- p - lr * v`.
pub fn sgd_momentum_step(
    params: &mut [f64],
    grads: &[f64],
    velocity: &mut [f64],
    lr: f64,
    momentum: f64,
) {
    assert_eq!(params.len(), grads.len());
    assert_eq!(params.len(), velocity.len());
    for ((p, &g), v) in params.iter_mut().zip(grads).zip(velocity.iter_mut()) {
        *v = momentum * *v + g;
        *p -= lr * *v;
    }
}

fn apply_step(
    model: &mut TinyClassifier,
    grads: &Gradients,
    velocity: &mut Gradients,
    lr: f64,
    momentum: f64,
) {
    sgd_momentum_step(&mut model.w1, &grads.w1, &mut velocity.w1, lr, momentum);
    sgd_momentum_step(&mut model.b1, &grads.b1, &mut velocity.b1, lr, momentum);
    sgd_momentum_step(&mut model.w2, &grads.w2, &mut velocity.w2, lr, momentum);
    sgd_momentum_step(&mut model.b2, &grads.b2, &mut velocity.b2, lr, momentum);
}

/// Segment-samples and pools one clip into a zero-centered feature vector.
fn featurize(
    clip: &crate::clip::VideoClip,
    num_segments: usize,
    pool: usize,
    mode: SegmentMode,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    let indices = sample_segments(clip.shape().frames, num_segments, mode, rng)?;
    let mut features = pool_clip(clip, &indices, pool);
    // Intensities live in [0, 1]; centering keeps the first-layer
    // gradients from all pointing the same way.
    for f in &mut features {
        *f -= 0.5;
    }
    Ok(features)
}

/// Trains a classifier on the dataset's training split.
///
/// Fully deterministic for a given config: model init, per-epoch
/// shuffling, segment sampling, batch mixing, and dropout all use streams
/// derived from `config.seed`.
pub fn train(dataset: &Dataset, config: &TrainConfig) -> Result<(TinyClassifier, TrainHistory)> {
    config.validate()?;
    let train_items = dataset.split_items(Split::Train);
    if train_items.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    if config.mode.is_mixed() && train_items.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: train_items.len(),
        });
    }
    let classes = dataset.classes().expect("non-empty dataset");
    let channels = train_items[0].clip.shape().channels;
    let dims = ModelDims {
        segments: config.num_segments,
        pool: config.pool,
        channels,
        hidden: config.hidden_dim,
        classes,
    };

    let root = RngStream::new(config.seed);
    let mut model = TinyClassifier::init(dims, &mut root.derive_named("model-init"))?;
    let mut velocity = model.zero_gradients();
    let shuffle_root = root.derive_named("shuffle");
    let segment_root = root.derive_named("segments");
    let mix_root = root.derive_named("mix");
    let dropout_root = root.derive_named("dropout");

    // The fixed-set alternative: mix one augmented set up front and train
    // on it like stored data. The hard variant is already folded into the
    // generated labels.
    let pregenerated: Option<Vec<LabeledClip>> =
        if config.mode.is_mixed() && config.pregenerate {
            let label_mode = match config.mode {
                TrainMode::MidasHard => LabelMode::Hard,
                _ => LabelMode::Soft,
            };
            let mixed = midas_batch(
                &train_items,
                train_items.len(),
                config.alpha,
                label_mode,
                config.normalize,
                &mix_root.derive_named("pregenerate"),
            )?;
            Some(
                mixed
                    .into_iter()
                    .enumerate()
                    .map(|(k, m)| LabeledClip::new(format!("mix-{k:05}"), m.clip, m.label, None, None))
                    .collect::<Result<_>>()?,
            )
        } else {
            None
        };
    let epoch_items: Vec<&LabeledClip> = match &pregenerated {
        Some(items) => items.iter().collect(),
        None => train_items.clone(),
    };
    let fresh_mixing = config.mode.is_mixed() && !config.pregenerate;
    let hard_targets = config.mode == TrainMode::Hard;

    let n = epoch_items.len();
    let n_batches = n.div_ceil(config.batch_size);
    let mut history = TrainHistory::default();

    for epoch in 0..config.epochs {
        let lr = cosine_lr(epoch, config.epochs, config.lr0);
        let mut loss_sum = 0.0f64;
        let mut loss_count = 0usize;

        for b in 0..n_batches {
            let (features, targets) = if fresh_mixing {
                assemble_mixed_batch(config, &train_items, &segment_root, &mix_root, epoch, b)?
            } else {
                assemble_plain_batch(
                    config,
                    &epoch_items,
                    &shuffle_root,
                    &segment_root,
                    epoch,
                    b,
                    hard_targets,
                )?
            };
            if features.is_empty() {
                continue;
            }

            let mask = if config.dropout_rate > 0.0 {
                let mut mrng = dropout_root.derive(epoch as u64).derive(b as u64);
                Some(DropoutMask::sample(
                    features.len(),
                    config.hidden_dim,
                    config.dropout_rate,
                    &mut mrng,
                )?)
            } else {
                None
            };

            let fwd = model.forward(&features, mask.as_ref())?;
            loss_sum += batch_loss(&fwd.probs, &targets) * features.len() as f64;
            loss_count += features.len();
            let grads = model.backward(&features, &fwd, &targets)?;
            apply_step(&mut model, &grads, &mut velocity, lr, config.momentum);
        }

        let report = evaluate(&model, &train_items)?;
        history.epochs.push(EpochStats {
            epoch,
            loss: loss_sum / loss_count.max(1) as f64,
            lr,
            train_uar: report.uar,
            train_war: report.war,
        });
    }

    Ok((model, history))
}

/// Shuffled pass over stored samples; with `hard_targets` each target is
/// the one-hot of its argmax. Both settings consume randomness
/// identically, so with one-hot soft labels they produce bit-identical
/// runs.
fn assemble_plain_batch(
    config: &TrainConfig,
    items: &[&LabeledClip],
    shuffle_root: &RngStream,
    segment_root: &RngStream,
    epoch: usize,
    batch_index: usize,
    hard_targets: bool,
) -> Result<(Vec<Vec<f64>>, Vec<SoftLabel>)> {
    use rand::Rng;

    let n = items.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut shuffle_rng = shuffle_root.derive(epoch as u64);
    for k in (1..n).rev() {
        let j = shuffle_rng.random_range(0..=k);
        order.swap(k, j);
    }

    let start = batch_index * config.batch_size;
    if start >= n {
        return Ok((Vec::new(), Vec::new()));
    }
    let end = (start + config.batch_size).min(n);
    let seg_epoch = segment_root.derive(epoch as u64);

    let picked: Vec<usize> = order[start..end].to_vec();
    let features: Vec<Vec<f64>> = picked
        .par_iter()
        .map(|&idx| {
            let mut rng = seg_epoch.derive(idx as u64);
            featurize(
                &items[idx].clip,
                config.num_segments,
                config.pool,
                SegmentMode::Random,
                &mut rng,
            )
        })
        .collect::<Result<_>>()?;
    let targets: Vec<SoftLabel> = picked
        .iter()
        .map(|&idx| {
            if hard_targets {
                SoftLabel::one_hot(items[idx].soft.argmax(), items[idx].soft.num_classes())
            } else {
                Ok(items[idx].soft.clone())
            }
        })
        .collect::<Result<_>>()?;
    Ok((features, targets))
}

/// A freshly mixed batch drawn from the whole training split.
fn assemble_mixed_batch(
    config: &TrainConfig,
    items: &[&LabeledClip],
    segment_root: &RngStream,
    mix_root: &RngStream,
    epoch: usize,
    batch_index: usize,
) -> Result<(Vec<Vec<f64>>, Vec<SoftLabel>)> {
    let label_mode = match config.mode {
        TrainMode::MidasHard => LabelMode::Hard,
        _ => LabelMode::Soft,
    };
    let batch_rng = mix_root.derive(epoch as u64).derive(batch_index as u64);
    let mixed = midas_batch(
        items,
        config.batch_size,
        config.alpha,
        label_mode,
        config.normalize,
        &batch_rng,
    )?;
    debug_assert!(mixed.iter().all(|m| m.source_i != m.source_j));

    let seg_batch = segment_root.derive(epoch as u64).derive(batch_index as u64);
    let features: Vec<Vec<f64>> = mixed
        .par_iter()
        .enumerate()
        .map(|(s, sample)| {
            let mut rng = seg_batch.derive(s as u64);
            featurize(
                &sample.clip,
                config.num_segments,
                config.pool,
                SegmentMode::Random,
                &mut rng,
            )
        })
        .collect::<Result<_>>()?;
    let targets = mixed.into_iter().map(|m| m.label).collect();
    Ok((features, targets))
}

/// Evaluates a model: center segment sampling, no dropout, predictions by
/// argmax with the lowest-index tie-break.
pub fn evaluate(model: &TinyClassifier, items: &[&LabeledClip]) -> Result<EvalReport> {
    if items.is_empty() {
        return Err(Error::EmptyEvaluation);
    }
    let features: Vec<Vec<f64>> = items
        .par_iter()
        .map(|item| {
            // Center mode draws nothing; the stream is just a placeholder.
            let mut rng = RngStream::new(0);
            featurize(
                &item.clip,
                model.dims.segments,
                model.dims.pool,
                SegmentMode::Center,
                &mut rng,
            )
        })
        .collect::<Result<_>>()?;
    let fwd = model.forward(&features, None)?;
    let preds: Vec<usize> = fwd.probs.iter().map(|row| argmax(row)).collect();
    let truths: Vec<usize> = items.iter().map(|i| i.soft.argmax()).collect();
    let cm = confusion(&preds, &truths, model.dims.classes)?;
    EvalReport::from_confusion(cm)
}
