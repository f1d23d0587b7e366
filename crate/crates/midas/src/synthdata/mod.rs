//! Synthetic ambiguous-clip generation, annotator vote simulation, and the
//! on-disk dataset format.
//!
//! Samples are built from `C` class prototype clips. Each sample mixes the
//! prototypes with weights `w = (1 - ambiguity) * onehot(true_class) +
//! ambiguity * Dirichlet(1)`, adds Gaussian pixel noise, and draws `S`
//! annotator votes i.i.d. from `w`. The soft label is the vote average, so
//! every generated sample satisfies the vote-consistency invariant by
//! construction.

mod format;

pub use format::{read_clip_file, read_dataset, write_clip_file, write_dataset};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clip::{ClipShape, VideoClip};
use crate::error::{Error, Result};
use crate::label::{AnnotatorVotes, LabeledClip, SoftLabel};
use crate::sampling::RngStream;

/// Configuration for synthetic dataset generation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Number of emotion classes.
    pub classes: usize,
    /// Annotators voting on each sample.
    pub annotators: usize,
    /// Frames per clip.
    pub frames: usize,
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    pub n_train: usize,
    pub n_test: usize,
    /// Mixture concentration in `[0, 1]`: 0 gives pure prototypes and
    /// unanimous votes, 1 gives fully Dirichlet-mixed samples.
    pub ambiguity: f64,
    /// Gaussian pixel noise scale.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            classes: 7,
            annotators: 10,
            frames: 8,
            height: 16,
            width: 16,
            channels: 1,
            n_train: 600,
            n_test: 200,
            ambiguity: 0.6,
            noise_sigma: 0.10,
            seed: 42,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.classes < 2 {
            return Err(Error::Config("need at least 2 classes".into()));
        }
        if self.annotators < 1 {
            return Err(Error::Config("need at least 1 annotator".into()));
        }
        if self.frames < 1 || self.height < 1 || self.width < 1 || self.channels < 1 {
            return Err(Error::Config("clip dimensions must all be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.ambiguity) {
            return Err(Error::Config(format!(
                "ambiguity must lie in [0, 1], got {}",
                self.ambiguity
            )));
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return Err(Error::Config(format!(
                "noise sigma must be >= 0, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }

    pub fn clip_shape(&self) -> ClipShape {
        ClipShape::new(self.frames, self.height, self.width, self.channels)
    }
}

/// Which split a sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

/// Where a mixed sample came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source_i: String,
    pub source_j: String,
    pub lambda: f64,
}

/// One dataset entry: a labeled clip plus split and optional provenance.
#[derive(Debug, Clone)]
pub struct DatasetSample {
    pub item: LabeledClip,
    pub split: Split,
    pub provenance: Option<Provenance>,
}

/// An in-memory dataset, ordered as stored in the manifest.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub samples: Vec<DatasetSample>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Samples in the given split, in manifest order.
    pub fn split_items(&self, split: Split) -> Vec<&LabeledClip> {
        self.samples
            .iter()
            .filter(|s| s.split == split)
            .map(|s| &s.item)
            .collect()
    }

    /// All labeled clips regardless of split.
    pub fn all_items(&self) -> Vec<&LabeledClip> {
        self.samples.iter().map(|s| &s.item).collect()
    }

    /// Class count, taken from the first sample.
    pub fn classes(&self) -> Option<usize> {
        self.samples.first().map(|s| s.item.soft.num_classes())
    }
}

/// Generates one distinct prototype clip per class.
///
/// Each prototype is a sinusoidal spatial pattern whose phase drifts over
/// time, so frames change from one to the next and classes are pairwise
/// separated.
pub fn gen_prototypes(config: &SynthConfig, rng: &RngStream) -> Result<Vec<VideoClip>> {
    config.validate()?;
    let shape = config.clip_shape();
    let mut protos = Vec::with_capacity(config.classes);
    for class in 0..config.classes {
        let mut stream = rng.derive(class as u64);
        let fx: f64 = stream.random_range(0.5..3.0);
        let fy: f64 = stream.random_range(0.5..3.0);
        let phase: f64 = stream.random_range(0.0..std::f64::consts::TAU);
        let drift: f64 = stream.random_range(0.35..1.0);
        let mut data = Vec::with_capacity(shape.len());
        for t in 0..shape.frames {
            for y in 0..shape.height {
                for x in 0..shape.width {
                    for c in 0..shape.channels {
                        let u = x as f64 / shape.width as f64;
                        let v = y as f64 / shape.height as f64;
                        let angle = std::f64::consts::TAU * (fx * u + fy * v)
                            + phase
                            + drift * t as f64
                            + c as f64 * 0.5;
                        data.push((0.5 + 0.45 * angle.sin()) as f32);
                    }
                }
            }
        }
        protos.push(VideoClip::from_vec(shape, data)?);
    }
    for i in 0..protos.len() {
        for j in (i + 1)..protos.len() {
            let d = protos[i].mse(&protos[j])?;
            if d <= 0.0 {
                return Err(Error::Validation(format!(
                    "prototypes {i} and {j} coincide"
                )));
            }
        }
    }
    Ok(protos)
}

/// Blends prototypes with weights `mixture_w`, adds Gaussian noise, and
/// clamps to `[0, 1]`.
pub fn gen_sample(
    prototypes: &[VideoClip],
    mixture_w: &[f64],
    noise_sigma: f64,
    rng: &mut RngStream,
) -> Result<VideoClip> {
    if prototypes.is_empty() {
        return Err(Error::InvalidInput("no prototypes".into()));
    }
    if mixture_w.len() != prototypes.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} mixture weights for {} prototypes",
            mixture_w.len(),
            prototypes.len()
        )));
    }
    check_simplex(mixture_w)?;
    let shape = prototypes[0].shape();
    for p in prototypes {
        if p.shape() != shape {
            return Err(Error::ShapeMismatch(
                "prototypes disagree on clip shape".into(),
            ));
        }
    }
    let normal = if noise_sigma > 0.0 {
        Some(
            rand_distr::Normal::new(0.0f64, noise_sigma)
                .map_err(|e| Error::InvalidParameter(format!("noise sigma: {e}")))?,
        )
    } else {
        None
    };
    let mut data = Vec::with_capacity(shape.len());
    for e in 0..shape.len() {
        let mut acc = 0.0f64;
        for (w, p) in mixture_w.iter().zip(prototypes) {
            acc += w * p.data()[e] as f64;
        }
        if let Some(n) = &normal {
            use rand_distr::Distribution;
            acc += n.sample(rng);
        }
        data.push(acc.clamp(0.0, 1.0) as f32);
    }
    VideoClip::from_vec(shape, data)
}

/// Draws `annotators` i.i.d. categorical votes with probabilities
/// `mixture_w`.
pub fn simulate_votes(
    mixture_w: &[f64],
    annotators: usize,
    rng: &mut RngStream,
) -> Result<AnnotatorVotes> {
    if annotators == 0 {
        return Err(Error::InvalidParameter(
            "need at least one annotator".into(),
        ));
    }
    check_simplex(mixture_w)?;
    let votes = (0..annotators)
        .map(|_| {
            let u: f64 = rng.random_range(0.0..1.0);
            let mut acc = 0.0;
            for (c, &w) in mixture_w.iter().enumerate() {
                acc += w;
                if u < acc {
                    return c;
                }
            }
            mixture_w.len() - 1
        })
        .collect();
    AnnotatorVotes::new(votes)
}

fn check_simplex(w: &[f64]) -> Result<()> {
    if w.is_empty() {
        return Err(Error::InvalidInput("empty mixture weights".into()));
    }
    let mut sum = 0.0;
    for &x in w {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::Validation(format!(
                "mixture weight {x} is not a probability"
            )));
        }
        sum += x;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Validation(format!(
            "mixture weights sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

/// Uniform draw from the simplex (Dirichlet with unit concentration),
/// realized as normalized exponentials.
fn dirichlet_uniform(classes: usize, rng: &mut RngStream) -> Vec<f64> {
    let raw: Vec<f64> = (0..classes)
        .map(|_| -rng.random_range(f64::MIN_POSITIVE..1.0f64).ln())
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / sum).collect()
}

/// Generates a full synthetic dataset.
///
/// True classes are assigned round-robin within each split, keeping class
/// counts balanced within one. Every sample owns an RNG stream derived
/// from `(seed, split, index)`, so generation parallelizes without
/// affecting the output.
pub fn gen_dataset(config: &SynthConfig) -> Result<Dataset> {
    config.validate()?;
    let root = RngStream::new(config.seed);
    let prototypes = gen_prototypes(config, &root.derive_named("prototypes"))?;

    let gen_split = |split: Split, count: usize| -> Result<Vec<DatasetSample>> {
        let split_stream = root.derive_named(split.as_str());
        (0..count)
            .into_par_iter()
            .map(|idx| {
                let mut stream = split_stream.derive(idx as u64);
                let true_class = idx % config.classes;
                let mut w = vec![0.0f64; config.classes];
                w[true_class] = 1.0 - config.ambiguity;
                if config.ambiguity > 0.0 {
                    let dir = dirichlet_uniform(config.classes, &mut stream);
                    for (wc, d) in w.iter_mut().zip(dir) {
                        *wc += config.ambiguity * d;
                    }
                }
                let clip = gen_sample(&prototypes, &w, config.noise_sigma, &mut stream)?;
                let votes = simulate_votes(&w, config.annotators, &mut stream)?;
                let soft = SoftLabel::from_votes(&votes, config.classes)?;
                let item = LabeledClip::new(
                    format!("{}-{idx:05}", split.as_str()),
                    clip,
                    soft,
                    Some(votes),
                    Some(true_class),
                )?;
                Ok(DatasetSample {
                    item,
                    split,
                    provenance: None,
                })
            })
            .collect()
    };

    let mut samples = gen_split(Split::Train, config.n_train)?;
    samples.extend(gen_split(Split::Test, config.n_test)?);
    Ok(Dataset { samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SynthConfig {
        SynthConfig {
            classes: 4,
            annotators: 6,
            frames: 4,
            height: 8,
            width: 8,
            channels: 1,
            n_train: 24,
            n_test: 8,
            ambiguity: 0.5,
            noise_sigma: 0.05,
            seed: 7,
        }
    }

    #[test]
    fn prototypes_are_distinct_and_drift() {
        let cfg = SynthConfig {
            classes: 7,
            ..small_config()
        };
        let rng = RngStream::new(1);
        let protos = gen_prototypes(&cfg, &rng).unwrap();
        assert_eq!(protos.len(), 7);
        for i in 0..protos.len() {
            for j in (i + 1)..protos.len() {
                assert!(protos[i].mse(&protos[j]).unwrap() > 0.0);
            }
            for t in 1..cfg.frames {
                assert_ne!(protos[i].frame(t), protos[i].frame(t - 1));
            }
        }
    }

    #[test]
    fn prototypes_are_deterministic() {
        let cfg = small_config();
        let a = gen_prototypes(&cfg, &RngStream::new(3)).unwrap();
        let b = gen_prototypes(&cfg, &RngStream::new(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn one_hot_mixture_returns_prototype() {
        let cfg = small_config();
        let protos = gen_prototypes(&cfg, &RngStream::new(2)).unwrap();
        let mut rng = RngStream::new(5);
        let clip = gen_sample(&protos, &[0.0, 1.0, 0.0, 0.0], 0.0, &mut rng).unwrap();
        assert_eq!(clip, protos[1]);
    }

    #[test]
    fn even_mixture_is_elementwise_average() {
        let cfg = small_config();
        let protos = gen_prototypes(&cfg, &RngStream::new(2)).unwrap();
        let mut rng = RngStream::new(5);
        let clip = gen_sample(&protos[..2], &[0.5, 0.5], 0.0, &mut rng).unwrap();
        for (out, (a, b)) in clip
            .data()
            .iter()
            .zip(protos[0].data().iter().zip(protos[1].data()))
        {
            let expected = (0.5 * *a as f64 + 0.5 * *b as f64) as f32;
            assert_eq!(*out, expected);
        }
    }

    #[test]
    fn noisy_samples_stay_in_range() {
        let cfg = small_config();
        let protos = gen_prototypes(&cfg, &RngStream::new(2)).unwrap();
        let mut rng = RngStream::new(5);
        let clip = gen_sample(&protos, &[0.25; 4], 0.1, &mut rng).unwrap();
        assert!(clip.data().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn votes_from_one_hot_are_unanimous() {
        let mut rng = RngStream::new(1);
        let votes = simulate_votes(&[0.0, 0.0, 1.0], 12, &mut rng).unwrap();
        assert!(votes.votes().iter().all(|&v| v == 2));
    }

    #[test]
    fn vote_frequencies_match_weights() {
        let mut rng = RngStream::new(8);
        let votes = simulate_votes(&[0.5, 0.5], 100_000, &mut rng).unwrap();
        let f0 = votes.count_for(0) as f64 / votes.len() as f64;
        assert!((f0 - 0.5).abs() < 0.01, "class-0 frequency {f0}");
    }

    #[test]
    fn vote_average_converges_to_weights() {
        let w = [0.1, 0.3, 0.6];
        let mut rng = RngStream::new(9);
        let votes = simulate_votes(&w, 100_000, &mut rng).unwrap();
        let soft = SoftLabel::from_votes(&votes, 3).unwrap();
        for (p, target) in soft.probs().iter().zip(&w) {
            assert!((p - target).abs() < 0.01);
        }
    }

    #[test]
    fn zero_ambiguity_gives_one_hot_labels() {
        let cfg = SynthConfig {
            ambiguity: 0.0,
            ..small_config()
        };
        let ds = gen_dataset(&cfg).unwrap();
        assert_eq!(ds.len(), 32);
        for s in &ds.samples {
            assert_eq!(s.item.soft.max_prob(), 1.0);
            assert_eq!(Some(s.item.soft.argmax()), s.item.true_class);
        }
    }

    #[test]
    fn full_ambiguity_spreads_labels() {
        let cfg = SynthConfig {
            classes: 7,
            ambiguity: 1.0,
            n_train: 400,
            n_test: 0,
            ..small_config()
        };
        let ds = gen_dataset(&cfg).unwrap();
        let mean_max: f64 =
            ds.samples.iter().map(|s| s.item.soft.max_prob()).sum::<f64>() / ds.len() as f64;
        assert!(mean_max < 0.7, "mean max soft label {mean_max}");
    }

    #[test]
    fn class_counts_balanced_within_one() {
        let cfg = SynthConfig {
            n_train: 26,
            n_test: 9,
            ..small_config()
        };
        let ds = gen_dataset(&cfg).unwrap();
        for split in [Split::Train, Split::Test] {
            let mut counts = vec![0usize; cfg.classes];
            for s in ds.samples.iter().filter(|s| s.split == split) {
                counts[s.item.true_class.unwrap()] += 1;
            }
            let lo = counts.iter().min().unwrap();
            let hi = counts.iter().max().unwrap();
            assert!(hi - lo <= 1, "counts {counts:?}");
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = small_config();
        let a = gen_dataset(&cfg).unwrap();
        let b = gen_dataset(&cfg).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert_eq!(x.item, y.item);
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = small_config();
        cfg.classes = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = small_config();
        cfg.ambiguity = 1.5;
        assert!(cfg.validate().is_err());
        let mut cfg = small_config();
        cfg.noise_sigma = -0.1;
        assert!(cfg.validate().is_err());
    }
}
