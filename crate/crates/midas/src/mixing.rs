//! The augmentation itself: frame-wise clip combination, label combination
//! with optional softmax normalization, a hard-label variant, and the
//! vicinity-distribution decomposition used as an algebraic self-check.
//!
//! A mixed sample is `lambda * a + (1 - lambda) * b`, applied frame `t`
//! against frame `t` for the clips and componentwise for the labels. The
//! combined label is softmax-normalized by default to account for
//! annotation noise; the raw convex combination is kept alongside it.

use rayon::prelude::*;

use crate::clip::VideoClip;
use crate::error::{Error, Result};
use crate::label::{softmax, AnnotatorVotes, LabeledClip, SoftLabel};
use crate::sampling::{sample_lambda, sample_pair, MixCoefficient, RngStream};

/// Whether sources contribute their soft labels or one-hot argmax labels.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum LabelMode {
    Soft,
    Hard,
}

/// A generated clip with its combined label and provenance.
#[derive(Debug, Clone)]
pub struct MixedSample {
    pub clip: VideoClip,
    /// Combined label after optional softmax normalization.
    pub label: SoftLabel,
    /// `lambda * y_i + (1 - lambda) * y_j` before normalization.
    pub label_pre_norm: Vec<f64>,
    pub source_i: String,
    pub source_j: String,
    pub lambda: MixCoefficient,
}

/// Result of combining two labels: the raw convex combination and the
/// label actually emitted (softmaxed when `normalize` is on).
#[derive(Debug, Clone)]
pub struct MixedLabel {
    pub pre_norm: Vec<f64>,
    pub label: SoftLabel,
}

/// Combines two clips frame by frame: every element becomes
/// `lambda * a + (1 - lambda) * b`, computed in f64 and rounded once.
pub fn mix_clips(a: &VideoClip, b: &VideoClip, lambda: &MixCoefficient) -> Result<VideoClip> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!(
            "cannot mix clips of shape {} and {}",
            a.shape(),
            b.shape()
        )));
    }
    let l = lambda.lambda();
    let m = lambda.one_minus_lambda();
    let data: Vec<f32> = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| (l * x as f64 + m * y as f64) as f32)
        .collect();
    VideoClip::from_vec(a.shape(), data)
}

/// Combines two soft labels. The convex combination of simplex points is
/// itself a valid soft label, so `normalize = false` needs no
/// renormalization.
pub fn mix_labels(
    y_i: &SoftLabel,
    y_j: &SoftLabel,
    lambda: &MixCoefficient,
    normalize: bool,
) -> Result<MixedLabel> {
    if y_i.num_classes() != y_j.num_classes() {
        return Err(Error::ShapeMismatch(format!(
            "cannot mix labels over {} and {} classes",
            y_i.num_classes(),
            y_j.num_classes()
        )));
    }
    let l = lambda.lambda();
    let m = lambda.one_minus_lambda();
    let pre_norm: Vec<f64> = y_i
        .probs()
        .iter()
        .zip(y_j.probs())
        .map(|(&a, &b)| l * a + m * b)
        .collect();
    let label = if normalize {
        softmax(&pre_norm)?
    } else {
        SoftLabel::new(pre_norm.clone())?
    };
    Ok(MixedLabel { pre_norm, label })
}

/// Generates a batch of mixed samples from a dataset.
///
/// Pairs are drawn uniformly with `i != j`; one `lambda ~ Beta(alpha,
/// alpha)` is drawn per pair. With [`LabelMode::Hard`] each source label is
/// first replaced by the one-hot of its argmax class, then mixed
/// identically. Sample `k` uses the child stream `rng.derive(k)`, so the
/// batch is the same for any worker count; samples are emitted in index
/// order.
pub fn midas_batch<T: std::borrow::Borrow<LabeledClip> + Sync>(
    dataset: &[T],
    batch_size: usize,
    alpha: f64,
    label_mode: LabelMode,
    normalize: bool,
    rng: &RngStream,
) -> Result<Vec<MixedSample>> {
    if dataset.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: dataset.len(),
        });
    }
    (0..batch_size)
        .into_par_iter()
        .map(|k| {
            let mut stream = rng.derive(k as u64);
            let (i, j) = sample_pair(dataset.len(), &mut stream)?;
            let lambda = sample_lambda(alpha, &mut stream)?;
            let (a, b) = (dataset[i].borrow(), dataset[j].borrow());
            let (y_i, y_j) = match label_mode {
                LabelMode::Soft => (a.soft.clone(), b.soft.clone()),
                LabelMode::Hard => (
                    SoftLabel::one_hot(a.soft.argmax(), a.soft.num_classes())?,
                    SoftLabel::one_hot(b.soft.argmax(), b.soft.num_classes())?,
                ),
            };
            let clip = mix_clips(&a.clip, &b.clip, &lambda)?;
            let mixed = mix_labels(&y_i, &y_j, &lambda, normalize)?;
            Ok(MixedSample {
                clip,
                label: mixed.label,
                label_pre_norm: mixed.pre_norm,
                source_i: a.id.clone(),
                source_j: b.id.clone(),
                lambda,
            })
        })
        .collect()
}

/// Rewrite of the mixed soft label in terms of the (unknown) true label.
///
/// With `l` of `S` votes naming the true class, the combined label
/// `lambda * q_i + (1 - lambda) * q_j` equals
/// `lambda' * onehot(true) + (1 - lambda') * y'_j` where
/// `lambda' = lambda * l / S` and `y'_j` reweights the wrong votes of
/// sample `i` together with `q_j`. [`decompose_vicinity`] computes the
/// pieces; the reconstruction identity is what the tests check.
#[derive(Debug, Clone)]
pub struct VicinityDecomposition {
    /// `lambda * l / S`.
    pub lambda_prime: f64,
    /// The virtual partner label; `None` in the degenerate all-correct,
    /// `lambda = 1` case where it carries no weight.
    pub y_prime_j: Option<Vec<f64>>,
    /// Votes for the true class.
    pub correct_votes: usize,
    /// Total annotators.
    pub annotators: usize,
}

/// Decomposes a mixed label around the true class of sample `i`.
pub fn decompose_vicinity(
    lambda: &MixCoefficient,
    true_class: usize,
    votes_i: &AnnotatorVotes,
    q_j: &SoftLabel,
) -> Result<VicinityDecomposition> {
    let classes = q_j.num_classes();
    if true_class >= classes {
        return Err(Error::InvalidInput(format!(
            "true class {true_class} out of range for {classes} classes"
        )));
    }
    for &v in votes_i.votes() {
        if v >= classes {
            return Err(Error::InvalidVote { index: v, classes });
        }
    }
    let s = votes_i.len();
    let l = votes_i.count_for(true_class);
    let lam = lambda.lambda();

    // All votes correct: lambda' = lambda exactly and y'_j reduces to q_j.
    if l == s {
        if lam >= 1.0 {
            return Ok(VicinityDecomposition {
                lambda_prime: 1.0,
                y_prime_j: None,
                correct_votes: l,
                annotators: s,
            });
        }
        return Ok(VicinityDecomposition {
            lambda_prime: lam,
            y_prime_j: Some(q_j.probs().to_vec()),
            correct_votes: l,
            annotators: s,
        });
    }

    let s_f = s as f64;
    let denom = s_f - lam * l as f64;
    debug_assert!(denom > 0.0);
    let lambda_prime = lam * l as f64 / s_f;

    // Wrong-vote mass per class, from sample i's annotators.
    let mut wrong = vec![0.0f64; classes];
    for &v in votes_i.votes() {
        if v != true_class {
            wrong[v] += 1.0;
        }
    }
    let c_wrong = lam / denom;
    let c_qj = s_f * lambda.one_minus_lambda() / denom;
    let y_prime: Vec<f64> = wrong
        .iter()
        .zip(q_j.probs())
        .map(|(&w, &q)| c_wrong * w + c_qj * q)
        .collect();

    Ok(VicinityDecomposition {
        lambda_prime,
        y_prime_j: Some(y_prime),
        correct_votes: l,
        annotators: s,
    })
}

impl VicinityDecomposition {
    /// `lambda' * onehot(true_class) + (1 - lambda') * y'_j`, the label the
    /// decomposition claims to equal the directly mixed one.
    pub fn reconstruct(&self, true_class: usize, classes: usize) -> Vec<f64> {
        let mut out = vec![0.0; classes];
        out[true_class] = self.lambda_prime;
        if let Some(y) = &self.y_prime_j {
            let w = 1.0 - self.lambda_prime;
            for (o, &v) in out.iter_mut().zip(y) {
                *o += w * v;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clip::ClipShape;
    use proptest::prelude::*;
    use rand::Rng;

    fn clip_from(data: Vec<f32>, shape: ClipShape) -> VideoClip {
        VideoClip::from_vec(shape, data).unwrap()
    }

    fn coeff(lambda: f64) -> MixCoefficient {
        MixCoefficient::new(lambda, 0.4).unwrap()
    }

    fn random_clip(shape: ClipShape, rng: &mut RngStream) -> VideoClip {
        let data: Vec<f32> = (0..shape.len())
            .map(|_| rng.random_range(0.0..=1.0))
            .collect();
        clip_from(data, shape)
    }

    fn random_simplex(classes: usize, rng: &mut RngStream) -> SoftLabel {
        let raw: Vec<f64> = (0..classes)
            .map(|_| -rng.random_range(1e-12..1.0f64).ln())
            .collect();
        let sum: f64 = raw.iter().sum();
        SoftLabel::new(raw.into_iter().map(|x| x / sum).collect()).unwrap()
    }

    #[test]
    fn endpoints_are_exact() {
        let shape = ClipShape::new(2, 3, 3, 1);
        let mut rng = RngStream::new(1);
        let a = random_clip(shape, &mut rng);
        let b = random_clip(shape, &mut rng);
        assert_eq!(mix_clips(&a, &b, &coeff(1.0)).unwrap(), a);
        assert_eq!(mix_clips(&a, &b, &coeff(0.0)).unwrap(), b);
    }

    #[test]
    fn quarter_mix_of_constant_clips() {
        let shape = ClipShape::new(1, 2, 2, 1);
        let zeros = VideoClip::filled(shape, 0.0).unwrap();
        let ones = VideoClip::filled(shape, 1.0).unwrap();
        let mixed = mix_clips(&zeros, &ones, &coeff(0.25)).unwrap();
        assert!(mixed.data().iter().all(|&v| v == 0.75));
    }

    #[test]
    fn mix_rejects_shape_mismatch() {
        let a = VideoClip::filled(ClipShape::new(1, 2, 2, 1), 0.5).unwrap();
        let b = VideoClip::filled(ClipShape::new(2, 2, 2, 1), 0.5).unwrap();
        assert!(mix_clips(&a, &b, &coeff(0.5)).is_err());
    }

    #[test]
    fn label_endpoint_without_normalization() {
        let yi = SoftLabel::new(vec![0.3, 0.7]).unwrap();
        let yj = SoftLabel::new(vec![0.9, 0.1]).unwrap();
        let out = mix_labels(&yi, &yj, &coeff(1.0), false).unwrap();
        assert_eq!(out.label.probs(), yi.probs());
        assert_eq!(out.pre_norm, yi.probs());
    }

    #[test]
    fn label_mix_direct_and_normalized() {
        let yi = SoftLabel::one_hot(0, 2).unwrap();
        let yj = SoftLabel::one_hot(1, 2).unwrap();
        let raw = mix_labels(&yi, &yj, &coeff(0.6), false).unwrap();
        assert!((raw.label.probs()[0] - 0.6).abs() < 1e-15);
        assert!((raw.label.probs()[1] - 0.4).abs() < 1e-15);

        let norm = mix_labels(&yi, &yj, &coeff(0.6), true).unwrap();
        assert_eq!(norm.pre_norm, raw.pre_norm);
        let logistic = 1.0 / (1.0 + (-0.2f64).exp());
        assert!((norm.label.probs()[0] - logistic).abs() < 1e-12);
        assert!((norm.label.probs()[0] - 0.549834).abs() < 1e-6);
    }

    #[test]
    fn hard_mode_one_hot_then_mix() {
        // Sources [0.6, 0.4] and [0.2, 0.8] become one-hot [1,0] and [0,1];
        // an even mix gives [0.5, 0.5].
        let yi = SoftLabel::new(vec![0.6, 0.4]).unwrap();
        let yj = SoftLabel::new(vec![0.2, 0.8]).unwrap();
        let hi = SoftLabel::one_hot(yi.argmax(), 2).unwrap();
        let hj = SoftLabel::one_hot(yj.argmax(), 2).unwrap();
        let out = mix_labels(&hi, &hj, &coeff(0.5), false).unwrap();
        assert_eq!(out.pre_norm, vec![0.5, 0.5]);
    }

    fn tiny_dataset(n: usize, seed: u64) -> Vec<LabeledClip> {
        let shape = ClipShape::new(2, 2, 2, 1);
        let mut rng = RngStream::new(seed);
        (0..n)
            .map(|k| {
                let clip = random_clip(shape, &mut rng);
                let soft = random_simplex(3, &mut rng);
                LabeledClip::new(format!("clip-{k}"), clip, soft, None, None).unwrap()
            })
            .collect()
    }

    #[test]
    fn batch_over_two_clips_uses_both_ids() {
        let ds = tiny_dataset(2, 7);
        let rng = RngStream::new(3);
        let batch = midas_batch(&ds, 16, 0.4, LabelMode::Soft, true, &rng).unwrap();
        assert_eq!(batch.len(), 16);
        for s in &batch {
            assert_ne!(s.source_i, s.source_j);
            let mut pair = [s.source_i.as_str(), s.source_j.as_str()];
            pair.sort();
            assert_eq!(pair, ["clip-0", "clip-1"]);
        }
    }

    #[test]
    fn batch_is_deterministic() {
        let ds = tiny_dataset(5, 7);
        let rng = RngStream::new(3);
        let a = midas_batch(&ds, 12, 0.4, LabelMode::Soft, true, &rng).unwrap();
        let b = midas_batch(&ds, 12, 0.4, LabelMode::Soft, true, &rng).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.clip, y.clip);
            assert_eq!(x.label.probs(), y.label.probs());
            assert_eq!(x.lambda.lambda().to_bits(), y.lambda.lambda().to_bits());
            assert_eq!(x.source_i, y.source_i);
            assert_eq!(x.source_j, y.source_j);
        }
    }

    #[test]
    fn batch_needs_two_samples() {
        let ds = tiny_dataset(1, 7);
        let rng = RngStream::new(3);
        assert!(matches!(
            midas_batch(&ds, 4, 0.4, LabelMode::Soft, true, &rng),
            Err(Error::InsufficientData { .. })
        ));
    }

    fn votes(v: &[usize]) -> AnnotatorVotes {
        AnnotatorVotes::new(v.to_vec()).unwrap()
    }

    #[test]
    fn all_correct_votes_reduce_to_plain_mix() {
        let mut rng = RngStream::new(5);
        let q_j = random_simplex(4, &mut rng);
        for lam in [0.0, 0.2, 0.9] {
            let d = decompose_vicinity(&coeff(lam), 2, &votes(&[2; 6]), &q_j).unwrap();
            assert_eq!(d.lambda_prime, lam);
            assert_eq!(d.y_prime_j.as_deref().unwrap(), q_j.probs());
        }
    }

    #[test]
    fn lambda_prime_hand_value() {
        // S = 10 votes, 8 correct, lambda = 0.5 -> lambda' = 0.4
        let mut v = vec![1usize; 8];
        v.extend([0, 2]);
        let q_j = SoftLabel::new(vec![0.25; 4]).unwrap();
        let d = decompose_vicinity(&coeff(0.5), 1, &votes(&v), &q_j).unwrap();
        assert!((d.lambda_prime - 0.4).abs() < 1e-15);
        assert_eq!(d.correct_votes, 8);
        assert_eq!(d.annotators, 10);
    }

    #[test]
    fn degenerate_all_correct_lambda_one() {
        let q_j = SoftLabel::new(vec![0.5, 0.5]).unwrap();
        let d = decompose_vicinity(&coeff(1.0), 0, &votes(&[0, 0, 0]), &q_j).unwrap();
        assert_eq!(d.lambda_prime, 1.0);
        assert!(d.y_prime_j.is_none());
        let rec = d.reconstruct(0, 2);
        assert_eq!(rec, vec![1.0, 0.0]);
    }

    #[test]
    fn decompose_rejects_bad_indices() {
        let q_j = SoftLabel::new(vec![0.5, 0.5]).unwrap();
        assert!(decompose_vicinity(&coeff(0.5), 2, &votes(&[0]), &q_j).is_err());
        assert!(decompose_vicinity(&coeff(0.5), 0, &votes(&[3]), &q_j).is_err());
    }

    #[test]
    fn reconstruction_identity_spot_check() {
        let mut rng = RngStream::new(21);
        for _ in 0..500 {
            let classes = rng.random_range(2..=6);
            let s = rng.random_range(1..=12);
            let true_class = rng.random_range(0..classes);
            let v: Vec<usize> = (0..s).map(|_| rng.random_range(0..classes)).collect();
            let votes_i = votes(&v);
            let q_i = SoftLabel::from_votes(&votes_i, classes).unwrap();
            let q_j = random_simplex(classes, &mut rng);
            let lam = sample_lambda(0.4, &mut rng).unwrap();

            let d = decompose_vicinity(&lam, true_class, &votes_i, &q_j).unwrap();
            let rec = d.reconstruct(true_class, classes);
            let direct = mix_labels(&q_i, &q_j, &lam, false).unwrap().pre_norm;
            for (r, t) in rec.iter().zip(&direct) {
                assert!((r - t).abs() <= 1e-12, "identity violated: {r} vs {t}");
            }

            if let Some(y) = &d.y_prime_j {
                let sum: f64 = y.iter().sum();
                assert!((sum - 1.0).abs() <= 1e-9);
                assert!(y.iter().all(|&x| x >= 0.0));
            }
            assert!(d.lambda_prime >= 0.0 && d.lambda_prime <= lam.lambda() + 1e-15);
        }
    }

    proptest! {
        // mix(a, b, lambda) == mix(b, a, 1 - lambda), bit for bit, via the
        // exact complement.
        #[test]
        fn mixing_is_symmetric(seed in 0u64..1000, lambda in 0.0f64..=1.0) {
            let shape = ClipShape::new(2, 2, 2, 1);
            let mut rng = RngStream::new(seed);
            let a = random_clip(shape, &mut rng);
            let b = random_clip(shape, &mut rng);
            let lam = coeff(lambda);
            let fwd = mix_clips(&a, &b, &lam).unwrap();
            let rev = mix_clips(&b, &a, &lam.complement()).unwrap();
            prop_assert_eq!(fwd, rev);

            let yi = random_simplex(3, &mut rng);
            let yj = random_simplex(3, &mut rng);
            let lf = mix_labels(&yi, &yj, &lam, false).unwrap();
            let lr = mix_labels(&yj, &yi, &lam.complement(), false).unwrap();
            prop_assert_eq!(lf.pre_norm, lr.pre_norm);
        }

        // Convexity: the mixed clip stays inside the input range.
        #[test]
        fn mixing_is_convex(seed in 0u64..1000, lambda in 0.0f64..=1.0) {
            let shape = ClipShape::new(1, 3, 3, 1);
            let mut rng = RngStream::new(seed);
            let a = random_clip(shape, &mut rng);
            let b = random_clip(shape, &mut rng);
            let mixed = mix_clips(&a, &b, &coeff(lambda)).unwrap();
            let lo = a.data().iter().chain(b.data()).cloned().fold(f32::INFINITY, f32::min);
            let hi = a.data().iter().chain(b.data()).cloned().fold(f32::NEG_INFINITY, f32::max);
            for &v in mixed.data() {
                prop_assert!(v >= lo && v <= hi);
            }
        }

        // Without normalization the mixed label is already a valid simplex
        // point.
        #[test]
        fn unnormalized_label_is_valid(seed in 0u64..1000, lambda in 0.0f64..=1.0) {
            let mut rng = RngStream::new(seed);
            let yi = random_simplex(5, &mut rng);
            let yj = random_simplex(5, &mut rng);
            let out = mix_labels(&yi, &yj, &coeff(lambda), false).unwrap();
            let sum: f64 = out.label.probs().iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-9);
        }
    }
}
