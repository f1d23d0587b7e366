//! Soft labels, annotator votes, and the label algebra built on them.
//!
//! A soft label is a probability vector over the emotion classes, here
//! obtained as the average of several annotators' one-hot votes. The
//! simplex constraint is enforced with a tolerance of `1e-9` to absorb
//! accumulation error from file round-trips.

use crate::error::{Error, Result};

/// Tolerance on the simplex constraint (`sum == 1`) for soft labels.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// A probability vector over `C` classes.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftLabel {
    probs: Vec<f64>,
}

impl SoftLabel {
    /// Validates and wraps a probability vector: entries finite and
    /// non-negative, summing to 1 within [`SIMPLEX_TOLERANCE`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Validation("soft label has zero classes".into()));
        }
        let mut sum = 0.0;
        for &p in &probs {
            if !p.is_finite() {
                return Err(Error::NonFinite {
                    context: "soft label entry".into(),
                });
            }
            if p < 0.0 {
                return Err(Error::Validation(format!(
                    "soft label entry {p} is negative"
                )));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::Validation(format!(
                "soft label sums to {sum}, expected 1 within {SIMPLEX_TOLERANCE}"
            )));
        }
        Ok(Self { probs })
    }

    /// The one-hot label for `class` out of `classes`.
    pub fn one_hot(class: usize, classes: usize) -> Result<Self> {
        if class >= classes {
            return Err(Error::InvalidInput(format!(
                "one-hot class {class} out of range for {classes} classes"
            )));
        }
        let mut probs = vec![0.0; classes];
        probs[class] = 1.0;
        Ok(Self { probs })
    }

    /// Averages annotator votes into a soft label: `probs[c] = count(c) / S`.
    pub fn from_votes(votes: &AnnotatorVotes, classes: usize) -> Result<Self> {
        let mut counts = vec![0usize; classes];
        for &v in votes.votes() {
            if v >= classes {
                return Err(Error::InvalidVote {
                    index: v,
                    classes,
                });
            }
            counts[v] += 1;
        }
        let s = votes.len() as f64;
        Self::new(counts.into_iter().map(|c| c as f64 / s).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_classes(&self) -> usize {
        self.probs.len()
    }

    /// Index of the largest probability; ties break to the lowest index.
    pub fn argmax(&self) -> usize {
        argmax(&self.probs)
    }

    /// The largest probability.
    pub fn max_prob(&self) -> f64 {
        self.probs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Componentwise closeness, used by dataset invariant checks.
    pub fn approx_eq(&self, other: &SoftLabel, tol: f64) -> bool {
        self.probs.len() == other.probs.len()
            && self
                .probs
                .iter()
                .zip(&other.probs)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// Index of the maximum entry, ties broken by lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Temperature-1 softmax, shifted by the maximum for stability.
///
/// Errors if any input is NaN or infinite.
pub fn softmax(values: &[f64]) -> Result<SoftLabel> {
    if values.is_empty() {
        return Err(Error::InvalidInput("softmax over zero classes".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "softmax input".into(),
        });
    }
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = values.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    let probs: Vec<f64> = exps.into_iter().map(|e| e / sum).collect();
    SoftLabel::new(probs)
}

/// One one-hot vote per annotator, stored as class indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatorVotes {
    votes: Vec<usize>,
}

impl AnnotatorVotes {
    pub fn new(votes: Vec<usize>) -> Result<Self> {
        if votes.is_empty() {
            return Err(Error::InvalidInput(
                "annotator votes need at least one annotator".into(),
            ));
        }
        Ok(Self { votes })
    }

    pub fn votes(&self) -> &[usize] {
        &self.votes
    }

    /// Number of annotators.
    pub fn len(&self) -> usize {
        self.votes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.votes.is_empty()
    }

    /// How many votes name `class`.
    pub fn count_for(&self, class: usize) -> usize {
        self.votes.iter().filter(|&&v| v == class).count()
    }
}

/// A clip together with its label information.
///
/// `true_class` is only known for synthetic data, where the generator
/// records it.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledClip {
    pub id: String,
    pub clip: crate::clip::VideoClip,
    pub soft: SoftLabel,
    pub votes: Option<AnnotatorVotes>,
    pub true_class: Option<usize>,
}

impl LabeledClip {
    /// Builds a labeled clip, checking that a present vote set averages to
    /// the stored soft label within [`SIMPLEX_TOLERANCE`].
    pub fn new(
        id: String,
        clip: crate::clip::VideoClip,
        soft: SoftLabel,
        votes: Option<AnnotatorVotes>,
        true_class: Option<usize>,
    ) -> Result<Self> {
        if let Some(v) = &votes {
            let derived = SoftLabel::from_votes(v, soft.num_classes())?;
            if !soft.approx_eq(&derived, SIMPLEX_TOLERANCE) {
                return Err(Error::Validation(format!(
                    "sample {id}: soft label does not match the vote average"
                )));
            }
        }
        if let Some(t) = true_class {
            if t >= soft.num_classes() {
                return Err(Error::InvalidInput(format!(
                    "sample {id}: true class {t} out of range"
                )));
            }
        }
        Ok(Self {
            id,
            clip,
            soft,
            votes,
            true_class,
        })
    }
}
