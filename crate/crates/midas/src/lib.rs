//! Mixup-style augmentation for soft-labeled video clips.
//!
//! This crate generates virtual training samples by convexly combining
//! pairs of video clips frame by frame, together with their soft labels
//! (per-class probabilities averaged from annotator votes), using a shared
//! `Beta(alpha, alpha)` coefficient. Around that core it provides:
//!
//! - [`clip`] / [`label`] — the clip and soft-label domain types and their
//!   algebra (vote averaging, argmax with fixed tie-break, softmax).
//! - [`sampling`] — seedable deterministic random streams, the mixing
//!   coefficient sampler, pair selection, and temporal segment sampling.
//! - [`mixing`] — the augmentation itself, its hard-label variant, and the
//!   vicinity-distribution decomposition used as an algebraic self-check.
//! - [`synthdata`] — synthetic ambiguous-clip generation, annotator vote
//!   simulation, and the on-disk dataset format.
//! - [`metrics`] — confusion matrix, UAR/WAR, coexistence analysis, and
//!   the clear/mixed ambiguity split with distribution-matched resampling.
//! - [`trainer`] — a tiny pluggable classifier with soft-target
//!   cross-entropy, SGD momentum, and cosine decay.
//! - [`cli`] — the `midas` command-line entry point wiring it all together.
//!
//! Every run is fully reproducible: all randomness flows through
//! [`sampling::RngStream`]s derived from a single seed, independent of
//! worker count.
//!
//! See the crate `examples/` directory for one runnable example per major
//! capability, and the README for the CLI surface.

pub mod cli;
pub mod clip;
pub mod error;
pub mod label;
pub mod metrics;
pub mod mixing;
pub mod sampling;
pub mod synthdata;
pub mod trainer;

pub use clip::{ClipShape, VideoClip};
pub use error::{Error, Result};
pub use label::{softmax, AnnotatorVotes, LabeledClip, SoftLabel};
pub use mixing::{mix_clips, mix_labels, midas_batch, MixedSample, VicinityDecomposition};
pub use sampling::{sample_lambda, sample_pair, sample_segments, MixCoefficient, RngStream};
