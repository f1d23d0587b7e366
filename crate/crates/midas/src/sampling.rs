//! All randomness used by the crate: mixing coefficients, pair selection,
//! and temporal segment sampling, on top of seedable deterministic streams.
//!
//! Every consumer owns an [`RngStream`] derived from the run seed. Streams
//! are identified by `(seed, stream_id)`; deriving a child uses only that
//! identity, never the consumed state, so parallel workers can derive the
//! same children regardless of scheduling.

use rand::Rng;
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};

use crate::error::{Error, Result};

/// splitmix64 finalizer; good avalanche for stream-id derivation.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A deterministic random stream keyed by `(seed, stream_id)`.
///
/// Identical keys produce identical output sequences on every platform and
/// under any degree of parallelism. Streams are single-owner; concurrent
/// workers each derive their own child stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    /// Root stream for a run.
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Stream with an explicit id.
    pub fn with_stream(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Child stream for `tag`, derived from this stream's identity only.
    pub fn derive(&self, tag: u64) -> RngStream {
        Self::with_stream(self.seed, mix64(self.stream_id ^ mix64(tag)))
    }

    /// Child stream for a named purpose, e.g. `"model-init"`.
    pub fn derive_named(&self, name: &str) -> RngStream {
        // FNV-1a over the name, then the usual mixing.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for &b in name.as_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        self.derive(h)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
}

/// A mixing coefficient `lambda` drawn from `Beta(alpha, alpha)`.
///
/// The complement `1 - lambda` is computed once at construction and cached,
/// so [`MixCoefficient::complement`] is an exact involution and mixing with
/// the complement is bit-for-bit symmetric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixCoefficient {
    lambda: f64,
    one_minus_lambda: f64,
    alpha: f64,
}

impl MixCoefficient {
    pub fn new(lambda: f64, alpha: f64) -> Result<Self> {
        if !lambda.is_finite() || !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!(
                "lambda must lie in [0, 1], got {lambda}"
            )));
        }
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        Ok(Self {
            lambda,
            one_minus_lambda: 1.0 - lambda,
            alpha,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The cached `1 - lambda`.
    pub fn one_minus_lambda(&self) -> f64 {
        self.one_minus_lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The flipped coefficient, exchanging `lambda` and `1 - lambda`
    /// exactly (no re-rounding).
    pub fn complement(&self) -> MixCoefficient {
        MixCoefficient {
            lambda: self.one_minus_lambda,
            one_minus_lambda: self.lambda,
            alpha: self.alpha,
        }
    }
}

/// Draws `lambda ~ Beta(alpha, alpha)`.
pub fn sample_lambda(alpha: f64, rng: &mut RngStream) -> Result<MixCoefficient> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "beta shape alpha must be positive, got {alpha}"
        )));
    }
    let beta = Beta::new(alpha, alpha)
        .map_err(|e| Error::InvalidParameter(format!("beta distribution: {e}")))?;
    let lambda: f64 = beta.sample(rng);
    MixCoefficient::new(lambda.clamp(0.0, 1.0), alpha)
}

/// Picks an ordered pair of distinct indices, each marginally uniform
/// over `[0, n)`.
pub fn sample_pair(n: usize, rng: &mut RngStream) -> Result<(usize, usize)> {
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    Ok((i, j))
}

/// How a frame is picked within each temporal segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentMode {
    /// Uniform draw within the segment (training).
    Random,
    /// Deterministic segment midpoint (evaluation).
    Center,
}

/// Divides `total_frames` into `num_segments` and picks one frame index per
/// segment.
///
/// Segment `k` spans `[k*total/num, (k+1)*total/num)`. When a clip is
/// shorter than the segment count some segments are empty and the boundary
/// index repeats, so the output always has length `num_segments` and is
/// non-decreasing.
pub fn sample_segments(
    total_frames: usize,
    num_segments: usize,
    mode: SegmentMode,
    rng: &mut RngStream,
) -> Result<Vec<usize>> {
    if total_frames == 0 {
        return Err(Error::InvalidInput(
            "cannot sample segments from a zero-length clip".into(),
        ));
    }
    if num_segments == 0 {
        return Err(Error::InvalidParameter(
            "segment count must be at least 1".into(),
        ));
    }
    let mut indices = Vec::with_capacity(num_segments);
    for k in 0..num_segments {
        let lo = k * total_frames / num_segments;
        let hi = (k + 1) * total_frames / num_segments;
        let idx = if hi <= lo {
            lo
        } else {
            match mode {
                SegmentMode::Center => (lo + hi) / 2,
                SegmentMode::Random => rng.random_range(lo..hi),
            }
        };
        indices.push(idx);
    }
    Ok(indices)
}
