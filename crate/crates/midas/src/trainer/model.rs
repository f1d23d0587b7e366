//! The tiny reference classifier: spatial-average-pooled frames feeding a
//! two-layer perceptron with a softmax head.
//!
//! This stands in for the heavyweight video backbones the augmentation is
//! normally paired with; it is just large enough to overfit the synthetic
//! data and exercise soft-target training end to end. Parameters are held
//! in f64 for stable gradient checks and stored on disk as f32.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::Rng;

use crate::clip::VideoClip;
use crate::error::{Error, Result};
use crate::label::SoftLabel;
use crate::sampling::RngStream;

const MODEL_MAGIC: &[u8; 4] = b"MIDM";
const MODEL_VERSION: u32 = 1;

/// Leaky-ReLU slope for the hidden layer. A strict ReLU can die wholesale
/// under one-hot targets with momentum at the default learning rate.
const LEAKY_SLOPE: f64 = 0.01;

/// Input geometry and layer sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelDims {
    /// Frames fed to the model (one per temporal segment).
    pub segments: usize,
    /// Spatial pooling target, `pool x pool` per frame.
    pub pool: usize,
    pub channels: usize,
    pub hidden: usize,
    pub classes: usize,
}

impl ModelDims {
    pub fn input_dim(&self) -> usize {
        self.segments * self.pool * self.pool * self.channels
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments == 0
            || self.pool == 0
            || self.channels == 0
            || self.hidden == 0
            || self.classes == 0
        {
            return Err(Error::Config("model dimensions must all be >= 1".into()));
        }
        Ok(())
    }
}

/// Two-layer perceptron over pooled clip features.
#[derive(Debug, Clone, PartialEq)]
pub struct TinyClassifier {
    pub dims: ModelDims,
    /// `input_dim x hidden`, input-major.
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    /// `hidden x classes`, hidden-major.
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

/// Gradients (or optimizer velocity) with the same layout as the
/// parameters.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

/// Per-unit keep decisions for one batch, inverted-dropout style: kept
/// units are scaled by `1 / (1 - rate)` so evaluation needs no rescaling.
#[derive(Debug, Clone)]
pub struct DropoutMask {
    keep: Vec<bool>,
    scale: f64,
    batch: usize,
    hidden: usize,
}

impl DropoutMask {
    /// Samples a mask for `batch x hidden` units with drop probability
    /// `rate`.
    pub fn sample(batch: usize, hidden: usize, rate: f64, rng: &mut RngStream) -> Result<Self> {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::Config(format!(
                "dropout rate must lie in [0, 1), got {rate}"
            )));
        }
        let keep = (0..batch * hidden)
            .map(|_| rng.random_range(0.0..1.0f64) >= rate)
            .collect();
        Ok(Self {
            keep,
            scale: 1.0 / (1.0 - rate),
            batch,
            hidden,
        })
    }
}

/// Activations cached by the forward pass, as needed for the backward
/// pass.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    /// Softmax outputs, one valid probability row per sample.
    pub probs: Vec<Vec<f64>>,
    hidden_pre: Vec<f64>,
    hidden_act: Vec<f64>,
    /// Effective per-unit multiplier from dropout (1 when disabled).
    unit_scale: Vec<f64>,
}

impl TinyClassifier {
    /// He-uniform initialization; biases start at zero.
    pub fn init(dims: ModelDims, rng: &mut RngStream) -> Result<Self> {
        dims.validate()?;
        let d = dims.input_dim();
        let lim1 = (6.0 / d as f64).sqrt();
        let lim2 = (6.0 / dims.hidden as f64).sqrt();
        let w1 = (0..d * dims.hidden)
            .map(|_| rng.random_range(-lim1..lim1))
            .collect();
        let w2 = (0..dims.hidden * dims.classes)
            .map(|_| rng.random_range(-lim2..lim2))
            .collect();
        Ok(Self {
            dims,
            w1,
            b1: vec![0.0; dims.hidden],
            w2,
            b2: vec![0.0; dims.classes],
        })
    }

    /// All-zero parameters (uniform output; useful as a baseline).
    pub fn zeros(dims: ModelDims) -> Result<Self> {
        dims.validate()?;
        let d = dims.input_dim();
        Ok(Self {
            dims,
            w1: vec![0.0; d * dims.hidden],
            b1: vec![0.0; dims.hidden],
            w2: vec![0.0; dims.hidden * dims.classes],
            b2: vec![0.0; dims.classes],
        })
    }

    pub fn zero_gradients(&self) -> Gradients {
        Gradients {
            w1: vec![0.0; self.w1.len()],
            b1: vec![0.0; self.b1.len()],
            w2: vec![0.0; self.w2.len()],
            b2: vec![0.0; self.b2.len()],
        }
    }

    pub fn num_params(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    /// Forward pass over pre-pooled features. With a dropout mask the
    /// hidden layer applies inverted dropout; without one the pass is
    /// deterministic.
    pub fn forward(&self, batch: &[Vec<f64>], dropout: Option<&DropoutMask>) -> Result<ForwardPass> {
        let d = self.dims.input_dim();
        let h = self.dims.hidden;
        let c = self.dims.classes;
        let n = batch.len();
        for row in batch {
            if row.len() != d {
                return Err(Error::ShapeMismatch(format!(
                    "feature vector of length {} for input dim {d}",
                    row.len()
                )));
            }
        }
        if let Some(m) = dropout {
            if m.batch != n || m.hidden != h {
                return Err(Error::ShapeMismatch(format!(
                    "dropout mask {}x{} for batch {n}x{h}",
                    m.batch, m.hidden
                )));
            }
        }

        let mut hidden_pre = vec![0.0f64; n * h];
        for (b, row) in batch.iter().enumerate() {
            let out = &mut hidden_pre[b * h..(b + 1) * h];
            out.copy_from_slice(&self.b1);
            for (i, &x) in row.iter().enumerate() {
                if x == 0.0 {
                    continue;
                }
                let w = &self.w1[i * h..(i + 1) * h];
                for (o, &wij) in out.iter_mut().zip(w) {
                    *o += x * wij;
                }
            }
        }

        let mut unit_scale = vec![1.0f64; n * h];
        if let Some(m) = dropout {
            for (s, &k) in unit_scale.iter_mut().zip(&m.keep) {
                *s = if k { m.scale } else { 0.0 };
            }
        }
        let hidden_act: Vec<f64> = hidden_pre
            .iter()
            .zip(&unit_scale)
            .map(|(&p, &s)| if p > 0.0 { p * s } else { LEAKY_SLOPE * p * s })
            .collect();

        let mut probs = Vec::with_capacity(n);
        for b in 0..n {
            let act = &hidden_act[b * h..(b + 1) * h];
            let mut logits = self.b2.clone();
            for (j, &a) in act.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let w = &self.w2[j * c..(j + 1) * c];
                for (l, &wjk) in logits.iter_mut().zip(w) {
                    *l += a * wjk;
                }
            }
            if logits.iter().any(|l| !l.is_finite()) {
                return Err(Error::NonFinite {
                    context: "classifier logits".into(),
                });
            }
            let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
            let sum: f64 = exps.iter().sum();
            probs.push(exps.into_iter().map(|e| e / sum).collect());
        }

        Ok(ForwardPass {
            probs,
            hidden_pre,
            hidden_act,
            unit_scale,
        })
    }

    /// Analytic gradients of the mean soft cross-entropy over the batch,
    /// for the forward pass `fwd` computed on `batch`.
    pub fn backward(
        &self,
        batch: &[Vec<f64>],
        fwd: &ForwardPass,
        targets: &[SoftLabel],
    ) -> Result<Gradients> {
        let h = self.dims.hidden;
        let c = self.dims.classes;
        let n = batch.len();
        if targets.len() != n || fwd.probs.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "backward over {} inputs, {} outputs, {} targets",
                n,
                fwd.probs.len(),
                targets.len()
            )));
        }
        let mut grads = self.zero_gradients();
        let inv_n = 1.0 / n as f64;

        // d loss / d logits = (probs - target) / n for the softmax +
        // cross-entropy pair.
        let mut dlogits = vec![0.0f64; n * c];
        for b in 0..n {
            let t = targets[b].probs();
            if t.len() != c {
                return Err(Error::ShapeMismatch(format!(
                    "target with {} classes for a {c}-class model",
                    t.len()
                )));
            }
            for k in 0..c {
                dlogits[b * c + k] = (fwd.probs[b][k] - t[k]) * inv_n;
            }
        }

        let mut dhidden = vec![0.0f64; n * h];
        for b in 0..n {
            let dl = &dlogits[b * c..(b + 1) * c];
            let act = &fwd.hidden_act[b * h..(b + 1) * h];
            for j in 0..h {
                let a = act[j];
                let wrow = &self.w2[j * c..(j + 1) * c];
                let gw = &mut grads.w2[j * c..(j + 1) * c];
                let mut acc = 0.0;
                for k in 0..c {
                    gw[k] += a * dl[k];
                    acc += wrow[k] * dl[k];
                }
                dhidden[b * h + j] = acc;
            }
            for (gb, &d) in grads.b2.iter_mut().zip(dl) {
                *gb += d;
            }
        }

        // Through dropout scaling and the leaky-ReLU gate.
        for ((d, &pre), &scale) in dhidden
            .iter_mut()
            .zip(&fwd.hidden_pre)
            .zip(&fwd.unit_scale)
        {
            let gate = if pre > 0.0 { scale } else { LEAKY_SLOPE * scale };
            *d *= gate;
        }

        for (b, row) in batch.iter().enumerate() {
            let dh = &dhidden[b * h..(b + 1) * h];
            for (i, &x) in row.iter().enumerate() {
                if x == 0.0 {
                    continue;
                }
                let gw = &mut grads.w1[i * h..(i + 1) * h];
                for (g, &d) in gw.iter_mut().zip(dh) {
                    *g += x * d;
                }
            }
            for (gb, &d) in grads.b1.iter_mut().zip(dh) {
                *gb += d;
            }
        }

        Ok(grads)
    }

    /// Writes the model file: magic, version, shape header, then f32
    /// little-endian parameters in `w1, b1, w2, b2` order.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io_err = |e| Error::io(path, e);
        w.write_all(MODEL_MAGIC).map_err(io_err)?;
        w.write_all(&MODEL_VERSION.to_le_bytes()).map_err(io_err)?;
        for dim in [
            self.dims.segments,
            self.dims.pool,
            self.dims.channels,
            self.dims.hidden,
            self.dims.classes,
        ] {
            w.write_all(&(dim as u32).to_le_bytes()).map_err(io_err)?;
        }
        for group in [&self.w1, &self.b1, &self.w2, &self.b2] {
            for &v in group.iter() {
                w.write_all(&(v as f32).to_le_bytes()).map_err(io_err)?;
            }
        }
        w.flush().map_err(io_err)
    }

    /// Reads a model file written by [`TinyClassifier::save`].
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BufReader::new(file);

        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)
            .map_err(|e| Error::format(path, format!("truncated magic: {e}")))?;
        if &magic != MODEL_MAGIC {
            return Err(Error::format(path, format!("bad magic {magic:?}")));
        }
        let mut u32buf = [0u8; 4];
        let mut next_u32 = |what: &str| -> Result<u32> {
            r.read_exact(&mut u32buf)
                .map_err(|e| Error::format(path, format!("truncated {what}: {e}")))?;
            Ok(u32::from_le_bytes(u32buf))
        };
        let version = next_u32("version")?;
        if version != MODEL_VERSION {
            return Err(Error::format(
                path,
                format!("unsupported version {version}"),
            ));
        }
        let dims = ModelDims {
            segments: next_u32("segments")? as usize,
            pool: next_u32("pool")? as usize,
            channels: next_u32("channels")? as usize,
            hidden: next_u32("hidden")? as usize,
            classes: next_u32("classes")? as usize,
        };
        dims.validate()
            .map_err(|e| Error::format(path, e.to_string()))?;

        let mut read_group = |len: usize, what: &str| -> Result<Vec<f64>> {
            let mut out = Vec::with_capacity(len);
            let mut buf = [0u8; 4];
            for _ in 0..len {
                r.read_exact(&mut buf)
                    .map_err(|e| Error::format(path, format!("truncated {what}: {e}")))?;
                let v = f32::from_le_bytes(buf);
                if !v.is_finite() {
                    return Err(Error::format(path, format!("non-finite value in {what}")));
                }
                out.push(v as f64);
            }
            Ok(out)
        };
        let d = dims.input_dim();
        let model = Self {
            dims,
            w1: read_group(d * dims.hidden, "w1")?,
            b1: read_group(dims.hidden, "b1")?,
            w2: read_group(dims.hidden * dims.classes, "w2")?,
            b2: read_group(dims.classes, "b2")?,
        };
        let mut trailing = [0u8; 1];
        match r.read(&mut trailing) {
            Ok(0) => Ok(model),
            Ok(_) => Err(Error::format(path, "trailing bytes after parameters")),
            Err(e) => Err(Error::io(path, e)),
        }
    }
}

/// Spatially average-pools the selected frames of a clip to
/// `pool x pool` bins per channel and concatenates them, frame-major.
pub fn pool_clip(clip: &VideoClip, frame_indices: &[usize], pool: usize) -> Vec<f64> {
    let shape = clip.shape();
    let mut out = Vec::with_capacity(frame_indices.len() * pool * pool * shape.channels);
    for &t in frame_indices {
        for py in 0..pool {
            let (y0, y1) = bin_bounds(py, pool, shape.height);
            for px in 0..pool {
                let (x0, x1) = bin_bounds(px, pool, shape.width);
                for c in 0..shape.channels {
                    let mut acc = 0.0f64;
                    for y in y0..y1 {
                        for x in x0..x1 {
                            acc += clip.get(t, y, x, c) as f64;
                        }
                    }
                    out.push(acc / ((y1 - y0) * (x1 - x0)) as f64);
                }
            }
        }
    }
    out
}

/// Bin `i` of `bins` over `extent` pixels; degenerate bins collapse to a
/// single pixel so short extents still produce `bins` outputs.
fn bin_bounds(i: usize, bins: usize, extent: usize) -> (usize, usize) {
    let lo = i * extent / bins;
    let hi = (i + 1) * extent / bins;
    if hi <= lo {
        let lo = lo.min(extent - 1);
        (lo, lo + 1)
    } else {
        (lo, hi)
    }
}
