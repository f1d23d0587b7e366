//! Video clips: fixed-length frame sequences holding intensities in `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimensions of a clip: `frames x height x width x channels`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClipShape {
    pub frames: usize,
    pub height: usize,
    pub width: usize,
    pub channels: usize,
}

impl ClipShape {
    pub fn new(frames: usize, height: usize, width: usize, channels: usize) -> Self {
        Self {
            frames,
            height,
            width,
            channels,
        }
    }

    /// Number of intensity values in a clip of this shape.
    pub fn len(&self) -> usize {
        self.frames * self.height * self.width * self.channels
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Values per frame.
    pub fn frame_len(&self) -> usize {
        self.height * self.width * self.channels
    }
}

impl std::fmt::Display for ClipShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}x{}x{}x{}",
            self.frames, self.height, self.width, self.channels
        )
    }
}

/// A video clip stored frame-major, row-major within each frame.
///
/// All intensities are finite and lie in `[0, 1]`; integer pixel formats are
/// expected to be divided by 255 on load. Clips are immutable after
/// construction, so they can be shared freely across workers.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoClip {
    shape: ClipShape,
    data: Vec<f32>,
}

impl VideoClip {
    /// Builds a clip from flat data laid out as `[t][y][x][c]`.
    pub fn from_vec(shape: ClipShape, data: Vec<f32>) -> Result<Self> {
        if shape.frames == 0 || shape.height == 0 || shape.width == 0 || shape.channels == 0 {
            return Err(Error::InvalidInput(format!(
                "clip dimensions must all be >= 1, got {shape}"
            )));
        }
        if data.len() != shape.len() {
            return Err(Error::ShapeMismatch(format!(
                "clip data length {} does not match shape {shape} ({} values)",
                data.len(),
                shape.len()
            )));
        }
        for &v in &data {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::Validation(format!(
                    "clip intensity {v} outside [0, 1]"
                )));
            }
        }
        Ok(Self { shape, data })
    }

    /// A clip with every intensity set to `value`.
    pub fn filled(shape: ClipShape, value: f32) -> Result<Self> {
        let len = shape.len();
        Self::from_vec(shape, vec![value; len])
    }

    pub fn shape(&self) -> ClipShape {
        self.shape
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    /// Intensity at `(t, y, x, c)`. Panics on out-of-range indices.
    pub fn get(&self, t: usize, y: usize, x: usize, c: usize) -> f32 {
        let s = &self.shape;
        debug_assert!(t < s.frames && y < s.height && x < s.width && c < s.channels);
        self.data[((t * s.height + y) * s.width + x) * s.channels + c]
    }

    /// The flat values of frame `t`.
    pub fn frame(&self, t: usize) -> &[f32] {
        let fl = self.shape.frame_len();
        &self.data[t * fl..(t + 1) * fl]
    }

    /// Mean squared distance between two clips of identical shape.
    pub fn mse(&self, other: &VideoClip) -> Result<f64> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "cannot compare clips of shape {} and {}",
                self.shape, other.shape
            )));
        }
        let sum: f64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| {
                let d = a as f64 - b as f64;
                d * d
            })
            .sum();
        Ok(sum / self.data.len() as f64)
    }
}
