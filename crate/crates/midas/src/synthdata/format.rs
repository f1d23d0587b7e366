//! On-disk dataset format.
//!
//! A dataset directory holds `manifest.jsonl` plus one clip file per sample
//! under `clips/<id>.midc`.
//!
//! Clip file layout (all integers little-endian):
//!
//! ```text
//! magic   4 bytes  "MIDC"
//! version u32      1
//! frames  u32
//! height  u32
//! width   u32
//! channels u32
//! dtype   u8       1 = f32
//! data    frames*height*width*channels f32 values,
//!         frame-major, row-major within each frame
//! ```
//!
//! The manifest is UTF-8 JSON, one object per line, in sample order.
//! Reading validates everything the invariants constrain: magic, version,
//! dtype, dimensions, payload size, intensity range, id uniqueness, the
//! simplex constraint, `hard_label == argmax(soft_label)`, and vote
//! consistency.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clip::{ClipShape, VideoClip};
use crate::error::{Error, Result};
use crate::label::{AnnotatorVotes, LabeledClip, SoftLabel};

use super::{Dataset, DatasetSample, Provenance, Split};

const CLIP_MAGIC: &[u8; 4] = b"MIDC";
const CLIP_VERSION: u32 = 1;
const DTYPE_F32: u8 = 1;

/// One manifest line.
#[derive(Debug, Serialize, Deserialize)]
struct ManifestRecord {
    id: String,
    clip_path: String,
    soft_label: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    votes: Option<Vec<usize>>,
    hard_label: usize,
    split: Split,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    true_class: Option<usize>,
}

/// Writes a single clip file.
pub fn write_clip_file(path: &Path, clip: &VideoClip) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let shape = clip.shape();
    let io_err = |e| Error::io(path, e);
    w.write_all(CLIP_MAGIC).map_err(io_err)?;
    w.write_all(&CLIP_VERSION.to_le_bytes()).map_err(io_err)?;
    for dim in [shape.frames, shape.height, shape.width, shape.channels] {
        w.write_all(&(dim as u32).to_le_bytes()).map_err(io_err)?;
    }
    w.write_all(&[DTYPE_F32]).map_err(io_err)?;
    for &v in clip.data() {
        w.write_all(&v.to_le_bytes()).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Reads and validates a single clip file.
pub fn read_clip_file(path: &Path) -> Result<VideoClip> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);

    let mut magic = [0u8; 4];
    read_exact(&mut r, &mut magic, path, "magic")?;
    if &magic != CLIP_MAGIC {
        return Err(Error::format(path, format!("bad magic {magic:?}")));
    }
    let version = read_u32(&mut r, path, "version")?;
    if version != CLIP_VERSION {
        return Err(Error::format(
            path,
            format!("unsupported version {version}"),
        ));
    }
    let frames = read_u32(&mut r, path, "frames")? as usize;
    let height = read_u32(&mut r, path, "height")? as usize;
    let width = read_u32(&mut r, path, "width")? as usize;
    let channels = read_u32(&mut r, path, "channels")? as usize;
    if frames == 0 || height == 0 || width == 0 || channels == 0 {
        return Err(Error::format(
            path,
            format!("zero dimension in {frames}x{height}x{width}x{channels}"),
        ));
    }
    let mut dtype = [0u8; 1];
    read_exact(&mut r, &mut dtype, path, "dtype")?;
    if dtype[0] != DTYPE_F32 {
        return Err(Error::format(path, format!("unknown dtype {}", dtype[0])));
    }

    let shape = ClipShape::new(frames, height, width, channels);
    let mut data = Vec::with_capacity(shape.len());
    let mut buf = [0u8; 4];
    for _ in 0..shape.len() {
        read_exact(&mut r, &mut buf, path, "clip data")?;
        data.push(f32::from_le_bytes(buf));
    }
    let mut trailing = [0u8; 1];
    match r.read(&mut trailing) {
        Ok(0) => {}
        Ok(_) => return Err(Error::format(path, "trailing bytes after clip data")),
        Err(e) => return Err(Error::io(path, e)),
    }

    VideoClip::from_vec(shape, data)
        .map_err(|e| Error::format(path, format!("invalid clip contents: {e}")))
}

fn read_exact(r: &mut impl Read, buf: &mut [u8], path: &Path, what: &str) -> Result<()> {
    r.read_exact(buf)
        .map_err(|e| Error::format(path, format!("truncated while reading {what}: {e}")))
}

fn read_u32(r: &mut impl Read, path: &Path, what: &str) -> Result<u32> {
    let mut buf = [0u8; 4];
    read_exact(r, &mut buf, path, what)?;
    Ok(u32::from_le_bytes(buf))
}

/// Writes a dataset as `manifest.jsonl` plus `clips/<id>.midc` files.
pub fn write_dataset(dataset: &Dataset, dir: &Path) -> Result<()> {
    let clips_dir = dir.join("clips");
    std::fs::create_dir_all(&clips_dir).map_err(|e| Error::io(&clips_dir, e))?;

    dataset
        .samples
        .par_iter()
        .try_for_each(|sample| {
            let path = clips_dir.join(format!("{}.midc", sample.item.id));
            write_clip_file(&path, &sample.item.clip)
        })?;

    let manifest_path = dir.join("manifest.jsonl");
    let file = File::create(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let mut w = BufWriter::new(file);
    for sample in &dataset.samples {
        let record = ManifestRecord {
            id: sample.item.id.clone(),
            clip_path: format!("clips/{}.midc", sample.item.id),
            soft_label: sample.item.soft.probs().to_vec(),
            votes: sample.item.votes.as_ref().map(|v| v.votes().to_vec()),
            hard_label: sample.item.soft.argmax(),
            split: sample.split,
            provenance: sample.provenance.clone(),
            true_class: sample.item.true_class,
        };
        let line = serde_json::to_string(&record)
            .map_err(|e| Error::Validation(format!("manifest encode: {e}")))?;
        writeln!(w, "{line}").map_err(|e| Error::io(&manifest_path, e))?;
    }
    w.flush().map_err(|e| Error::io(&manifest_path, e))
}

/// Reads a dataset directory produced by [`write_dataset`].
pub fn read_dataset(dir: &Path) -> Result<Dataset> {
    let manifest_path = dir.join("manifest.jsonl");
    let file = File::open(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let reader = BufReader::new(file);

    let mut records = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(&manifest_path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: ManifestRecord = serde_json::from_str(&line).map_err(|e| {
            Error::format(&manifest_path, format!("line {}: {e}", lineno + 1))
        })?;
        records.push(record);
    }

    let mut seen = std::collections::HashSet::new();
    for r in &records {
        if !seen.insert(r.id.as_str()) {
            return Err(Error::Validation(format!("duplicate sample id {}", r.id)));
        }
    }

    let samples: Vec<DatasetSample> = records
        .par_iter()
        .map(|r| {
            let soft = SoftLabel::new(r.soft_label.clone()).map_err(|e| {
                Error::Validation(format!("sample {}: {e}", r.id))
            })?;
            if r.hard_label != soft.argmax() {
                return Err(Error::Validation(format!(
                    "sample {}: hard label {} does not match argmax {}",
                    r.id,
                    r.hard_label,
                    soft.argmax()
                )));
            }
            let votes = r
                .votes
                .as_ref()
                .map(|v| AnnotatorVotes::new(v.clone()))
                .transpose()?;
            let clip_path = dir.join(&r.clip_path);
            let clip = read_clip_file(&clip_path)?;
            let item = LabeledClip::new(r.id.clone(), clip, soft, votes, r.true_class)?;
            Ok(DatasetSample {
                item,
                split: r.split,
                provenance: r.provenance.clone(),
            })
        })
        .collect::<Result<_>>()?;

    if let Some(first) = samples.first() {
        let shape = first.item.clip.shape();
        for s in &samples {
            if s.item.clip.shape() != shape {
                return Err(Error::Validation(format!(
                    "sample {}: clip shape {} differs from dataset shape {shape}",
                    s.item.id,
                    s.item.clip.shape()
                )));
            }
        }
    }

    Ok(Dataset { samples })
}
