//! Frame-sequence persistence.
//!
//! Binary container layout (all integers little-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "SMRK"
//! 4       4     container version (1)
//! 8       4     frame count T
//! 12      4     height H
//! 16      4     width W
//! 20      4     bit depth
//! 24      4     metadata JSON length M
//! 28      M     metadata JSON (ContainerMeta)
//! 28+M    ...   samples, T*H*W*3, RGB interleaved, row-major;
//!               one byte each for depths <= 8, else u16 LE
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{CaptureConfig, FrameSequence};

const MAGIC: [u8; 4] = *b"SMRK";
const VERSION: u32 = 1;

/// Provenance carried inside the container.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainerMeta {
    pub config: CaptureConfig,
    pub symbol_rate_hz: f64,
    pub camera_label: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest_sha256: Option<String>,
}

/// Writes a frame sequence with its metadata.
pub fn write_container(
    path: &Path,
    frames: &FrameSequence,
    seed: u64,
    manifest_sha256: Option<String>,
) -> Result<()> {
    let meta = ContainerMeta {
        config: frames.config.clone(),
        symbol_rate_hz: frames.symbol_rate_hz,
        camera_label: frames.camera_label.clone(),
        seed,
        manifest_sha256,
    };
    let meta_json = serde_json::to_vec(&meta)
        .map_err(|e| Error::InvalidInput(format!("metadata serialization failed: {e}")))?;

    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&MAGIC)?;
    for v in [
        VERSION,
        frames.frames as u32,
        frames.config.height as u32,
        frames.config.width as u32,
        frames.config.bit_depth,
        meta_json.len() as u32,
    ] {
        w.write_all(&v.to_le_bytes())?;
    }
    w.write_all(&meta_json)?;
    if frames.config.bit_depth <= 8 {
        for &s in &frames.data {
            w.write_all(&[s as u8])?;
        }
    } else {
        for &s in &frames.data {
            w.write_all(&s.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)
        .map_err(|_| Error::CorruptContainer("truncated header".into()))?;
    Ok(u32::from_le_bytes(buf))
}

/// Reads a frame sequence and its metadata back.
pub fn read_container(path: &Path) -> Result<(FrameSequence, ContainerMeta)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| Error::CorruptContainer("file shorter than the magic".into()))?;
    if magic != MAGIC {
        return Err(Error::CorruptContainer(format!(
            "bad magic {magic:?}, expected {MAGIC:?}"
        )));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::CorruptContainer(format!(
            "unsupported container version {version}"
        )));
    }
    let frames = read_u32(&mut r)? as usize;
    let height = read_u32(&mut r)? as usize;
    let width = read_u32(&mut r)? as usize;
    let bit_depth = read_u32(&mut r)?;
    let meta_len = read_u32(&mut r)? as usize;

    let mut meta_buf = vec![0u8; meta_len];
    r.read_exact(&mut meta_buf)
        .map_err(|_| Error::CorruptContainer("truncated metadata".into()))?;
    let meta: ContainerMeta = serde_json::from_slice(&meta_buf)
        .map_err(|e| Error::CorruptContainer(format!("metadata does not parse: {e}")))?;

    if meta.config.height != height
        || meta.config.width != width
        || meta.config.bit_depth != bit_depth
    {
        return Err(Error::CorruptContainer(
            "metadata disagrees with the header".into(),
        ));
    }

    let samples = frames * height * width * 3;
    let mut data = vec![0u16; samples];
    if bit_depth <= 8 {
        let mut buf = vec![0u8; samples];
        r.read_exact(&mut buf)
            .map_err(|_| Error::CorruptContainer("truncated sample data".into()))?;
        for (d, b) in data.iter_mut().zip(buf) {
            *d = b as u16;
        }
    } else {
        let mut buf = vec![0u8; samples * 2];
        r.read_exact(&mut buf)
            .map_err(|_| Error::CorruptContainer("truncated sample data".into()))?;
        for (i, d) in data.iter_mut().enumerate() {
            *d = u16::from_le_bytes([buf[2 * i], buf[2 * i + 1]]);
        }
    }
    let mut tail = [0u8; 1];
    if r.read(&mut tail)? != 0 {
        return Err(Error::CorruptContainer("trailing bytes after samples".into()));
    }

    Ok((
        FrameSequence {
            config: meta.config.clone(),
            symbol_rate_hz: meta.symbol_rate_hz,
            camera_label: meta.camera_label.clone(),
            frames,
            data,
        },
        meta,
    ))
}

/// Dumps one PNG per frame into `dir` for inspection (frame_000000.png, ...).
/// Depths above 8 bits are rescaled to 8.
pub fn export_png_frames(frames: &FrameSequence, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let h = frames.config.height as u32;
    let w = frames.config.width as u32;
    let max_code = frames.config.max_code() as f64;
    for t in 0..frames.frames {
        let frame = frames.frame(t);
        let mut img = image::RgbImage::new(w, h);
        for (p, pixel) in img.pixels_mut().enumerate() {
            for c in 0..3 {
                pixel.0[c] = ((frame[p * 3 + c] as f64 / max_code) * 255.0).round() as u8;
            }
        }
        let path = dir.join(format!("frame_{t:06}.png"));
        img.save(&path)
            .map_err(|e| Error::InvalidInput(format!("PNG write failed: {e}")))?;
    }
    Ok(())
}
