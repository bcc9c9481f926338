//! Camera capture simulation: exposure-window averaging of the switching
//! illumination, AWGN, and quantization.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::colorimetry::ObserverSensitivity;
use crate::error::{Error, Result};
use crate::scene::{render_patch_response, ExposureScale, ReflectanceSet};

use super::{LightSchedule, LightState};

/// Capture parameters. `phase_offset` is the capture start delay in symbol
/// periods; `exposure_fraction` is the open-shutter share of each frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureConfig {
    pub frame_rate_hz: f64,
    pub exposure_fraction: f64,
    pub phase_offset: f64,
    /// AWGN sigma in normalized pixel units (full scale = 1).
    pub noise_sigma: f64,
    pub bit_depth: u32,
    pub height: usize,
    pub width: usize,
}

impl Default for CaptureConfig {
    fn default() -> Self {
        Self {
            frame_rate_hz: 30.0,
            exposure_fraction: 0.5,
            phase_offset: 0.0,
            noise_sigma: 0.0,
            bit_depth: 8,
            height: 64,
            width: 64,
        }
    }
}

impl CaptureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.frame_rate_hz > 0.0) {
            return Err(Error::InvalidInput("frame rate must be positive".into()));
        }
        if !(self.exposure_fraction > 0.0 && self.exposure_fraction <= 1.0) {
            return Err(Error::InvalidInput(
                "exposure fraction must lie in (0, 1]".into(),
            ));
        }
        if !(self.phase_offset >= 0.0 && self.phase_offset < 1.0) {
            return Err(Error::InvalidInput(
                "phase offset must lie in [0, 1)".into(),
            ));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::InvalidInput("noise sigma must be >= 0".into()));
        }
        if self.bit_depth == 0 || self.bit_depth > 16 {
            return Err(Error::InvalidInput(
                "bit depth must lie in 1..=16".into(),
            ));
        }
        if self.height == 0 || self.width == 0 {
            return Err(Error::InvalidInput("resolution must be non-zero".into()));
        }
        Ok(())
    }

    pub fn max_code(&self) -> u16 {
        ((1u32 << self.bit_depth) - 1) as u16
    }
}

/// Maps every pixel to a patch index of some reflectance set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchLayout {
    pub height: usize,
    pub width: usize,
    pub indices: Vec<usize>,
}

impl PatchLayout {
    pub fn new(height: usize, width: usize, indices: Vec<usize>) -> Result<Self> {
        if indices.len() != height * width {
            return Err(Error::InvalidInput(format!(
                "layout has {} indices for {}x{} pixels",
                indices.len(),
                height,
                width
            )));
        }
        Ok(Self {
            height,
            width,
            indices,
        })
    }

    /// Block-tiles `n_patches` over the frame, chart style (6 columns for the
    /// 24-patch chart, near-square otherwise).
    pub fn tile(height: usize, width: usize, n_patches: usize) -> Result<Self> {
        if n_patches == 0 {
            return Err(Error::InvalidInput("cannot tile zero patches".into()));
        }
        let cols = if n_patches == 24 {
            6
        } else {
            (n_patches as f64).sqrt().ceil() as usize
        };
        let rows = n_patches.div_ceil(cols);
        let indices = (0..height * width)
            .map(|i| {
                let y = i / width;
                let x = i % width;
                let row = y * rows / height;
                let col = x * cols / width;
                (row * cols + col).min(n_patches - 1)
            })
            .collect();
        Self::new(height, width, indices)
    }

    /// Tiles, then remaps block patch ids through a seeded shuffle.
    pub fn shuffled(height: usize, width: usize, n_patches: usize, seed: u64) -> Result<Self> {
        let mut perm: Vec<usize> = (0..n_patches).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..perm.len()).rev() {
            let j = rng.gen_range(0..=i);
            perm.swap(i, j);
        }
        let tiled = Self::tile(height, width, n_patches)?;
        Self::new(
            height,
            width,
            tiled.indices.iter().map(|&i| perm[i]).collect(),
        )
    }

    /// First `dark_fraction` of pixels (row-major) map to `dark_patch`, the
    /// rest to `bright_patch`. Used for masking tests.
    pub fn split(
        height: usize,
        width: usize,
        dark_patch: usize,
        bright_patch: usize,
        dark_fraction: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&dark_fraction) {
            return Err(Error::InvalidInput(
                "dark fraction must lie in [0, 1]".into(),
            ));
        }
        let total = height * width;
        let dark = (dark_fraction * total as f64).round() as usize;
        let indices = (0..total)
            .map(|i| if i < dark { dark_patch } else { bright_patch })
            .collect();
        Self::new(height, width, indices)
    }

    pub fn max_index(&self) -> usize {
        self.indices.iter().cloned().max().unwrap_or(0)
    }
}

/// A time-ordered stack of quantized RGB frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameSequence {
    pub config: CaptureConfig,
    pub symbol_rate_hz: f64,
    pub camera_label: String,
    pub frames: usize,
    /// Interleaved samples, index `((t * H + y) * W + x) * 3 + c`.
    pub data: Vec<u16>,
}

impl FrameSequence {
    pub fn value(&self, t: usize, y: usize, x: usize, c: usize) -> u16 {
        self.data[((t * self.config.height + y) * self.config.width + x) * 3 + c]
    }

    pub fn frame(&self, t: usize) -> &[u16] {
        let stride = self.config.height * self.config.width * 3;
        &self.data[t * stride..(t + 1) * stride]
    }

    pub fn pixels_per_frame(&self) -> usize {
        self.config.height * self.config.width
    }
}

/// Renders the capture of `schedule` lighting `patches` as seen by `camera`.
///
/// Each pixel's pre-noise value is the exposure-window time average of its
/// patch's camera response under the momentary illumination (symbol
/// boundaries inside the window split it exactly), scaled by `exposure`,
/// plus AWGN, clamped and quantized to the configured bit depth.
pub fn simulate_capture(
    schedule: &LightSchedule,
    patches: &ReflectanceSet,
    camera: &ObserverSensitivity,
    config: &CaptureConfig,
    layout: &PatchLayout,
    exposure: &ExposureScale,
    seed: u64,
) -> Result<FrameSequence> {
    config.validate()?;
    if config.frame_rate_hz + 1e-9 < 2.0 * schedule.symbol_rate_hz {
        return Err(Error::InvalidInput(format!(
            "frame rate {} is below twice the symbol rate {}",
            config.frame_rate_hz, schedule.symbol_rate_hz
        )));
    }
    if layout.height != config.height || layout.width != config.width {
        return Err(Error::InvalidInput(
            "layout dimensions do not match the capture resolution".into(),
        ));
    }
    if layout.max_index() >= patches.len() {
        return Err(Error::InvalidInput(format!(
            "layout references patch {} but the set has {}",
            layout.max_index(),
            patches.len()
        )));
    }

    // Per-patch responses under both states, exposure applied.
    let mut responses = [
        Vec::with_capacity(patches.len()),
        Vec::with_capacity(patches.len()),
    ];
    for (state, light) in [
        (0usize, &schedule.pair.l1),
        (1usize, &schedule.pair.l2),
    ] {
        for patch in &patches.patches {
            let raw = render_patch_response(light, patch, camera)?;
            responses[state].push([
                raw[0] * exposure.rgb[0],
                raw[1] * exposure.rgb[1],
                raw[2] * exposure.rgb[2],
            ]);
        }
    }

    let sr = schedule.symbol_rate_hz;
    let fr = config.frame_rate_hz;
    let n_states = schedule.states.len();
    let duration_symbols = n_states as f64;
    let window_symbols = config.exposure_fraction * sr / fr;
    // Frames whose full exposure window fits inside the schedule.
    let frames = (((duration_symbols - config.phase_offset - window_symbols) * fr / sr)
        + 1e-9)
        .floor() as i64
        + 1;
    if frames < 2 {
        return Err(Error::InvalidInput(
            "schedule too short for two frames at this capture config".into(),
        ));
    }
    let frames = frames as usize;

    let state_at = |k: usize| -> usize {
        match schedule.states[k.min(n_states - 1)] {
            LightState::State1 => 0,
            LightState::State2 => 1,
        }
    };

    let h = config.height;
    let w = config.width;
    let max_code = config.max_code() as f64;
    let stride = h * w * 3;

    let mut data = vec![0u16; frames * stride];
    data.par_chunks_mut(stride)
        .enumerate()
        .for_each(|(f, frame)| {
            // Symbol-boundary split of this frame's exposure window.
            let start = config.phase_offset + f as f64 * sr / fr;
            let end = start + window_symbols;
            let k0 = start.floor() as usize;
            let (alpha, s0, s1) = if end <= (k0 + 1) as f64 + 1e-12 {
                (1.0, state_at(k0), state_at(k0))
            } else {
                let inside = ((k0 + 1) as f64 - start) / window_symbols;
                (inside, state_at(k0), state_at(k0 + 1))
            };

            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (f as u64).wrapping_mul(0x9E3779B97F4A7C15));
            for p in 0..h * w {
                let patch = layout.indices[p];
                let a = &responses[s0][patch];
                let b = &responses[s1][patch];
                for c in 0..3 {
                    let mut v = alpha * a[c] + (1.0 - alpha) * b[c];
                    if config.noise_sigma > 0.0 {
                        let z: f64 = rng.sample(StandardNormal);
                        v += config.noise_sigma * z;
                    }
                    frame[p * 3 + c] = (v.clamp(0.0, 1.0) * max_code).round() as u16;
                }
            }
        });

    Ok(FrameSequence {
        config: config.clone(),
        symbol_rate_hz: sr,
        camera_label: camera.label.clone(),
        frames,
        data,
    })
}
