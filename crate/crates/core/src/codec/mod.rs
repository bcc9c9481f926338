//! Temporal light codec: differential bit encoding over a two-state
//! illumination schedule, capture simulation, and the frame-sequence decoder.
//!
//! Decode pipeline: dark-pixel masking, global intensity normalization,
//! per-gap absolute frame differencing, phase-selecting downsample to the
//! symbol rate, then two-stage adaptive binarization.

mod capture;
mod container;

pub use capture::{simulate_capture, CaptureConfig, FrameSequence, PatchLayout};
pub use container::{export_png_frames, read_container, write_container, ContainerMeta};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::SpectraPair;

/// An ordered bit payload.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitStream {
    bits: Vec<bool>,
}

impl BitStream {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidInput("bit stream is empty".into()));
        }
        Ok(Self { bits })
    }

    /// Seeded uniform random payload.
    pub fn random(len: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::new((0..len).map(|_| rng.gen_bool(0.5)).collect())
    }

    pub fn parse_01(text: &str) -> Result<Self> {
        let bits = text
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidInput(format!(
                    "bit strings may only contain 0 and 1, found '{other}'"
                ))),
            })
            .collect::<Result<Vec<bool>>>()?;
        Self::new(bits)
    }

    pub fn to_01_string(&self) -> String {
        self.bits.iter().map(|b| if *b { '1' } else { '0' }).collect()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Bit errors against `reference` over the shared prefix.
    pub fn errors_against(&self, reference: &BitStream) -> usize {
        self.bits
            .iter()
            .zip(&reference.bits)
            .filter(|(a, b)| a != b)
            .count()
    }
}

/// The two optimized illumination states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LightState {
    State1,
    State2,
}

impl LightState {
    fn toggled(self) -> Self {
        match self {
            LightState::State1 => LightState::State2,
            LightState::State2 => LightState::State1,
        }
    }
}

/// An illumination switching schedule: one state per symbol period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LightSchedule {
    pub symbol_rate_hz: f64,
    pub states: Vec<LightState>,
    pub pair: SpectraPair,
}

/// Differential encoding: the schedule starts in state 1 and toggles for
/// every 1 bit, so `states` has one more entry than `bits`.
pub fn encode(bits: &BitStream, symbol_rate_hz: f64, pair: SpectraPair) -> LightSchedule {
    let mut states = Vec::with_capacity(bits.len() + 1);
    let mut current = LightState::State1;
    states.push(current);
    for &bit in bits.bits() {
        if bit {
            current = current.toggled();
        }
        states.push(current);
    }
    LightSchedule {
        symbol_rate_hz,
        states,
        pair,
    }
}

/// Per-pixel dark mask: `true` marks a pixel whose every channel stays below
/// half of full scale across all frames.
pub fn mask_dark_pixels(frames: &FrameSequence) -> Vec<bool> {
    let half_scale = 1u32 << (frames.config.bit_depth - 1);
    let pixels = frames.pixels_per_frame();
    let mut masked = vec![true; pixels];
    for t in 0..frames.frames {
        let frame = frames.frame(t);
        for (p, dark) in masked.iter_mut().enumerate() {
            if *dark {
                let base = p * 3;
                if frame[base] as u32 >= half_scale
                    || frame[base + 1] as u32 >= half_scale
                    || frame[base + 2] as u32 >= half_scale
                {
                    *dark = false;
                }
            }
        }
    }
    masked
}

pub fn mask_fraction(mask: &[bool]) -> f64 {
    mask.iter().filter(|m| **m).count() as f64 / mask.len() as f64
}

/// Frames normalized by one global scalar: the mean intensity over all
/// unmasked pixels, channels, and frames. Values are exposed lazily; the
/// mean of unmasked normalized values is exactly 1.
pub struct NormalizedFrames<'a> {
    frames: &'a FrameSequence,
    mask: &'a [bool],
    mean: f64,
}

impl<'a> NormalizedFrames<'a> {
    pub fn value(&self, t: usize, pixel: usize, channel: usize) -> f64 {
        let q = self.frames.frame(t)[pixel * 3 + channel] as f64;
        q / (self.frames.config.max_code() as f64 * self.mean)
    }

    pub fn mean_full_scale(&self) -> f64 {
        self.mean
    }

    pub fn unmasked_pixels(&self) -> usize {
        self.mask.iter().filter(|m| !**m).count()
    }
}

/// Computes the global normalization scalar. Fails with the scene-too-dark
/// error when every pixel is masked.
pub fn normalize<'a>(frames: &'a FrameSequence, mask: &'a [bool]) -> Result<NormalizedFrames<'a>> {
    let unmasked = mask.iter().filter(|m| !**m).count();
    if unmasked == 0 {
        return Err(Error::SceneTooDark);
    }
    let max_code = frames.config.max_code() as f64;
    let mut sum = 0.0;
    for t in 0..frames.frames {
        let frame = frames.frame(t);
        for (p, dark) in mask.iter().enumerate() {
            if !dark {
                let base = p * 3;
                sum += (frame[base] as f64 + frame[base + 1] as f64 + frame[base + 2] as f64)
                    / max_code;
            }
        }
    }
    let mean = sum / (unmasked as f64 * 3.0 * frames.frames as f64);
    if mean <= 0.0 {
        return Err(Error::SceneTooDark);
    }
    Ok(NormalizedFrames { frames, mask, mean })
}

/// Mean absolute frame-to-frame change of normalized unmasked values; entry
/// `t` covers the gap between frames `t` and `t + 1`.
pub fn temporal_differences(normalized: &NormalizedFrames) -> Result<Vec<f64>> {
    let frames = normalized.frames;
    if frames.frames < 2 {
        return Err(Error::InvalidInput(
            "temporal differencing needs at least two frames".into(),
        ));
    }
    let unmasked = normalized.unmasked_pixels();
    let scale = 1.0 / (frames.config.max_code() as f64 * normalized.mean);
    let mut out = Vec::with_capacity(frames.frames - 1);
    for t in 0..frames.frames - 1 {
        let a = frames.frame(t);
        let b = frames.frame(t + 1);
        let mut acc: f64 = 0.0;
        for (p, dark) in normalized.mask.iter().enumerate() {
            if !dark {
                let base = p * 3;
                for c in 0..3 {
                    acc += (b[base + c] as f64 - a[base + c] as f64).abs();
                }
            }
        }
        out.push(acc * scale / (unmasked as f64 * 3.0));
    }
    Ok(out)
}

/// Result of the phase-selecting downsample.
#[derive(Debug, Clone)]
pub struct PhaseSelection {
    pub symbols: Vec<f64>,
    pub chosen_phase: u8,
    /// Set when frame rate != 2x symbol rate and nearest-gap assignment ran.
    pub nonstandard_rate: bool,
}

/// Splits the gap sequence into the two interleaved phase streams, keeps the
/// one carrying more energy, and returns it at symbol rate. For frame rates
/// other than twice the symbol rate, transitions map to their nearest gap.
pub fn select_phase_and_downsample(
    differences: &[f64],
    frame_rate_hz: f64,
    symbol_rate_hz: f64,
) -> Result<PhaseSelection> {
    if differences.is_empty() {
        return Err(Error::InvalidInput("empty difference sequence".into()));
    }
    if !(frame_rate_hz > 0.0 && symbol_rate_hz > 0.0) {
        return Err(Error::InvalidInput("rates must be positive".into()));
    }
    let ratio = frame_rate_hz / symbol_rate_hz;
    if (ratio - 2.0).abs() < 1e-9 {
        let sums: [f64; 2] = [
            differences.iter().step_by(2).sum(),
            differences.iter().skip(1).step_by(2).sum(),
        ];
        let chosen_phase = u8::from(sums[1] > sums[0]);
        let symbols = differences
            .iter()
            .skip(chosen_phase as usize)
            .step_by(2)
            .cloned()
            .collect();
        Ok(PhaseSelection {
            symbols,
            chosen_phase,
            nonstandard_rate: false,
        })
    } else {
        // Nearest-gap assignment: transition k sits at k / symbol_rate.
        let mut symbols = Vec::new();
        let mut k = 1usize;
        loop {
            let gap = (k as f64 * ratio - 0.5).round() as i64;
            if gap < 0 || gap as usize >= differences.len() {
                break;
            }
            symbols.push(differences[gap as usize]);
            k += 1;
        }
        if symbols.is_empty() {
            return Err(Error::InvalidInput(
                "difference sequence shorter than one symbol".into(),
            ));
        }
        Ok(PhaseSelection {
            symbols,
            chosen_phase: 0,
            nonstandard_rate: true,
        })
    }
}

/// Binarization outcome with the thresholds that produced it.
#[derive(Debug, Clone)]
pub struct Binarization {
    pub bits: BitStream,
    pub dynamic_threshold: f64,
    pub noise_floor: f64,
    pub static_threshold: f64,
}

/// Two-stage adaptive binarization of the per-symbol sequence.
///
/// The noise floor (lower-quartile mean of the sequence) is subtracted
/// first: absolute differencing leaves AWGN a positive pedestal. Stage one
/// marks provisional changes above a static threshold of four predicted
/// noise standard deviations (`sigma * sqrt(2 / N)` with sigma estimated
/// from the floor); stage two sets the dynamic threshold to half the mean
/// provisional-change level.
pub fn binarize(symbols: &[f64], unmasked_pixels: usize) -> Result<Binarization> {
    if symbols.is_empty() {
        return Err(Error::InvalidInput("empty symbol sequence".into()));
    }
    if unmasked_pixels == 0 {
        return Err(Error::SceneTooDark);
    }

    let mut sorted: Vec<f64> = symbols.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let quartile = sorted.len().div_ceil(4);
    let noise_floor = sorted[..quartile].iter().sum::<f64>() / quartile as f64;

    // Invert the folded-noise pedestal: mean |N(0, 2 sigma^2)| = 2 sigma / sqrt(pi).
    // The absolute floor keeps quantization dust (far below one code step of
    // normalized brightness) from registering as signal in noiseless input.
    let sigma_est = noise_floor * std::f64::consts::PI.sqrt() / 2.0;
    let static_threshold = (4.0 * sigma_est * (2.0 / unmasked_pixels as f64).sqrt()).max(1e-5);

    let shifted: Vec<f64> = symbols.iter().map(|s| s - noise_floor).collect();
    let provisional: Vec<f64> = shifted
        .iter()
        .cloned()
        .filter(|s| *s > static_threshold)
        .collect();
    if provisional.is_empty() {
        return Err(Error::NoSignalDetected);
    }
    let baseline = provisional.iter().sum::<f64>() / provisional.len() as f64;
    let dynamic_threshold = baseline / 2.0;
    let bits = BitStream::new(shifted.iter().map(|s| *s > dynamic_threshold).collect())?;
    Ok(Binarization {
        bits,
        dynamic_threshold,
        noise_floor,
        static_threshold,
    })
}

/// Everything the decoder recovered, with stage intermediates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecodeReport {
    pub bits: BitStream,
    pub mask_fraction: f64,
    pub chosen_phase: u8,
    /// Per-symbol signal before floor subtraction and thresholding.
    pub raw_signal: Vec<f64>,
    pub dynamic_threshold: f64,
    pub noise_floor: f64,
    pub static_threshold: f64,
    pub nonstandard_rate: bool,
}

/// Runs the full decode pipeline on a captured sequence.
pub fn decode(frames: &FrameSequence, symbol_rate_hz: f64) -> Result<DecodeReport> {
    let mask = mask_dark_pixels(frames);
    let fraction = mask_fraction(&mask);
    let normalized = normalize(frames, &mask)?;
    let unmasked = normalized.unmasked_pixels();
    let differences = temporal_differences(&normalized)?;
    let selection =
        select_phase_and_downsample(&differences, frames.config.frame_rate_hz, symbol_rate_hz)?;
    let binarization = binarize(&selection.symbols, unmasked)?;
    Ok(DecodeReport {
        bits: binarization.bits,
        mask_fraction: fraction,
        chosen_phase: selection.chosen_phase,
        raw_signal: selection.symbols,
        dynamic_threshold: binarization.dynamic_threshold,
        noise_floor: binarization.noise_floor,
        static_threshold: binarization.static_threshold,
        nonstandard_rate: selection.nonstandard_rate,
    })
}

/// Spatial-averaging statistics of AWGN in a mean signed frame difference:
/// mean 0, standard deviation `sigma * sqrt(2 / pixel_count)`.
pub fn predict_noise_stats(sigma: f64, pixel_count: usize) -> Result<(f64, f64)> {
    if pixel_count == 0 {
        return Err(Error::InvalidInput("pixel count must be positive".into()));
    }
    if !(sigma >= 0.0) {
        return Err(Error::InvalidInput("sigma must be non-negative".into()));
    }
    Ok((0.0, sigma * (2.0 / pixel_count as f64).sqrt()))
}
