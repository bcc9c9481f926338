//! Optimizes pairs of LED-composed illumination spectra that look identical
//! to people but differ for cameras, encodes bit streams as temporal spectral
//! modulation, simulates camera capture of the lit scene, and decodes the
//! embedded bits from frame sequences.
//!
//! Module map:
//! - [`grid`] — wavelength grids and sampled spectra.
//! - [`colorimetry`] — tristimulus integration, Lab, CIEDE2000, rendering score.
//! - [`scene`] — LED banks, reflectance sets, cameras, patch rendering.
//! - [`autodiff`] — forward-mode dual numbers behind the differentiable losses.
//! - [`optimizer`] — the three losses and the Adam search over intensity pairs.
//! - [`codec`] — bit encoding, capture simulation, and the decode pipeline.
//! - [`fixtures`] — bundled data tables and CSV ingestion.

pub mod autodiff;
pub mod codec;
pub mod colorimetry;
mod error;
pub mod fixtures;
pub mod grid;
pub mod optimizer;
pub mod scene;

pub use codec::{
    decode, encode, BitStream, CaptureConfig, DecodeReport, FrameSequence, LightSchedule,
    LightState, PatchLayout,
};
pub use colorimetry::{CriReport, LabColor, ObserverSensitivity};
pub use error::{Error, Result};
pub use grid::{Spectrum, WavelengthGrid, CANONICAL_GRID};
pub use optimizer::{
    LossWeights, OptimizerConfig, PairMetrics, SceneContext, SpectraPair, Thresholds,
};
pub use scene::{CameraSet, IntensityVector, LedBank, ReflectanceSet};
