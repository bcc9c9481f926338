//! Fixed wavelength grids and sampled spectra.
//!
//! Every spectral quantity in a run (light, reflectance, sensitivity) lives on
//! one shared [`WavelengthGrid`]; operations reject mixed grids instead of
//! silently interpolating.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Regular wavelength sampling: `count` points starting at `start_nm`,
/// spaced `step_nm` apart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavelengthGrid {
    pub start_nm: f64,
    pub step_nm: f64,
    pub count: usize,
}

/// The grid shared by all bundled fixtures: 400-720 nm at 10 nm, 33 samples.
pub const CANONICAL_GRID: WavelengthGrid = WavelengthGrid {
    start_nm: 400.0,
    step_nm: 10.0,
    count: 33,
};

impl WavelengthGrid {
    pub fn new(start_nm: f64, step_nm: f64, count: usize) -> Result<Self> {
        if !(step_nm > 0.0) || !start_nm.is_finite() {
            return Err(Error::InvalidInput(format!(
                "grid step must be positive and start finite, got start={start_nm}, step={step_nm}"
            )));
        }
        if count < 2 {
            return Err(Error::InvalidInput(format!(
                "grid needs at least 2 samples, got {count}"
            )));
        }
        Ok(Self {
            start_nm,
            step_nm,
            count,
        })
    }

    pub fn wavelength(&self, index: usize) -> f64 {
        self.start_nm + self.step_nm * index as f64
    }

    pub fn wavelengths(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.wavelength(i))
    }

    pub fn end_nm(&self) -> f64 {
        self.wavelength(self.count - 1)
    }

    /// Errors unless `other` is exactly this grid.
    pub fn ensure_matches(&self, other: &WavelengthGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{}..{} step {} x{} vs {}..{} step {} x{}",
                self.start_nm,
                self.end_nm(),
                self.step_nm,
                self.count,
                other.start_nm,
                other.end_nm(),
                other.step_nm,
                other.count
            )))
        }
    }
}

/// A non-negative power (or reflectance) distribution sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub grid: WavelengthGrid,
    pub values: Vec<f64>,
}

impl Spectrum {
    pub fn new(grid: WavelengthGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.count {
            return Err(Error::InvalidInput(format!(
                "spectrum has {} values for a {}-point grid",
                values.len(),
                grid.count
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidInput(
                "spectrum values must be finite and non-negative".into(),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn zero(grid: WavelengthGrid) -> Self {
        Self {
            values: vec![0.0; grid.count],
            grid,
        }
    }

    pub fn constant(grid: WavelengthGrid, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.count])
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// Pointwise scale by a non-negative factor.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Spectrum::new(
            self.grid,
            self.values.iter().map(|v| v * factor).collect(),
        )
    }

    /// Linear resampling onto `target`. Wavelengths outside the source range
    /// read as zero.
    pub fn resampled(&self, target: WavelengthGrid) -> Result<Self> {
        let values = resample_values(&self.grid, &self.values, &target);
        Spectrum::new(target, values)
    }
}

/// Linearly interpolate `values` (sampled on `source`) at the points of
/// `target`; zero outside the source range.
pub fn resample_values(
    source: &WavelengthGrid,
    values: &[f64],
    target: &WavelengthGrid,
) -> Vec<f64> {
    target
        .wavelengths()
        .map(|wl| {
            let pos = (wl - source.start_nm) / source.step_nm;
            if pos < 0.0 || pos > (source.count - 1) as f64 {
                return 0.0;
            }
            let lo = pos.floor() as usize;
            if lo + 1 >= source.count {
                return values[source.count - 1];
            }
            let frac = pos - lo as f64;
            values[lo] * (1.0 - frac) + values[lo + 1] * frac
        })
        .collect()
}
