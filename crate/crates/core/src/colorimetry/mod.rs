//! CIE observer math: tristimulus integration, Lab conversion, CIEDE2000,
//! and the linear color-rendering score.

mod cri;
mod delta_e;

pub use cri::{cri, CriReport, CRI_PER_DELTA_E};
pub use delta_e::{delta_e_2000, delta_e_2000_generic};

use serde::{Deserialize, Serialize};

use crate::autodiff::Real;
use crate::error::{Error, Result};
use crate::grid::{Spectrum, WavelengthGrid};

/// A 3-channel spectral responsivity: the CIE 1931 observer or one camera's
/// RGB curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObserverSensitivity {
    pub grid: WavelengthGrid,
    pub channels: [Vec<f64>; 3],
    pub label: String,
}

impl ObserverSensitivity {
    pub fn new(grid: WavelengthGrid, channels: [Vec<f64>; 3], label: String) -> Result<Self> {
        for curve in &channels {
            if curve.len() != grid.count {
                return Err(Error::InvalidInput(format!(
                    "observer '{label}' channel has {} values for a {}-point grid",
                    curve.len(),
                    grid.count
                )));
            }
            if curve.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidInput(format!(
                    "observer '{label}' has a negative or non-finite response value"
                )));
            }
        }
        Ok(Self {
            grid,
            channels,
            label,
        })
    }

    pub fn resampled(&self, target: WavelengthGrid) -> Result<Self> {
        let channels = [
            crate::grid::resample_values(&self.grid, &self.channels[0], &target),
            crate::grid::resample_values(&self.grid, &self.channels[1], &target),
            crate::grid::resample_values(&self.grid, &self.channels[2], &target),
        ];
        Self::new(target, channels, self.label.clone())
    }
}

/// CIE L*a*b* coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabColor {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

/// Riemann-sum tristimulus: component c = sum over the grid of
/// `spectrum * channel_c * step_nm`.
pub fn integrate_to_tristimulus(
    spectrum: &Spectrum,
    observer: &ObserverSensitivity,
) -> Result<[f64; 3]> {
    spectrum.grid.ensure_matches(&observer.grid)?;
    let step = spectrum.grid.step_nm;
    let mut out = [0.0; 3];
    for (c, curve) in observer.channels.iter().enumerate() {
        out[c] = spectrum
            .values
            .iter()
            .zip(curve.iter())
            .map(|(s, o)| s * o)
            .sum::<f64>()
            * step;
    }
    Ok(out)
}

/// Luminance (Y channel) of a bare light under `observer`.
pub fn luminance(spectrum: &Spectrum, observer: &ObserverSensitivity) -> Result<f64> {
    Ok(integrate_to_tristimulus(spectrum, observer)?[1])
}

/// Standard CIE Lab with the cube-root/linear branch at t = (6/29)^3.
pub fn xyz_to_lab(xyz: [f64; 3], white_point: [f64; 3]) -> Result<LabColor> {
    if xyz.iter().any(|v| !v.is_finite()) || white_point.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite XYZ input".into()));
    }
    if white_point.iter().any(|v| *v <= 0.0) {
        return Err(Error::InvalidInput(
            "white point components must be positive".into(),
        ));
    }
    Ok(lab_from_xyz_generic(xyz, white_point).into())
}

/// Lab conversion over any [`Real`] scalar; the white point is an external
/// constant.
pub fn lab_from_xyz_generic<S: Real>(xyz: [S; 3], white_point: [f64; 3]) -> GenericLab<S> {
    let fx = lab_f(xyz[0].scale(1.0 / white_point[0]));
    let fy = lab_f(xyz[1].scale(1.0 / white_point[1]));
    let fz = lab_f(xyz[2].scale(1.0 / white_point[2]));
    GenericLab {
        l: fy.scale(116.0) - S::constant(16.0),
        a: (fx - fy).scale(500.0),
        b: (fy - fz).scale(200.0),
    }
}

/// Lab triple over a generic scalar, used inside the differentiable losses.
#[derive(Debug, Clone, Copy)]
pub struct GenericLab<S> {
    pub l: S,
    pub a: S,
    pub b: S,
}

impl GenericLab<f64> {
    /// Lifts a plain Lab into any scalar as a constant (zero tangent).
    pub fn lift<S: Real>(&self) -> GenericLab<S> {
        GenericLab {
            l: S::constant(self.l),
            a: S::constant(self.a),
            b: S::constant(self.b),
        }
    }
}

impl From<GenericLab<f64>> for LabColor {
    fn from(v: GenericLab<f64>) -> Self {
        LabColor {
            l: v.l,
            a: v.a,
            b: v.b,
        }
    }
}

impl From<LabColor> for GenericLab<f64> {
    fn from(v: LabColor) -> Self {
        GenericLab {
            l: v.l,
            a: v.a,
            b: v.b,
        }
    }
}

fn lab_f<S: Real>(t: S) -> S {
    const DELTA: f64 = 6.0 / 29.0;
    const DELTA3: f64 = DELTA * DELTA * DELTA;
    if t.value() > DELTA3 {
        t.cbrt()
    } else {
        t.scale(1.0 / (3.0 * DELTA * DELTA)) + S::constant(4.0 / 29.0)
    }
}
