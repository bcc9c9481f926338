//! LED banks, reflectance sets, camera collections, and per-patch rendering.

use serde::{Deserialize, Serialize};

use crate::colorimetry::{integrate_to_tristimulus, ObserverSensitivity};
use crate::error::{Error, Result};
use crate::grid::{Spectrum, WavelengthGrid};

/// A bank of narrowband emitters; each profile is unit-peak relative power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedBank {
    pub grid: WavelengthGrid,
    pub profiles: Vec<Spectrum>,
    pub labels: Vec<String>,
}

impl LedBank {
    pub fn new(grid: WavelengthGrid, profiles: Vec<Spectrum>, labels: Vec<String>) -> Result<Self> {
        if profiles.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "LED bank needs at least 2 emitters, got {}",
                profiles.len()
            )));
        }
        if labels.len() != profiles.len() {
            return Err(Error::InvalidInput(
                "LED bank label count does not match profile count".into(),
            ));
        }
        for (profile, label) in profiles.iter().zip(&labels) {
            grid.ensure_matches(&profile.grid)?;
            let peak = profile.max_value();
            if (peak - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidInput(format!(
                    "LED '{label}' profile peak is {peak}, expected unit peak"
                )));
            }
        }
        Ok(Self {
            grid,
            profiles,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    /// Gaussian line shapes at the given centers, sampled on `grid` and
    /// renormalized to unit peak.
    pub fn gaussian(grid: WavelengthGrid, centers_nm: &[f64], fwhm_nm: f64) -> Result<Self> {
        if !(fwhm_nm > 0.0) {
            return Err(Error::InvalidInput("FWHM must be positive".into()));
        }
        let sigma = fwhm_nm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt());
        let mut profiles = Vec::with_capacity(centers_nm.len());
        let mut labels = Vec::with_capacity(centers_nm.len());
        for &center in centers_nm {
            let raw: Vec<f64> = grid
                .wavelengths()
                .map(|wl| (-0.5 * ((wl - center) / sigma).powi(2)).exp())
                .collect();
            let peak = raw.iter().cloned().fold(0.0, f64::max);
            profiles.push(Spectrum::new(
                grid,
                raw.iter().map(|v| v / peak).collect(),
            )?);
            labels.push(format!("led_{}", center.round() as i64));
        }
        Self::new(grid, profiles, labels)
    }
}

/// Per-LED drive levels; duty-cycle semantics, each in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityVector {
    values: Vec<f64>,
}

impl IntensityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !(*v >= 0.0 && *v <= 1.0)) {
            return Err(Error::InvalidInput(
                "intensities must lie in [0, 1]".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A set of reflectance spectra (values in [0, 1]) with patch labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectanceSet {
    pub grid: WavelengthGrid,
    pub patches: Vec<Spectrum>,
    pub labels: Vec<String>,
}

impl ReflectanceSet {
    pub fn new(grid: WavelengthGrid, patches: Vec<Spectrum>, labels: Vec<String>) -> Result<Self> {
        if patches.is_empty() {
            return Err(Error::InvalidInput("reflectance set is empty".into()));
        }
        if labels.len() != patches.len() {
            return Err(Error::InvalidInput(
                "reflectance label count does not match patch count".into(),
            ));
        }
        for (patch, label) in patches.iter().zip(&labels) {
            grid.ensure_matches(&patch.grid)?;
            if patch.values.iter().any(|v| *v > 1.0) {
                return Err(Error::InvalidInput(format!(
                    "patch '{label}' has reflectance above 1"
                )));
            }
        }
        Ok(Self {
            grid,
            patches,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    /// A sub-set referenced by patch indices, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut patches = Vec::with_capacity(indices.len());
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            let patch = self.patches.get(i).ok_or_else(|| {
                Error::InvalidInput(format!("patch index {i} out of range"))
            })?;
            patches.push(patch.clone());
            labels.push(self.labels[i].clone());
        }
        Self::new(self.grid, patches, labels)
    }
}

/// A collection of camera spectral sensitivities on one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraSet {
    pub cameras: Vec<ObserverSensitivity>,
}

impl CameraSet {
    pub fn new(cameras: Vec<ObserverSensitivity>) -> Result<Self> {
        if cameras.is_empty() {
            return Err(Error::InvalidInput("camera set is empty".into()));
        }
        let grid = cameras[0].grid;
        for cam in &cameras[1..] {
            grid.ensure_matches(&cam.grid)?;
        }
        Ok(Self { cameras })
    }

    pub fn len(&self) -> usize {
        self.cameras.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cameras.is_empty()
    }

    pub fn by_label(&self, label: &str) -> Option<&ObserverSensitivity> {
        self.cameras.iter().find(|c| c.label == label)
    }

    pub fn subset(&self, labels: &[String]) -> Result<Self> {
        let mut cameras = Vec::with_capacity(labels.len());
        for label in labels {
            let cam = self.by_label(label).ok_or_else(|| {
                Error::InvalidInput(format!("no camera labeled '{label}'"))
            })?;
            cameras.push(cam.clone());
        }
        Self::new(cameras)
    }
}

/// Per-channel exposure surrogate: scales a camera's responses so a perfect
/// white reflector under the reference light reads [`ExposureScale::WHITE_LEVEL`]
/// of full scale in every channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExposureScale {
    pub rgb: [f64; 3],
}

impl ExposureScale {
    pub const WHITE_LEVEL: f64 = 0.9;

    pub fn from_reference(camera: &ObserverSensitivity, reference: &Spectrum) -> Result<Self> {
        let resp = integrate_to_tristimulus(reference, camera)?;
        if resp.iter().any(|v| *v <= 0.0) {
            return Err(Error::InvalidInput(format!(
                "camera '{}' has a zero response to the reference light",
                camera.label
            )));
        }
        Ok(Self {
            rgb: [
                Self::WHITE_LEVEL / resp[0],
                Self::WHITE_LEVEL / resp[1],
                Self::WHITE_LEVEL / resp[2],
            ],
        })
    }

    /// Identity scaling, for tests that work in raw response units.
    pub fn unit() -> Self {
        Self { rgb: [1.0; 3] }
    }
}

/// Weighted sum of the bank's profiles: `sum_i intensities[i] * profile[i]`.
pub fn compose_illumination(bank: &LedBank, intensities: &IntensityVector) -> Result<Spectrum> {
    if intensities.len() != bank.len() {
        return Err(Error::InvalidInput(format!(
            "{} intensities for a {}-LED bank",
            intensities.len(),
            bank.len()
        )));
    }
    let mut values = vec![0.0; bank.grid.count];
    for (w, profile) in intensities.values().iter().zip(&bank.profiles) {
        for (v, p) in values.iter_mut().zip(&profile.values) {
            *v += w * p;
        }
    }
    Spectrum::new(bank.grid, values)
}

/// Observer response to light reflected off one patch:
/// `integrate(light (*) reflectance, observer)`.
pub fn render_patch_response(
    light: &Spectrum,
    reflectance: &Spectrum,
    observer: &ObserverSensitivity,
) -> Result<[f64; 3]> {
    light.grid.ensure_matches(&reflectance.grid)?;
    let product = Spectrum::new(
        light.grid,
        light
            .values
            .iter()
            .zip(&reflectance.values)
            .map(|(l, r)| l * r)
            .collect(),
    )?;
    integrate_to_tristimulus(&product, observer)
}

/// Per-patch responses stacked into an N x 3 matrix (row i = patch i).
pub fn render_scene_matrix(
    light: &Spectrum,
    patches: &ReflectanceSet,
    observer: &ObserverSensitivity,
) -> Result<Vec<[f64; 3]>> {
    patches
        .patches
        .iter()
        .map(|patch| render_patch_response(light, patch, observer))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::grid::CANONICAL_GRID;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn two_led_bank() -> LedBank {
        LedBank::gaussian(CANONICAL_GRID, &[450.0, 630.0], 20.0).unwrap()
    }

    #[test]
    fn zero_intensities_compose_to_darkness() {
        let bank = two_led_bank();
        let light =
            compose_illumination(&bank, &IntensityVector::new(vec![0.0, 0.0]).unwrap()).unwrap();
        assert!(light.is_zero());
    }

    #[test]
    fn one_hot_intensity_reproduces_the_profile() {
        let bank = two_led_bank();
        let light =
            compose_illumination(&bank, &IntensityVector::new(vec![0.0, 1.0]).unwrap()).unwrap();
        assert_eq!(light.values, bank.profiles[1].values);
    }

    #[test]
    fn disjoint_profiles_at_half_power_keep_both_peaks() {
        let bank = two_led_bank();
        let light =
            compose_illumination(&bank, &IntensityVector::new(vec![0.5, 0.5]).unwrap()).unwrap();
        // Peaks sit at 450 and 630 nm (indices 5 and 23); the profiles barely
        // overlap, so each peak is half its solo height.
        assert_relative_eq!(light.values[5], 0.5, epsilon = 1e-6);
        assert_relative_eq!(light.values[23], 0.5, epsilon = 1e-6);
    }

    #[test]
    fn intensity_length_mismatch_is_rejected() {
        let bank = two_led_bank();
        let bad = IntensityVector::new(vec![0.5]).unwrap();
        assert!(compose_illumination(&bank, &bad).is_err());
    }

    #[test]
    fn intensities_outside_unit_interval_are_rejected() {
        assert!(IntensityVector::new(vec![0.5, 1.2]).is_err());
        assert!(IntensityVector::new(vec![-0.1]).is_err());
        assert!(IntensityVector::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn unit_reflectance_matches_bare_light() {
        let cmf = fixtures::cie_1931_cmf();
        let d65 = fixtures::d65();
        let unit = Spectrum::constant(CANONICAL_GRID, 1.0).unwrap();
        let with_patch = render_patch_response(&d65, &unit, &cmf).unwrap();
        let bare = integrate_to_tristimulus(&d65, &cmf).unwrap();
        assert_eq!(with_patch, bare);
    }

    #[test]
    fn zero_reflectance_renders_black() {
        let cmf = fixtures::cie_1931_cmf();
        let d65 = fixtures::d65();
        let black = Spectrum::zero(CANONICAL_GRID);
        assert_eq!(
            render_patch_response(&d65, &black, &cmf).unwrap(),
            [0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn white_patch_under_d65_keeps_d65_chromaticity() {
        let cmf = fixtures::cie_1931_cmf();
        let d65 = fixtures::d65();
        let chart = fixtures::colorchecker();
        let white_idx = chart.labels.iter().position(|l| l == "white").unwrap();
        let xyz = render_patch_response(&d65, &chart.patches[white_idx], &cmf).unwrap();
        let sum = xyz[0] + xyz[1] + xyz[2];
        let bare = integrate_to_tristimulus(&d65, &cmf).unwrap();
        let bare_sum = bare[0] + bare[1] + bare[2];
        assert!((xyz[0] / sum - bare[0] / bare_sum).abs() < 0.01);
        assert!((xyz[1] / sum - bare[1] / bare_sum).abs() < 0.01);
    }

    #[test]
    fn scene_matrix_rows_match_per_patch_renders() {
        let cmf = fixtures::cie_1931_cmf();
        let d65 = fixtures::d65();
        let chart = fixtures::colorchecker();
        let matrix = render_scene_matrix(&d65, &chart, &cmf).unwrap();
        assert_eq!(matrix.len(), 24);
        for (row, patch) in matrix.iter().zip(&chart.patches) {
            let single = render_patch_response(&d65, patch, &cmf).unwrap();
            for c in 0..3 {
                assert!((row[c] - single[c]).abs() <= 1e-12 * single[c].abs().max(1.0));
            }
        }
    }

    #[test]
    fn permuting_patches_permutes_rows() {
        let cmf = fixtures::cie_1931_cmf();
        let d65 = fixtures::d65();
        let chart = fixtures::colorchecker();
        let permuted = chart.subset(&[3, 0, 17]).unwrap();
        let rows = render_scene_matrix(&d65, &permuted, &cmf).unwrap();
        let full = render_scene_matrix(&d65, &chart, &cmf).unwrap();
        assert_eq!(rows[0], full[3]);
        assert_eq!(rows[1], full[0]);
        assert_eq!(rows[2], full[17]);
    }

    proptest! {
        #[test]
        fn composition_is_linear_in_intensities(
            a in proptest::collection::vec(0.0..1.0f64, 2),
            b in proptest::collection::vec(0.0..1.0f64, 2),
        ) {
            let bank = two_led_bank();
            let mix: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
            let la = compose_illumination(&bank, &IntensityVector::new(a).unwrap()).unwrap();
            let lb = compose_illumination(&bank, &IntensityVector::new(b).unwrap()).unwrap();
            let lm = compose_illumination(&bank, &IntensityVector::new(mix).unwrap()).unwrap();
            for i in 0..33 {
                prop_assert!((lm.values[i] - 0.5 * (la.values[i] + lb.values[i])).abs() < 1e-12);
            }
        }

        #[test]
        fn rendered_responses_stay_non_negative(
            light in proptest::collection::vec(0.0..5.0f64, 33),
            refl in proptest::collection::vec(0.0..1.0f64, 33),
        ) {
            let cmf = fixtures::cie_1931_cmf();
            let l = Spectrum::new(CANONICAL_GRID, light).unwrap();
            let r = Spectrum::new(CANONICAL_GRID, refl).unwrap();
            let xyz = render_patch_response(&l, &r, &cmf).unwrap();
            for c in xyz {
                prop_assert!(c >= 0.0);
            }
        }

        #[test]
        fn render_is_bilinear_in_light_and_reflectance(
            light in proptest::collection::vec(0.0..2.0f64, 33),
            refl in proptest::collection::vec(0.0..0.5f64, 33),
            alpha in 0.1..2.0f64,
        ) {
            let cmf = fixtures::cie_1931_cmf();
            let l = Spectrum::new(CANONICAL_GRID, light.clone()).unwrap();
            let r = Spectrum::new(CANONICAL_GRID, refl.clone()).unwrap();
            let l_scaled = l.scaled(alpha).unwrap();
            let r_scaled = r.scaled(alpha).unwrap();
            let base = render_patch_response(&l, &r, &cmf).unwrap();
            let via_light = render_patch_response(&l_scaled, &r, &cmf).unwrap();
            let via_refl = render_patch_response(&l, &r_scaled, &cmf).unwrap();
            for c in 0..3 {
                let scale = base[c].abs().max(1e-9);
                prop_assert!((via_light[c] - alpha * base[c]).abs() / scale < 1e-9);
                prop_assert!((via_refl[c] - alpha * base[c]).abs() / scale < 1e-9);
            }
        }
    }
}
