//! Linear color-rendering score: 100 minus a fixed multiple of the mean
//! sample color difference against a reference light.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Spectrum;
use crate::scene::ReflectanceSet;

use super::{delta_e_2000, integrate_to_tristimulus, xyz_to_lab, ObserverSensitivity};

/// Score lost per unit of mean sample color difference.
pub const CRI_PER_DELTA_E: f64 = 4.6;

/// Result of a rendering-fidelity evaluation over eight test samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriReport {
    pub cri_value: f64,
    pub per_sample_delta_e: [f64; 8],
}

/// Scores `test_light` against `reference` over eight reflectance samples:
/// both lights are first scaled to equal luminance over a perfect white
/// sample, each sample's Lab is compared under the two lights, and the score
/// is `100 - 4.6 * mean(delta_e)`.
///
/// The Lab white point is the reference light's own tristimulus, so the score
/// is invariant under positive scaling of either light.
pub fn cri(
    test_light: &Spectrum,
    reference: &Spectrum,
    samples: &ReflectanceSet,
    human: &ObserverSensitivity,
) -> Result<CriReport> {
    if samples.patches.len() != 8 {
        return Err(Error::InvalidInput(format!(
            "rendering score needs exactly 8 samples, got {}",
            samples.patches.len()
        )));
    }
    if test_light.is_zero() || reference.is_zero() {
        return Err(Error::InvalidInput(
            "rendering score needs non-zero lights".into(),
        ));
    }
    test_light.grid.ensure_matches(&reference.grid)?;
    test_light.grid.ensure_matches(&samples.grid)?;
    test_light.grid.ensure_matches(&human.grid)?;

    let ref_xyz = integrate_to_tristimulus(reference, human)?;
    let test_y = integrate_to_tristimulus(test_light, human)?[1];
    if test_y <= 0.0 || ref_xyz[1] <= 0.0 {
        return Err(Error::InvalidInput(
            "lights must have positive luminance".into(),
        ));
    }
    let test_scaled = test_light.scaled(ref_xyz[1] / test_y)?;

    let white_point = ref_xyz;
    let mut per_sample = [0.0; 8];
    for (i, sample) in samples.patches.iter().enumerate() {
        let under_ref = crate::scene::render_patch_response(reference, sample, human)?;
        let under_test = crate::scene::render_patch_response(&test_scaled, sample, human)?;
        per_sample[i] = delta_e_2000(
            xyz_to_lab(under_test, white_point)?,
            xyz_to_lab(under_ref, white_point)?,
        );
    }

    let mean = per_sample.iter().sum::<f64>() / 8.0;
    Ok(CriReport {
        cri_value: 100.0 - CRI_PER_DELTA_E * mean,
        per_sample_delta_e: per_sample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_relative_eq;

    #[test]
    fn self_comparison_scores_100() {
        let d65 = fixtures::d65();
        let samples = fixtures::cri_samples();
        let cmf = fixtures::cie_1931_cmf();
        let report = cri(&d65, &d65, &samples, &cmf).unwrap();
        assert_relative_eq!(report.cri_value, 100.0, epsilon = 1e-9);
        for de in report.per_sample_delta_e {
            assert_relative_eq!(de, 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn scaled_test_light_scores_100() {
        let d65 = fixtures::d65();
        let samples = fixtures::cri_samples();
        let cmf = fixtures::cie_1931_cmf();
        let doubled = d65.scaled(2.0).unwrap();
        let report = cri(&doubled, &d65, &samples, &cmf).unwrap();
        assert_relative_eq!(report.cri_value, 100.0, epsilon = 1e-9);
    }

    #[test]
    fn mean_delta_e_inverts_linearly() {
        // Mean sample difference of 40/4.6 corresponds to a score of 60.
        let mean: f64 = 40.0 / 4.6;
        assert_relative_eq!(100.0 - CRI_PER_DELTA_E * mean, 60.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_power_light_is_rejected() {
        let d65 = fixtures::d65();
        let samples = fixtures::cri_samples();
        let cmf = fixtures::cie_1931_cmf();
        let zero = Spectrum::zero(d65.grid);
        assert!(cri(&zero, &d65, &samples, &cmf).is_err());
        assert!(cri(&d65, &zero, &samples, &cmf).is_err());
    }

    #[test]
    fn skewed_light_scores_below_self() {
        let d65 = fixtures::d65();
        let samples = fixtures::cri_samples();
        let cmf = fixtures::cie_1931_cmf();
        let mut values = d65.values.clone();
        for (i, v) in values.iter_mut().enumerate() {
            // Suppress the middle of the visible band.
            if (10..20).contains(&i) {
                *v *= 0.2;
            }
        }
        let skewed = Spectrum::new(d65.grid, values).unwrap();
        let report = cri(&skewed, &d65, &samples, &cmf).unwrap();
        assert!(report.cri_value < 99.0, "cri = {}", report.cri_value);
    }
}
