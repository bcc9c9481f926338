//! Scratch diagnostics for decode margins (not part of the test suite).

use spectramark::codec::{
    decode, encode, mask_dark_pixels, mask_fraction, normalize, select_phase_and_downsample,
    simulate_capture, temporal_differences, CaptureConfig, PatchLayout,
};
use spectramark::optimizer::{SceneContext, SpectraPair};
use spectramark::{fixtures, BitStream, IntensityVector};

fn main() {
    let ctx = SceneContext::new(
        fixtures::led_bank(),
        fixtures::colorchecker(),
        fixtures::synthetic_cameras_3(),
        fixtures::cie_1931_cmf(),
        fixtures::d65(),
        fixtures::cri_samples(),
    )
    .unwrap();

    let x = ctx.init_intensities().unwrap();
    let mut y = x.values().to_vec();
    y[0] = (y[0] + 0.06).min(1.0);
    y[9] = (y[9] - 0.04).max(0.0);
    let pair = SpectraPair::evaluate(&ctx, x, IntensityVector::new(y).unwrap()).unwrap();
    println!("pair metrics: {:#?}", pair.metrics);

    let bits = BitStream::random(128, 17).unwrap();
    let schedule = encode(&bits, 15.0, pair);
    let config = CaptureConfig {
        phase_offset: 0.1,
        exposure_fraction: 0.5,
        noise_sigma: 2.0 / 255.0,
        height: 24,
        width: 24,
        ..CaptureConfig::default()
    };
    let layout = PatchLayout::tile(24, 24, ctx.patches.len()).unwrap();
    let frames = simulate_capture(
        &schedule,
        &ctx.patches,
        &ctx.cameras.cameras[0],
        &config,
        &layout,
        &ctx.exposure(0).unwrap(),
        7,
    )
    .unwrap();

    let mask = mask_dark_pixels(&frames);
    println!("mask fraction: {:.4}", mask_fraction(&mask));
    let normalized = normalize(&frames, &mask).unwrap();
    println!("unmasked px: {}", normalized.unmasked_pixels());
    println!("mean full scale: {:.4}", normalized.mean_full_scale());
    let d = temporal_differences(&normalized).unwrap();
    let sel = select_phase_and_downsample(&d, 30.0, 15.0).unwrap();
    let mut sorted = sel.symbols.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = |f: f64| sorted[(f * (sorted.len() - 1) as f64) as usize];
    println!(
        "chosen stream: n={} min={:.5} q25={:.5} med={:.5} q75={:.5} max={:.5}",
        sorted.len(),
        q(0.0),
        q(0.25),
        q(0.5),
        q(0.75),
        q(1.0)
    );
    let quartile = sorted.len().div_ceil(4);
    let floor = sorted[..quartile].iter().sum::<f64>() / quartile as f64;
    let sigma_est = floor * std::f64::consts::PI.sqrt() / 2.0;
    let stat = 4.0 * sigma_est * (2.0 / normalized.unmasked_pixels() as f64).sqrt();
    println!("floor={floor:.5} sigma_est={sigma_est:.5} static={stat:.6}");

    match decode(&frames, 15.0) {
        Ok(report) => {
            println!(
                "decode ok: errors={} dynamic={:.5} noise_floor={:.5}",
                report.bits.errors_against(&bits),
                report.dynamic_threshold,
                report.noise_floor
            );
        }
        Err(e) => println!("decode error: {e}"),
    }
}
