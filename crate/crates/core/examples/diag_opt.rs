//! Scratch diagnostics for the optimizer trajectory (not part of the suite).

use spectramark::optimizer::{
    camera_mae_stats, optimize_pair, IterateSelection, OptimizerConfig, SceneContext, SpectraPair,
};
use spectramark::{fixtures, LossWeights, Thresholds};

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

    let weights = LossWeights::default();
    let thresholds = Thresholds::default();

    for iters in [500usize, 1500, 3000, 5000] {
        let config = OptimizerConfig {
            iterations: iters,
            selection: IterateSelection::FeasibilityRanked,
            ..OptimizerConfig::with_seed(42)
        };
        let t0 = std::time::Instant::now();
        let outcome = optimize_pair(&ctx, &weights, &thresholds, &config).unwrap();
        let m = &outcome.pair.metrics;
        let last = outcome.trace.last().unwrap();
        println!(
            "iters {iters:5}: dE_mean {:.4} dE_max {:.4} minMAE {:.4} meanMAE {:.4} cri {:.1}/{:.1}  last(lh {:.4} lc {:.6} lw {:.4})  [{:?}]",
            m.delta_e_mean,
            m.delta_e_max,
            m.camera_mae_min_channel,
            m.camera_mae_mean,
            m.cri_1,
            m.cri_2,
            last.human,
            last.camera,
            last.white,
            t0.elapsed()
        );
    }

    // Where does the final iterate itself sit (not the selected best)?
    let config = OptimizerConfig {
        iterations: 5000,
        selection: IterateSelection::BestTotalLoss,
        ..OptimizerConfig::with_seed(42)
    };
    let outcome = optimize_pair(&ctx, &weights, &thresholds, &config).unwrap();
    let m = &outcome.pair.metrics;
    println!(
        "best-total:  dE_mean {:.4} minMAE {:.4} cri {:.1}/{:.1}",
        m.delta_e_mean, m.camera_mae_min_channel, m.cri_1, m.cri_2
    );
    let (min_mae, mean_mae) = camera_mae_stats(&ctx, &outcome.pair.x, &outcome.pair.y).unwrap();
    println!("raw stats: min {:.6} mean {:.6} (normalized)", min_mae, mean_mae);
    println!("x = {:?}", outcome.pair.x.values());
    println!("y = {:?}", outcome.pair.y.values());

    // Per-camera detail of the selected pair under each synthetic camera.
    let all = fixtures::synthetic_cameras();
    for cam in &all.cameras {
        let solo = spectramark::CameraSet::new(vec![cam.clone()]).unwrap();
        let solo_ctx = SceneContext::new(
            fixtures::led_bank(),
            fixtures::colorchecker(),
            solo,
            fixtures::cie_1931_cmf(),
            fixtures::d65(),
            fixtures::cri_samples(),
        )
        .unwrap();
        let pair = SpectraPair::evaluate(&solo_ctx, outcome.pair.x.clone(), outcome.pair.y.clone())
            .unwrap();
        println!(
            "camera {}: minMAE {:.4} meanMAE {:.4} (8-bit)",
            cam.label, pair.metrics.camera_mae_min_channel, pair.metrics.camera_mae_mean
        );
    }
}
