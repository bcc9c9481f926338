//! Scratch grid search over the camera-loss weight (not part of the suite).

use spectramark::optimizer::{optimize_pair, OptimizerConfig, SceneContext};
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
    let thresholds = Thresholds::default();

    for w_c in [0.05, 1.0, 3.0, 10.0, 20.0, 40.0] {
        let weights = LossWeights {
            w_h: 0.15,
            w_c,
            w_w: 0.8,
        };
        let config = OptimizerConfig {
            iterations: 5000,
            ..OptimizerConfig::with_seed(42)
        };
        let t0 = std::time::Instant::now();
        match optimize_pair(&ctx, &weights, &thresholds, &config) {
            Ok(outcome) => {
                let m = &outcome.pair.metrics;
                let last = outcome.trace.last().unwrap();
                println!(
                    "w_c {w_c:5.2}: dE_mean {:.4} dE_max {:.4} minMAE {:.4} meanMAE {:.4} cri {:.1}/{:.1} last(lh {:.4} lc {:+.6} lw {:.5}) [{:?}]",
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
            Err(e) => println!("w_c {w_c:5.2}: error {e}"),
        }
    }
}
