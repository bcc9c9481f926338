use super::*;
use crate::fixtures;
use crate::grid::CANONICAL_GRID;
use approx::assert_relative_eq;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_context() -> SceneContext {
    // Six patches and one camera keep the loss surface cheap for tests.
    let chart = fixtures::colorchecker();
    let patches = chart.subset(&[0, 6, 13, 15, 18, 23]).unwrap();
    let cameras = crate::scene::CameraSet::new(vec![fixtures::synthetic_cameras().cameras[0]
        .clone()])
    .unwrap();
    SceneContext::new(
        fixtures::led_bank(),
        patches,
        cameras,
        fixtures::cie_1931_cmf(),
        fixtures::d65(),
        fixtures::cri_samples(),
    )
    .unwrap()
}

fn default_context() -> SceneContext {
    SceneContext::new(
        fixtures::led_bank(),
        fixtures::colorchecker(),
        fixtures::synthetic_cameras_3(),
        fixtures::cie_1931_cmf(),
        fixtures::d65(),
        fixtures::cri_samples(),
    )
    .unwrap()
}

fn random_drive(rng: &mut ChaCha8Rng, n: usize) -> IntensityVector {
    IntensityVector::new((0..n).map(|_| rng.gen_range(0.05..0.95)).collect()).unwrap()
}

#[test]
fn identical_drives_have_zero_human_and_camera_loss() {
    let ctx = small_context();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let x = random_drive(&mut rng, ctx.bank.len());
        assert_eq!(loss_human(&ctx, &x, &x).unwrap(), 0.0);
        assert_eq!(loss_camera(&ctx, &x, &x, 1.0 / 256.0).unwrap(), 0.0);
    }
}

#[test]
fn camera_loss_stays_within_clip_bound() {
    let ctx = small_context();
    let tau_c = 1.0 / 256.0;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let x = random_drive(&mut rng, ctx.bank.len());
        let y = random_drive(&mut rng, ctx.bank.len());
        let lc = loss_camera(&ctx, &x, &y, tau_c).unwrap();
        assert!(lc <= 0.0 && lc >= -tau_c, "lc = {lc}");
    }
}

#[test]
fn losses_are_exchange_symmetric() {
    let ctx = small_context();
    let thresholds = Thresholds::default();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..5 {
        let x = random_drive(&mut rng, ctx.bank.len());
        let y = random_drive(&mut rng, ctx.bank.len());
        assert_relative_eq!(
            loss_human(&ctx, &x, &y).unwrap(),
            loss_human(&ctx, &y, &x).unwrap(),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            loss_camera(&ctx, &x, &y, thresholds.tau_c).unwrap(),
            loss_camera(&ctx, &y, &x, thresholds.tau_c).unwrap(),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            loss_white(&ctx, &x, &y, thresholds.tau_w).unwrap(),
            loss_white(&ctx, &y, &x, thresholds.tau_w).unwrap(),
            epsilon = 1e-12
        );
    }
}

#[test]
fn breakdown_recombines_to_the_total() {
    let ctx = small_context();
    let weights = LossWeights::default();
    let thresholds = Thresholds::default();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let x = random_drive(&mut rng, ctx.bank.len());
    let y = random_drive(&mut rng, ctx.bank.len());
    let b = total_loss(&ctx, &x, &y, &weights, &thresholds).unwrap();
    let recombined = weights.w_h * b.human + weights.w_c * b.camera + weights.w_w * b.white;
    assert!((b.total - recombined).abs() < 1e-12);
}

#[test]
fn white_loss_matches_manual_relu_sum() {
    let ctx = small_context();
    let tau_w = 2.5; // low enough that random drives violate it
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let x = random_drive(&mut rng, ctx.bank.len());
    let y = random_drive(&mut rng, ctx.bank.len());
    let manual: f64 = white_delta_es(&ctx, &x)
        .unwrap()
        .iter()
        .chain(white_delta_es(&ctx, &y).unwrap().iter())
        .map(|de| (de - tau_w).max(0.0))
        .sum();
    assert_relative_eq!(
        loss_white(&ctx, &x, &y, tau_w).unwrap(),
        manual,
        epsilon = 1e-9
    );
}

#[test]
fn white_loss_dead_zone_is_exactly_zero() {
    let ctx = small_context();
    // The seeded white fit sits close to the reference, so a generous
    // allowance puts every patch in the ReLU dead zone.
    let x = ctx.init_intensities().unwrap();
    let max_de = white_delta_es(&ctx, &x)
        .unwrap()
        .into_iter()
        .fold(0.0, f64::max);
    let tau_w = max_de + 1.0;
    assert_eq!(loss_white(&ctx, &x, &x, tau_w).unwrap(), 0.0);
}

#[test]
fn raising_white_weight_raises_a_violating_total() {
    let ctx = small_context();
    let thresholds = Thresholds::new(1.0 / 256.0, 0.05).unwrap(); // tight allowance
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let x = random_drive(&mut rng, ctx.bank.len());
    let y = random_drive(&mut rng, ctx.bank.len());
    let lw = loss_white(&ctx, &x, &y, thresholds.tau_w).unwrap();
    assert!(lw > 0.0, "expected a rendering violation, got {lw}");
    let low = total_loss(
        &ctx,
        &x,
        &y,
        &LossWeights::new(0.15, 0.05, 0.8).unwrap(),
        &thresholds,
    )
    .unwrap();
    let high = total_loss(
        &ctx,
        &x,
        &y,
        &LossWeights::new(0.15, 0.05, 1.6).unwrap(),
        &thresholds,
    )
    .unwrap();
    assert!(high.total > low.total);
}

#[test]
fn weights_reject_negatives_and_all_zero() {
    assert!(LossWeights::new(-0.1, 0.0, 1.0).is_err());
    assert!(LossWeights::new(0.0, 0.0, 0.0).is_err());
    assert!(LossWeights::new(0.0, 0.0, 1.0).is_ok());
    assert!(Thresholds::new(0.0, 1.0).is_err());
}

#[test]
fn gradient_vanishes_at_equal_drives_with_human_loss_only() {
    let ctx = small_context();
    let x = ctx.init_intensities().unwrap();
    let weights = LossWeights {
        w_h: 1.0,
        w_c: 0.0,
        w_w: 0.0,
    };
    let g = gradient(&ctx, &x, &x, &weights, &Thresholds::default()).unwrap();
    for component in g {
        assert!(component.abs() < 1e-6, "component = {component}");
    }
}

#[test]
fn zero_weights_give_zero_gradient() {
    let ctx = small_context();
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let x = random_drive(&mut rng, ctx.bank.len());
    let y = random_drive(&mut rng, ctx.bank.len());
    let weights = LossWeights {
        w_h: 0.0,
        w_c: 0.0,
        w_w: 0.0,
    };
    let g = gradient(&ctx, &x, &y, &weights, &Thresholds::default()).unwrap();
    assert!(g.iter().all(|c| *c == 0.0));
}

#[test]
fn gradient_matches_central_differences() {
    let ctx = small_context();
    let weights = LossWeights::default();
    let thresholds = Thresholds::default();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let h = 1e-5;
    for _ in 0..20 {
        let x = random_drive(&mut rng, ctx.bank.len());
        let y = random_drive(&mut rng, ctx.bank.len());
        let g = gradient(&ctx, &x, &y, &weights, &thresholds).unwrap();
        let n = ctx.bank.len();
        for k in 0..2 * n {
            let mut lo_x = x.values().to_vec();
            let mut lo_y = y.values().to_vec();
            let mut hi_x = lo_x.clone();
            let mut hi_y = lo_y.clone();
            if k < n {
                lo_x[k] -= h;
                hi_x[k] += h;
            } else {
                lo_y[k - n] -= h;
                hi_y[k - n] += h;
            }
            let f = |xv: Vec<f64>, yv: Vec<f64>| {
                total_loss(
                    &ctx,
                    &IntensityVector::new(xv).unwrap(),
                    &IntensityVector::new(yv).unwrap(),
                    &weights,
                    &thresholds,
                )
                .unwrap()
                .total
            };
            let fd = (f(hi_x, hi_y) - f(lo_x, lo_y)) / (2.0 * h);
            let denom = fd.abs().max(g[k].abs()).max(1e-8);
            let rel = (g[k] - fd).abs() / denom;
            assert!(rel < 1e-4, "component {k}: ad {} vs fd {fd}, rel {rel}", g[k]);
        }
    }
}

#[test]
fn gradient_rejects_non_finite_loss() {
    let ctx = small_context();
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let x = random_drive(&mut rng, ctx.bank.len());
    let y = random_drive(&mut rng, ctx.bank.len());
    // Overflowing weights force a non-finite total.
    let weights = LossWeights {
        w_h: f64::MAX,
        w_c: 0.0,
        w_w: f64::MAX,
    };
    let err = gradient(&ctx, &x, &y, &weights, &Thresholds::new(1e-300, 1e-9).unwrap());
    match err {
        Err(crate::Error::Divergence { .. }) => {}
        other => panic!("expected divergence, got {other:?}"),
    }
}

#[test]
fn optimizer_is_deterministic_for_a_seed() {
    let ctx = small_context();
    let config = OptimizerConfig {
        iterations: 40,
        ..OptimizerConfig::with_seed(99)
    };
    let a = optimize_pair(&ctx, &LossWeights::default(), &Thresholds::default(), &config).unwrap();
    let b = optimize_pair(&ctx, &LossWeights::default(), &Thresholds::default(), &config).unwrap();
    assert_eq!(a.pair.x, b.pair.x);
    assert_eq!(a.pair.y, b.pair.y);
    assert_eq!(a.pair.metrics, b.pair.metrics);
    assert_eq!(a.trace.len(), b.trace.len());
    for (ra, rb) in a.trace.iter().zip(&b.trace) {
        assert_eq!(ra.total, rb.total);
    }
}

#[test]
fn white_only_objective_reaches_zero_on_a_reference_led() {
    // A bank whose first profile is the reference shape itself: the white
    // loss has an exact zero along that axis.
    let d65 = fixtures::d65();
    let ref_profile = d65.scaled(1.0 / d65.max_value()).unwrap();
    let extra = crate::scene::LedBank::gaussian(CANONICAL_GRID, &[640.0, 660.0], 20.0).unwrap();
    let bank = crate::scene::LedBank::new(
        CANONICAL_GRID,
        vec![ref_profile, extra.profiles[1].clone()],
        vec!["ref_shape".into(), "led_660".into()],
    )
    .unwrap();
    let ctx = SceneContext::new(
        bank,
        fixtures::colorchecker(),
        fixtures::synthetic_cameras_3(),
        fixtures::cie_1931_cmf(),
        d65,
        fixtures::cri_samples(),
    )
    .unwrap();
    let weights = LossWeights::new(0.0, 0.0, 1.0).unwrap();
    let config = OptimizerConfig {
        iterations: 400,
        ..OptimizerConfig::with_seed(5)
    };
    let outcome = optimize_pair(&ctx, &weights, &Thresholds::default(), &config).unwrap();
    let lw = loss_white(
        &ctx,
        &outcome.pair.x,
        &outcome.pair.y,
        Thresholds::default().tau_w,
    )
    .unwrap();
    assert_eq!(lw, 0.0, "white loss should hit its dead zone exactly");
}

#[test]
fn pair_metrics_are_recomputable_from_fields() {
    let ctx = small_context();
    let config = OptimizerConfig {
        iterations: 60,
        ..OptimizerConfig::with_seed(3)
    };
    let outcome =
        optimize_pair(&ctx, &LossWeights::default(), &Thresholds::default(), &config).unwrap();
    let pair = &outcome.pair;
    let recomputed = SpectraPair::evaluate(&ctx, pair.x.clone(), pair.y.clone()).unwrap();
    assert_eq!(pair.metrics, recomputed.metrics);
    assert_eq!(pair.l1, recomputed.l1);
    // Spectra really are the compositions of the drive vectors.
    let l1 = compose_illumination(&ctx.bank, &pair.x).unwrap();
    assert_eq!(pair.l1, l1);
}

#[test]
fn default_context_rejects_mismatched_grids() {
    let narrow = crate::grid::WavelengthGrid::new(400.0, 20.0, 17).unwrap();
    let bank = crate::scene::LedBank::gaussian(narrow, &[450.0, 630.0], 25.0).unwrap();
    let err = SceneContext::new(
        bank,
        fixtures::colorchecker(),
        fixtures::synthetic_cameras_3(),
        fixtures::cie_1931_cmf(),
        fixtures::d65(),
        fixtures::cri_samples(),
    );
    assert!(err.is_err());
}

#[test]
fn default_run_reaches_feasible_metrics_quickly() {
    // A shortened version of the full acceptance run: even a few hundred
    // iterations should land in a clearly feasible region.
    let ctx = default_context();
    let config = OptimizerConfig {
        iterations: 600,
        ..OptimizerConfig::with_seed(42)
    };
    let outcome =
        optimize_pair(&ctx, &LossWeights::default(), &Thresholds::default(), &config).unwrap();
    let m = &outcome.pair.metrics;
    assert!(m.delta_e_mean < 2.0, "delta_e_mean = {}", m.delta_e_mean);
    assert!(m.cri_1 > 55.0 && m.cri_2 > 55.0, "cri = {}/{}", m.cri_1, m.cri_2);
    assert!(
        m.camera_mae_min_channel > 0.3,
        "min-channel MAE = {}",
        m.camera_mae_min_channel
    );
}
