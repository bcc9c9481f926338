//! The three spectral losses and the Adam search over intensity pairs.
//!
//! The searched objective balances three pulls: the two lights should render
//! every patch identically for people (`loss_human`), differ by roughly one
//! quantization step for cameras (`loss_camera`), and both stay close enough
//! to the reference white that color rendering survives (`loss_white`).
//! Everything is written over [`Real`] so one code path serves plain
//! evaluation and the dual-number gradient.

mod adam;
mod fit;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::{Dual, Real};
use crate::colorimetry::{
    cri, delta_e_2000_generic, integrate_to_tristimulus, lab_from_xyz_generic, GenericLab,
    ObserverSensitivity,
};
use crate::error::{Error, Result};
use crate::grid::Spectrum;
use crate::scene::{
    compose_illumination, CameraSet, ExposureScale, IntensityVector, LedBank, ReflectanceSet,
};

pub use adam::Adam;
pub use fit::nnls_fit;

/// Widest supported gradient: two intensity vectors of up to 16 LEDs each.
pub const MAX_PAIR_VARS: usize = 32;

type Grad = Dual<MAX_PAIR_VARS>;

/// Relative weights of the three loss terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub w_h: f64,
    pub w_c: f64,
    pub w_w: f64,
}

impl LossWeights {
    pub fn new(w_h: f64, w_c: f64, w_w: f64) -> Result<Self> {
        let all = [w_h, w_c, w_w];
        if all.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidInput(
                "loss weights must be finite and non-negative".into(),
            ));
        }
        if all.iter().all(|w| *w == 0.0) {
            return Err(Error::InvalidInput(
                "at least one loss weight must be positive".into(),
            ));
        }
        Ok(Self { w_h, w_c, w_w })
    }
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            w_h: 0.15,
            w_c: 0.05,
            w_w: 0.8,
        }
    }
}

/// Clip levels: `tau_c` caps the camera loss in normalized pixel units,
/// `tau_w` is the per-patch color-rendering allowance in delta-E units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub tau_c: f64,
    pub tau_w: f64,
}

impl Thresholds {
    pub fn new(tau_c: f64, tau_w: f64) -> Result<Self> {
        if !(tau_c > 0.0) || !(tau_w > 0.0) {
            return Err(Error::InvalidInput(
                "thresholds must be positive".into(),
            ));
        }
        Ok(Self { tau_c, tau_w })
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            // One step of 8-bit quantization, and the delta-E budget whose
            // linear rendering score equals 60.
            tau_c: 1.0 / 256.0,
            tau_w: 40.0 / 4.6,
        }
    }
}

/// Which iterate `optimize_pair` returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IterateSelection {
    /// Rank by white-loss violation, then |min-channel MAE - tau_c|, then
    /// the human loss.
    FeasibilityRanked,
    /// Rank by raw weighted total.
    BestTotalLoss,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    pub iterations: usize,
    pub seed: u64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub selection: IterateSelection,
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || self.iterations == 0 {
            return Err(Error::InvalidInput(
                "learning rate must be positive and iterations non-zero".into(),
            ));
        }
        Ok(())
    }
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            iterations: 5000,
            seed: 0,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            selection: IterateSelection::FeasibilityRanked,
        }
    }
}

/// Quality numbers attached to an optimized pair. MAE figures are in 8-bit
/// units (normalized values times 255).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairMetrics {
    pub delta_e_mean: f64,
    pub delta_e_max: f64,
    pub camera_mae_min_channel: f64,
    pub camera_mae_mean: f64,
    pub cri_1: f64,
    pub cri_2: f64,
}

/// An optimized pair of drive vectors with their composed spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectraPair {
    pub x: IntensityVector,
    pub y: IntensityVector,
    pub l1: Spectrum,
    pub l2: Spectrum,
    pub metrics: PairMetrics,
}

impl SpectraPair {
    /// Builds a pair from drive vectors, composing the spectra and computing
    /// all metrics against `ctx`.
    pub fn evaluate(ctx: &SceneContext, x: IntensityVector, y: IntensityVector) -> Result<Self> {
        let l1 = compose_illumination(&ctx.bank, &x)?;
        let l2 = compose_illumination(&ctx.bank, &y)?;
        let per_patch = per_patch_delta_e(ctx, &x, &y)?;
        let delta_e_mean = per_patch.iter().sum::<f64>() / per_patch.len() as f64;
        let delta_e_max = per_patch.iter().cloned().fold(0.0, f64::max);
        let (min_channel, all_channel) = camera_mae_stats(ctx, &x, &y)?;
        let cri_1 = cri(&l1, &ctx.reference, &ctx.cri_samples, &ctx.human)?.cri_value;
        let cri_2 = cri(&l2, &ctx.reference, &ctx.cri_samples, &ctx.human)?.cri_value;
        Ok(Self {
            x,
            y,
            l1,
            l2,
            metrics: PairMetrics {
                delta_e_mean,
                delta_e_max,
                camera_mae_min_channel: min_channel * 255.0,
                camera_mae_mean: all_channel * 255.0,
                cri_1,
                cri_2,
            },
        })
    }
}

/// Per-iteration loss record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub total: f64,
    pub human: f64,
    pub camera: f64,
    pub white: f64,
}

/// Result of an optimization run.
#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    pub pair: SpectraPair,
    pub trace: Vec<TraceRow>,
}

/// Weighted total with its raw terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub total: f64,
    pub human: f64,
    pub camera: f64,
    pub white: f64,
}

/// Everything the losses see: the scene, the reference light (scaled so the
/// bank's best white fit matches its luminance), and precomputed per-LED
/// response tables.
#[derive(Debug, Clone)]
pub struct SceneContext {
    pub bank: LedBank,
    pub patches: ReflectanceSet,
    pub cameras: CameraSet,
    pub human: ObserverSensitivity,
    pub reference: Spectrum,
    pub cri_samples: ReflectanceSet,
    white_point: [f64; 3],
    led_luminance: Vec<f64>,
    reference_luminance: f64,
    reference_patch_lab: Vec<GenericLab<f64>>,
    init_fit: Vec<f64>,
    /// Flattened response tables: entry [(patch * 3 + channel) * n + led].
    human_table: Vec<f64>,
    camera_tables: Vec<Vec<f64>>,
    exposures: Vec<ExposureScale>,
}

impl SceneContext {
    /// Validates grids, seeds the bank's white fit, aligns the reference
    /// luminance to it, and precomputes the per-LED response tables.
    pub fn new(
        bank: LedBank,
        patches: ReflectanceSet,
        cameras: CameraSet,
        human: ObserverSensitivity,
        reference: Spectrum,
        cri_samples: ReflectanceSet,
    ) -> Result<Self> {
        let grid = bank.grid;
        grid.ensure_matches(&patches.grid)?;
        grid.ensure_matches(&human.grid)?;
        grid.ensure_matches(&reference.grid)?;
        grid.ensure_matches(&cri_samples.grid)?;
        for cam in &cameras.cameras {
            grid.ensure_matches(&cam.grid)?;
        }
        if reference.is_zero() {
            return Err(Error::InvalidInput("reference light is zero".into()));
        }

        // Seed intensities: non-negative fit of the bank to the reference
        // shape, rescaled to sit inside the drive range.
        let unit_ref = reference.scaled(1.0 / reference.max_value())?;
        let raw_fit = fit::nnls_fit(&bank, &unit_ref);
        let max_fit = raw_fit.iter().cloned().fold(0.0, f64::max);
        if max_fit <= 0.0 {
            return Err(Error::InvalidInput(
                "the LED bank cannot approximate the reference light".into(),
            ));
        }
        let init_fit: Vec<f64> = raw_fit.iter().map(|v| v * 0.8 / max_fit).collect();

        // Align the reference luminance with the seeded white so Lab values,
        // exposure, and the capture path share one brightness scale.
        let seed_light = compose_illumination(
            &bank,
            &IntensityVector::new(init_fit.clone())?,
        )?;
        let seed_y = integrate_to_tristimulus(&seed_light, &human)?[1];
        let raw_y = integrate_to_tristimulus(&reference, &human)?[1];
        if seed_y <= 0.0 || raw_y <= 0.0 {
            return Err(Error::InvalidInput(
                "reference and seeded white need positive luminance".into(),
            ));
        }
        let reference = reference.scaled(seed_y / raw_y)?;

        let white_point = integrate_to_tristimulus(&reference, &human)?;
        let reference_luminance = white_point[1];

        let step = grid.step_nm;
        let n = bank.len();
        let response_table = |obs: &ObserverSensitivity, scale: [f64; 3]| -> Vec<f64> {
            let mut table = vec![0.0; patches.len() * 3 * n];
            for (p, patch) in patches.patches.iter().enumerate() {
                for c in 0..3 {
                    for (j, profile) in bank.profiles.iter().enumerate() {
                        let mut acc = 0.0;
                        for k in 0..grid.count {
                            acc += profile.values[k] * patch.values[k] * obs.channels[c][k];
                        }
                        table[(p * 3 + c) * n + j] = acc * step * scale[c];
                    }
                }
            }
            table
        };

        let human_table = response_table(&human, [1.0; 3]);
        let mut exposures = Vec::with_capacity(cameras.len());
        let mut camera_tables = Vec::with_capacity(cameras.len());
        for cam in &cameras.cameras {
            let exposure = ExposureScale::from_reference(cam, &reference)?;
            camera_tables.push(response_table(cam, exposure.rgb));
            exposures.push(exposure);
        }

        let led_luminance = bank
            .profiles
            .iter()
            .map(|p| integrate_to_tristimulus(p, &human).map(|t| t[1]))
            .collect::<Result<Vec<_>>>()?;

        let reference_patch_lab = patches
            .patches
            .iter()
            .map(|patch| {
                let xyz = crate::scene::render_patch_response(&reference, patch, &human)?;
                Ok(lab_from_xyz_generic(xyz, white_point))
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Self {
            bank,
            patches,
            cameras,
            human,
            reference,
            cri_samples,
            white_point,
            led_luminance,
            reference_luminance,
            reference_patch_lab,
            init_fit,
            human_table,
            camera_tables,
            exposures,
        })
    }

    /// Lab white point: the reference light's tristimulus under the human
    /// observer.
    pub fn white_point(&self) -> [f64; 3] {
        self.white_point
    }

    /// The seeded non-negative white fit of the bank.
    pub fn init_intensities(&self) -> Result<IntensityVector> {
        IntensityVector::new(self.init_fit.clone())
    }

    /// Exposure convention for camera `index`, as used by the camera loss.
    pub fn exposure(&self, index: usize) -> Result<ExposureScale> {
        self.exposures
            .get(index)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("camera index {index} out of range")))
    }

    pub fn exposure_for_label(&self, label: &str) -> Result<ExposureScale> {
        let idx = self
            .cameras
            .cameras
            .iter()
            .position(|c| c.label == label)
            .ok_or_else(|| Error::InvalidInput(format!("no camera labeled '{label}'")))?;
        self.exposure(idx)
    }

    fn check_pair(&self, x: &IntensityVector, y: &IntensityVector) -> Result<()> {
        if x.len() != self.bank.len() || y.len() != self.bank.len() {
            return Err(Error::InvalidInput(format!(
                "intensity vectors of length {}/{} for a {}-LED bank",
                x.len(),
                y.len(),
                self.bank.len()
            )));
        }
        Ok(())
    }

    fn patch_xyz<S: Real>(&self, table: &[f64], patch: usize, drive: &[S]) -> [S; 3] {
        let n = self.bank.len();
        let mut out = [S::constant(0.0); 3];
        for (c, slot) in out.iter_mut().enumerate() {
            let base = (patch * 3 + c) * n;
            let mut acc = S::constant(0.0);
            for (j, s) in drive.iter().enumerate() {
                acc = acc + s.scale(table[base + j]);
            }
            *slot = acc;
        }
        out
    }

    fn light_luminance<S: Real>(&self, drive: &[S]) -> S {
        let mut acc = S::constant(0.0);
        for (s, y) in drive.iter().zip(&self.led_luminance) {
            acc = acc + s.scale(*y);
        }
        acc
    }
}

/// All loss terms from one pass.
struct LossesEval<S> {
    human: S,
    camera: S,
    white: S,
    /// Unclipped mean over cameras of the min-channel MAE, for feasibility
    /// ranking and metrics.
    camera_min_mae: S,
}

fn eval_losses<S: Real>(ctx: &SceneContext, x: &[S], y: &[S], tau_c: f64, tau_w: f64) -> LossesEval<S> {
    let n_patches = ctx.patches.len();

    // Human loss: mean patch color difference between the two lights.
    let mut human_sum = S::constant(0.0);
    for p in 0..n_patches {
        let lab1 = lab_from_xyz_generic(ctx.patch_xyz(&ctx.human_table, p, x), ctx.white_point);
        let lab2 = lab_from_xyz_generic(ctx.patch_xyz(&ctx.human_table, p, y), ctx.white_point);
        human_sum = human_sum + delta_e_2000_generic(lab1, lab2);
    }
    let human = human_sum.scale(1.0 / n_patches as f64);

    // Camera loss: per camera, the clipped worst-channel MAE, negated.
    let mut clipped_sum = S::constant(0.0);
    let mut raw_sum = S::constant(0.0);
    for table in &ctx.camera_tables {
        let mut channel_mae = [S::constant(0.0); 3];
        for p in 0..n_patches {
            let v1 = ctx.patch_xyz(table, p, x);
            let v2 = ctx.patch_xyz(table, p, y);
            for c in 0..3 {
                channel_mae[c] = channel_mae[c] + (v1[c] - v2[c]).abs();
            }
        }
        let mut min_raw = channel_mae[0].scale(1.0 / n_patches as f64);
        let mut min_clipped = min_raw.min(S::constant(tau_c));
        for &mae_sum in &channel_mae[1..] {
            let mae = mae_sum.scale(1.0 / n_patches as f64);
            min_raw = min_raw.min(mae);
            min_clipped = min_clipped.min(mae.min(S::constant(tau_c)));
        }
        clipped_sum = clipped_sum + min_clipped;
        raw_sum = raw_sum + min_raw;
    }
    let n_cams = ctx.camera_tables.len() as f64;
    let camera = -clipped_sum.scale(1.0 / n_cams);
    let camera_min_mae = raw_sum.scale(1.0 / n_cams);

    // White loss: per-patch excess color difference against the reference,
    // with each light first scaled to the reference luminance.
    let mut white = S::constant(0.0);
    for drive in [x, y] {
        let scale = S::constant(ctx.reference_luminance) / ctx.light_luminance(drive);
        for p in 0..n_patches {
            let xyz = ctx.patch_xyz(&ctx.human_table, p, drive);
            let scaled = [xyz[0] * scale, xyz[1] * scale, xyz[2] * scale];
            let lab = lab_from_xyz_generic(scaled, ctx.white_point);
            let de = delta_e_2000_generic(lab, ctx.reference_patch_lab[p].lift());
            white = white + (de - S::constant(tau_w)).relu();
        }
    }

    LossesEval {
        human,
        camera,
        white,
        camera_min_mae,
    }
}

fn ensure_positive_luminance(ctx: &SceneContext, drive: &IntensityVector) -> Result<()> {
    if ctx.light_luminance(drive.values()) <= 0.0 {
        return Err(Error::InvalidInput(
            "light has zero luminance; the white loss is undefined".into(),
        ));
    }
    Ok(())
}

/// Mean patch color difference between the two composed lights.
pub fn loss_human(ctx: &SceneContext, x: &IntensityVector, y: &IntensityVector) -> Result<f64> {
    ctx.check_pair(x, y)?;
    Ok(eval_losses(ctx, x.values(), y.values(), Thresholds::default().tau_c, Thresholds::default().tau_w).human)
}

/// Negated mean over cameras of the clipped worst-channel MAE.
pub fn loss_camera(
    ctx: &SceneContext,
    x: &IntensityVector,
    y: &IntensityVector,
    tau_c: f64,
) -> Result<f64> {
    ctx.check_pair(x, y)?;
    Ok(eval_losses(ctx, x.values(), y.values(), tau_c, Thresholds::default().tau_w).camera)
}

/// Summed per-patch excess color difference of both lights against the
/// reference, after luminance normalization.
pub fn loss_white(
    ctx: &SceneContext,
    x: &IntensityVector,
    y: &IntensityVector,
    tau_w: f64,
) -> Result<f64> {
    ctx.check_pair(x, y)?;
    ensure_positive_luminance(ctx, x)?;
    ensure_positive_luminance(ctx, y)?;
    Ok(eval_losses(ctx, x.values(), y.values(), Thresholds::default().tau_c, tau_w).white)
}

/// Weighted total plus the raw terms.
pub fn total_loss(
    ctx: &SceneContext,
    x: &IntensityVector,
    y: &IntensityVector,
    weights: &LossWeights,
    thresholds: &Thresholds,
) -> Result<LossBreakdown> {
    ctx.check_pair(x, y)?;
    ensure_positive_luminance(ctx, x)?;
    ensure_positive_luminance(ctx, y)?;
    let eval = eval_losses(ctx, x.values(), y.values(), thresholds.tau_c, thresholds.tau_w);
    Ok(LossBreakdown {
        total: weights.w_h * eval.human + weights.w_c * eval.camera + weights.w_w * eval.white,
        human: eval.human,
        camera: eval.camera,
        white: eval.white,
    })
}

/// Per-patch color differences between the two lights (the terms averaged by
/// `loss_human`).
pub fn per_patch_delta_e(
    ctx: &SceneContext,
    x: &IntensityVector,
    y: &IntensityVector,
) -> Result<Vec<f64>> {
    ctx.check_pair(x, y)?;
    let mut out = Vec::with_capacity(ctx.patches.len());
    for p in 0..ctx.patches.len() {
        let lab1 = lab_from_xyz_generic(
            ctx.patch_xyz(&ctx.human_table, p, x.values()),
            ctx.white_point,
        );
        let lab2 = lab_from_xyz_generic(
            ctx.patch_xyz(&ctx.human_table, p, y.values()),
            ctx.white_point,
        );
        out.push(delta_e_2000_generic(lab1, lab2));
    }
    Ok(out)
}

/// Per-patch color differences of one light against the reference after
/// luminance normalization (the terms inside the white loss).
pub fn white_delta_es(ctx: &SceneContext, drive: &IntensityVector) -> Result<Vec<f64>> {
    if drive.len() != ctx.bank.len() {
        return Err(Error::InvalidInput("intensity length mismatch".into()));
    }
    ensure_positive_luminance(ctx, drive)?;
    let scale = ctx.reference_luminance / ctx.light_luminance(drive.values());
    let mut out = Vec::with_capacity(ctx.patches.len());
    for p in 0..ctx.patches.len() {
        let xyz = ctx.patch_xyz(&ctx.human_table, p, drive.values());
        let lab = lab_from_xyz_generic(
            [xyz[0] * scale, xyz[1] * scale, xyz[2] * scale],
            ctx.white_point,
        );
        out.push(delta_e_2000_generic(lab, ctx.reference_patch_lab[p]));
    }
    Ok(out)
}

/// Camera MAE statistics in normalized pixel units:
/// (mean over cameras of the min-channel MAE, mean over cameras and channels).
pub fn camera_mae_stats(
    ctx: &SceneContext,
    x: &IntensityVector,
    y: &IntensityVector,
) -> Result<(f64, f64)> {
    ctx.check_pair(x, y)?;
    let n_patches = ctx.patches.len() as f64;
    let mut min_sum = 0.0;
    let mut all_sum = 0.0;
    for table in &ctx.camera_tables {
        let mut channel_mae = [0.0; 3];
        for p in 0..ctx.patches.len() {
            let v1: [f64; 3] = ctx.patch_xyz(table, p, x.values());
            let v2: [f64; 3] = ctx.patch_xyz(table, p, y.values());
            for c in 0..3 {
                channel_mae[c] += (v1[c] - v2[c]).abs();
            }
        }
        for mae in channel_mae.iter_mut() {
            *mae /= n_patches;
        }
        min_sum += channel_mae.iter().cloned().fold(f64::INFINITY, f64::min);
        all_sum += channel_mae.iter().sum::<f64>() / 3.0;
    }
    let n_cams = ctx.camera_tables.len() as f64;
    Ok((min_sum / n_cams, all_sum / n_cams))
}

/// Gradient of the weighted total with respect to both intensity vectors
/// (x components first, then y), by one forward-mode pass.
pub fn gradient(
    ctx: &SceneContext,
    x: &IntensityVector,
    y: &IntensityVector,
    weights: &LossWeights,
    thresholds: &Thresholds,
) -> Result<Vec<f64>> {
    ctx.check_pair(x, y)?;
    ensure_positive_luminance(ctx, x)?;
    ensure_positive_luminance(ctx, y)?;
    let n = ctx.bank.len();
    if 2 * n > MAX_PAIR_VARS {
        return Err(Error::InvalidInput(format!(
            "bank of {n} LEDs exceeds the supported gradient width"
        )));
    }
    let dx: Vec<Grad> = x
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| Grad::variable(*v, i))
        .collect();
    let dy: Vec<Grad> = y
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| Grad::variable(*v, n + i))
        .collect();
    let eval = eval_losses(ctx, &dx, &dy, thresholds.tau_c, thresholds.tau_w);
    let total = eval.human.scale(weights.w_h)
        + eval.camera.scale(weights.w_c)
        + eval.white.scale(weights.w_w);
    if !total.re.is_finite() {
        return Err(Error::Divergence {
            iteration: 0,
            message: format!("total loss is {}", total.re),
            parameters: x.values().iter().chain(y.values()).cloned().collect(),
        });
    }
    Ok(total.eps[..2 * n].to_vec())
}

fn sigmoid_dual(u: Grad) -> Grad {
    Grad::constant(1.0) / (Grad::constant(1.0) + (-u).exp())
}

fn sigmoid(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Runs the Adam search over both drive vectors and returns the best iterate
/// under the configured selection rule, with a per-iteration loss trace.
///
/// The drives are reparameterized through a logistic map so the search is
/// unconstrained while the reported intensities respect the [0, 1] duty-cycle
/// range. Deterministic for a fixed seed and config.
pub fn optimize_pair(
    ctx: &SceneContext,
    weights: &LossWeights,
    thresholds: &Thresholds,
    config: &OptimizerConfig,
) -> Result<OptimizeOutcome> {
    config.validate()?;
    let n = ctx.bank.len();
    if 2 * n > MAX_PAIR_VARS {
        return Err(Error::InvalidInput(format!(
            "bank of {n} LEDs exceeds the supported gradient width"
        )));
    }

    // Seed both drives at the white fit, with small noise breaking the
    // x == y saddle.
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let clamp = |v: f64| v.clamp(1e-4, 1.0 - 1e-4);
    let mut u = vec![0.0; 2 * n];
    for side in 0..2 {
        for j in 0..n {
            let noisy = clamp(ctx.init_fit[j] + rng.gen_range(-0.01..0.01));
            u[side * n + j] = logit(noisy);
        }
    }

    let mut adam = Adam::new(
        2 * n,
        config.learning_rate,
        config.adam_beta1,
        config.adam_beta2,
        config.adam_epsilon,
    );

    let mut trace = Vec::with_capacity(config.iterations);
    let mut best_u = u.clone();
    let mut best_feasibility = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut best_total = f64::INFINITY;

    for iteration in 0..config.iterations {
        let drive: Vec<Grad> = u
            .iter()
            .enumerate()
            .map(|(i, &ui)| sigmoid_dual(Grad::variable(ui, i)))
            .collect();
        let eval = eval_losses(ctx, &drive[..n], &drive[n..], thresholds.tau_c, thresholds.tau_w);
        let total = eval.human.scale(weights.w_h)
            + eval.camera.scale(weights.w_c)
            + eval.white.scale(weights.w_w);

        if !total.re.is_finite() {
            return Err(Error::Divergence {
                iteration,
                message: format!("total loss is {}", total.re),
                parameters: u.iter().map(|&ui| sigmoid(ui)).collect(),
            });
        }

        trace.push(TraceRow {
            iteration,
            total: total.re,
            human: eval.human.value(),
            camera: eval.camera.value(),
            white: eval.white.value(),
        });

        match config.selection {
            IterateSelection::FeasibilityRanked => {
                let score = (
                    eval.white.value(),
                    (eval.camera_min_mae.value() - thresholds.tau_c).abs(),
                    eval.human.value(),
                );
                if score < best_feasibility {
                    best_feasibility = score;
                    best_u.copy_from_slice(&u);
                }
            }
            IterateSelection::BestTotalLoss => {
                if total.re < best_total {
                    best_total = total.re;
                    best_u.copy_from_slice(&u);
                }
            }
        }

        let grad = &total.eps[..2 * n];
        adam.update(&mut u, grad);
    }

    let x = IntensityVector::new(best_u[..n].iter().map(|&ui| sigmoid(ui)).collect())?;
    let y = IntensityVector::new(best_u[n..].iter().map(|&ui| sigmoid(ui)).collect())?;
    let pair = SpectraPair::evaluate(ctx, x, y)?;
    Ok(OptimizeOutcome { pair, trace })
}

#[cfg(test)]
mod tests;
