//! Non-negative least-squares fit of an LED bank to a target spectrum,
//! used to seed the optimizer near a plausible white.

use crate::grid::Spectrum;
use crate::scene::LedBank;

/// Minimizes ||A c - target||^2 over c >= 0 by projected gradient descent,
/// where column j of A is LED profile j. Deterministic; the problem is tiny
/// (grid count x LED count).
pub fn nnls_fit(bank: &LedBank, target: &Spectrum) -> Vec<f64> {
    let n = bank.len();
    let m = bank.grid.count;
    let cols: Vec<&[f64]> = bank.profiles.iter().map(|p| p.values.as_slice()).collect();

    // Lipschitz bound for the gradient: row-sum bound on A^T A.
    let mut ata = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            ata[i * n + j] = (0..m).map(|k| cols[i][k] * cols[j][k]).sum();
        }
    }
    let lip = (0..n)
        .map(|i| (0..n).map(|j| ata[i * n + j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
        .max(1e-12);
    let step = 1.0 / lip;

    let mut c = vec![0.0; n];
    let mut residual = vec![0.0; m];
    for _ in 0..2000 {
        for k in 0..m {
            let mut acc = -target.values[k];
            for j in 0..n {
                acc += c[j] * cols[j][k];
            }
            residual[k] = acc;
        }
        for j in 0..n {
            let g: f64 = (0..m).map(|k| cols[j][k] * residual[k]).sum();
            c[j] = (c[j] - step * g).max(0.0);
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::CANONICAL_GRID;
    use crate::scene::{compose_illumination, IntensityVector};

    #[test]
    fn recovers_an_exact_composition() {
        let bank = LedBank::gaussian(CANONICAL_GRID, &[450.0, 550.0, 650.0], 25.0).unwrap();
        let truth = IntensityVector::new(vec![0.3, 0.7, 0.2]).unwrap();
        let target = compose_illumination(&bank, &truth).unwrap();
        let c = nnls_fit(&bank, &target);
        for (got, want) in c.iter().zip(truth.values()) {
            assert!((got - want).abs() < 1e-4, "got {got}, want {want}");
        }
    }

    #[test]
    fn stays_non_negative_on_unreachable_targets() {
        let bank = LedBank::gaussian(CANONICAL_GRID, &[450.0, 460.0], 15.0).unwrap();
        let target = crate::fixtures::d65().scaled(1.0 / 120.0).unwrap();
        let c = nnls_fit(&bank, &target);
        assert!(c.iter().all(|v| *v >= 0.0));
    }
}
