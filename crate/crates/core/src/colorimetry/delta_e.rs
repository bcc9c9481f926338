//! CIEDE2000 color difference, following the Sharma/Wu/Dalal implementation
//! notes for the hue branches.

use crate::autodiff::Real;

use super::{GenericLab, LabColor};

/// CIEDE2000 difference between two Lab colors.
pub fn delta_e_2000(a: LabColor, b: LabColor) -> f64 {
    delta_e_2000_generic::<f64>(a.into(), b.into())
}

/// CIEDE2000 over any [`Real`] scalar. Branch selection compares value parts,
/// so dual inputs get the piecewise derivative of the standard formula.
pub fn delta_e_2000_generic<S: Real>(lab1: GenericLab<S>, lab2: GenericLab<S>) -> S {
    let deg2rad = std::f64::consts::PI / 180.0;
    let two_pi = 360.0;

    let c1 = (lab1.a * lab1.a + lab1.b * lab1.b).sqrt();
    let c2 = (lab2.a * lab2.a + lab2.b * lab2.b).sqrt();
    let c_bar = (c1 + c2).scale(0.5);

    let c_bar7 = c_bar.powi(7);
    let pow25_7 = 25.0_f64.powi(7);
    let g = (S::constant(1.0) - (c_bar7 / (c_bar7 + S::constant(pow25_7))).sqrt()).scale(0.5);

    let a1p = lab1.a * (S::constant(1.0) + g);
    let a2p = lab2.a * (S::constant(1.0) + g);
    let c1p = (a1p * a1p + lab1.b * lab1.b).sqrt();
    let c2p = (a2p * a2p + lab2.b * lab2.b).sqrt();

    let h1p = hue_deg(lab1.b, a1p);
    let h2p = hue_deg(lab2.b, a2p);

    let dl = lab2.l - lab1.l;
    let dc = c2p - c1p;

    let chroma_product_zero = c1p.value() * c2p.value() == 0.0;
    let dh_deg = if chroma_product_zero {
        S::constant(0.0)
    } else {
        let diff = h2p - h1p;
        if diff.value() > 180.0 {
            diff - S::constant(two_pi)
        } else if diff.value() < -180.0 {
            diff + S::constant(two_pi)
        } else {
            diff
        }
    };
    let dh = (c1p * c2p).sqrt() * (dh_deg.scale(0.5 * deg2rad)).sin().scale(2.0);

    let l_bar = (lab1.l + lab2.l).scale(0.5);
    let c_bar_p = (c1p + c2p).scale(0.5);

    let h_bar = if chroma_product_zero {
        h1p + h2p
    } else {
        let sum = h1p + h2p;
        if (h1p - h2p).value().abs() <= 180.0 {
            sum.scale(0.5)
        } else if sum.value() < 360.0 {
            (sum + S::constant(two_pi)).scale(0.5)
        } else {
            (sum - S::constant(two_pi)).scale(0.5)
        }
    };

    let t = S::constant(1.0) - ((h_bar - S::constant(30.0)).scale(deg2rad)).cos().scale(0.17)
        + (h_bar.scale(2.0 * deg2rad)).cos().scale(0.24)
        + ((h_bar.scale(3.0) + S::constant(6.0)).scale(deg2rad)).cos().scale(0.32)
        - ((h_bar.scale(4.0) - S::constant(63.0)).scale(deg2rad)).cos().scale(0.20);

    let dtheta_exp = (h_bar - S::constant(275.0)).scale(1.0 / 25.0);
    let dtheta = (-(dtheta_exp * dtheta_exp)).exp().scale(30.0);

    let c_bar_p7 = c_bar_p.powi(7);
    let rc = (c_bar_p7 / (c_bar_p7 + S::constant(pow25_7))).sqrt().scale(2.0);
    let rt = -(dtheta.scale(2.0 * deg2rad)).sin() * rc;

    let l_shift = l_bar - S::constant(50.0);
    let l_shift2 = l_shift * l_shift;
    let sl = S::constant(1.0)
        + l_shift2.scale(0.015) / (S::constant(20.0) + l_shift2).sqrt();
    let sc = S::constant(1.0) + c_bar_p.scale(0.045);
    let sh = S::constant(1.0) + (c_bar_p * t).scale(0.015);

    let term_l = dl / sl;
    let term_c = dc / sc;
    let term_h = dh / sh;

    (term_l * term_l + term_c * term_c + term_h * term_h + rt * term_c * term_h).sqrt()
}

/// Hue angle in degrees in [0, 360); zero when both components vanish.
fn hue_deg<S: Real>(b: S, a_prime: S) -> S {
    if b.value() == 0.0 && a_prime.value() == 0.0 {
        return S::constant(0.0);
    }
    let h = b.atan2(a_prime).scale(180.0 / std::f64::consts::PI);
    if h.value() < 0.0 {
        h + S::constant(360.0)
    } else {
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::Dual;
    use crate::fixtures;
    use proptest::prelude::*;

    #[test]
    fn identical_colors_have_zero_difference() {
        let c = LabColor {
            l: 43.2,
            a: -12.1,
            b: 55.0,
        };
        assert_eq!(delta_e_2000(c, c), 0.0);
    }

    #[test]
    fn published_pairs_match_within_1e4() {
        for case in fixtures::ciede2000_verification_pairs() {
            let got = delta_e_2000(case.first, case.second);
            assert!(
                (got - case.expected).abs() < 1e-4,
                "pair {:?} vs {:?}: got {got}, expected {}",
                case.first,
                case.second,
                case.expected
            );
        }
    }

    #[test]
    fn dual_valued_difference_matches_plain_value() {
        let l1 = GenericLab {
            l: Dual::<4>::variable(50.0, 0),
            a: Dual::variable(2.5, 1),
            b: Dual::new(0.0),
        };
        let l2 = GenericLab {
            l: Dual::new(61.0),
            a: Dual::new(-5.0),
            b: Dual::new(29.0),
        };
        let d = delta_e_2000_generic(l1, l2);
        assert!((d.re - 22.8977).abs() < 1e-4);
        assert!(d.eps[0].is_finite() && d.eps[1].is_finite());
    }

    proptest! {
        #[test]
        fn symmetric_nonnegative_zero_on_identity(
            l1 in 0.0..100.0f64, a1 in -90.0..90.0f64, b1 in -90.0..90.0f64,
            l2 in 0.0..100.0f64, a2 in -90.0..90.0f64, b2 in -90.0..90.0f64,
        ) {
            let p = LabColor { l: l1, a: a1, b: b1 };
            let q = LabColor { l: l2, a: a2, b: b2 };
            let pq = delta_e_2000(p, q);
            let qp = delta_e_2000(q, p);
            prop_assert!(pq >= 0.0);
            prop_assert!((pq - qp).abs() < 1e-9);
            prop_assert_eq!(delta_e_2000(p, p), 0.0);
            if (l1, a1, b1) != (l2, a2, b2) {
                prop_assert!(pq > 0.0);
            }
        }
    }
}
