use esf_core::fixtures;
use esf_core::spectral::SpectralProfile;
use esf_core::trigpoly::refinement_coefficients;
use esf_core::TrigPoly;
use num_rational::Rational64;
use proptest::prelude::*;

fn poly() -> impl Strategy<Value = TrigPoly> {
    prop::collection::vec(((-2i64..=2, -2i64..=2), -1.0f64..1.0), 1..6)
        .prop_map(|terms| TrigPoly::from_real_terms(2, terms.into_iter().map(|((a, b), c)| (vec![a, b], c))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_evaluates_pointwise(p in poly(), q in poly(), x in -4.0f64..4.0, y in -4.0f64..4.0) {
        let xi = [x, y];
        let lhs = p.mul(&q).eval(&xi);
        let rhs = p.eval(&xi) * q.eval(&xi);
        prop_assert!((lhs - rhs).norm() < 1e-11);
    }

    #[test]
    fn power_is_repeated_product(p in poly(), n in 0u32..4) {
        let mut acc = TrigPoly::constant(2, 1.0);
        for _ in 0..n {
            acc = acc.mul(&p);
        }
        prop_assert!(p.pow(n).max_coeff_diff(&acc) < 1e-12);
    }

    #[test]
    fn rational_shift_matches_evaluation(p in poly(), a in -5i64..5, b in 1i64..6, x in -3.0f64..3.0) {
        let t = [Rational64::new(a, b), Rational64::new(1, b)];
        let shifted = p.shift_argument(&t);
        let tau = [2.0 * std::f64::consts::PI * a as f64 / b as f64, 2.0 * std::f64::consts::PI / b as f64];
        let direct = p.eval(&[x + tau[0], 0.5 + tau[1]]);
        prop_assert!((shifted.eval(&[x, 0.5]) - direct).norm() < 1e-11);
    }
}

#[test]
fn masks_are_real_and_even_with_coefficient_sum_q() {
    for (label, a) in fixtures::planar() {
        for m in 1..=3 {
            let p = SpectralProfile::new(&a, m).unwrap();
            let mask = p.mask_of_order();
            assert!(mask.is_real(1e-14) && mask.is_even(1e-14), "{label} m={m}");
            let c = refinement_coefficients(&mask, a.q()).unwrap();
            assert!((c.sum() - a.q() as f64).abs() < 1e-12, "{label} m={m}");
        }
    }
}
