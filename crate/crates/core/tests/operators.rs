use esf_core::fixtures;
use esf_core::matana::QuadraticForm;
use esf_core::operators::{apply_to_polynomial, build_stencil, green_combination, verify_operator_relation, GreenSpectrum};
use esf_core::spectral::SpectralProfile;
use esf_core::trigpoly::build_g;
use esf_core::Polynomial;

#[test]
fn stencil_symbol_is_g() {
    for (label, a) in fixtures::planar() {
        let p = SpectralProfile::new(&a, 1).unwrap();
        let st = build_stencil(p.quadratic_form());
        let g = build_g(p.quadratic_form()).unwrap();
        assert!(st.symbol().max_coeff_diff(&g) < 1e-15, "{label}");
        assert!(st.sum().abs() < 1e-15);
    }
}

#[test]
fn stencil_acts_as_minus_the_form_on_quadratics() {
    // central differences are exact on quadratics: 𝒢p = −Σ q_ij ∂_i∂_j p
    let q = QuadraticForm::from_rows(&[vec![2.0, -0.5], vec![-0.5, 1.0]]).unwrap();
    let st = build_stencil(&q);
    for e in [vec![2, 0], vec![1, 1], vec![0, 2], vec![1, 0]] {
        let p = Polynomial::monomial(e.clone());
        let got = apply_to_polynomial(&st, &p);
        let expect = p.apply_form(&q).scale(-1.0);
        assert!(got.sub(&expect).is_zero(), "{e:?}");
    }
    // harmonic for Q² = I: x² − y² is annihilated
    let lap = build_stencil(&QuadraticForm::identity(2));
    let h = Polynomial::from_terms(2, [(vec![2, 0], 1.0), (vec![0, 2], -1.0)]);
    assert!(apply_to_polynomial(&lap, &h).is_zero());
}

#[test]
fn operator_relation_holds_in_fourier_space() {
    let points: Vec<Vec<f64>> = (1..30).map(|i| vec![0.41 * i as f64, -0.23 * i as f64 + 0.1]).collect();
    for (label, a) in [("A1", fixtures::a1()), ("A4", fixtures::a4())] {
        let p = SpectralProfile::new(&a, 3).unwrap();
        for k in 1..3 {
            let r = verify_operator_relation(&p, k, &points).unwrap();
            assert!(r < 1e-8, "{label} k={k}: {r}");
        }
        assert!(verify_operator_relation(&p, 0, &points).is_err());
        assert!(verify_operator_relation(&p, 3, &points).is_err());
    }
}

#[test]
fn green_expansion_reproduces_phi_hat() {
    // φ̂ᵐ = Gᵐ·(M/P)ᵐ
    let p = SpectralProfile::new(&fixtures::a3(), 2).unwrap();
    let rho = GreenSpectrum::new(&p);
    let w = green_combination(&p);
    for xi in [[0.3, 0.4], [2.0, -1.0], [5.5, 7.1]] {
        let lhs = p.phi_hat(&xi);
        let rhs = w.eval_re(&xi) * rho.eval(&xi);
        assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1e-3), "{xi:?}");
    }
}
