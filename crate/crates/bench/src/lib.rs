//! Shared setup for the benchmarks.

use esf_core::digits::{digit_set, DigitSet};
use esf_core::matana::solve_quadratic_form;
use esf_core::spectral::SpectralProfile;
use esf_core::trigpoly::build_g;
use esf_core::{fixtures, DilationMatrix, TrigPoly};

/// Inputs of the mask construction, precomputed.
pub struct MaskInputs {
    pub label: &'static str,
    pub a: DilationMatrix,
    pub g: TrigPoly,
    pub digits_t: DigitSet,
}

pub fn mask_inputs() -> Vec<MaskInputs> {
    fixtures::planar()
        .into_iter()
        .map(|(label, a)| {
            let g = build_g(&solve_quadratic_form(&a).unwrap()).unwrap();
            let digits_t = digit_set(a.transpose().matrix());
            MaskInputs { label, a, g, digits_t }
        })
        .collect()
}

/// Labelled profiles of order `m` for the planar examples.
pub fn profiles(m: u32) -> Vec<(&'static str, SpectralProfile)> {
    fixtures::planar()
        .into_iter()
        .map(|(label, a)| (label, SpectralProfile::new(&a, m).unwrap()))
        .collect()
}

/// Deterministic frequencies spread over `[−4π, 4π]²`.
pub fn frequencies(n: usize) -> Vec<[f64; 2]> {
    let golden = 0.618_033_988_749_895;
    (0..n)
        .map(|i| {
            let t = i as f64;
            let u = (t * golden).fract();
            let v = (t * golden * golden).fract();
            [std::f64::consts::PI * (8.0 * u - 4.0), std::f64::consts::PI * (8.0 * v - 4.0)]
        })
        .collect()
}
