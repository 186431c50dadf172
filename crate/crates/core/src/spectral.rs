//! Fourier-domain analysis.
//!
//! With `B = A⁻ᵀ`,
//!
//! ```text
//! μ(ξ)  = q^{2/d}·m₀(Bξ)·G(Bξ)/G(ξ)
//! M(ξ)  = Π_{j≥0} μ(Bʲξ)
//! φ̂ᵐ(ξ) = (G(ξ)/P(ξ))ᵐ·M(ξ)ᵐ
//! ```
//!
//! `μ` is 2π-periodic with `μ(2πk) = 1`, so queries are first reduced to the
//! fundamental cell. There `G` is evaluated in sine form, which keeps full
//! relative accuracy at the removable singularity.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::digits::{digit_set, BoxIter};
use crate::format::json_number;
use crate::matana::{apply, solve_quadratic_form, DilationMatrix, QuadraticForm};
use crate::trigpoly::{build_g, build_mask, g_sine_form, mask_of_order, TrigPoly};
use crate::{Error, Result};

/// Slack applied toward "fail" in the Riesz comparison.
pub const RIESZ_SLACK: f64 = 1e-12;
/// Below this value of `P` the analytic limits `μ = 1` and `G/P = 1` are
/// returned; the true values differ from them by `O(P)`.
const LIMIT_P: f64 = 1e-28;
const MAX_PRODUCT_TERMS: usize = 4000;

/// Tunables for profile construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralOptions {
    /// Truncation tolerance for the infinite product `M`.
    pub tol: f64,
    /// Points per axis in the `𝓑` grid scan.
    pub grid_n: usize,
    /// Rounds of local refinement after the grid scan.
    pub refine_iters: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self { tol: 1e-9, grid_n: 128, refine_iters: 60 }
    }
}

/// Evaluators for `μ`, `M` and `φ̂ᵐ` together with the `𝓑` estimate and
/// the derived Riesz verdict.
#[derive(Debug, Clone)]
pub struct SpectralProfile {
    a: DilationMatrix,
    q2: QuadraticForm,
    g: TrigPoly,
    m0: TrigPoly,
    m: u32,
    b: DMatrix<f64>,
    form_scale: f64,
    tail_constant: f64,
    limit_radius: f64,
    options: SpectralOptions,
    b_estimate: f64,
}

/// The `spectrum` report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RieszVerdict {
    pub riesz_ok: bool,
    pub threshold: f64,
    pub decay_exponent: f64,
}

impl SpectralProfile {
    /// Builds `Q²`, `G` and `m₀` for `a` and analyses order `m` with default
    /// options.
    pub fn new(a: &DilationMatrix, m: u32) -> Result<Self> {
        Self::with_options(a, m, SpectralOptions::default())
    }

    pub fn with_options(a: &DilationMatrix, m: u32, options: SpectralOptions) -> Result<Self> {
        let q2 = solve_quadratic_form(a)?;
        let g = build_g(&q2)?;
        let m0 = build_mask(a, &g, &digit_set(&a.matrix().transpose()))?;
        Self::from_parts(a.clone(), q2, g, m0, m, options)
    }

    /// Assembles a profile from explicit ingredients. No consistency between
    /// `m0` and `g` is assumed, which allows synthetic masks.
    pub fn from_parts(
        a: DilationMatrix,
        q2: QuadraticForm,
        g: TrigPoly,
        m0: TrigPoly,
        m: u32,
        options: SpectralOptions,
    ) -> Result<Self> {
        let d = a.dim();
        if m == 0 {
            return Err(Error::InvalidArgument("order m must be positive".into()));
        }
        if !(options.tol > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        if options.grid_n < 2 {
            return Err(Error::InvalidArgument("grid_n must be at least 2".into()));
        }
        for dim in [q2.dim(), g.dim(), m0.dim()] {
            if dim != d {
                return Err(Error::DimensionMismatch { expected: d, got: dim });
            }
        }
        let (lmin, _) = q2.eigen_range();
        let mut profile = Self {
            b: a.inverse_transpose(),
            form_scale: a.form_scale(),
            a,
            q2,
            g,
            m0,
            m,
            tail_constant: 0.0,
            // the ellipsoid P ≤ λ_min·π² lies inside [−π,π]ᵈ
            limit_radius: lmin * PI * PI,
            options,
            b_estimate: f64::NAN,
        };
        profile.tail_constant = profile.calibrate_tail();
        profile.b_estimate = profile.estimate_b(options.grid_n, options.refine_iters);
        Ok(profile)
    }

    pub fn matrix(&self) -> &DilationMatrix {
        &self.a
    }

    pub fn quadratic_form(&self) -> &QuadraticForm {
        &self.q2
    }

    pub fn g(&self) -> &TrigPoly {
        &self.g
    }

    /// The mask `m₀` of `φ = φ¹`.
    pub fn mask(&self) -> &TrigPoly {
        &self.m0
    }

    /// `m₀ᵐ`, the mask of `φᵐ`.
    pub fn mask_of_order(&self) -> TrigPoly {
        mask_of_order(&self.m0, self.m)
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn options(&self) -> SpectralOptions {
        self.options
    }

    pub fn tol(&self) -> f64 {
        self.options.tol
    }

    /// The calibrated constant `C` in `|μ(ξ) − 1| ≤ C·P(ξ)`.
    pub fn tail_constant(&self) -> f64 {
        self.tail_constant
    }

    pub fn b_estimate(&self) -> f64 {
        self.b_estimate
    }

    /// `P(ξ) = ξᵀQ²ξ`.
    pub fn p(&self, xi: &[f64]) -> f64 {
        self.q2.eval(xi)
    }

    /// `G` in sine form, after periodic reduction so that it vanishes
    /// exactly at representable lattice points.
    pub fn g_value(&self, xi: &[f64]) -> f64 {
        g_sine_form(&self.q2, &reduce_mod_2pi(xi))
    }

    /// `A⁻ᵀξ`.
    pub fn contract(&self, xi: &[f64]) -> Vec<f64> {
        apply(&self.b, xi)
    }

    /// `μ(ξ)`, using 2π-periodicity and the analytic value at the lattice.
    pub fn mu(&self, xi: &[f64]) -> f64 {
        let eta = reduce_mod_2pi(xi);
        if self.p(&eta) < LIMIT_P {
            return 1.0;
        }
        self.mu_direct(&eta)
    }

    /// `μ` straight from its defining quotient, without periodic reduction
    /// or limits. Undefined on `2πℤᵈ`.
    pub fn mu_direct(&self, xi: &[f64]) -> f64 {
        let bxi = self.contract(xi);
        self.form_scale * self.m0.eval_re(&bxi) * self.g_value(&bxi) / self.g_value(xi)
    }

    /// `M(ξ)` truncated at the profile tolerance.
    pub fn big_m(&self, xi: &[f64]) -> f64 {
        self.big_m_tol(xi, self.options.tol)
    }

    /// `M(ξ) = Π_{j≥0} μ(Bʲξ)`, truncated once the factors have entered the
    /// calibrated region and the geometric tail bound
    /// `C·P(B^{J+1}ξ)/(1 − q^{-2/d})` is below `tol`.
    pub fn big_m_tol(&self, xi: &[f64], tol: f64) -> f64 {
        let ratio = 1.0 / self.form_scale;
        let mut x = xi.to_vec();
        let mut p = self.p(&x);
        let mut prod = 1.0;
        for _ in 0..MAX_PRODUCT_TERMS {
            if p <= self.limit_radius && self.tail_constant * p / (1.0 - ratio) < tol {
                break;
            }
            prod *= self.mu(&x);
            x = self.contract(&x);
            p *= ratio;
        }
        prod
    }

    /// `G(ξ)/P(ξ)` with the limit `1` at the origin.
    pub fn g_over_p(&self, xi: &[f64]) -> f64 {
        let p = self.p(xi);
        if p < LIMIT_P {
            return 1.0;
        }
        self.g_value(xi) / p
    }

    /// `φ̂ᵐ(ξ)` at the profile tolerance.
    pub fn phi_hat(&self, xi: &[f64]) -> f64 {
        self.phi_hat_tol(xi, self.options.tol)
    }

    pub fn phi_hat_tol(&self, xi: &[f64], tol: f64) -> f64 {
        (self.g_over_p(xi) * self.big_m_tol(xi, tol)).powi(self.m as i32)
    }

    /// `φ̂ᵏ` for another order `k`, sharing this profile's `μ`.
    pub fn phi_hat_of_order(&self, xi: &[f64], k: u32) -> f64 {
        (self.g_over_p(xi) * self.big_m(xi)).powi(k as i32)
    }

    /// `sup μ` over `[−π,π]ᵈ`: a scan of the periodic grid with nodes
    /// `−π + 2πi/n`, followed by pattern-search refinement from the best
    /// nodes. For `n | n'` the scanned node sets are nested, so the estimate
    /// does not decrease when the grid is refined that way.
    pub fn estimate_b(&self, grid_n: usize, refine_iters: usize) -> f64 {
        let d = self.dim();
        let n = grid_n.max(2);
        let h = 2.0 * PI / n as f64;
        let total = n.pow(d as u32);
        let node = |idx: usize| -> Vec<f64> {
            let mut rest = idx;
            let mut x = vec![0.0; d];
            for c in (0..d).rev() {
                x[c] = -PI + h * (rest % n) as f64;
                rest /= n;
            }
            x
        };
        let mut scored: Vec<(f64, usize)> =
            (0..total).into_par_iter().map(|i| (self.mu(&node(i)), i)).collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut best = scored.first().map(|s| s.0).unwrap_or(1.0).max(1.0);
        let starts: Vec<Vec<f64>> = scored.iter().take(8).map(|&(_, i)| node(i)).collect();
        let refined = starts
            .par_iter()
            .map(|x0| self.pattern_search(x0.clone(), h, refine_iters))
            .reduce(|| f64::NEG_INFINITY, f64::max);
        best = best.max(refined);
        best
    }

    fn pattern_search(&self, mut x: Vec<f64>, step0: f64, iters: usize) -> f64 {
        let d = x.len();
        let mut fx = self.mu(&x);
        let mut step = step0;
        for _ in 0..iters {
            let mut improved = false;
            for c in 0..d {
                for dir in [-1.0, 1.0] {
                    let mut y = x.clone();
                    y[c] += dir * step;
                    let fy = self.mu(&y);
                    if fy > fx {
                        x = y;
                        fx = fy;
                        improved = true;
                    }
                }
            }
            if d > 1 {
                // diagonal moves help along ridges
                for signs in 0..(1usize << d) {
                    let y: Vec<f64> = x
                        .iter()
                        .enumerate()
                        .map(|(c, v)| v + if signs >> c & 1 == 1 { step } else { -step })
                        .collect();
                    let fy = self.mu(&y);
                    if fy > fx {
                        x = y;
                        fx = fy;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
                if step < 1e-13 {
                    break;
                }
            }
        }
        fx
    }

    /// Riesz verdict from `𝓑`: `threshold = q^{2/d − 1/(2m)}`,
    /// `riesz_ok = 𝓑 < threshold − RIESZ_SLACK`,
    /// `decay_exponent = m(d·log_q 𝓑 − 2)`.
    pub fn riesz_verdict(&self) -> RieszVerdict {
        let d = self.dim() as f64;
        let q = self.a.q() as f64;
        let m = self.m as f64;
        let threshold = q.powf(2.0 / d - 1.0 / (2.0 * m));
        RieszVerdict {
            riesz_ok: self.b_estimate < threshold - RIESZ_SLACK,
            threshold,
            decay_exponent: m * (d * self.b_estimate.ln() / q.ln() - 2.0),
        }
    }

    /// `{B, threshold, riesz_ok, decay_exponent, grid_n, tol}`.
    pub fn spectrum_json(&self) -> serde_json::Value {
        let v = self.riesz_verdict();
        serde_json::json!({
            "B": json_number(self.b_estimate),
            "threshold": json_number(v.threshold),
            "riesz_ok": v.riesz_ok,
            "decay_exponent": json_number(v.decay_exponent),
            "grid_n": self.options.grid_n,
            "tol": json_number(self.options.tol),
        })
    }

    /// `max |μ(ξ) − 1|/P(ξ)` over shells of the ellipsoid `P ≤ λ_min π²`
    /// (which contains the unit shell when that fits).
    fn calibrate_tail(&self) -> f64 {
        let d = self.dim();
        let q_inv = match self.q2.sqrt().ok().and_then(|q| q.try_inverse()) {
            Some(m) => m,
            None => return f64::INFINITY,
        };
        let directions = sphere_directions(d, 24);
        let mut radii: Vec<f64> =
            [1.0, 0.7, 0.5, 0.3, 0.1, 0.03, 0.01, 1e-3].iter().map(|f| f * self.limit_radius).collect();
        if self.limit_radius >= 1.0 {
            radii.push(1.0);
        }
        let mut c: f64 = 0.0;
        for r in radii {
            for u in &directions {
                let xi = apply(&q_inv, &u.iter().map(|v| v * r.sqrt()).collect::<Vec<_>>());
                let p = self.p(&xi);
                if p > 0.0 {
                    c = c.max((self.mu_direct(&xi) - 1.0).abs() / p);
                }
            }
        }
        // allow for directions between the samples
        1.5 * c + 1e-14
    }
}

/// `ξ − 2πk` with `k` the nearest lattice point.
pub fn reduce_mod_2pi(xi: &[f64]) -> Vec<f64> {
    xi.iter()
        .map(|&x| {
            let k = (x / (2.0 * PI)).round();
            x - 2.0 * PI * k
        })
        .collect()
}

/// Deterministic unit vectors: a uniform angle grid for `d = 2`, `±` axes and
/// normalized grid points otherwise.
fn sphere_directions(d: usize, per_axis: usize) -> Vec<Vec<f64>> {
    match d {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..4 * per_axis)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / (4 * per_axis) as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            let k = 3i64;
            BoxIter::new(&vec![-k; d], &vec![k; d])
                .filter(|v| v.iter().any(|&x| x != 0))
                .map(|v| {
                    let n = v.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
                    v.iter().map(|&x| x as f64 / n).collect()
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_abs_diff_eq;

    #[test]
    fn lattice_values() {
        let p = SpectralProfile::new(&fixtures::a3(), 1).unwrap();
        assert_eq!(p.mu(&[2.0 * PI * 3.0, -2.0 * PI * 2.0]), 1.0);
        assert_eq!(p.big_m(&[0.0, 0.0]), 1.0);
        assert_eq!(p.phi_hat(&[0.0, 0.0]), 1.0);
        assert_eq!(p.phi_hat(&[2.0 * PI, 0.0]), 0.0);
    }

    #[test]
    fn univariate_mu_is_one() {
        let p = SpectralProfile::new(&fixtures::univariate(), 1).unwrap();
        assert_abs_diff_eq!(p.mu(&[1.234]), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.big_m(&[7.5]), 1.0, epsilon = 1e-13);
        let xi: f64 = 2.2;
        let expect = ((xi / 2.0).sin() / (xi / 2.0)).powi(2);
        assert_abs_diff_eq!(p.phi_hat(&[xi]), expect, epsilon = 1e-13);
    }

    #[test]
    fn periodic_reduction_matches_direct_formula() {
        let p = SpectralProfile::new(&fixtures::a2(), 1).unwrap();
        for xi in [[0.7, -2.1], [5.0, 9.0], [-11.0, 3.3]] {
            assert_abs_diff_eq!(p.mu(&xi), p.mu_direct(&xi), epsilon = 1e-12);
        }
    }

    #[test]
    fn near_lattice_is_continuous() {
        let p = SpectralProfile::new(&fixtures::a4(), 1).unwrap();
        let c = p.tail_constant();
        for t in [1e-3, 1e-6, 1e-9, 1e-12] {
            let xi = [2.0 * PI + t, -t * 0.5];
            assert!((p.mu(&xi) - 1.0).abs() <= c * p.p(&[t, -t * 0.5]) + 1e-15);
        }
    }

    #[test]
    fn riesz_verdicts() {
        let v = SpectralProfile::new(&fixtures::a1(), 1).unwrap().riesz_verdict();
        assert!(v.riesz_ok);
        assert_abs_diff_eq!(v.decay_exponent, -2.0, epsilon = 1e-9);
        assert!(!SpectralProfile::new(&fixtures::a2(), 1).unwrap().riesz_verdict().riesz_ok);
    }

    #[test]
    fn estimate_is_monotone_under_nesting() {
        let p = SpectralProfile::new(&fixtures::a3(), 1).unwrap();
        let coarse = p.estimate_b(32, 0);
        let fine = p.estimate_b(64, 0);
        assert!(fine >= coarse);
        assert!(p.b_estimate() >= 1.0);
    }

    #[test]
    fn rejects_bad_options() {
        let a = fixtures::a1();
        assert!(SpectralProfile::new(&a, 0).is_err());
        let bad = SpectralOptions { tol: 0.0, ..Default::default() };
        assert!(SpectralProfile::with_options(&a, 1, bad).is_err());
    }
}
