//! The difference operator `𝒢 = −P(𝒟₁,…,𝒟_d)`, the `Δ♯` symbol and the
//! Green spectrum.
//!
//! `𝒢` has symbol `G`; `Δ♯` has symbol `P/M` and is only handled on the
//! Fourier side, since its inverse symbol `1/M` is not a polynomial.

use std::collections::BTreeMap;

use crate::cascade::{LatticeGrid, SupportBox};
use crate::matana::QuadraticForm;
use crate::polynomial::Polynomial;
use crate::spectral::{SpectralOptions, SpectralProfile};
use crate::trigpoly::TrigPoly;
use crate::{Error, Result};

/// `(𝒢f)(x) = Σ_n taps_n·f(x − n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceStencil {
    dim: usize,
    taps: BTreeMap<Vec<i64>, f64>,
}

impl DifferenceStencil {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn taps(&self) -> impl Iterator<Item = (&Vec<i64>, &f64)> {
        self.taps.iter()
    }

    pub fn get(&self, n: &[i64]) -> f64 {
        self.taps.get(n).copied().unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.taps.values().sum()
    }

    /// `Σ taps_n e^{-in·ξ}`.
    pub fn symbol(&self) -> TrigPoly {
        TrigPoly::from_real_terms(self.dim, self.taps.iter().map(|(k, v)| (k.clone(), *v)))
    }

    fn add(&mut self, n: Vec<i64>, w: f64) {
        let e = self.taps.entry(n.clone()).or_insert(0.0);
        *e += w;
        if *e == 0.0 {
            self.taps.remove(&n);
        }
    }

    /// Offsets' bounding box.
    fn reach(&self) -> (Vec<i64>, Vec<i64>) {
        let mut lo = vec![0; self.dim];
        let mut hi = vec![0; self.dim];
        for n in self.taps.keys() {
            for i in 0..self.dim {
                lo[i] = lo[i].min(n[i]);
                hi[i] = hi[i].max(n[i]);
            }
        }
        (lo, hi)
    }

    /// `{"1,0": weight, ...}`.
    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .taps
            .iter()
            .map(|(k, v)| {
                let key = k.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
                (key, crate::format::json_number(*v))
            })
            .collect();
        serde_json::Value::Object(map)
    }
}

/// Builds `𝒢f = −Σ q_ii 𝒟_i²f − 2Σ_{i<j} q_ij 𝒟_ij f` with the central
/// differences
///
/// ```text
/// 𝒟_i² f = f(·−e_i) − 2f + f(·+e_i)
/// 𝒟_ij f = ¼(f(·−e_i−e_j) + f(·+e_i+e_j) − f(·−e_i+e_j) − f(·+e_i−e_j))
/// ```
///
/// `𝒟_ij` is its own four-point stencil and never collapses to `𝒟_j²`.
pub fn build_stencil(q2: &QuadraticForm) -> DifferenceStencil {
    let d = q2.dim();
    let mut st = DifferenceStencil { dim: d, taps: BTreeMap::new() };
    let offset = |pairs: &[(usize, i64)]| {
        let mut n = vec![0i64; d];
        for &(i, s) in pairs {
            n[i] += s;
        }
        n
    };
    for i in 0..d {
        let w = q2.entry(i, i);
        // f(x − n) with n = ±e_i
        st.add(offset(&[(i, 1)]), -w);
        st.add(offset(&[(i, -1)]), -w);
        st.add(vec![0; d], 2.0 * w);
        for j in i + 1..d {
            let w = -2.0 * q2.entry(i, j) * 0.25;
            st.add(offset(&[(i, 1), (j, 1)]), w);
            st.add(offset(&[(i, -1), (j, -1)]), w);
            st.add(offset(&[(i, 1), (j, -1)]), -w);
            st.add(offset(&[(i, -1), (j, 1)]), -w);
        }
    }
    st
}

/// `𝒢ᵏ` applied to lattice values. Integer offsets `n` act as index shifts
/// by `Aᴶn`; the grid is treated as zero outside its box and the output box
/// grows by the stencil reach at each application.
pub fn apply_stencil(st: &DifferenceStencil, grid: &LatticeGrid, k: u32) -> Result<LatticeGrid> {
    if st.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), got: st.dim() });
    }
    let (rlo, rhi) = st.reach();
    let mut cur = grid.clone();
    for _ in 0..k {
        let support = SupportBox {
            lo: cur.support().lo.iter().zip(&rlo).map(|(a, b)| a + b).collect(),
            hi: cur.support().hi.iter().zip(&rhi).map(|(a, b)| a + b).collect(),
        };
        // image of the reach box under Aᴶ
        let d = cur.dim();
        let mut lo = cur.lo().to_vec();
        let mut hi = cur.hi();
        for mask in 0..1usize << d {
            let corner: Vec<i64> = (0..d).map(|i| if mask >> i & 1 == 1 { rhi[i] } else { rlo[i] }).collect();
            let img = cur.power().mul_vec(&corner);
            for i in 0..d {
                lo[i] = lo[i].min(cur.lo()[i] + img[i]);
                hi[i] = hi[i].max(cur.hi()[i] + img[i]);
            }
        }
        let shifts: Vec<(Vec<i64>, f64)> = st.taps().map(|(n, &w)| (cur.power().mul_vec(n), w)).collect();
        let mut out = cur.with_index_box(lo, hi, support);
        let values: Vec<f64> = (0..out.len())
            .map(|flat| {
                let j = out.index_at(flat);
                shifts
                    .iter()
                    .map(|(s, w)| {
                        let idx: Vec<i64> = j.iter().zip(s).map(|(a, b)| a - b).collect();
                        w * cur.get(&idx)
                    })
                    .sum()
            })
            .collect();
        out.values_mut().copy_from_slice(&values);
        cur = out;
    }
    Ok(cur)
}

/// `Σ_n taps_n·p(x − n)` as an exact polynomial.
pub fn apply_to_polynomial(st: &DifferenceStencil, p: &Polynomial) -> Polynomial {
    st.taps().fold(Polynomial::zero(p.dim()), |acc, (n, &w)| {
        let t: Vec<f64> = n.iter().map(|&x| x as f64).collect();
        acc.add(&p.translate(&t).scale(w))
    })
}

/// Symbol `ξ ↦ P(ξ)/M(ξ)` of `Δ♯`.
pub struct DeltaSharpSymbol<'a> {
    profile: &'a SpectralProfile,
}

impl<'a> DeltaSharpSymbol<'a> {
    pub fn new(profile: &'a SpectralProfile) -> Self {
        Self { profile }
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        self.profile.p(xi) / self.profile.big_m(xi)
    }
}

/// `ρ̂(ξ) = (M(ξ)/P(ξ))ᵐ`, the Fourier transform of the Green function of
/// `(Δ♯)ᵐ`. It has a pole of order `2m` at the origin.
pub struct GreenSpectrum<'a> {
    profile: &'a SpectralProfile,
    m: u32,
}

impl<'a> GreenSpectrum<'a> {
    pub fn new(profile: &'a SpectralProfile) -> Self {
        Self { profile, m: profile.order() }
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        (self.profile.big_m(xi) / self.profile.p(xi)).powi(self.m as i32)
    }
}

/// Weights `w_k` with `φᵐ = Σ_k w_k ρ(· − k)`: the coefficients of `Gᵐ`.
pub fn green_combination(profile: &SpectralProfile) -> TrigPoly {
    profile.g().pow(profile.order())
}

/// Max relative residual of `(P/M)ᵏ·φ̂ᵐ = Gᵏ·φ̂^{m−k}` over `points`, with
/// `φ̂^{m−k}` taken from an independently truncated profile of order `m − k`.
pub fn verify_operator_relation(profile: &SpectralProfile, k: u32, points: &[Vec<f64>]) -> Result<f64> {
    let m = profile.order();
    if k == 0 || k >= m {
        return Err(Error::InvalidArgument(format!("need 1 ≤ k < m, got k = {k}, m = {m}")));
    }
    let lower = SpectralProfile::from_parts(
        profile.matrix().clone(),
        profile.quadratic_form().clone(),
        profile.g().clone(),
        profile.mask().clone(),
        m - k,
        SpectralOptions { grid_n: 8, refine_iters: 0, ..profile.options() },
    )?;
    let delta = DeltaSharpSymbol::new(profile);
    let mut worst: f64 = 0.0;
    for xi in points {
        let lhs = delta.eval(xi).powi(k as i32) * profile.phi_hat(xi);
        let rhs = profile.g_value(xi).powi(k as i32) * lower.phi_hat(xi);
        let scale = lhs.abs().max(rhs.abs());
        if scale > 0.0 {
            worst = worst.max((lhs - rhs).abs() / scale);
        }
    }
    Ok(worst)
}
