//! Sparse multivariate trigonometric polynomials `p(ξ) = Σ c_k e^{-ik·ξ}` and
//! the synthesis of `G`, the mask `m₀` and refinement coefficients.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;

use crate::digits::{rational_string, DigitSet};
use crate::format::json_number;
use crate::matana::{is_positive_definite, DilationMatrix, QuadraticForm};
use crate::{Error, Result};

/// Tolerance for realness and evenness at module boundaries.
pub const REAL_TOL: f64 = 1e-12;

/// Finite map from integer frequencies to complex coefficients. Zero
/// coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    dim: usize,
    coeffs: BTreeMap<Vec<i64>, Complex64>,
}

/// Neumaier-compensated accumulator.
#[derive(Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    fn value(self) -> f64 {
        self.sum + self.carry
    }
}

#[inline]
fn dot(k: &[i64], xi: &[f64]) -> f64 {
    k.iter().zip(xi).map(|(&a, &b)| a as f64 * b).sum()
}

impl TrigPoly {
    pub fn zero(dim: usize) -> Self {
        Self { dim, coeffs: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], Complex64::new(c, 0.0));
        p
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i64>, Complex64)>,
    {
        let mut p = Self::zero(dim);
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    pub fn from_real_terms<I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i64>, f64)>,
    {
        Self::from_terms(dim, terms.into_iter().map(|(k, c)| (k, Complex64::new(c, 0.0))))
    }

    /// Adds `c·e^{-ik·ξ}`.
    pub fn add_term(&mut self, k: Vec<i64>, c: Complex64) {
        assert_eq!(k.len(), self.dim, "frequency dimension mismatch");
        let slot = self.coeffs.entry(k).or_insert_with(Complex64::zero);
        *slot += c;
        if slot.is_zero() {
            let k = self.coeffs.iter().find(|(_, v)| v.is_zero()).map(|(k, _)| k.clone());
            if let Some(k) = k {
                self.coeffs.remove(&k);
            }
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_else(Complex64::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Complex64)> {
        self.coeffs.iter()
    }

    /// `p(ξ) = Σ c_k e^{-ik·ξ}` with compensated summation.
    pub fn eval(&self, xi: &[f64]) -> Complex64 {
        assert_eq!(xi.len(), self.dim, "dimension mismatch in eval");
        let mut re = Compensated::default();
        let mut im = Compensated::default();
        for (k, c) in &self.coeffs {
            let (s, co) = dot(k, xi).sin_cos();
            // c·(cos − i sin)
            re.add(c.re * co + c.im * s);
            im.add(c.im * co - c.re * s);
        }
        Complex64::new(re.value(), im.value())
    }

    /// `Re p(ξ)`.
    pub fn eval_re(&self, xi: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .map(|(k, c)| {
                let (s, co) = dot(k, xi).sin_cos();
                c.re * co + c.im * s
            })
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_terms(self.dim, self.coeffs.iter().map(|(k, c)| (k.clone(), c * s)))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.add_term(k.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Product; coefficient maps convolve.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in mul");
        let mut acc: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        for (k1, c1) in &self.coeffs {
            for (k2, c2) in &other.coeffs {
                let k: Vec<i64> = k1.iter().zip(k2).map(|(a, b)| a + b).collect();
                *acc.entry(k).or_insert_with(Complex64::zero) += c1 * c2;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Self { dim: self.dim, coeffs: acc }
    }

    /// `pᵐ` by repeated squaring.
    pub fn pow(&self, m: u32) -> Self {
        let mut acc = Self::constant(self.dim, 1.0);
        let mut base = self.clone();
        let mut e = m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `ξ ↦ p(ξ + 2πt)`: `c_k ← c_k·e^{-2πi k·t}` with the phase `k·t`
    /// reduced modulo 1 exactly.
    pub fn shift_argument(&self, t: &[Rational64]) -> Self {
        assert_eq!(t.len(), self.dim, "dimension mismatch in shift_argument");
        Self::from_terms(
            self.dim,
            self.coeffs.iter().map(|(k, c)| {
                let phase: Rational64 = k
                    .iter()
                    .zip(t)
                    .map(|(&a, b)| b * Rational64::from_integer(a))
                    .fold(Rational64::zero(), |s, x| s + x);
                let frac = phase - phase.floor();
                let angle = -2.0 * PI * (*frac.numer() as f64) / (*frac.denom() as f64);
                (k.clone(), c * Complex64::from_polar(1.0, angle))
            }),
        )
    }

    /// `c_{-k} = conj(c_k)` for every frequency, within `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|(k, c)| {
            let neg: Vec<i64> = k.iter().map(|x| -x).collect();
            (self.coeff(&neg) - c.conj()).norm() <= tol
        })
    }

    /// `c_{-k} = c_k` for every frequency, within `tol`.
    pub fn is_even(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|(k, c)| {
            let neg: Vec<i64> = k.iter().map(|x| -x).collect();
            (self.coeff(&neg) - c).norm() <= tol
        })
    }

    /// Drops imaginary parts up to `tol` and coefficients whose modulus is at
    /// most `tol`. Fails if a larger imaginary part remains.
    pub fn into_real(self, tol: f64) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (k, c) in self.coeffs {
            if c.im.abs() > tol {
                return Err(Error::NotRealMask(format!("coefficient at {k:?} has imaginary part {:e}", c.im)));
            }
            if c.re.abs() > tol {
                coeffs.insert(k, Complex64::new(c.re, 0.0));
            }
        }
        Ok(Self { dim: self.dim, coeffs })
    }

    /// Largest coefficient-wise difference `max_k |c_k − c'_k|`.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let mut keys: Vec<&Vec<i64>> = self.coeffs.keys().collect();
        keys.extend(other.coeffs.keys());
        keys.into_iter()
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    /// Largest frequency in each coordinate direction.
    pub fn degree(&self) -> Vec<i64> {
        let mut deg = vec![0; self.dim];
        for k in self.coeffs.keys() {
            for (d, &x) in deg.iter_mut().zip(k) {
                *d = (*d).max(x.abs());
            }
        }
        deg
    }

    /// Mask export: `[{"k": [...], "c": re}]`, plus `"im"` when nonzero.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .coeffs
            .iter()
            .map(|(k, c)| {
                let mut obj = serde_json::Map::new();
                obj.insert("k".into(), serde_json::json!(k));
                obj.insert("c".into(), json_number(c.re));
                if c.im != 0.0 {
                    obj.insert("im".into(), json_number(c.im));
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(terms)
    }

    /// Human-readable cosine/sine form, pairing `±k`:
    /// `c₀ + Σ 2Re(c_k) cos(k·ξ) + 2Im(c_k) sin(k·ξ)`.
    pub fn cosine_form(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        let zero = vec![0i64; self.dim];
        let c0 = self.coeff(&zero);
        if c0.norm() > 0.0 {
            parts.push(trim(c0.re).to_string());
        }
        for (k, c) in &self.coeffs {
            // canonical representative: first nonzero entry positive
            let Some(first) = k.iter().find(|&&x| x != 0) else { continue };
            if *first < 0 {
                continue;
            }
            let neg: Vec<i64> = k.iter().map(|x| -x).collect();
            let cn = self.coeff(&neg);
            // c e^{-ikξ} + c' e^{ikξ} = (c + c') cos(kξ) − i(c − c') sin(kξ)
            let cos_part = (c + cn).re;
            let sin_part = (-(c - cn) * Complex64::i()).re;
            let arg = angle_text(k);
            if cos_part.abs() > 1e-15 {
                parts.push(format!("{} cos({arg})", trim(cos_part)));
            }
            if sin_part.abs() > 1e-15 {
                parts.push(format!("{} sin({arg})", trim(sin_part)));
            }
        }
        if parts.is_empty() {
            return "0".into();
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

fn trim(x: f64) -> String {
    let s = format!("{:.12}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

fn angle_text(k: &[i64]) -> String {
    let mut out = String::new();
    for (i, &x) in k.iter().enumerate() {
        if x == 0 {
            continue;
        }
        let sign = if x < 0 { "-" } else if out.is_empty() { "" } else { "+" };
        let mag = if x.abs() == 1 { String::new() } else { x.abs().to_string() };
        out.push_str(&format!("{sign}{mag}ξ{}", i + 1));
    }
    out
}

/// `G(ξ) = 4Σ q_ii sin²(ξ_i/2) + 2Σ_{i<j} q_ij sin ξ_i sin ξ_j`, evaluated in
/// sine form. Unlike the exponential form this keeps full relative accuracy
/// near the zeros `2πℤᵈ`.
pub fn g_sine_form(q2: &QuadraticForm, xi: &[f64]) -> f64 {
    let d = q2.dim();
    let mut s = 0.0;
    for i in 0..d {
        let h = (0.5 * xi[i]).sin();
        s += 4.0 * q2.entry(i, i) * h * h;
        for j in i + 1..d {
            s += 2.0 * q2.entry(i, j) * xi[i].sin() * xi[j].sin();
        }
    }
    s
}

/// `G` in exponential form. Its Taylor expansion at the origin starts with
/// `P(ξ)`.
pub fn build_g(q2: &QuadraticForm) -> Result<TrigPoly> {
    if !is_positive_definite(q2.matrix()) {
        return Err(Error::NotPositiveDefinite);
    }
    let d = q2.dim();
    let unit = |i: usize, s: i64| {
        let mut k = vec![0i64; d];
        k[i] = s;
        k
    };
    let mut g = TrigPoly::zero(d);
    let re = |x: f64| Complex64::new(x, 0.0);
    for i in 0..d {
        let qii = q2.entry(i, i);
        // 2q(1 − cos ξ)
        g.add_term(vec![0; d], re(2.0 * qii));
        g.add_term(unit(i, 1), re(-qii));
        g.add_term(unit(i, -1), re(-qii));
        for j in i + 1..d {
            let qij = q2.entry(i, j);
            if qij == 0.0 {
                continue;
            }
            // q(cos(ξi − ξj) − cos(ξi + ξj))
            let mut k = vec![0i64; d];
            k[i] = 1;
            k[j] = -1;
            g.add_term(k.clone(), re(0.5 * qij));
            g.add_term(k.iter().map(|x| -x).collect(), re(0.5 * qij));
            k[j] = 1;
            g.add_term(k.clone(), re(-0.5 * qij));
            g.add_term(k.iter().map(|x| -x).collect(), re(-0.5 * qij));
        }
    }
    Ok(g)
}

/// `m₀(ξ) = Π_{s∈𝒮(Aᵀ)\0} G(ξ + 2πs) / Π_{s∈𝒮(Aᵀ)\0} G(2πs)`.
pub fn build_mask(a: &DilationMatrix, g: &TrigPoly, digits_t: &DigitSet) -> Result<TrigPoly> {
    let d = a.dim();
    if g.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: g.dim() });
    }
    if digits_t.matrix() != &a.matrix().transpose() {
        return Err(Error::InvalidArgument("digit set must belong to Aᵀ".into()));
    }
    let mut numerator = TrigPoly::constant(d, 1.0);
    let mut denominator = 1.0;
    for s in digits_t.nonzero_fractions() {
        let point: Vec<f64> =
            s.iter().map(|r| 2.0 * PI * (*r.numer() as f64) / (*r.denom() as f64)).collect();
        let value = g.eval(&point);
        if value.norm() < REAL_TOL {
            return Err(Error::MaskPoleAtDigit {
                digit: format!("({})", s.iter().map(rational_string).collect::<Vec<_>>().join(", ")),
            });
        }
        denominator *= value.re;
        numerator = numerator.mul(&g.shift_argument(s));
    }
    let mask = numerator.scale(1.0 / denominator);
    let tol = REAL_TOL * mask.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max).max(1.0);
    mask.into_real(tol)
}

/// The mask of `φᵐ`, `m₀ᵐ`.
pub fn mask_of_order(m0: &TrigPoly, m: u32) -> TrigPoly {
    m0.pow(m)
}

/// Weights of `φ(x) = Σ_k c_k φ(Ax − k)`, `c_k = q·(coefficient of m₀ at k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementCoefficients {
    dim: usize,
    q: u64,
    #[serde(serialize_with = "serialize_coeffs")]
    c: BTreeMap<Vec<i64>, f64>,
}

fn serialize_coeffs<S: serde::Serializer>(c: &BTreeMap<Vec<i64>, f64>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(c.len()))?;
    for (k, v) in c {
        seq.serialize_element(&serde_json::json!({"k": k, "c": json_number(*v)}))?;
    }
    seq.end()
}

impl RefinementCoefficients {
    pub fn from_map(dim: usize, q: u64, c: BTreeMap<Vec<i64>, f64>) -> Self {
        Self { dim, q, c }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn get(&self, k: &[i64]) -> f64 {
        self.c.get(k).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, &f64)> {
        self.c.iter()
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.c.values().sum()
    }

    /// Weights in the `|det A|^{1/2}`-normalized convention, `h_k = q^{-1/2}c_k`.
    pub fn h(&self) -> BTreeMap<Vec<i64>, f64> {
        let s = (self.q as f64).sqrt();
        self.c.iter().map(|(k, v)| (k.clone(), v / s)).collect()
    }

    pub fn min_coeff(&self) -> f64 {
        self.c.values().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn refinement_coefficients(m0: &TrigPoly, q: u64) -> Result<RefinementCoefficients> {
    if !m0.is_real(REAL_TOL) {
        return Err(Error::NotRealMask("coefficients are not conjugate symmetric".into()));
    }
    let at_zero = m0.eval(&vec![0.0; m0.dim()]);
    if (at_zero - 1.0).norm() > REAL_TOL {
        return Err(Error::NotRealMask(format!("m₀(0) = {at_zero}, expected 1")));
    }
    let c = m0
        .terms()
        .filter(|(_, v)| v.re != 0.0)
        .map(|(k, v)| (k.clone(), v.re * q as f64))
        .collect();
    Ok(RefinementCoefficients { dim: m0.dim(), q, c })
}
