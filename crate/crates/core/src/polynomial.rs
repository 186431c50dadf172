//! Real multivariate polynomials in monomial form.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::matana::QuadraticForm;

/// `Σ a_k x^k` over multi-indices `k ∈ ℤᵈ_{≥0}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::from_terms(dim, [(vec![0; dim], c)])
    }

    pub fn monomial(exponent: Vec<u32>) -> Self {
        let dim = exponent.len();
        Self::from_terms(dim, [(exponent, 1.0)])
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        let mut p = Self::zero(dim);
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    pub fn add_term(&mut self, k: Vec<u32>, c: f64) {
        assert_eq!(k.len(), self.dim, "exponent dimension mismatch");
        let entry = self.terms.entry(k.clone()).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&k);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &f64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, k: &[u32]) -> f64 {
        self.terms.get(k).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `|k|` over the stored terms; `0` for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.iter().sum()).max().unwrap_or(0)
    }

    /// Total degree ignoring coefficients of modulus at most `tol`.
    pub fn effective_degree(&self, tol: f64) -> Option<u32> {
        self.terms
            .iter()
            .filter(|(_, c)| c.abs() > tol)
            .map(|(k, _)| k.iter().sum())
            .max()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "dimension mismatch in eval");
        self.terms
            .iter()
            .map(|(k, c)| c * k.iter().zip(x).map(|(&e, &xi)| xi.powi(e as i32)).product::<f64>())
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_terms(self.dim, self.terms.iter().map(|(k, c)| (k.clone(), c * s)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                out.add_term(k1.iter().zip(k2).map(|(a, b)| a + b).collect(), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(self.dim, 1.0), |acc, _| acc.mul(self))
    }

    /// `∂p/∂x_i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (k, c) in &self.terms {
            if k[i] > 0 {
                let mut k2 = k.clone();
                k2[i] -= 1;
                out.add_term(k2, c * k[i] as f64);
            }
        }
        out
    }

    /// `x ↦ p(x − t)`, expanded exactly in the monomial basis.
    pub fn translate(&self, t: &[f64]) -> Self {
        let mut out = Self::zero(self.dim);
        for (k, c) in &self.terms {
            // Π_i (x_i − t_i)^{k_i}
            let mut factor = Self::constant(self.dim, *c);
            for (i, &e) in k.iter().enumerate() {
                let mut unit = vec![0; self.dim];
                unit[i] = 1;
                let lin = Self::from_terms(self.dim, [(unit, 1.0), (vec![0; self.dim], -t[i])]);
                factor = factor.mul(&lin.pow(e));
            }
            out = out.add(&factor);
        }
        out
    }

    /// `P(D)p = Σ_{ij} q_ij ∂_i∂_j p` for the quadratic form `Q²`.
    pub fn apply_form(&self, q2: &QuadraticForm) -> Self {
        let mut out = Self::zero(self.dim);
        for i in 0..self.dim {
            let di = self.derivative(i);
            for j in 0..self.dim {
                out = out.add(&di.derivative(j).scale(q2.entry(i, j)));
            }
        }
        out
    }

    /// The polynomial `P(x) = xᵀQ²x`.
    pub fn quadratic_form(q2: &QuadraticForm) -> Self {
        let d = q2.dim();
        let mut p = Self::zero(d);
        for i in 0..d {
            for j in 0..d {
                let mut k = vec![0; d];
                k[i] += 1;
                k[j] += 1;
                p.add_term(k, q2.entry(i, j));
            }
        }
        p
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(k, c)| serde_json::json!({"k": k, "c": crate::format::json_number(*c)}))
                .collect(),
        )
    }
}

/// All exponents of total degree exactly `degree`, in lexicographic order.
pub fn exponents_of_degree(dim: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(dim: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == dim {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e);
            rec(dim, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if dim == 0 {
        return out;
    }
    rec(dim, degree, &mut Vec::with_capacity(dim), &mut out);
    out.sort();
    out
}

/// All exponents of total degree at most `degree`.
pub fn exponents_up_to(dim: usize, degree: u32) -> Vec<Vec<u32>> {
    (0..=degree).flat_map(|n| exponents_of_degree(dim, n)).collect()
}
