//! Values of `φᵐ` on the lattices `A⁻ᴶℤᵈ`.
//!
//! Level 0 holds `φ` at the integers, the eigenvector of the transition
//! matrix `T[j,k] = c_{Aj−k}` for eigenvalue 1. Each further level follows
//! from the refinement relation in index space:
//!
//! ```text
//! v_{J+1}[j] = Σ_k c_k · v_J[j − Aᴶk]
//! ```

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::digits::BoxIter;
use crate::format::sig17;
use crate::intmat::IntMatrix;
use crate::matana::DilationMatrix;
use crate::trigpoly::{mask_of_order, refinement_coefficients, RefinementCoefficients, TrigPoly};
use crate::{Error, Result};

/// Tolerance for the support computation.
pub const SUPPORT_TOL: f64 = 1e-9;
/// Distance from 1 within which a transition eigenvalue counts as 1.
const UNIT_EIGEN_TOL: f64 = 1e-7;
/// Other eigenvalues may reach modulus `1 + DOMINANCE_TOL`.
const DOMINANCE_TOL: f64 = 1e-8;
const MAX_SUPPORT_TERMS: usize = 100_000;

/// Axis-aligned integer box containing `supp φ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl SupportBox {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, k: &[i64]) -> bool {
        k.iter().zip(&self.lo).zip(&self.hi).all(|((x, l), h)| l <= x && x <= h)
    }

    pub fn integer_points(&self) -> Vec<Vec<i64>> {
        BoxIter::new(&self.lo, &self.hi).collect()
    }

    fn corners(&self) -> Vec<Vec<i64>> {
        let d = self.dim();
        (0..1usize << d)
            .map(|mask| (0..d).map(|i| if mask >> i & 1 == 1 { self.hi[i] } else { self.lo[i] }).collect())
            .collect()
    }
}

/// Bounds of `supp φ` for `φ(x) = Σ c_k φ(Ax − k)`.
///
/// The support is contained in `K = Σ_{j≥1} A⁻ʲ·hull(supp c)`, the fixed
/// point of `Ω ↦ A⁻¹(Ω ⊕ hull(supp c))`. Its extent along `e_i` is the
/// support function `Σ_j max_k ((A⁻ᵀ)ʲe_i)·k`, summed until the terms drop
/// below `tol`. The real bounds are rounded outward to integers.
pub fn support_box(a: &DilationMatrix, c: &RefinementCoefficients, tol: f64) -> Result<SupportBox> {
    let d = a.dim();
    if c.is_empty() {
        return Err(Error::InvalidArgument("refinement coefficients are empty".into()));
    }
    if c.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: c.dim() });
    }
    let (lo, hi) = support_extent(a, c, tol)?;
    let slack = (100.0 * tol).max(1e-7);
    Ok(SupportBox {
        lo: lo.iter().map(|x| (x + slack).floor() as i64).collect(),
        hi: hi.iter().map(|x| (x - slack).ceil() as i64).collect(),
    })
}

/// Real lower and upper bounds of `K` along each axis.
pub fn support_extent(a: &DilationMatrix, c: &RefinementCoefficients, tol: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = a.dim();
    let bt = a.inverse_transpose();
    let ks: Vec<Vec<f64>> = c.iter().map(|(k, _)| k.iter().map(|&x| x as f64).collect()).collect();
    let reach: f64 = ks.iter().map(|k| k.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut lo = vec![0.0; d];
    let mut hi = vec![0.0; d];
    for i in 0..d {
        let mut v = nalgebra::DVector::<f64>::zeros(d);
        v[i] = 1.0;
        let mut converged = reach == 0.0;
        for _ in 0..MAX_SUPPORT_TERMS {
            if converged {
                break;
            }
            v = &bt * v;
            let (mut mn, mut mx) = (f64::INFINITY, f64::NEG_INFINITY);
            for k in &ks {
                let s: f64 = k.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
                mn = mn.min(s);
                mx = mx.max(s);
            }
            lo[i] += mn;
            hi[i] += mx;
            converged = v.amax() * reach < 1e-3 * tol;
        }
        if !converged {
            return Err(Error::NoConvergence);
        }
    }
    Ok((lo, hi))
}

/// Dense values on the integer points `j` of an index box, standing for the
/// points `x = A⁻ᴶj`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeGrid {
    matrix: IntMatrix,
    q: u64,
    level: u32,
    power: IntMatrix,
    support: SupportBox,
    lo: Vec<i64>,
    shape: Vec<usize>,
    values: Vec<f64>,
}

impl LatticeGrid {
    /// A zero grid at `level` covering `A^level·support`.
    pub fn zeros(a: &DilationMatrix, level: u32, support: SupportBox) -> Self {
        let power = a.matrix().pow(level);
        let d = a.dim();
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        for corner in support.corners() {
            let img = power.mul_vec(&corner);
            for i in 0..d {
                lo[i] = lo[i].min(img[i]);
                hi[i] = hi[i].max(img[i]);
            }
        }
        let shape: Vec<usize> = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as usize).collect();
        let n = shape.iter().product();
        Self {
            matrix: a.matrix().clone(),
            q: a.q(),
            level,
            power,
            support,
            lo,
            shape,
            values: vec![0.0; n],
        }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// `Aᴶ`.
    pub fn power(&self) -> &IntMatrix {
        &self.power
    }

    /// Real-space box the grid covers.
    pub fn support(&self) -> &SupportBox {
        &self.support
    }

    /// Lower corner of the index box.
    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    /// Upper corner of the index box.
    pub fn hi(&self) -> Vec<i64> {
        self.lo.iter().zip(&self.shape).map(|(l, &s)| l + s as i64 - 1).collect()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values in lexicographic order of `j`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// `|det A⁻ᴶ| = q^{-J}`.
    pub fn quadrature_weight(&self) -> f64 {
        (self.q as f64).powi(-(self.level as i32))
    }

    /// `Σ values·q^{-J}`, the quadrature of `∫φ`.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.quadrature_weight()
    }

    pub fn flat_index(&self, j: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for ((&x, &l), &s) in j.iter().zip(&self.lo).zip(&self.shape) {
            let off = x - l;
            if off < 0 || off as usize >= s {
                return None;
            }
            idx = idx * s + off as usize;
        }
        Some(idx)
    }

    pub fn index_at(&self, mut flat: usize) -> Vec<i64> {
        let d = self.dim();
        let mut j = vec![0i64; d];
        for c in (0..d).rev() {
            j[c] = self.lo[c] + (flat % self.shape[c]) as i64;
            flat /= self.shape[c];
        }
        j
    }

    /// Value at index `j`, zero outside the box.
    pub fn get(&self, j: &[i64]) -> f64 {
        self.flat_index(j).map_or(0.0, |i| self.values[i])
    }

    /// `x = A⁻ᴶj`, computed exactly as the adjugate image divided by `det Aᴶ`.
    pub fn point(&self, j: &[i64]) -> Vec<f64> {
        let adj = self.power.adjugate();
        let det = self.power.det() as f64;
        adj.iter()
            .map(|row| row.iter().zip(j).map(|(&a, &b)| a as f64 * b as f64).sum::<f64>() / det)
            .collect()
    }

    /// `(j, value)` in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<i64>, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| (self.index_at(i), v))
    }

    /// `φ(k)` for an integer point `k`, read at index `Aᴶk`.
    pub fn value_at_integer(&self, k: &[i64]) -> f64 {
        self.get(&self.power.mul_vec(k))
    }

    /// `q^{-J} Σ_j v_j e^{-iξ·A⁻ᴶj}`, the Riemann sum for `φ̂(ξ)`.
    pub fn fourier_sum(&self, xi: &[f64]) -> Complex64 {
        let adj = self.power.adjugate();
        let det = self.power.det() as f64;
        // ξ·A⁻ᴶj = (A⁻ᵀᴶξ)·j
        let d = self.dim();
        let w: Vec<f64> = (0..d)
            .map(|c| (0..d).map(|r| adj[r][c] as f64 * xi[r]).sum::<f64>() / det)
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &v) in self.values.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let j = self.index_at(i);
            let phase: f64 = j.iter().zip(&w).map(|(&a, b)| a as f64 * b).sum();
            acc += Complex64::from_polar(v, -phase);
        }
        acc * self.quadrature_weight()
    }

    /// Approximate value at an arbitrary point by multilinear interpolation in
    /// index coordinates. Exact only on the lattice.
    pub fn interpolate(&self, x: &[f64]) -> f64 {
        let pf = self.power.to_f64();
        let y = crate::matana::apply(&pf, x);
        let d = self.dim();
        let base: Vec<i64> = y.iter().map(|v| v.floor() as i64).collect();
        let frac: Vec<f64> = y.iter().zip(&base).map(|(v, &b)| v - b as f64).collect();
        let mut acc = 0.0;
        for mask in 0..1usize << d {
            let mut weight = 1.0;
            let mut j = base.clone();
            for c in 0..d {
                if mask >> c & 1 == 1 {
                    j[c] += 1;
                    weight *= frac[c];
                } else {
                    weight *= 1.0 - frac[c];
                }
            }
            if weight != 0.0 {
                acc += weight * self.get(&j);
            }
        }
        acc
    }

    /// `max |self − other|` over the union of both boxes.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.level != other.level || self.matrix != other.matrix {
            return Err(Error::GridMismatch("grids live on different lattices".into()));
        }
        let d = self.dim();
        let ohi = other.hi();
        let shi = self.hi();
        let lo: Vec<i64> = (0..d).map(|i| self.lo[i].min(other.lo[i])).collect();
        let hi: Vec<i64> = (0..d).map(|i| shi[i].max(ohi[i])).collect();
        Ok(BoxIter::new(&lo, &hi).map(|j| (self.get(&j) - other.get(&j)).abs()).fold(0.0, f64::max))
    }

    /// Copy with every value multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// Same lattice, index box widened to `[lo, hi]` (zero filled); values
    /// outside the new box are dropped.
    pub fn with_index_box(&self, lo: Vec<i64>, hi: Vec<i64>, support: SupportBox) -> Self {
        let shape: Vec<usize> = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1).max(0) as usize).collect();
        let mut out = Self {
            matrix: self.matrix.clone(),
            q: self.q,
            level: self.level,
            power: self.power.clone(),
            support,
            lo,
            shape,
            values: Vec::new(),
        };
        out.values = (0..out.shape.iter().product()).map(|i| self.get(&out.index_at(i))).collect();
        out
    }

    /// `Σ_k w(k)·φ(x − k)` at `x = A⁻ᴶj`, summing every shift that meets the
    /// grid's support.
    pub fn shift_sum<W: Fn(&[i64]) -> f64>(&self, j: &[i64], w: W) -> f64 {
        let d = self.dim();
        let x = self.point(j);
        let lo: Vec<i64> = x.iter().zip(&self.support.hi).map(|(x, &h)| (x - h as f64).floor() as i64 - 1).collect();
        let hi: Vec<i64> = x.iter().zip(&self.support.lo).map(|(x, &l)| (x - l as f64).ceil() as i64 + 1).collect();
        let mut k = lo.clone();
        let mut shift = vec![0i64; d];
        let mut idx = vec![0i64; d];
        let mut acc = 0.0;
        loop {
            self.power.mul_vec_into(&k, &mut shift);
            for c in 0..d {
                idx[c] = j[c] - shift[c];
            }
            if let Some(i) = self.flat_index(&idx) {
                let v = self.values[i];
                if v != 0.0 {
                    acc += w(&k) * v;
                }
            }
            // odometer over the box lo..=hi
            let mut c = d;
            loop {
                if c == 0 {
                    return acc;
                }
                c -= 1;
                if k[c] < hi[c] {
                    k[c] += 1;
                    break;
                }
                k[c] = lo[c];
            }
        }
    }

    /// CSV dump: a `# A=..., J=..., d=...` header, then `x_1,...,x_d,value`
    /// rows in lexicographic order of `j`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# A={}, J={}, d={}\n", self.matrix, self.level, self.dim());
        let adj = self.power.adjugate();
        let det = self.power.det() as f64;
        for (i, &v) in self.values.iter().enumerate() {
            let j = self.index_at(i);
            for row in &adj {
                let x = row.iter().zip(&j).map(|(&a, &b)| a as f64 * b as f64).sum::<f64>() / det;
                out.push_str(&sig17(x));
                out.push(',');
            }
            out.push_str(&sig17(v));
            out.push('\n');
        }
        out
    }
}

/// `T[j,k] = c_{Aj−k}` on the integer points of `support`.
pub fn transition_matrix(a: &DilationMatrix, c: &RefinementCoefficients, support: &SupportBox) -> DMatrix<f64> {
    let pts = support.integer_points();
    let n = pts.len();
    let mut t = DMatrix::zeros(n, n);
    for (r, j) in pts.iter().enumerate() {
        let aj = a.matrix().mul_vec(j);
        for (col, k) in pts.iter().enumerate() {
            let idx: Vec<i64> = aj.iter().zip(k).map(|(x, y)| x - y).collect();
            t[(r, col)] = c.get(&idx);
        }
    }
    t
}

/// Eigenvalue diagnostics of the transition matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionSpectrum {
    /// Eigenvalues within `1e-7` of 1.
    pub multiplicity_of_one: usize,
    /// Largest modulus among the remaining eigenvalues.
    pub other_radius: f64,
}

impl TransitionSpectrum {
    pub fn is_simple_dominant(&self) -> bool {
        self.multiplicity_of_one == 1 && self.other_radius <= 1.0 + DOMINANCE_TOL
    }
}

pub fn transition_spectrum(t: &DMatrix<f64>) -> Result<TransitionSpectrum> {
    let reduced = balance(deflate(t));
    let n = reduced.nrows();
    let mut multiplicity_of_one = 0;
    let mut other_radius: f64 = 0.0;
    if n > 0 {
        let eigenvalues = schur_eigenvalues(&reduced)
            .ok_or_else(|| Error::NumericalBreakdown("Schur iteration did not converge".into()))?;
        for l in eigenvalues.iter() {
            if (l - Complex64::new(1.0, 0.0)).norm() < UNIT_EIGEN_TOL {
                multiplicity_of_one += 1;
            } else {
                other_radius = other_radius.max(l.norm());
            }
        }
    }
    Ok(TransitionSpectrum { multiplicity_of_one, other_radius })
}

/// Eigenvalues from a real Schur form. The QR iteration without exceptional
/// shifts can stall on the highly non-normal transition matrices, so it is
/// retried on the transpose and with looser deflation thresholds.
fn schur_eigenvalues(m: &DMatrix<f64>) -> Option<Vec<Complex64>> {
    let n = m.nrows();
    for eps in [f64::EPSILON, 1e-15, 1e-14, 1e-13, 1e-12, 1e-11] {
        for candidate in [m.clone(), m.transpose()] {
            if let Some(schur) = nalgebra::Schur::try_new(candidate, eps, 100 * n) {
                return Some(schur.complex_eigenvalues().iter().copied().collect());
            }
        }
    }
    None
}

/// Drops indices whose row or column vanishes; each contributes only the
/// eigenvalue 0, as the determinant expands along that line.
fn deflate(t: &DMatrix<f64>) -> DMatrix<f64> {
    let mut keep: Vec<usize> = (0..t.nrows()).collect();
    loop {
        let before = keep.len();
        let current = keep.clone();
        keep.retain(|&i| {
            let row = current.iter().any(|&j| t[(i, j)] != 0.0);
            let col = current.iter().any(|&j| t[(j, i)] != 0.0);
            row && col
        });
        if keep.len() == before {
            break;
        }
    }
    DMatrix::from_fn(keep.len(), keep.len(), |r, c| t[(keep[r], keep[c])])
}

/// Parlett–Reinsch diagonal similarity with powers of two, equalizing row and
/// column norms before the eigenvalue iteration.
fn balance(mut m: DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let c: f64 = (0..n).filter(|&j| j != i).map(|j| m[(j, i)].abs()).sum();
            let r: f64 = (0..n).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let (mut cc, mut rr) = (c, r);
            while cc < rr / 2.0 {
                cc *= 2.0;
                rr /= 2.0;
                f *= 2.0;
            }
            while cc >= rr * 2.0 {
                cc /= 2.0;
                rr *= 2.0;
                f /= 2.0;
            }
            if (c + r) * 0.95 > cc + rr {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
    m
}

/// `φ` at the integer points of `support`, as a level-0 grid normalized by
/// `Σ_k φ(k) = 1`.
///
/// Fails with [`Error::NonSimpleEigenvalue`] unless 1 is a simple eigenvalue
/// of the transition matrix that dominates all others; otherwise the cascade
/// does not converge to a continuous function and the eigenvector carries no
/// pointwise meaning.
pub fn integer_values(a: &DilationMatrix, c: &RefinementCoefficients, support: &SupportBox) -> Result<LatticeGrid> {
    let t = transition_matrix(a, c, support);
    let spectrum = transition_spectrum(&t)?;
    if !spectrum.is_simple_dominant() {
        return Err(Error::NonSimpleEigenvalue {
            multiplicity: spectrum.multiplicity_of_one,
            other_radius: spectrum.other_radius,
        });
    }
    let n = t.nrows();
    let shifted = &t - DMatrix::<f64>::identity(n, n);
    let svd = shifted.clone().svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::NumericalBreakdown("SVD failed".into()))?;
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::NumericalBreakdown("empty transition matrix".into()))?;
    let svd_vec = DVector::from_iterator(n, v_t.row(imin).iter().copied());
    let s: f64 = svd_vec.sum();
    if s.abs() < 1e-12 {
        return Err(Error::NumericalBreakdown("eigenvector has zero sum".into()));
    }
    let svd_vec = svd_vec / s;
    // The columns of T sum to one, so the rows of T − I are dependent and
    // any one of them can give way to the normalization Σv = 1. The
    // resulting square system is solved directly, which keeps exact values
    // exact; the SVD vector remains the fallback.
    let mut bordered = shifted.clone();
    bordered.row_mut(0).fill(1.0);
    let mut rhs = DVector::<f64>::zeros(n);
    rhs[0] = 1.0;
    let residual = |v: &DVector<f64>| (&shifted * v).amax();
    let v = match bordered.lu().solve(&rhs) {
        Some(direct) if direct.iter().all(|x| x.is_finite()) && residual(&direct) <= 10.0 * residual(&svd_vec).max(1e-14) => {
            direct
        }
        _ => svd_vec,
    };
    let mut grid = LatticeGrid::zeros(a, 0, support.clone());
    for (k, val) in support.integer_points().iter().zip(&v) {
        let idx = grid.flat_index(k).expect("support point inside its own grid");
        grid.values[idx] = *val;
    }
    Ok(grid)
}

/// One cascade step: level `J` to level `J+1`.
pub fn refine(a: &DilationMatrix, c: &RefinementCoefficients, grid: &LatticeGrid) -> LatticeGrid {
    let mut out = LatticeGrid::zeros(a, grid.level + 1, grid.support.clone());
    let shifts: Vec<(Vec<i64>, f64)> = c.iter().map(|(k, &w)| (grid.power.mul_vec(k), w)).collect();
    let values: Vec<f64> = (0..out.len())
        .into_par_iter()
        .map(|flat| {
            let j = out.index_at(flat);
            let mut idx = vec![0i64; j.len()];
            let mut acc = 0.0;
            for (s, w) in &shifts {
                for c in 0..j.len() {
                    idx[c] = j[c] - s[c];
                }
                let v = grid.get(&idx);
                if v != 0.0 {
                    acc += w * v;
                }
            }
            acc
        })
        .collect();
    out.values = values;
    out
}

/// Runs the cascade for explicit coefficients up to `level`.
pub fn cascade(a: &DilationMatrix, c: &RefinementCoefficients, level: u32) -> Result<LatticeGrid> {
    let support = support_box(a, c, SUPPORT_TOL)?;
    let mut grid = integer_values(a, c, &support)?;
    for _ in 0..level {
        grid = refine(a, c, &grid);
    }
    Ok(grid)
}

/// Samples of `φᵐ` on `A⁻ᴶℤᵈ`, from the coefficients of `m₀ᵐ`.
pub fn sample_phi_m(a: &DilationMatrix, m0: &TrigPoly, m: u32, level: u32) -> Result<LatticeGrid> {
    if m == 0 {
        return Err(Error::InvalidArgument("order m must be positive".into()));
    }
    let c = refinement_coefficients(&mask_of_order(m0, m), a.q())?;
    cascade(a, &c, level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use std::collections::BTreeMap;

    fn hat() -> (DilationMatrix, RefinementCoefficients) {
        let c = BTreeMap::from([(vec![-1], 0.5), (vec![0], 1.0), (vec![1], 0.5)]);
        (fixtures::univariate(), RefinementCoefficients::from_map(1, 2, c))
    }

    #[test]
    fn hat_support_and_values() {
        let (a, c) = hat();
        let sb = support_box(&a, &c, SUPPORT_TOL).unwrap();
        assert_eq!(sb, SupportBox { lo: vec![-1], hi: vec![1] });
        let g0 = integer_values(&a, &c, &sb).unwrap();
        assert!((g0.get(&[0]) - 1.0).abs() < 1e-14);
        assert!(g0.get(&[1]).abs() < 1e-14 && g0.get(&[-1]).abs() < 1e-14);
        let g1 = refine(&a, &c, &g0);
        assert!((g1.get(&[1]) - 0.5).abs() < 1e-14);
        assert_eq!(g1.point(&[1]), vec![0.5]);
        assert!((g1.mass() - g0.mass()).abs() < 1e-14);
    }

    #[test]
    fn delta_support() {
        let c = RefinementCoefficients::from_map(2, 2, BTreeMap::from([(vec![0, 0], 2.0)]));
        let sb = support_box(&fixtures::a1(), &c, SUPPORT_TOL).unwrap();
        assert_eq!(sb, SupportBox { lo: vec![0, 0], hi: vec![0, 0] });
    }

    #[test]
    fn csv_layout() {
        let (a, c) = hat();
        let g = cascade(&a, &c, 1).unwrap();
        let csv = g.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("# A=[[2]], J=1, d=1"));
        assert_eq!(lines.next(), Some("-1.0000000000000000e0,0"));
        assert_eq!(csv.lines().count(), g.len() + 1);
    }

    #[test]
    fn interpolation_is_exact_on_lattice() {
        let (a, c) = hat();
        let g = cascade(&a, &c, 2).unwrap();
        assert!((g.interpolate(&[0.25]) - 0.75).abs() < 1e-14);
        assert!((g.interpolate(&[0.125]) - 0.875).abs() < 1e-14);
    }
}
