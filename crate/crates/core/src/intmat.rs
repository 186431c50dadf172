//! Small dense integer matrices with exact arithmetic.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A square integer matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Empty);
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::NotSquare { rows: dim, row, len: r.len() });
            }
            entries.extend_from_slice(r);
        }
        Ok(Self { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        Self { dim, entries }
    }

    pub fn scalar(dim: usize, s: i64) -> Self {
        let mut m = Self::identity(dim);
        m.entries.iter_mut().for_each(|e| *e *= s);
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut entries = vec![0; d * d];
        for i in 0..d {
            for j in 0..d {
                entries[j * d + i] = self.get(i, j);
            }
        }
        Self { dim: d, entries }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.dim;
        assert_eq!(d, other.dim);
        let mut entries = vec![0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..d {
                    entries[i * d + j] += a * other.get(k, j);
                }
            }
        }
        Self { dim: d, entries }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.dim);
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

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        let d = self.dim;
        (0..d)
            .map(|i| (0..d).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Writes `A·v` into `out` without allocating.
    #[inline]
    pub fn mul_vec_into(&self, v: &[i64], out: &mut [i64]) {
        let d = self.dim;
        for (i, o) in out.iter_mut().enumerate().take(d) {
            let row = &self.entries[i * d..(i + 1) * d];
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j) as f64)
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Self {
        let d = self.dim;
        let mut entries = Vec::with_capacity((d - 1) * (d - 1));
        for i in (0..d).filter(|&i| i != skip_row) {
            for j in (0..d).filter(|&j| j != skip_col) {
                entries.push(self.get(i, j));
            }
        }
        Self { dim: d - 1, entries }
    }

    /// Exact determinant (fraction-free Bareiss elimination).
    pub fn det(&self) -> i128 {
        let d = self.dim;
        let mut m: Vec<i128> = self.entries.iter().map(|&x| x as i128).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..d {
            if m[k * d + k] == 0 {
                let Some(p) = (k + 1..d).find(|&r| m[r * d + k] != 0) else {
                    return 0;
                };
                for j in 0..d {
                    m.swap(k * d + j, p * d + j);
                }
                sign = -sign;
            }
            for i in k + 1..d {
                for j in k + 1..d {
                    m[i * d + j] = (m[i * d + j] * m[k * d + k] - m[i * d + k] * m[k * d + j]) / prev;
                }
            }
            prev = m[k * d + k];
        }
        sign * m[d * d - 1]
    }

    /// Exact adjugate, `adj(A)·A = det(A)·I`.
    pub fn adjugate(&self) -> Vec<Vec<i128>> {
        let d = self.dim;
        if d == 1 {
            return vec![vec![1]];
        }
        let mut adj = vec![vec![0i128; d]; d];
        for i in 0..d {
            for j in 0..d {
                let cof = self.minor(i, j).det();
                let s = if (i + j) % 2 == 0 { 1 } else { -1 };
                adj[j][i] = s * cof;
            }
        }
        adj
    }

    /// Coefficients `c₀..c_d` of `det(λI − A)` (Faddeev–LeVerrier, exact).
    /// Returns `None` on overflow.
    pub fn char_poly(&self) -> Option<Vec<i128>> {
        let d = self.dim;
        let a: Vec<i128> = self.entries.iter().map(|&x| x as i128).collect();
        let mut coeffs = vec![0i128; d + 1];
        coeffs[d] = 1;
        let mut mk = vec![0i128; d * d];
        for k in 1..=d {
            // M_k = A·M_{k-1} + c_{d-k+1}·I
            let mut next = vec![0i128; d * d];
            for i in 0..d {
                for j in 0..d {
                    let mut s: i128 = 0;
                    for l in 0..d {
                        s = s.checked_add(a[i * d + l].checked_mul(mk[l * d + j])?)?;
                    }
                    next[i * d + j] = s;
                }
                next[i * d + i] = next[i * d + i].checked_add(coeffs[d - k + 1])?;
            }
            mk = next;
            let mut tr: i128 = 0;
            for i in 0..d {
                for l in 0..d {
                    tr = tr.checked_add(a[i * d + l].checked_mul(mk[l * d + i])?)?;
                }
            }
            coeffs[d - k] = -tr / k as i128;
        }
        Some(coeffs)
    }
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        m.rows()
    }
}

impl std::fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.entries.chunks(self.dim).enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, x) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// All roots of `Σ aₖ zᵏ` lie strictly inside the unit disk (Schur–Cohn
/// recursion on exact integers). `None` on overflow.
pub(crate) fn roots_inside_unit_disk(poly: &[i128]) -> Option<bool> {
    let mut p: Vec<i128> = poly.to_vec();
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
    loop {
        let n = p.len() - 1;
        if n == 0 {
            return Some(p[0] != 0);
        }
        let (lead, constant) = (p[n], p[0]);
        if lead.checked_abs()? <= constant.checked_abs()? {
            return Some(false);
        }
        // (a_n p(z) − a_0 p*(z)) / z
        let mut next = Vec::with_capacity(n);
        for k in 1..=n {
            let v = lead.checked_mul(p[k])?.checked_sub(constant.checked_mul(p[n - k])?)?;
            next.push(v);
        }
        let g = next.iter().fold(0i128, |g, &x| gcd(g, x));
        if g > 1 {
            next.iter_mut().for_each(|x| *x /= g);
        }
        p = next;
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn determinant_and_adjugate() {
        let a = m(&[&[0, -2], &[1, 1]]);
        assert_eq!(a.det(), 2);
        assert_eq!(a.adjugate(), vec![vec![1, 2], vec![-1, 0]]);
        let b = m(&[&[2, 1, 0], &[0, 0, 3], &[1, 4, 1]]);
        assert_eq!(b.det(), 2 * (0 - 12) - 1 * (0 - 3));
        let adj = b.adjugate();
        for i in 0..3 {
            for j in 0..3 {
                let s: i128 = (0..3).map(|k| adj[i][k] * b.get(k, j) as i128).sum();
                assert_eq!(s, if i == j { b.det() } else { 0 });
            }
        }
        assert_eq!(m(&[&[1, 2], &[2, 4]]).det(), 0);
    }

    #[test]
    fn characteristic_polynomial() {
        // λ² − tr λ + det
        assert_eq!(m(&[&[1, -2], &[1, 0]]).char_poly().unwrap(), vec![2, -1, 1]);
        assert_eq!(m(&[&[3]]).char_poly().unwrap(), vec![-3, 1]);
        let c = IntMatrix::scalar(3, 2).char_poly().unwrap();
        assert_eq!(c, vec![-8, 12, -6, 1]);
    }

    #[test]
    fn schur_cohn() {
        // (z − 1/2)(z + 1/3) → 6z² − z − 1
        assert_eq!(roots_inside_unit_disk(&[-1, -1, 6]), Some(true));
        // z − 1 has a root on the circle
        assert_eq!(roots_inside_unit_disk(&[-1, 1]), Some(false));
        // 2z² + 1: |roots| = 1/√2
        assert_eq!(roots_inside_unit_disk(&[1, 0, 2]), Some(true));
        // z² + 4z + 1: one root outside
        assert_eq!(roots_inside_unit_disk(&[1, 4, 1]), Some(false));
    }

    #[test]
    fn powers() {
        let a = m(&[&[1, -1], &[1, 1]]);
        assert_eq!(a.pow(2), m(&[&[0, -2], &[2, 0]]));
        assert_eq!(a.pow(8), IntMatrix::scalar(2, 16));
        assert_eq!(a.pow(0), IntMatrix::identity(2));
    }
}
