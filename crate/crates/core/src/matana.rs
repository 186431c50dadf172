//! Dilation-matrix analysis: validation, isotropy and the invariant
//! quadratic form.
//!
//! For an isotropic dilation `A` with `q = |det A|` there is a symmetric
//! positive-definite `Q²` with `A·Q²·Aᵀ = q^{2/d}·Q²`. The quadratic form
//! `P(ξ) = ξᵀQ²ξ` then satisfies `P(A⁻ᵀξ) = q^{-2/d}·P(ξ)`, and
//! `A⁻ᵀ = q^{-1/d}·Q⁻¹UQ` with `U` orthogonal.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::intmat::{roots_inside_unit_disk, IntMatrix};
use crate::{Error, Result};

/// Dimensions up to which the expansion test runs on exact integers only.
const EXACT_EIGEN_DIM: usize = 3;
/// Margin used by the floating-point expansion test.
const EIGEN_MARGIN: f64 = 1e-8;
/// Relative singular-value threshold for the invariance null space.
const NULL_SPACE_TOL: f64 = 1e-9;

/// A validated integer dilation matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DilationMatrix {
    matrix: IntMatrix,
    q: u64,
}

impl DilationMatrix {
    #[inline]
    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `|det A|`.
    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    /// `q^{2/d}`, the factor by which `A` scales the invariant form.
    pub fn form_scale(&self) -> f64 {
        (self.q as f64).powf(2.0 / self.dim() as f64)
    }

    pub fn transpose(&self) -> Self {
        Self { matrix: self.matrix.transpose(), q: self.q }
    }

    /// `A⁻ᵀ` in floating point.
    pub fn inverse_transpose(&self) -> DMatrix<f64> {
        inverse_f64(&self.matrix).transpose()
    }

    /// `A⁻¹` in floating point.
    pub fn inverse(&self) -> DMatrix<f64> {
        inverse_f64(&self.matrix)
    }
}

fn inverse_f64(m: &IntMatrix) -> DMatrix<f64> {
    let det = m.det() as f64;
    let adj = m.adjugate();
    let d = m.dim();
    DMatrix::from_fn(d, d, |i, j| adj[i][j] as f64 / det)
}

impl std::fmt::Display for DilationMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.matrix.fmt(f)
    }
}

/// Checks that `m` is nonsingular and that every eigenvalue has modulus
/// strictly greater than one.
pub fn validate_dilation(m: &IntMatrix) -> Result<DilationMatrix> {
    let det = m.det();
    if det == 0 {
        return Err(Error::Singular);
    }
    let q = u64::try_from(det.unsigned_abs())
        .map_err(|_| Error::InvalidArgument("determinant does not fit in u64".into()))?;
    if !is_expanding(m) {
        return Err(Error::NotExpanding);
    }
    Ok(DilationMatrix { matrix: m.clone(), q })
}

fn is_expanding(m: &IntMatrix) -> bool {
    // |λ| > 1 for every eigenvalue of A ⇔ the reversed characteristic
    // polynomial (roots 1/λ) has every root inside the open unit disk.
    if let Some(mut cp) = m.char_poly() {
        cp.reverse();
        if let Some(inside) = roots_inside_unit_disk(&cp) {
            return inside;
        }
    }
    debug_assert!(m.dim() > EXACT_EIGEN_DIM, "exact test overflowed for a small matrix");
    m.to_f64()
        .complex_eigenvalues()
        .iter()
        .all(|l| l.norm() > 1.0 + EIGEN_MARGIN)
}

/// Why a matrix failed the isotropy test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IsotropyFailure {
    /// `X ↦ A·X·Aᵀ − q^{2/d}·X` is injective on symmetric matrices.
    NoInvariantForm,
    /// Invariant forms exist but none is definite.
    IndefiniteForm,
}

impl std::fmt::Display for IsotropyFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NoInvariantForm => f.write_str("no symmetric matrix is invariant"),
            Self::IndefiniteForm => f.write_str("no invariant symmetric matrix is positive definite"),
        }
    }
}

/// Result of the isotropy test. A failure is a value, not an error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsotropyCertificate {
    pub isotropic: bool,
    pub witness: Option<QuadraticForm>,
    pub failure_reason: Option<IsotropyFailure>,
}

/// The symmetric positive-definite `Q²` of `P(ξ) = ξᵀQ²ξ`, normalized so that
/// its last diagonal entry is one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadraticForm {
    #[serde(serialize_with = "serialize_matrix")]
    q2: DMatrix<f64>,
    /// The invariant symmetric matrices form a space of dimension > 1; this
    /// form is the positive-definite element closest to the identity.
    pub degenerate: bool,
}

fn serialize_matrix<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for i in 0..m.nrows() {
        let row: Vec<serde_json::Value> =
            (0..m.ncols()).map(|j| crate::format::json_number(m[(i, j)])).collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

impl QuadraticForm {
    /// Wraps a symmetric matrix, checking positive definiteness. No
    /// normalization is applied.
    pub fn new(q2: DMatrix<f64>) -> Result<Self> {
        if !q2.is_square() {
            return Err(Error::InvalidArgument("Q² must be square".into()));
        }
        let sym = (&q2 - q2.transpose()).abs().max();
        if sym > 1e-12 * q2.abs().max().max(1.0) {
            return Err(Error::InvalidArgument("Q² must be symmetric".into()));
        }
        let q2 = (&q2 + q2.transpose()) * 0.5;
        if !is_positive_definite(&q2) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { q2, degenerate: false })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) || d == 0 {
            return Err(Error::InvalidArgument("Q² rows must form a square matrix".into()));
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    pub fn identity(dim: usize) -> Self {
        Self { q2: DMatrix::identity(dim, dim), degenerate: false }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.q2.nrows()
    }

    #[inline]
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.q2
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.q2[(i, j)]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|i| (0..self.dim()).map(|j| self.q2[(i, j)]).collect()).collect()
    }

    /// `P(ξ) = Σ q_ii ξ_i² + 2 Σ_{i<j} q_ij ξ_i ξ_j`.
    pub fn eval(&self, xi: &[f64]) -> f64 {
        eval_p(self, xi)
    }

    /// Positive-definite square root `Q`.
    pub fn sqrt(&self) -> Result<DMatrix<f64>> {
        let eig = SymmetricEigen::new(self.q2.clone());
        if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
            return Err(Error::NumericalBreakdown("Q² has a nonpositive eigenvalue".into()));
        }
        let root = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
        let q = &eig.eigenvectors * root * eig.eigenvectors.transpose();
        Ok((&q + q.transpose()) * 0.5)
    }

    /// Smallest and largest eigenvalue of `Q²`.
    pub fn eigen_range(&self) -> (f64, f64) {
        let eig = SymmetricEigen::new(self.q2.clone());
        (eig.eigenvalues.min(), eig.eigenvalues.max())
    }
}

/// `P(ξ) = ξᵀQ²ξ` in the expanded form `Σ q_ii ξ_i² + 2Σ_{i<j} q_ij ξ_i ξ_j`.
pub fn eval_p(q2: &QuadraticForm, xi: &[f64]) -> f64 {
    let d = q2.dim();
    assert_eq!(xi.len(), d, "dimension mismatch in eval_p");
    let mut s = 0.0;
    for i in 0..d {
        s += q2.q2[(i, i)] * xi[i] * xi[i];
        for j in i + 1..d {
            s += 2.0 * q2.q2[(i, j)] * xi[i] * xi[j];
        }
    }
    s
}

pub(crate) fn is_positive_definite(m: &DMatrix<f64>) -> bool {
    // Leading principal minors via Cholesky.
    m.clone().cholesky().is_some()
}

/// Orthonormal basis of the symmetric d×d matrices under the Frobenius
/// inner product: `E_ii` and `(E_ij + E_ji)/√2`.
fn symmetric_basis(d: usize) -> Vec<DMatrix<f64>> {
    let mut basis = Vec::with_capacity(d * (d + 1) / 2);
    for i in 0..d {
        for j in i..d {
            let mut e = DMatrix::zeros(d, d);
            if i == j {
                e[(i, i)] = 1.0;
            } else {
                let v = std::f64::consts::FRAC_1_SQRT_2;
                e[(i, j)] = v;
                e[(j, i)] = v;
            }
            basis.push(e);
        }
    }
    basis
}

fn frobenius_dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.component_mul(b).sum()
}

/// Orthonormal basis (in Frobenius coordinates) of the symmetric solutions
/// of `A·X·Aᵀ = q^{2/d}·X`.
fn invariant_forms(a: &DilationMatrix) -> Vec<DMatrix<f64>> {
    let d = a.dim();
    let af = a.matrix().to_f64();
    let s = a.form_scale();
    let basis = symmetric_basis(d);
    let n = basis.len();
    let mut lin = DMatrix::zeros(n, n);
    for (col, e) in basis.iter().enumerate() {
        let image = &af * e * af.transpose() - e * s;
        for (row, f) in basis.iter().enumerate() {
            lin[(row, col)] = frobenius_dot(f, &image);
        }
    }
    let scale = lin.abs().max().max(1.0);
    let svd = lin.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut out = Vec::new();
    for (k, &sv) in svd.singular_values.iter().enumerate() {
        if sv <= NULL_SPACE_TOL * scale {
            let coords = v_t.row(k).transpose();
            let mut x = DMatrix::zeros(d, d);
            for (c, e) in coords.iter().zip(&basis) {
                x += e * *c;
            }
            out.push(x);
        }
    }
    out
}

fn normalize_last_diagonal(x: DMatrix<f64>) -> Option<DMatrix<f64>> {
    let d = x.nrows();
    let last = x[(d - 1, d - 1)];
    if last.abs() < 1e-14 {
        return None;
    }
    let mut y = x / last;
    // Snap rounding noise so exact paper values come out exactly.
    y.iter_mut().for_each(|v| {
        let r = (*v * 1e12).round() / 1e12;
        if (*v - r).abs() < 1e-14 {
            *v = r;
        }
    });
    Some((&y + y.transpose()) * 0.5)
}

/// Decides isotropy by solving the invariance equation on symmetric matrices.
pub fn certify_isotropy(a: &DilationMatrix) -> IsotropyCertificate {
    let forms = invariant_forms(a);
    let fail = |reason| IsotropyCertificate { isotropic: false, witness: None, failure_reason: Some(reason) };
    match forms.len() {
        0 => fail(IsotropyFailure::NoInvariantForm),
        1 => {
            let x = forms.into_iter().next().unwrap();
            match normalize_last_diagonal(x) {
                Some(q2) if is_positive_definite(&q2) => IsotropyCertificate {
                    isotropic: true,
                    witness: Some(QuadraticForm { q2, degenerate: false }),
                    failure_reason: None,
                },
                _ => fail(IsotropyFailure::IndefiniteForm),
            }
        }
        _ => {
            // Orthogonal projection of the identity onto the solution space.
            let d = a.dim();
            let id = DMatrix::<f64>::identity(d, d);
            let mut proj = DMatrix::zeros(d, d);
            for f in &forms {
                proj += f * frobenius_dot(f, &id);
            }
            match normalize_last_diagonal(proj) {
                Some(q2) if is_positive_definite(&q2) => IsotropyCertificate {
                    isotropic: true,
                    witness: Some(QuadraticForm { q2, degenerate: true }),
                    failure_reason: None,
                },
                _ => fail(IsotropyFailure::IndefiniteForm),
            }
        }
    }
}

/// The invariant quadratic form of an isotropic dilation matrix.
pub fn solve_quadratic_form(a: &DilationMatrix) -> Result<QuadraticForm> {
    let cert = certify_isotropy(a);
    match (cert.witness, cert.failure_reason) {
        (Some(q2), _) => Ok(q2),
        (None, reason) => Err(Error::NotIsotropic(
            reason.map(|r| r.to_string()).unwrap_or_else(|| "unknown".into()),
        )),
    }
}

/// `U = q^{1/d}·Q·A⁻ᵀ·Q⁻¹`, orthogonal when `Q²` solves the invariance
/// equation for `A`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthogonalPart {
    #[serde(serialize_with = "serialize_matrix")]
    pub u: DMatrix<f64>,
}

impl OrthogonalPart {
    /// `max |UᵀU − I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let d = self.u.nrows();
        (self.u.transpose() * &self.u - DMatrix::<f64>::identity(d, d)).abs().max()
    }
}

pub fn orthogonal_part(a: &DilationMatrix, q2: &QuadraticForm) -> Result<OrthogonalPart> {
    if q2.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: q2.dim() });
    }
    let q = q2.sqrt()?;
    if !is_positive_definite(&q) {
        return Err(Error::NumericalBreakdown("square root of Q² is not positive definite".into()));
    }
    let q_inv = q
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NumericalBreakdown("Q is singular".into()))?;
    let scale = (a.q() as f64).powf(1.0 / a.dim() as f64);
    let u = (&q * a.inverse_transpose() * q_inv) * scale;
    Ok(OrthogonalPart { u })
}

/// Relative residual `max|A·Q²·Aᵀ − q^{2/d}Q²| / max|Q²|`.
pub fn invariance_residual(a: &DilationMatrix, q2: &QuadraticForm) -> f64 {
    let af = a.matrix().to_f64();
    let lhs = &af * q2.matrix() * af.transpose();
    let rhs = q2.matrix() * a.form_scale();
    (lhs - rhs).abs().max() / q2.matrix().abs().max()
}

/// `A⁻ᵀξ` for a real vector.
pub fn apply(m: &DMatrix<f64>, xi: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(xi)).as_slice().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dil(rows: &[&[i64]]) -> DilationMatrix {
        let m = IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap();
        validate_dilation(&m).unwrap()
    }

    #[test]
    fn validation() {
        let a1 = dil(&[&[1, -1], &[1, 1]]);
        assert_eq!(a1.q(), 2);
        assert_eq!(dil(&[&[2]]).q(), 2);
        let id = IntMatrix::identity(2);
        assert_eq!(validate_dilation(&id), Err(Error::NotExpanding));
        let sing = IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(validate_dilation(&sing), Err(Error::Singular));
        // eigenvalues 3 and 1/... : [[2,1],[1,1]] has λ = (3 ± √5)/2, one < 1
        let m = IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]).unwrap();
        assert_eq!(validate_dilation(&m), Err(Error::NotExpanding));
        // [[1,1],[0,2]]: eigenvalue exactly 1
        let m = IntMatrix::from_rows(&[vec![1, 1], vec![0, 2]]).unwrap();
        assert_eq!(validate_dilation(&m), Err(Error::NotExpanding));
        assert!(validate_dilation(&IntMatrix::scalar(4, 2)).is_ok());
    }

    #[test]
    fn paper_forms() {
        let q2 = solve_quadratic_form(&dil(&[&[0, -2], &[1, 1]])).unwrap();
        assert_eq!(q2.rows(), vec![vec![2.0, -0.5], vec![-0.5, 1.0]]);
        let q3 = solve_quadratic_form(&dil(&[&[1, -2], &[1, 0]])).unwrap();
        assert_eq!(q3.rows(), vec![vec![2.0, 0.5], vec![0.5, 1.0]]);
        let q1 = solve_quadratic_form(&dil(&[&[1, -1], &[1, 1]])).unwrap();
        assert_eq!(q1.rows(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(!q1.degenerate);
        let q4 = solve_quadratic_form(&dil(&[&[2, 0], &[0, 2]])).unwrap();
        assert_eq!(q4.rows(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(q4.degenerate);
        let q = solve_quadratic_form(&dil(&[&[3]])).unwrap();
        assert_eq!(q.rows(), vec![vec![1.0]]);
    }

    #[test]
    fn non_isotropic() {
        let cert = certify_isotropy(&dil(&[&[2, 1], &[0, 2]]));
        assert!(!cert.isotropic);
        assert!(cert.witness.is_none());
        assert!(cert.failure_reason.is_some());
        // distinct real eigenvalues 2 and 3
        let cert = certify_isotropy(&dil(&[&[2, 0], &[0, 3]]));
        assert!(!cert.isotropic);
        assert!(matches!(
            solve_quadratic_form(&dil(&[&[2, 0], &[0, 3]])),
            Err(Error::NotIsotropic(_))
        ));
    }

    #[test]
    fn orthogonal_parts() {
        let a2 = dil(&[&[0, -2], &[1, 1]]);
        let u = orthogonal_part(&a2, &solve_quadratic_form(&a2).unwrap()).unwrap();
        assert!(u.orthogonality_defect() < 1e-10);
        let s8 = 2.0 * 2f64.sqrt();
        assert_abs_diff_eq!(u.u[(0, 0)].abs(), 1.0 / s8, epsilon = 1e-12);
        assert_abs_diff_eq!(u.u[(1, 0)].abs(), 7f64.sqrt() / s8, epsilon = 1e-12);

        let a1 = dil(&[&[1, -1], &[1, 1]]);
        let u = orthogonal_part(&a1, &solve_quadratic_form(&a1).unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // A⁻ᵀ·√2 = rotation by π/4
        assert_abs_diff_eq!(u.u[(0, 0)], h, epsilon = 1e-12);
        assert_abs_diff_eq!(u.u[(1, 0)].abs(), h, epsilon = 1e-12);
        assert_abs_diff_eq!(u.u[(0, 1)], -u.u[(1, 0)], epsilon = 1e-12);

        let a4 = dil(&[&[2, 0], &[0, 2]]);
        let u = orthogonal_part(&a4, &solve_quadratic_form(&a4).unwrap()).unwrap();
        assert!((u.u.clone() - DMatrix::identity(2, 2)).abs().max() < 1e-12);
    }

    #[test]
    fn eval_p_examples() {
        assert_eq!(eval_p(&QuadraticForm::identity(2), &[3.0, 4.0]), 25.0);
        let q = QuadraticForm::from_rows(&[vec![2.0, -0.5], vec![-0.5, 1.0]]).unwrap();
        assert_eq!(eval_p(&q, &[1.0, 1.0]), 2.0);
        assert_eq!(eval_p(&q, &[0.0, 0.0]), 0.0);
        assert_eq!(
            QuadraticForm::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]),
            Err(Error::NotPositiveDefinite)
        );
    }
}
