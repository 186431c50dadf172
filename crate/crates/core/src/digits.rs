//! Digit sets `𝒲(A) = ℤᵈ ∩ A[0,1)ᵈ` and `𝒮(A) = A⁻¹𝒲(A)`, computed with
//! exact integer and rational arithmetic only.

use num_rational::Rational64;
use serde::Serialize;

use crate::intmat::IntMatrix;

/// Coset representatives of `ℤᵈ/Aℤᵈ` together with their preimages in
/// `[0,1)ᵈ`. `W` is sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitSet {
    matrix: IntMatrix,
    digits: Vec<Vec<i64>>,
    fractions: Vec<Vec<Rational64>>,
}

impl DigitSet {
    /// Builds a digit set from an arbitrary candidate list without checking
    /// it; [`verify_coset_partition`] decides whether it is valid.
    pub fn with_digits(matrix: &IntMatrix, digits: Vec<Vec<i64>>) -> Self {
        let solver = ExactSolve::new(matrix);
        let fractions = digits.iter().map(|n| solver.preimage(n)).collect();
        Self { matrix: matrix.clone(), digits, fractions }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// `𝒲(A)`.
    pub fn digits(&self) -> &[Vec<i64>] {
        &self.digits
    }

    /// `𝒮(A)`, with `A·s = w` for the digit at the same index.
    pub fn fractions(&self) -> &[Vec<Rational64>] {
        &self.fractions
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// `𝒮(A) \ {0}`.
    pub fn nonzero_fractions(&self) -> impl Iterator<Item = &Vec<Rational64>> {
        self.fractions.iter().filter(|s| s.iter().any(|x| *x != Rational64::from_integer(0)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Out<'a> {
            matrix: &'a IntMatrix,
            w: &'a [Vec<i64>],
            s: Vec<Vec<String>>,
        }
        let s = self
            .fractions
            .iter()
            .map(|v| v.iter().map(rational_string).collect())
            .collect();
        serde_json::to_value(Out { matrix: &self.matrix, w: &self.digits, s }).expect("serializable")
    }
}

/// `"p/q"`, or `"p"` for integers.
pub fn rational_string(r: &Rational64) -> String {
    if *r.denom() == 1 {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact solves with `A` through its adjugate: `A⁻¹n = adj(A)·n / det(A)`.
struct ExactSolve {
    adj: Vec<Vec<i128>>,
    det: i128,
}

impl ExactSolve {
    fn new(m: &IntMatrix) -> Self {
        // Fold the sign into the adjugate so the denominator is positive.
        let det = m.det();
        let sign = det.signum();
        let adj = m
            .adjugate()
            .into_iter()
            .map(|r| r.into_iter().map(|x| x * sign).collect())
            .collect();
        Self { adj, det: det.abs() }
    }

    /// `|det|·A⁻¹n`, an integer vector.
    fn scaled(&self, n: &[i64]) -> Vec<i128> {
        self.adj
            .iter()
            .map(|row| row.iter().zip(n).map(|(a, &b)| a * b as i128).sum())
            .collect()
    }

    fn preimage(&self, n: &[i64]) -> Vec<Rational64> {
        self.scaled(n)
            .into_iter()
            .map(|x| Rational64::new(x as i64, self.det as i64))
            .collect()
    }

    /// `n ∈ A[0,1)ᵈ`, decided by integer inequalities.
    fn in_unit_image(&self, n: &[i64]) -> bool {
        self.scaled(n).iter().all(|&x| 0 <= x && x < self.det)
    }

    /// `A⁻¹n ∈ ℤᵈ`.
    fn in_lattice(&self, n: &[i64]) -> bool {
        self.scaled(n).iter().all(|&x| x % self.det == 0)
    }
}

/// `𝒲(A) = ℤᵈ ∩ A[0,1)ᵈ` by exhaustive scan of the image of the unit cube's
/// bounding box, and `𝒮(A) = A⁻¹𝒲(A)`.
///
/// # Panics
/// If `a` is singular.
pub fn digit_set(a: &IntMatrix) -> DigitSet {
    let d = a.dim();
    assert!(a.det() != 0, "digit set of a singular matrix");
    let solver = ExactSolve::new(a);

    // Bounding box of A[0,1]ᵈ from its 2ᵈ corners, widened by one.
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for mask in 0..(1u32 << d) {
        let corner: Vec<i64> = (0..d).map(|i| ((mask >> i) & 1) as i64).collect();
        let image = a.mul_vec(&corner);
        for i in 0..d {
            lo[i] = lo[i].min(image[i]);
            hi[i] = hi[i].max(image[i]);
        }
    }
    lo.iter_mut().for_each(|x| *x -= 1);
    hi.iter_mut().for_each(|x| *x += 1);

    let digits: Vec<Vec<i64>> = BoxIter::new(&lo, &hi).filter(|n| solver.in_unit_image(n)).collect();
    let fractions = digits.iter().map(|n| solver.preimage(n)).collect();
    DigitSet { matrix: a.clone(), digits, fractions }
}

/// Checks that every integer vector with `‖n‖∞ ≤ radius` is `A·k + w` for
/// exactly one digit `w`.
pub fn verify_coset_partition(ds: &DigitSet, radius: i64) -> bool {
    assert!(radius >= 1, "radius must be positive");
    let d = ds.matrix.dim();
    let solver = ExactSolve::new(&ds.matrix);
    let lo = vec![-radius; d];
    let hi = vec![radius; d];
    let mut diff = vec![0i64; d];
    BoxIter::new(&lo, &hi).all(|n| {
        let hits = ds
            .digits
            .iter()
            .filter(|w| {
                for i in 0..d {
                    diff[i] = n[i] - w[i];
                }
                solver.in_lattice(&diff)
            })
            .count();
        hits == 1
    })
}

/// Lexicographic iterator over the integer points of `[lo, hi]`.
pub(crate) struct BoxIter {
    lo: Vec<i64>,
    hi: Vec<i64>,
    cur: Option<Vec<i64>>,
}

impl BoxIter {
    pub(crate) fn new(lo: &[i64], hi: &[i64]) -> Self {
        let empty = lo.iter().zip(hi).any(|(l, h)| l > h);
        Self { lo: lo.to_vec(), hi: hi.to_vec(), cur: (!empty).then(|| lo.to_vec()) }
    }
}

impl Iterator for BoxIter {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        let out = self.cur.clone()?;
        let cur = self.cur.as_mut().unwrap();
        let mut i = cur.len();
        loop {
            if i == 0 {
                self.cur = None;
                break;
            }
            i -= 1;
            if cur[i] < self.hi[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = self.lo[i];
        }
        Some(out)
    }
}
