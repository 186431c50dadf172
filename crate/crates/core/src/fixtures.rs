//! The worked example matrices.

use crate::intmat::IntMatrix;
use crate::matana::{validate_dilation, DilationMatrix};

fn build(rows: &[Vec<i64>]) -> DilationMatrix {
    let m = IntMatrix::from_rows(rows).expect("fixture is square");
    validate_dilation(&m).expect("fixture is a dilation matrix")
}

/// `A₁`, the quincunx matrix `[[1,−1],[1,1]]` (rotation by π/4 times √2).
pub fn a1() -> DilationMatrix {
    build(&[vec![1, -1], vec![1, 1]])
}

/// `A₂ = [[0,−2],[1,1]]`.
pub fn a2() -> DilationMatrix {
    build(&[vec![0, -2], vec![1, 1]])
}

/// `A₃ = [[1,−2],[1,0]]`.
pub fn a3() -> DilationMatrix {
    build(&[vec![1, -2], vec![1, 0]])
}

/// `A₄ = 2I`.
pub fn a4() -> DilationMatrix {
    build(&[vec![2, 0], vec![0, 2]])
}

/// The traditional quincunx matrix `Ã₁ = [[1,1],[1,−1]]`.
pub fn a1_tilde() -> DilationMatrix {
    build(&[vec![1, 1], vec![1, -1]])
}

pub fn quincunx() -> DilationMatrix {
    a1()
}

/// The univariate dilation `2`.
pub fn univariate() -> DilationMatrix {
    build(&[vec![2]])
}

/// All four planar examples, labelled.
pub fn planar() -> Vec<(&'static str, DilationMatrix)> {
    vec![("A1", a1()), ("A2", a2()), ("A3", a3()), ("A4", a4())]
}
