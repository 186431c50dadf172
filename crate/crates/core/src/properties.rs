//! Property checks over a profile and its lattice samples, and the
//! aggregated [`PropertyReport`].

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::cascade::{sample_phi_m, LatticeGrid};
use crate::digits::{digit_set, BoxIter};
use crate::intmat::IntMatrix;
use crate::format::json_number;
use crate::matana::apply;
use crate::polynomial::{exponents_of_degree, exponents_up_to, Polynomial};
use crate::spectral::SpectralProfile;
use crate::trigpoly::{mask_of_order, TrigPoly};
use crate::{Error, Result};

pub const PARTITION_TOL: f64 = 1e-8;
pub const POSITIVITY_TOL: f64 = 1e-10;
pub const STRANG_FIX_TOL: f64 = 1e-6;
pub const REFINEMENT_TOL: f64 = 1e-8;
pub const CONVOLUTION_TOL: f64 = 5e-3;
pub const MASS_TOL: f64 = 1e-6;
pub const REPRODUCTION_TOL: f64 = 1e-5;
pub const B_SPLINE_TOL: f64 = 1e-8;
pub const SLOPE_SLACK: f64 = 0.4;
/// Finite-difference step of the Strang–Fix check.
pub const STRANG_FIX_STEP: f64 = 1e-3;

/// Knobs for [`run_all`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyConfig {
    /// Cascade level `J`.
    pub level: u32,
    /// Points per axis of the total-positivity scan.
    pub grid_n: usize,
    pub seed: u64,
    /// Random points for the partition-of-unity and refinement checks.
    pub samples: usize,
    /// Levels of the approximation-order probe; chosen from `q` when absent.
    pub approx_levels: Option<Vec<u32>>,
}

impl Default for PropertyConfig {
    fn default() -> Self {
        Self { level: 5, grid_n: 128, seed: 0, samples: 50, approx_levels: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub residual: f64,
    pub tolerance: f64,
    pub runtime_ms: f64,
    pub detail: String,
}

/// All checks for one `(A, m)` profile, in a fixed order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub matrix: String,
    pub m: u32,
    pub checks: Vec<CheckResult>,
}

impl PropertyReport {
    /// True iff no non-skipped check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// JSON form. Runtimes are left out unless asked for, so that reports
    /// are reproducible byte for byte.
    pub fn to_json(&self, with_timing: bool) -> serde_json::Value {
        let checks: Vec<serde_json::Value> = self
            .checks
            .iter()
            .map(|c| {
                let mut obj = serde_json::json!({
                    "name": c.name,
                    "status": c.status,
                    "residual": json_number(c.residual),
                    "tolerance": json_number(c.tolerance),
                    "detail": c.detail,
                });
                if with_timing {
                    obj["runtime_ms"] = json_number(c.runtime_ms);
                }
                obj
            })
            .collect();
        serde_json::json!({
            "matrix": self.matrix,
            "m": self.m,
            "passed": self.passed(),
            "checks": checks,
        })
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `max |Σ_k φ(x − k) − 1|` over `samples` random level-`J` points of the
/// grid's box.
pub fn check_partition_of_unity(grid: &LatticeGrid, samples: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let lo = grid.lo().to_vec();
    let hi = grid.hi();
    (0..samples)
        .map(|_| {
            let j: Vec<i64> = lo.iter().zip(&hi).map(|(&l, &h)| r.gen_range(l..=h)).collect();
            (grid.shift_sum(&j, |_| 1.0) - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// `max_k |φ(k) − δ_{k,0}|` over the integer points of the support box.
pub fn check_interpolation(grid: &LatticeGrid) -> f64 {
    let s = grid.support();
    BoxIter::new(&s.lo, &s.hi)
        .map(|k| {
            let delta = if k.iter().all(|&x| x == 0) { 1.0 } else { 0.0 };
            (grid.value_at_integer(&k) - delta).abs()
        })
        .fold(0.0, f64::max)
}

/// `min φ̂ᵐ` over `grid_nᵈ` points of `[−6π, 6π]ᵈ`.
pub fn check_total_positivity(profile: &SpectralProfile, grid_n: usize) -> f64 {
    let d = profile.dim();
    let n = grid_n.max(2);
    let h = 12.0 * PI / (n - 1) as f64;
    (0..n.pow(d as u32))
        .into_par_iter()
        .map(|mut idx| {
            let mut xi = vec![0.0; d];
            for c in (0..d).rev() {
                xi[c] = -6.0 * PI + h * (idx % n) as f64;
                idx /= n;
            }
            profile.phi_hat(&xi)
        })
        .reduce(|| f64::INFINITY, f64::min)
}

/// Central finite-difference weights of order-4 accuracy for the `n`-th
/// derivative, on the nodes `−r..=r` (Fornberg's recursion).
pub fn central_weights(n: usize) -> Vec<(i64, f64)> {
    if n == 0 {
        return vec![(0, 1.0)];
    }
    let r = (n.div_ceil(2) + 1) as i64;
    let nodes: Vec<f64> = (-r..=r).map(|x| x as f64).collect();
    let np = nodes.len();
    // c[i][k]: weight of node i for derivative k
    let mut c = vec![vec![0.0; n + 1]; np];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0];
    for i in 1..np {
        let mn = i.min(n);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i];
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    (-r..=r).zip(c.iter().map(|row| row[n])).filter(|(_, w)| *w != 0.0).collect()
}

/// Largest finite-difference derivative `|∂ⁿφ̂ᵐ(2πk)|` over
/// `k ∈ {−2..2}ᵈ \ {0}` and all `|n| ≤ 2m − 1`, with mixed partials as
/// tensor products of one-dimensional stencils.
pub fn check_strang_fix(profile: &SpectralProfile, step: f64) -> f64 {
    let d = profile.dim();
    let max_order = 2 * profile.order() - 1;
    let orders: Vec<Vec<u32>> = exponents_up_to(d, max_order);
    let ks: Vec<Vec<i64>> = BoxIter::new(&vec![-2; d], &vec![2; d]).filter(|k| k.iter().any(|&x| x != 0)).collect();
    let stencils: Vec<Vec<(i64, f64)>> = (0..=max_order as usize).map(central_weights).collect();
    ks.par_iter()
        .map(|k| {
            let centre: Vec<f64> = k.iter().map(|&x| 2.0 * PI * x as f64).collect();
            let mut worst: f64 = 0.0;
            for n in &orders {
                let axes: Vec<&Vec<(i64, f64)>> = n.iter().map(|&o| &stencils[o as usize]).collect();
                let mut acc = 0.0;
                let mut idx = vec![0usize; d];
                'outer: loop {
                    let mut w = 1.0;
                    let mut xi = centre.clone();
                    for c in 0..d {
                        let (off, wc) = axes[c][idx[c]];
                        w *= wc;
                        xi[c] += off as f64 * step;
                    }
                    acc += w * profile.phi_hat(&xi);
                    for c in (0..d).rev() {
                        idx[c] += 1;
                        if idx[c] < axes[c].len() {
                            continue 'outer;
                        }
                        idx[c] = 0;
                    }
                    break;
                }
                let order: u32 = n.iter().sum();
                worst = worst.max((acc / step.powi(order as i32)).abs());
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// Max relative residual of `φ̂ᵐ(ξ) = m₀ᵐ(A⁻ᵀξ)·φ̂ᵐ(A⁻ᵀξ)` over random
/// `ξ ∈ [−4π, 4π]ᵈ`.
pub fn check_fourier_refinement(profile: &SpectralProfile, samples: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mask = profile.mask_of_order();
    let d = profile.dim();
    (0..samples)
        .map(|_| {
            let xi: Vec<f64> = (0..d).map(|_| r.gen_range(-4.0 * PI..4.0 * PI)).collect();
            let bxi = profile.contract(&xi);
            let lhs = profile.phi_hat(&xi);
            let rhs = mask.eval_re(&bxi) * profile.phi_hat(&bxi);
            let scale = lhs.abs().max(rhs.abs());
            if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale }
        })
        .fold(0.0, f64::max)
}

/// `max |M(2π(Aᵀ)ᴶs) − M(2πs)|` over `s ∈ 𝒮(Aᵀ)\{0}` and `J = 1..=4`.
pub fn check_non_decay(profile: &SpectralProfile) -> f64 {
    let a = profile.matrix();
    let at = a.matrix().transpose();
    let ds = digit_set(&at);
    let mut worst: f64 = 0.0;
    for s in ds.nonzero_fractions() {
        let base: Vec<f64> = s.iter().map(|r| 2.0 * PI * *r.numer() as f64 / *r.denom() as f64).collect();
        let reference = profile.big_m(&base);
        // (Aᵀ)ᴶs = (Aᵀ)^{J−1}·w with w = Aᵀs ∈ ℤᵈ, kept exact
        let d = s.len();
        let mut w: Vec<i64> = (0..d)
            .map(|i| {
                let v = (0..d).fold(num_rational::Rational64::from_integer(0), |acc, j| {
                    acc + s[j] * num_rational::Rational64::from_integer(at.get(i, j))
                });
                v.to_integer()
            })
            .collect();
        for _ in 1..=4 {
            let xi: Vec<f64> = w.iter().map(|&x| 2.0 * PI * x as f64).collect();
            worst = worst.max((profile.big_m(&xi) - reference).abs());
            w = at.mul_vec(&w);
        }
    }
    worst
}

/// Discrete convolution `q^{-J} Σ_i f[i]·g[j − i]` of two grids on the same
/// lattice, by FFT.
pub fn convolve(f: &LatticeGrid, g: &LatticeGrid) -> Result<LatticeGrid> {
    if f.level() != g.level() || f.matrix() != g.matrix() {
        return Err(Error::GridMismatch("convolution needs grids on one lattice".into()));
    }
    let d = f.dim();
    let shape: Vec<usize> = f.shape().iter().zip(g.shape()).map(|(a, b)| a + b - 1).collect();
    let total: usize = shape.iter().product();
    let embed = |src: &LatticeGrid| -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); total];
        for (i, &v) in src.values().iter().enumerate() {
            let j = src.index_at(i);
            let mut flat = 0;
            for c in 0..d {
                flat = flat * shape[c] + (j[c] - src.lo()[c]) as usize;
            }
            buf[flat] = Complex64::new(v, 0.0);
        }
        buf
    };
    let mut a = embed(f);
    let mut b = embed(g);
    let mut planner = FftPlanner::new();
    fft_nd(&mut a, &shape, &mut planner, false);
    fft_nd(&mut b, &shape, &mut planner, false);
    a.iter_mut().zip(&b).for_each(|(x, y)| *x *= y);
    fft_nd(&mut a, &shape, &mut planner, true);
    let scale = f.quadrature_weight() / total as f64;
    let lo: Vec<i64> = f.lo().iter().zip(g.lo()).map(|(a, b)| a + b).collect();
    let hi: Vec<i64> = lo.iter().zip(&shape).map(|(l, &s)| l + s as i64 - 1).collect();
    let support = crate::cascade::SupportBox {
        lo: f.support().lo.iter().zip(&g.support().lo).map(|(a, b)| a + b).collect(),
        hi: f.support().hi.iter().zip(&g.support().hi).map(|(a, b)| a + b).collect(),
    };
    let mut out = f.with_index_box(lo, hi, support);
    out.values_mut().iter_mut().zip(&a).for_each(|(o, v)| *o = v.re * scale);
    Ok(out)
}

fn fft_nd(data: &mut [Complex64], shape: &[usize], planner: &mut FftPlanner<f64>, inverse: bool) {
    let d = shape.len();
    let total = data.len();
    for axis in 0..d {
        let n = shape[axis];
        let stride: usize = shape[axis + 1..].iter().product();
        let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for start in 0..total {
            // first element of each line along `axis`
            if (start / stride) % n != 0 {
                continue;
            }
            for (i, v) in line.iter_mut().enumerate() {
                *v = data[start + i * stride];
            }
            fft.process(&mut line);
            for (i, v) in line.iter().enumerate() {
                data[start + i * stride] = *v;
            }
        }
    }
}

/// `max |φ^{m1} ∗ φ^{m2} − φ^{m1+m2}|` on level `J`, the convolution taken
/// as the lattice quadrature.
pub fn check_convolution(profile: &SpectralProfile, m1: u32, m2: u32, level: u32) -> Result<f64> {
    if m1 == 0 || m2 == 0 {
        return Err(Error::InvalidArgument("convolution orders must be positive".into()));
    }
    let a = profile.matrix();
    let f = sample_phi_m(a, profile.mask(), m1, level)?;
    let g = if m2 == m1 { f.clone() } else { sample_phi_m(a, profile.mask(), m2, level)? };
    let fg = sample_phi_m(a, profile.mask(), m1 + m2, level)?;
    convolve(&f, &g)?.max_abs_diff(&fg)
}

/// Centred cardinal B-spline of order `n` (degree `n − 1`), supported on
/// `[−n/2, n/2]`, by the truncated-power formula.
pub fn centered_b_spline(n: u32, x: f64) -> f64 {
    let mut acc = 0.0;
    let mut binom = 1.0;
    let mut fact = 1.0;
    for i in 1..n {
        fact *= i as f64;
    }
    for k in 0..=n {
        let t = x + n as f64 / 2.0 - k as f64;
        if t > 0.0 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binom * t.powi(n as i32 - 1);
        }
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    acc / fact
}

/// `max |φᵐ(x) − B_{2m}(x)|` on the grid, for the univariate dilation 2
/// where `φᵐ` is the centred B-spline of degree `2m − 1`.
pub fn check_b_spline_identity(grid: &LatticeGrid, m: u32) -> f64 {
    grid.iter()
        .map(|(j, v)| (v - centered_b_spline(2 * m, grid.point(&j)[0])).abs())
        .fold(0.0, f64::max)
}

/// Outcome of a polynomial reproduction probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reproduction {
    /// `Σ_k p(k)φ(x − k) − p(x)` is a polynomial of lower degree.
    pub leading_ok: bool,
    /// Degree of the fitted lower-degree remainder, if nonzero.
    pub residual_degree: Option<u32>,
    /// Max deviation of the remainder from its least-squares fit.
    pub fit_residual: f64,
}

/// Integer bounding box of `P·[−r, r]ᵈ`.
fn image_box(p: &IntMatrix, r: f64) -> (Vec<i64>, Vec<i64>) {
    let d = p.dim();
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for mask in 0..1usize << d {
        let corner: Vec<i64> = (0..d).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect();
        let img = p.mul_vec(&corner);
        for i in 0..d {
            let v = img[i] as f64 * r;
            lo[i] = lo[i].min(v.floor() as i64);
            hi[i] = hi[i].max(v.ceil() as i64);
        }
    }
    (lo, hi)
}

/// Level-`J` points of the grid that lie in `[−r, r]ᵈ`, thinned to at most
/// `limit` by a fixed stride.
pub fn window_points(grid: &LatticeGrid, r: f64, limit: usize) -> Vec<Vec<i64>> {
    let (lo, hi) = image_box(grid.power(), r);
    let pts: Vec<Vec<i64>> = BoxIter::new(&lo, &hi)
        .filter(|j| grid.point(j).iter().all(|x| x.abs() <= r + 1e-12))
        .collect();
    let stride = pts.len().div_ceil(limit.max(1)).max(1);
    pts.into_iter().step_by(stride).collect()
}

/// Fits `r(x) = Σ_k p(k)φᵐ(x − k)` minus `p(x)` against the monomials of
/// degree below `deg p` at the given level-`J` points.
pub fn check_polynomial_reproduction(
    grid: &LatticeGrid,
    m: u32,
    p: &Polynomial,
    sample: &[Vec<i64>],
) -> Result<Reproduction> {
    let deg = p.total_degree();
    if deg > 2 * m + 1 {
        return Err(Error::DegreeTooHigh { degree: deg as usize, max: (2 * m + 1) as usize });
    }
    let d = grid.dim();
    let xs: Vec<Vec<f64>> = sample.iter().map(|j| grid.point(j)).collect();
    let rem: Vec<f64> = sample
        .iter()
        .zip(&xs)
        .map(|(j, x)| {
            grid.shift_sum(j, |k| p.eval(&k.iter().map(|&v| v as f64).collect::<Vec<_>>())) - p.eval(x)
        })
        .collect();
    let basis: Vec<Vec<u32>> = if deg == 0 { Vec::new() } else { exponents_up_to(d, deg - 1) };
    if basis.is_empty() {
        let fit_residual = rem.iter().map(|v| v.abs()).fold(0.0, f64::max);
        return Ok(Reproduction { leading_ok: fit_residual < REPRODUCTION_TOL, residual_degree: None, fit_residual });
    }
    let design = DMatrix::from_fn(xs.len(), basis.len(), |r, c| {
        basis[c].iter().zip(&xs[r]).map(|(&e, &x)| x.powi(e as i32)).product()
    });
    let rhs = DVector::from_vec(rem.clone());
    let svd = design.clone().svd(true, true);
    let coef = svd
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::NumericalBreakdown(format!("least squares failed: {e}")))?;
    let fitted = &design * &coef;
    let fit_residual = (rhs - fitted).amax();
    let remainder = Polynomial::from_terms(d, basis.into_iter().zip(coef.iter().copied()));
    Ok(Reproduction {
        leading_ok: fit_residual < REPRODUCTION_TOL,
        residual_degree: remainder.effective_degree(1e-7),
        fit_residual,
    })
}

/// Homogeneous polynomials of degree `2m` annihilated by `P(D)ᵐ`.
pub fn null_space_basis(profile: &SpectralProfile) -> Vec<Polynomial> {
    let d = profile.dim();
    let m = profile.order();
    let exps = exponents_of_degree(d, 2 * m);
    // P(D)ᵐ maps each monomial of degree 2m to a constant
    let ell: Vec<f64> = exps
        .iter()
        .map(|e| {
            let mut p = Polynomial::monomial(e.clone());
            for _ in 0..m {
                p = p.apply_form(profile.quadratic_form());
            }
            p.coeff(&vec![0; d])
        })
        .collect();
    let (pivot, _) = ell
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("at least one monomial");
    exps.iter()
        .enumerate()
        .filter(|&(i, _)| i != pivot)
        .map(|(i, e)| {
            let mut p = Polynomial::monomial(e.clone());
            p.add_term(exps[pivot].clone(), -ell[i] / ell[pivot]);
            p
        })
        .collect()
}

/// Outcome of the approximation-order probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproximationOrder {
    pub levels: Vec<u32>,
    /// Lattice spacings `q^{-J/d}`.
    pub spacings: Vec<f64>,
    /// Discrete L² errors on `[−1, 1]ᵈ`.
    pub errors: Vec<f64>,
    /// Least-squares slope of `log error` against `log spacing`; absent when
    /// the approximation is exact.
    pub slope: Option<f64>,
}

impl ApproximationOrder {
    pub fn is_exact(&self) -> bool {
        self.slope.is_none()
    }
}

/// Prefilter `Λ` with `Λ(ξ)·φ̂ᵐ(ξ) = 1 + O(|ξ|⁴)`.
///
/// `φ̂ᵐ(ξ) = Π_{j≥1} m₀ᵐ(Bʲξ)` and `m₀ᵐ(η) = 1 − ½ηᵀHη + O(|η|⁴)` with
/// `H = Σ_k a_k kkᵀ` from the coefficients `a_k` of the even mask. Hence
/// `φ̂ᵐ(ξ) = 1 − ½ξᵀSξ + O(|ξ|⁴)` with `S = Σ_{j≥1} (Bʲ)ᵀHBʲ`, and
/// `Λ = 1 + ½·(4Σ s_ii sin²(ξ_i/2) + 2Σ_{i<j} s_ij sin ξ_i sin ξ_j)`.
pub fn prefilter(profile: &SpectralProfile) -> TrigPoly {
    let d = profile.dim();
    let mask = mask_of_order(profile.mask(), profile.order());
    let mut h = DMatrix::<f64>::zeros(d, d);
    for (k, c) in mask.terms() {
        for i in 0..d {
            for j in 0..d {
                h[(i, j)] += c.re * (k[i] * k[j]) as f64;
            }
        }
    }
    let b = profile.matrix().inverse_transpose();
    let mut s = DMatrix::<f64>::zeros(d, d);
    let mut bj = b.clone();
    for _ in 0..400 {
        let term = bj.transpose() * &h * &bj;
        let size = term.amax();
        s += term;
        if size < 1e-18 * s.amax().max(1e-300) {
            break;
        }
        bj = &b * bj;
    }
    let mut lambda = TrigPoly::constant(d, 1.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    for i in 0..d {
        let mut e = vec![0i64; d];
        // ½·4 s sin²(ξ/2) = s(1 − cos ξ)
        lambda.add_term(vec![0; d], re(s[(i, i)]));
        e[i] = 1;
        lambda.add_term(e.clone(), re(-0.5 * s[(i, i)]));
        e[i] = -1;
        lambda.add_term(e, re(-0.5 * s[(i, i)]));
        for j in i + 1..d {
            // ½·2 s sin ξi sin ξj = (s/2)(cos(ξi − ξj) − cos(ξi + ξj))
            let w = 0.25 * s[(i, j)];
            for (si, sj, sign) in [(1, -1, 1.0), (-1, 1, 1.0), (1, 1, -1.0), (-1, -1, -1.0)] {
                let mut e = vec![0i64; d];
                e[i] = si;
                e[j] = sj;
                lambda.add_term(e, re(sign * w));
            }
        }
    }
    lambda
}

/// Levels `J₀, J₀+1, J₀+2` with `J₀` the first level of spacing `≤ 1/4`.
pub fn default_approx_levels(profile: &SpectralProfile) -> Vec<u32> {
    let q = profile.matrix().q() as f64;
    let d = profile.dim() as f64;
    let j0 = (d * 4f64.ln() / q.ln() - 1e-9).ceil().max(1.0) as u32;
    vec![j0, j0 + 1, j0 + 2]
}

/// Quasi-interpolation error of `s_J = Σ_k (Λf_J)(k)·φᵐ(Aᴶ· − k)`, with
/// `f_J(k) = f(A⁻ᴶk)`, measured at the level-`J+L` points of `[−1,1]ᵈ`.
pub fn check_approximation_order<F>(profile: &SpectralProfile, f: F, levels: &[u32]) -> Result<ApproximationOrder>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let a = profile.matrix();
    let d = profile.dim();
    let q = a.q() as f64;
    // fine sub-level: at least 8 points per coarse cell
    let sub = (8f64.ln() / q.ln()).ceil().max(1.0) as u32;
    let fine = sample_phi_m(a, profile.mask(), profile.order(), sub)?;
    let lambda = prefilter(profile);
    let taps: Vec<(Vec<i64>, f64)> = lambda.terms().map(|(k, c)| (k.clone(), c.re)).collect();
    let mut spacings = Vec::new();
    let mut errors = Vec::new();
    for &level in levels {
        let aj = a.matrix().pow(level);
        let ainv = crate::matana::validate_dilation(&aj)?.inverse();
        let coarse_to_x = |k: &[i64]| apply(&ainv, &k.iter().map(|&v| v as f64).collect::<Vec<_>>());
        // prefiltered coefficients, dense over every k that meets the window
        let (wlo, whi) = image_box(&aj, 1.0);
        let s = fine.support();
        let klo: Vec<i64> = (0..d).map(|i| wlo[i] - s.hi[i] - 1).collect();
        let khi: Vec<i64> = (0..d).map(|i| whi[i] - s.lo[i] + 1).collect();
        let kshape: Vec<usize> = klo.iter().zip(&khi).map(|(l, h)| (h - l + 1) as usize).collect();
        let kpoints: Vec<Vec<i64>> = BoxIter::new(&klo, &khi).collect();
        let coef: Vec<f64> = kpoints
            .par_iter()
            .map(|k| {
                taps.iter()
                    .map(|(n, w)| {
                        let kn: Vec<i64> = k.iter().zip(n).map(|(a, b)| a - b).collect();
                        w * f(&coarse_to_x(&kn))
                    })
                    .sum()
            })
            .collect();
        let coef_at = |k: &[i64]| -> f64 {
            let mut flat = 0usize;
            for c in 0..d {
                let off = k[c] - klo[c];
                if off < 0 || off as usize >= kshape[c] {
                    return 0.0;
                }
                flat = flat * kshape[c] + off as usize;
            }
            coef[flat]
        };
        // points x = A^{-(J+L)}i; the index of Aᴶx on the level-L lattice is i
        let total = a.matrix().pow(level + sub);
        let tinv = crate::matana::validate_dilation(&total)?.inverse();
        let (lo, hi) = image_box(&total, 1.0);
        let points: Vec<Vec<i64>> = BoxIter::new(&lo, &hi).collect();
        let (sum_sq, count) = points
            .par_iter()
            .filter_map(|i| {
                let x = apply(&tinv, &i.iter().map(|&v| v as f64).collect::<Vec<_>>());
                if x.iter().any(|v| v.abs() > 1.0 + 1e-12) {
                    return None;
                }
                let e = fine.shift_sum(i, coef_at) - f(&x);
                Some((e * e, 1usize))
            })
            .reduce(|| (0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        errors.push((sum_sq / count.max(1) as f64).sqrt());
        spacings.push(q.powf(-(level as f64) / d as f64));
    }
    let exact = errors.iter().all(|&e| e < 1e-13);
    let slope = if exact || levels.len() < 2 {
        None
    } else {
        let xs: Vec<f64> = spacings.iter().map(|h| h.ln()).collect();
        let ys: Vec<f64> = errors.iter().map(|e| e.max(1e-300).ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        Some(sxy / sxx)
    };
    Ok(ApproximationOrder { levels: levels.to_vec(), spacings, errors, slope })
}

/// The Gaussian test bump `exp(−|x|²/(2σ²))` with `σ = 1/2`.
pub fn gaussian_bump(x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    (-r2 / (2.0 * 0.25)).exp()
}

struct Recorder {
    checks: Vec<CheckResult>,
}

impl Recorder {
    fn record(&mut self, name: &str, tolerance: f64, f: impl FnOnce() -> Result<(CheckStatus, f64, String)>) {
        let start = Instant::now();
        let (status, residual, detail) = match f() {
            Ok(v) => v,
            Err(e) => (CheckStatus::Fail, f64::NAN, e.to_string()),
        };
        self.checks.push(CheckResult {
            name: name.into(),
            status,
            residual,
            tolerance,
            runtime_ms: start.elapsed().as_secs_f64() * 1e3,
            detail,
        });
    }

    fn skip(&mut self, name: &str, tolerance: f64, why: &str) {
        self.record(name, tolerance, || Ok((CheckStatus::Skip, f64::NAN, why.into())));
    }
}

fn verdict(ok: bool) -> CheckStatus {
    if ok { CheckStatus::Pass } else { CheckStatus::Fail }
}

/// Runs every check for `profile` in a fixed order. Failures, including
/// errors, are recorded and never abort the run.
pub fn run_all(profile: &SpectralProfile, config: &PropertyConfig) -> PropertyReport {
    let m = profile.order();
    let a = profile.matrix();
    let mut rec = Recorder { checks: Vec::new() };

    let v = profile.riesz_verdict();
    rec.record("riesz", v.threshold, || {
        Ok((
            verdict(v.riesz_ok),
            profile.b_estimate(),
            format!("B = {:.12}, decay exponent {:.6}", profile.b_estimate(), v.decay_exponent),
        ))
    });

    rec.record("total_positivity", -POSITIVITY_TOL, || {
        let min = check_total_positivity(profile, config.grid_n);
        Ok((verdict(min >= -POSITIVITY_TOL), min, "min of phi_hat on [-6pi,6pi]^d".into()))
    });
    rec.record("strang_fix", STRANG_FIX_TOL, || {
        let r = check_strang_fix(profile, STRANG_FIX_STEP);
        Ok((verdict(r <= STRANG_FIX_TOL), r, format!("orders up to {}", 2 * m - 1)))
    });
    rec.record("fourier_refinement", REFINEMENT_TOL, || {
        let r = check_fourier_refinement(profile, 2 * config.samples, config.seed);
        Ok((verdict(r <= REFINEMENT_TOL), r, "relative".into()))
    });
    let non_decay_tol = 10.0 * profile.tol();
    rec.record("non_decay", non_decay_tol, || {
        let r = check_non_decay(profile);
        Ok((verdict(r <= non_decay_tol), r, "M at dilated digits, J = 1..4".into()))
    });

    let mut grid: Option<LatticeGrid> = None;
    rec.record("cascade", 0.0, || match sample_phi_m(a, profile.mask(), m, config.level) {
        Ok(g) => {
            let detail = format!("J = {}, {} points", g.level(), g.len());
            grid = Some(g);
            Ok((CheckStatus::Pass, 0.0, detail))
        }
        Err(e) => Ok((CheckStatus::Fail, f64::NAN, e.to_string())),
    });

    let cascade_names = [
        ("mass", MASS_TOL),
        ("partition_of_unity", PARTITION_TOL),
        ("lattice_nonnegativity", POSITIVITY_TOL),
        ("b_spline_identity", B_SPLINE_TOL),
        ("convolution", CONVOLUTION_TOL),
        ("reproduction_low_degree", REPRODUCTION_TOL),
        ("reproduction_null_space", REPRODUCTION_TOL),
        ("reproduction_expected_failure", REPRODUCTION_TOL),
        ("approximation_order", SLOPE_SLACK),
    ];
    let Some(grid) = grid else {
        for (name, tol) in cascade_names {
            rec.skip(name, tol, "no lattice values");
        }
        return PropertyReport { matrix: a.to_string(), m, checks: rec.checks };
    };

    rec.record("mass", MASS_TOL, || {
        let r = (grid.mass() - 1.0).abs();
        Ok((verdict(r <= MASS_TOL), r, "|sum of values * q^-J - 1|".into()))
    });
    rec.record("partition_of_unity", PARTITION_TOL, || {
        let r = check_partition_of_unity(&grid, config.samples, config.seed);
        Ok((verdict(r <= PARTITION_TOL), r, format!("{} random points", config.samples)))
    });
    let mask_m = profile.mask_of_order();
    if mask_m.terms().all(|(_, c)| c.re >= 0.0) {
        rec.record("lattice_nonnegativity", POSITIVITY_TOL, || {
            let r = grid.values().iter().copied().fold(f64::INFINITY, f64::min);
            Ok((verdict(r >= -POSITIVITY_TOL), r, "min over A-adic points".into()))
        });
    } else {
        rec.skip("lattice_nonnegativity", POSITIVITY_TOL, "mask has negative coefficients");
    }
    if a.dim() == 1 && a.matrix().get(0, 0).abs() == 2 {
        rec.record("b_spline_identity", B_SPLINE_TOL, || {
            let r = check_b_spline_identity(&grid, m);
            Ok((verdict(r <= B_SPLINE_TOL), r, format!("centred B-spline of degree {}", 2 * m - 1)))
        });
    } else {
        rec.skip("b_spline_identity", B_SPLINE_TOL, "only for the univariate dilation 2");
    }
    rec.record("convolution", CONVOLUTION_TOL, || {
        let r = check_convolution(profile, m, m, config.level)?;
        Ok((verdict(r <= CONVOLUTION_TOL), r, format!("phi^{m} * phi^{m} against phi^{}", 2 * m)))
    });

    let sample = window_points(&grid, 1.0, 400);
    let d = profile.dim();
    rec.record("reproduction_low_degree", REPRODUCTION_TOL, || {
        let mut worst: f64 = 0.0;
        for e in exponents_up_to(d, 2 * m - 1) {
            let r = check_polynomial_reproduction(&grid, m, &Polynomial::monomial(e), &sample)?;
            worst = worst.max(r.fit_residual);
        }
        Ok((verdict(worst < REPRODUCTION_TOL), worst, format!("all monomials of degree <= {}", 2 * m - 1)))
    });
    let basis = null_space_basis(profile);
    if basis.is_empty() {
        rec.skip("reproduction_null_space", REPRODUCTION_TOL, "no null-space polynomials of degree 2m");
    } else {
        rec.record("reproduction_null_space", REPRODUCTION_TOL, || {
            let mut worst: f64 = 0.0;
            for p in &basis {
                worst = worst.max(check_polynomial_reproduction(&grid, m, p, &sample)?.fit_residual);
            }
            Ok((verdict(worst < REPRODUCTION_TOL), worst, format!("{} basis polynomials of degree {}", basis.len(), 2 * m)))
        });
    }
    rec.record("reproduction_expected_failure", REPRODUCTION_TOL, || {
        let p = Polynomial::quadratic_form(profile.quadratic_form()).pow(m);
        let r = check_polynomial_reproduction(&grid, m, &p, &sample)?;
        Ok((verdict(!r.leading_ok), r.fit_residual, "P(x)^m must not be reproduced".into()))
    });
    let levels = config.approx_levels.clone().unwrap_or_else(|| default_approx_levels(profile));
    let need = 2.0 * m as f64 - SLOPE_SLACK;
    rec.record("approximation_order", need, || {
        let r = check_approximation_order(profile, gaussian_bump, &levels)?;
        let slope = r.slope.unwrap_or(f64::INFINITY);
        Ok((verdict(slope >= need), slope, format!("levels {:?}, errors {:?}", r.levels, r.errors)))
    });

    PropertyReport { matrix: a.to_string(), m, checks: rec.checks }
}
