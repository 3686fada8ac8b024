//! Deterministic dense spectral kernels and the approximate-isometry
//! calculus.
//!
//! Singular values come from a one-sided Jacobi iteration on the columns:
//! simple, deterministic, high relative accuracy, and the same rotation
//! core handles real and complex input. Hermitian spectral norms (needed
//! for `||B*B - I||`) use a two-sided Jacobi eigen-iteration.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, Entries};

/// Rotations with sine below this are treated as converged.
const SINE_TOL: f64 = 1e-14;
/// Relative off-diagonal threshold below which a column pair is skipped.
const PAIR_SKIP_TOL: f64 = 1e-15;
const MAX_SWEEPS: usize = 60;

/// Sorted singular values of a matrix; always `cols` entries, nonincreasing,
/// zeros padding past the rank.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn s_max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn s_min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

trait JacobiScalar: Copy {
    fn zero() -> Self;
    fn conj_mul(self, other: Self) -> Self; // conj(self) * other
    fn mul_real(self, f: f64) -> Self;
    fn add(self, other: Self) -> Self;
    fn sub(self, other: Self) -> Self;
    fn norm_sqr(self) -> f64;
    fn abs(self) -> f64;
    fn unit_phase(self) -> Self; // self / |self|; 1 for zero input
    fn conj(self) -> Self;
    fn mul(self, other: Self) -> Self;
}

impl JacobiScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn conj_mul(self, other: Self) -> Self {
        self * other
    }
    fn mul_real(self, f: f64) -> Self {
        self * f
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn unit_phase(self) -> Self {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
    fn conj(self) -> Self {
        self
    }
    fn mul(self, other: Self) -> Self {
        self * other
    }
}

impl JacobiScalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn conj_mul(self, other: Self) -> Self {
        Complex64::conj(&self) * other
    }
    fn mul_real(self, f: f64) -> Self {
        self * f
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    fn abs(self) -> f64 {
        Complex64::norm(self)
    }
    fn unit_phase(self) -> Self {
        let n = Complex64::norm(self);
        if n == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            self / n
        }
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn mul(self, other: Self) -> Self {
        self * other
    }
}

/// One-sided Jacobi on a column-major buffer; returns unsorted squared
/// column norms at convergence (the squared singular values).
fn one_sided_jacobi<S: JacobiScalar>(cols: &mut [Vec<S>]) -> Vec<f64> {
    let n = cols.len();
    let mut sq: Vec<f64> = vec![0.0; n];
    for sweep in 0..MAX_SWEEPS {
        for (j, col) in cols.iter().enumerate() {
            sq[j] = col.iter().map(|x| x.norm_sqr()).sum();
        }
        let mut max_sine = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                let (alpha, beta) = (sq[p], sq[q]);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let (head, tail) = cols.split_at_mut(q);
                let cp = &mut head[p];
                let cq = &mut tail[0];
                let mut gamma = S::zero();
                for (a, b) in cp.iter().zip(cq.iter()) {
                    gamma = gamma.add(a.conj_mul(*b));
                }
                let g = gamma.abs();
                if g <= PAIR_SKIP_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                let tau = (beta - alpha) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                max_sine = max_sine.max(s.abs());
                // absorb the phase of gamma into column q, then rotate
                let w = gamma.unit_phase().conj();
                for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
                    let bq = w.mul(*b);
                    let na = a.mul_real(c).sub(bq.mul_real(s));
                    let nb = a.mul_real(s).add(bq.mul_real(c));
                    *a = na;
                    *b = nb;
                }
                sq[p] = c * c * alpha - 2.0 * c * s * g + s * s * beta;
                sq[q] = s * s * alpha + 2.0 * c * s * g + c * c * beta;
            }
        }
        if max_sine < SINE_TOL && sweep > 0 {
            break;
        }
        if max_sine == 0.0 {
            break;
        }
    }
    for (j, col) in cols.iter().enumerate() {
        sq[j] = col.iter().map(|x| x.norm_sqr()).sum();
    }
    sq
}

fn columns_real(a: &DenseMatrix) -> Vec<Vec<f64>> {
    let (rows, cols) = (a.rows(), a.cols());
    let v = a.real_slice();
    (0..cols)
        .map(|c| (0..rows).map(|r| v[r * cols + c]).collect())
        .collect()
}

fn columns_complex(a: &DenseMatrix) -> Vec<Vec<Complex64>> {
    let (rows, cols) = (a.rows(), a.cols());
    let v = a.complex_slice();
    (0..cols)
        .map(|c| (0..rows).map(|r| v[r * cols + c]).collect())
        .collect()
}

/// Singular values, sorted nonincreasing; ties keep construction order.
pub fn svd_values(a: &DenseMatrix) -> Result<SingularSpectrum> {
    let sq = match a.entries() {
        Entries::Real(_) => {
            let mut cols = columns_real(a);
            one_sided_jacobi(&mut cols)
        }
        Entries::Complex(_) => {
            let mut cols = columns_complex(a);
            one_sided_jacobi(&mut cols)
        }
    };
    let mut idx: Vec<usize> = (0..sq.len()).collect();
    idx.sort_by(|&i, &j| sq[j].partial_cmp(&sq[i]).unwrap().then(i.cmp(&j)));
    let values = idx.into_iter().map(|i| sq[i].sqrt()).collect();
    Ok(SingularSpectrum { values })
}

/// `(s_min, s_max)`; for `rows < cols` the minimum is automatically zero.
pub fn extreme_singular_values(a: &DenseMatrix) -> Result<(f64, f64)> {
    let spec = svd_values(a)?;
    Ok((spec.s_min(), spec.s_max()))
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(a: &DenseMatrix) -> Result<f64> {
    Ok(svd_values(a)?.s_max())
}

/// Condition number `s_max / s_min`; infinite for singular input. Requires
/// `rows >= cols` (otherwise the minimum singular value is identically zero
/// and the ratio carries no information).
pub fn condition_number(a: &DenseMatrix) -> Result<f64> {
    if a.rows() < a.cols() {
        return Err(Error::InvalidArgument(format!(
            "condition number needs rows >= cols, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let (s_min, s_max) = extreme_singular_values(a)?;
    if s_min == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(s_max / s_min)
    }
}

/// Eigenvalues of a Hermitian matrix, sorted nonincreasing. The input must
/// be Hermitian within `1e-12` relative to its largest entry; the working
/// copy is symmetrized before iterating.
pub fn hermitian_eigenvalues(m: &DenseMatrix) -> Result<Vec<f64>> {
    if m.rows() != m.cols() {
        return Err(Error::DimensionMismatch(format!(
            "hermitian eigenvalues need a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let scale = m.max_abs();
    let dev = m.hermitian_deviation();
    if dev > 1e-12 * scale.max(1.0) {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: 1e-12 * scale.max(1.0),
        });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    // symmetrized complex working copy
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = (m.get(i, j) + m.get(j, i).conj()) * 0.5;
        }
    }
    hermitian_jacobi_in_place(&mut a, n, 1e-15 * scale);
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    eig.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(eig)
}

/// Two-sided Jacobi diagonalization of a Hermitian matrix held in a flat
/// row-major buffer; off-diagonal entries at or below `threshold` are left
/// alone. The eigenvalues end up on the diagonal.
pub(crate) fn hermitian_jacobi_in_place(a: &mut [Complex64], n: usize, threshold: f64) {
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let gamma = a[p * n + q];
                let g = gamma.norm();
                if g <= threshold || g == 0.0 {
                    continue;
                }
                rotated = true;
                // phase similarity making a[p][q] real positive
                let u = gamma / g;
                let uc = u.conj();
                for k in 0..n {
                    a[k * n + q] *= uc;
                }
                for k in 0..n {
                    a[q * n + k] *= u;
                }
                let alpha = a[p * n + p].re;
                let beta = a[q * n + q].re;
                let tau = (beta - alpha) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * c - akq * s;
                    a[k * n + q] = akp * s + akq * c;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * c - aqk * s;
                    a[q * n + k] = apk * s + aqk * c;
                }
                // pin the annihilated entry and keep the diagonal real
                a[p * n + q] = Complex64::new(0.0, 0.0);
                a[q * n + p] = Complex64::new(0.0, 0.0);
                a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);
            }
        }
        if !rotated {
            break;
        }
    }
}

/// Real symmetric variant of the in-place Jacobi diagonalization.
pub(crate) fn symmetric_jacobi_in_place(a: &mut [f64], n: usize, threshold: f64) {
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let gamma = a[p * n + q];
                if gamma.abs() <= threshold || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let tau = (a[q * n + q] - a[p * n + p]) / (2.0 * gamma);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * c - akq * s;
                    a[k * n + q] = akp * s + akq * c;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * c - aqk * s;
                    a[q * n + k] = apk * s + aqk * c;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
        if !rotated {
            break;
        }
    }
}

/// Spectral norm of a Hermitian matrix: `max |eigenvalue|`.
pub fn hermitian_spectral_norm(m: &DenseMatrix) -> Result<f64> {
    let eig = hermitian_eigenvalues(m)?;
    Ok(eig
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l.abs())))
}

/// `||scale * A*A - I||`, the approximate-identity gap of the scaled Gram
/// matrix. This is the per-trial statistic of every row/column verifier.
pub fn gram_identity_gap(a: &DenseMatrix, scale: f64) -> Result<f64> {
    let mut g = a.gram().scaled(scale);
    g.sub_scaled_identity(1.0);
    hermitian_spectral_norm(&g)
}

/// Result of [`isometry_gap`]: the Gram gap and the smallest `delta` with
/// `gap <= max(delta, delta^2)`.
#[derive(Debug, Clone, Copy)]
pub struct IsometryGap {
    pub gap: f64,
    pub delta_implied: f64,
}

/// Measures how far `B` is from an isometry. Also checks the forward
/// direction on the spot: every singular value of `B` must lie inside
/// `[1 - delta, 1 + delta]`.
pub fn isometry_gap(b: &DenseMatrix) -> Result<IsometryGap> {
    let gap = gram_identity_gap(b, 1.0)?;
    let delta = if gap <= 1.0 { gap } else { gap.sqrt() };
    let spec = svd_values(b)?;
    let slack = 1e-9 * (1.0 + delta);
    for &s in spec.values() {
        assert!(
            s >= 1.0 - delta - slack && s <= 1.0 + delta + slack,
            "singular value {s} escapes [1-delta, 1+delta] with delta = {delta}"
        );
    }
    Ok(IsometryGap {
        gap,
        delta_implied: delta,
    })
}
