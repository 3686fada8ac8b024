//! Sums of independent random matrices: the matrix Bernstein bound and its
//! empirical verification, Rudelson-inequality ratios, symmetrization,
//! scalar and matrix decoupling, and the Latala bound evaluator.
//!
//! Expectations of norms are estimated by sample means with reported
//! standard errors; inequality checks carry a three-standard-error slack
//! and use common random numbers whenever two Monte Carlo quantities are
//! compared.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rng::{SeedSpec, StreamRng};
use crate::spectra;

/// `min(1, 2n exp(-(t^2/2) / (sigma^2 + K t / 3)))`, the dimensional
/// Bernstein tail for a sum of independent centered self-adjoint n x n
/// matrices with `|X_i| <= K` and `|sum E X_i^2| <= sigma^2`.
pub fn matrix_bernstein_bound(n: usize, sigma2: f64, k_bound: f64, t: f64) -> f64 {
    assert!(t >= 0.0);
    let raw = 2.0 * n as f64 * (-(t * t / 2.0) / (sigma2 + k_bound * t / 3.0)).exp();
    raw.min(1.0)
}

/// The mixed-tail form `2n exp(-c min(t^2/sigma^2, t/K))` that the
/// dimensional Bernstein bound is equivalent to; used for cross-checks.
pub fn matrix_bernstein_mixed_form(n: usize, sigma2: f64, k_bound: f64, t: f64, c: f64) -> f64 {
    assert!(t >= 0.0);
    let quad = t * t / sigma2;
    let lin = t / k_bound;
    (2.0 * n as f64 * (-c * quad.min(lin)).exp()).min(1.0)
}

type MatrixGenerator = Box<dyn Fn(SeedSpec) -> DenseMatrix + Send + Sync>;

/// Generator of independent centered self-adjoint matrices with analytic
/// range and variance statistics.
pub struct MatrixSumEnsemble {
    pub name: String,
    pub dim: usize,
    pub count: usize,
    /// Almost-sure bound on `|X_i|`.
    pub k_bound: f64,
    /// `|sum_i E X_i^2|`.
    pub sigma2: f64,
    generator: MatrixGenerator,
}

impl MatrixSumEnsemble {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        count: usize,
        k_bound: f64,
        sigma2: f64,
        generator: impl Fn(SeedSpec) -> DenseMatrix + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            dim,
            count,
            k_bound,
            sigma2,
            generator: Box::new(generator),
        }
    }

    /// Term `i` of the trial with the given seed.
    pub fn term(&self, trial_seed: SeedSpec, i: usize) -> DenseMatrix {
        (self.generator)(trial_seed.substream(i as u64))
    }

    /// `X_i = eps_i diag(1, -1) / count`: K = 1/count, sigma^2 = 1/count.
    pub fn sign_diagonal(count: usize) -> Self {
        assert!(count > 0);
        let inv = 1.0 / count as f64;
        Self::new(
            format!("sign_diagonal(count={count})"),
            2,
            count,
            inv,
            count as f64 * inv * inv,
            move |seed| {
                let mut rng = StreamRng::new(seed);
                let s = rng.sign() * inv;
                DenseMatrix::diagonal(&[s, -s])
            },
        )
    }

    /// A single `eps E_11`, the small-t cap exercise.
    pub fn single_sign_unit(dim: usize) -> Self {
        Self::new(format!("single_sign_unit(dim={dim})"), dim, 1, 1.0, 1.0, move |seed| {
            let mut rng = StreamRng::new(seed);
            let mut m = DenseMatrix::zeros(dim, dim);
            m.set(0, 0, rng.sign());
            m
        })
    }

    /// Centered coordinate rank-one terms `(Y (x) Y - I) / count` with `Y`
    /// a coordinate random vector in dimension `dim`.
    pub fn centered_coordinate_rank_one(dim: usize, count: usize) -> Self {
        assert!(dim > 0 && count > 0);
        let inv = 1.0 / count as f64;
        // |Y (x) Y - I| = max(n - 1, 1) = n - 1 for n >= 2;
        // E (Y(x)Y - I)^2 = (n - 2) Y-average + ... bounded by n I, so
        // sigma^2 <= count * inv^2 * n = n / count.
        let k = inv * ((dim as f64 - 1.0).max(1.0));
        let sigma2 = dim as f64 * inv;
        Self::new(
            format!("centered_coordinate_rank_one(dim={dim},count={count})"),
            dim,
            count,
            k,
            sigma2,
            move |seed| {
                let mut rng = StreamRng::new(seed);
                let i = rng.below(dim as u64) as usize;
                let mut m = DenseMatrix::zeros(dim, dim);
                // sqrt(n) e_i (x) sqrt(n) e_i - I
                for d in 0..dim {
                    m.set(d, d, -inv);
                }
                m.set(i, i, (dim as f64 - 1.0) * inv);
                m
            },
        )
    }
}

/// One grid row of [`empirical_matrix_sum_tail`].
#[derive(Debug, Clone, Copy)]
pub struct TailGridPoint {
    pub t: f64,
    pub empirical: f64,
    pub bound: f64,
    pub mc_standard_error: f64,
}

#[derive(Debug, Clone)]
pub struct MatrixSumTailReport {
    pub points: Vec<TailGridPoint>,
    /// `max_t (empirical - bound - 3 se)`; nonpositive when the bound holds
    /// with Monte Carlo slack everywhere.
    pub worst_margin: f64,
    pub trials: usize,
}

/// Empirical tail of `|sum_i X_i|` against the matrix Bernstein bound.
/// Every generated term is validated against the ensemble's self-adjoint
/// and range invariants; a violation identifies the offending draw.
pub fn empirical_matrix_sum_tail(
    ensemble: &MatrixSumEnsemble,
    t_grid: &[f64],
    trials: usize,
    seed: SeedSpec,
) -> Result<MatrixSumTailReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let norms: Vec<Result<f64>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = seed.substream(trial as u64);
            let mut sum = DenseMatrix::zeros(ensemble.dim, ensemble.dim);
            for i in 0..ensemble.count {
                let x = ensemble.term(trial_seed, i);
                if x.rows() != ensemble.dim || x.cols() != ensemble.dim {
                    return Err(Error::DimensionMismatch(format!(
                        "trial {trial} term {i}: expected {0}x{0}",
                        ensemble.dim
                    )));
                }
                let dev = x.hermitian_deviation();
                if dev > 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "trial {trial} term {i} is not self-adjoint (deviation {dev:e})"
                    )));
                }
                let norm = spectra::hermitian_spectral_norm(&x)?;
                if norm > ensemble.k_bound + 1e-9 {
                    return Err(Error::InvalidArgument(format!(
                        "trial {trial} term {i} violates the range bound: |X| = {norm} > K = {}",
                        ensemble.k_bound
                    )));
                }
                for r in 0..ensemble.dim {
                    for c in 0..ensemble.dim {
                        let v = sum.get_real(r, c) + x.get_real(r, c);
                        sum.set(r, c, v);
                    }
                }
            }
            spectra::hermitian_spectral_norm(&sum)
        })
        .collect();
    let norms: Vec<f64> = norms.into_iter().collect::<Result<_>>()?;

    let mut points = Vec::with_capacity(t_grid.len());
    let mut worst: f64 = f64::NEG_INFINITY;
    for &t in t_grid {
        let hits = norms.iter().filter(|&&x| x >= t).count();
        let p = hits as f64 / trials as f64;
        let bound = matrix_bernstein_bound(ensemble.dim, ensemble.sigma2, ensemble.k_bound, t);
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        worst = worst.max(p - bound - 3.0 * se);
        points.push(TailGridPoint {
            t,
            empirical: p,
            bound,
            mc_standard_error: se,
        });
    }
    Ok(MatrixSumTailReport {
        points,
        worst_margin: worst,
        trials,
    })
}

/// Monte Carlo mean of `|sum eps_i x_i (x) x_i|` divided by
/// `sqrt(log min(N,n)) * max |x_i| * |sum x_i (x) x_i|^{1/2}`.
pub fn rudelson_ratio(vectors: &[Vec<f64>], trials: usize, seed: SeedSpec) -> Result<f64> {
    let n_vec = vectors.len();
    if n_vec < 2 {
        return Err(Error::InvalidArgument("need at least two vectors".into()));
    }
    let dim = vectors[0].len();
    if dim < 2 || vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::InvalidArgument(
            "vectors must share a dimension >= 2".into(),
        ));
    }
    let max_norm = vectors
        .iter()
        .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);
    if max_norm == 0.0 {
        return Err(Error::InvalidArgument(
            "all-zero vector set has a vanishing denominator".into(),
        ));
    }
    let mut base = DenseMatrix::zeros(dim, dim);
    for v in vectors {
        accumulate_outer(&mut base, v, 1.0);
    }
    let base_norm = spectra::hermitian_spectral_norm(&base)?;
    let denom = ((n_vec.min(dim)) as f64).ln().sqrt() * max_norm * base_norm.sqrt();

    let mean: f64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = StreamRng::new(seed.substream(trial as u64));
            let mut m = DenseMatrix::zeros(dim, dim);
            for v in vectors {
                accumulate_outer(&mut m, v, rng.sign());
            }
            spectra::hermitian_spectral_norm(&m).expect("outer-product sums are Hermitian")
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum::<f64>()
        / trials as f64;

    Ok(mean / denom)
}

fn accumulate_outer(m: &mut DenseMatrix, v: &[f64], weight: f64) {
    for (i, &vi) in v.iter().enumerate() {
        let a = vi * weight;
        if a != 0.0 {
            for (j, &vj) in v.iter().enumerate() {
                let cur = m.get_real(i, j);
                m.set(i, j, cur + a * vj);
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SymmetrizationCheck {
    /// `E |sum (X_i - E X_i)|`.
    pub lhs: f64,
    /// `E |sum eps_i X_i|`.
    pub rhs: f64,
    pub lhs_se: f64,
    pub rhs_se: f64,
    /// `lhs / rhs`.
    pub ratio: f64,
    /// `lhs <= 2 rhs + 3 (lhs_se + 2 rhs_se)`.
    pub holds: bool,
}

/// Compares `E |sum (X_i - E X_i)|` with `2 E |sum eps_i X_i|` using common
/// random numbers: both sides see the same draws of `X_i`.
pub fn symmetrization_check(
    generator: impl Fn(SeedSpec) -> DenseMatrix + Sync,
    mean: &DenseMatrix,
    count: usize,
    trials: usize,
    seed: SeedSpec,
) -> Result<SymmetrizationCheck> {
    if count == 0 || trials == 0 {
        return Err(Error::InvalidArgument("count and trials must be positive".into()));
    }
    let dim = mean.rows();
    let pairs: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = seed.substream(trial as u64);
            let mut centered = DenseMatrix::zeros(dim, dim);
            let mut signed = DenseMatrix::zeros(dim, dim);
            // signs come from a dedicated substream so the X draws are
            // shared between both sides
            let mut sign_rng = StreamRng::new(trial_seed.substream(u64::MAX));
            for i in 0..count {
                let x = generator(trial_seed.substream(i as u64));
                let eps = sign_rng.sign();
                for r in 0..dim {
                    for c in 0..dim {
                        let xv = x.get_real(r, c);
                        let cur = centered.get_real(r, c);
                        centered.set(r, c, cur + xv - mean.get_real(r, c));
                        let cur = signed.get_real(r, c);
                        signed.set(r, c, cur + eps * xv);
                    }
                }
            }
            let lhs = spectra::svd_values(&centered).expect("finite").s_max();
            let rhs = spectra::svd_values(&signed).expect("finite").s_max();
            (lhs, rhs)
        })
        .collect();

    let n = trials as f64;
    let lhs = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let rhs = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let lhs_var = pairs.iter().map(|p| (p.0 - lhs).powi(2)).sum::<f64>() / n;
    let rhs_var = pairs.iter().map(|p| (p.1 - rhs).powi(2)).sum::<f64>() / n;
    let (lhs_se, rhs_se) = ((lhs_var / n).sqrt(), (rhs_var / n).sqrt());
    let holds = lhs <= 2.0 * rhs + 3.0 * (lhs_se + 2.0 * rhs_se);
    Ok(SymmetrizationCheck {
        lhs,
        rhs,
        lhs_se,
        rhs_se,
        ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 },
        holds,
    })
}

#[derive(Debug, Clone)]
pub struct DecouplingIdentity {
    /// `sum_{i != j} a_ij`.
    pub lhs: f64,
    /// `4 * 2^{-n} sum_T sum_{i in T, j not in T} a_ij`.
    pub rhs_exact: f64,
    /// `min_T sum_{i in T, j not in T} a_ij`.
    pub min_over_subsets: f64,
    /// `max_T sum_{i in T, j not in T} a_ij`.
    pub max_over_subsets: f64,
}

/// Exact decoupling identity for a zero-diagonal square matrix via full
/// subset enumeration (`n <= 16`).
pub fn decoupling_identity(a: &DenseMatrix) -> Result<DecouplingIdentity> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch("need a square matrix".into()));
    }
    if a.is_complex() {
        return Err(Error::InvalidArgument("decoupling sums are real".into()));
    }
    let n = a.rows();
    if n > 16 {
        return Err(Error::BudgetExceeded(format!(
            "subset enumeration handles n <= 16, got {n}"
        )));
    }
    for i in 0..n {
        if a.get_real(i, i) != 0.0 {
            return Err(Error::InvalidArgument(format!(
                "diagonal entry ({i}, {i}) must be zero"
            )));
        }
    }
    let mut lhs = 0.0;
    for i in 0..n {
        for j in 0..n {
            lhs += a.get_real(i, j);
        }
    }
    let mut total = 0.0;
    let mut min_cross = f64::INFINITY;
    let mut max_cross = f64::NEG_INFINITY;
    for mask in 0u32..(1u32 << n) {
        let mut cross = 0.0;
        for i in 0..n {
            if mask >> i & 1 == 1 {
                for j in 0..n {
                    if mask >> j & 1 == 0 {
                        cross += a.get_real(i, j);
                    }
                }
            }
        }
        total += cross;
        min_cross = min_cross.min(cross);
        max_cross = max_cross.max(cross);
    }
    let rhs = 4.0 * total / (1u64 << n) as f64;
    assert!(
        (lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()),
        "decoupling identity violated: lhs {lhs}, rhs {rhs}"
    );
    Ok(DecouplingIdentity {
        lhs,
        rhs_exact: rhs,
        min_over_subsets: min_cross,
        max_over_subsets: max_cross,
    })
}

#[derive(Debug, Clone)]
pub struct MatrixDecoupling {
    /// `|B*B - I|`.
    pub lhs: f64,
    /// `4 max_T |(B_T)* B_{T^c}|` over the examined subsets.
    pub rhs: f64,
    pub exhaustive: bool,
    pub subsets_examined: usize,
}

/// Decoupling bound for the Gram gap of a unit-column matrix. Enumerates
/// all `2^n` subsets when `n <= 12`, otherwise samples `subset_budget`
/// random subsets; with exhaustive enumeration `lhs <= rhs` is asserted.
pub fn matrix_decoupling_bound(
    b: &DenseMatrix,
    subset_budget: usize,
    seed: SeedSpec,
) -> Result<MatrixDecoupling> {
    let n = b.cols();
    for (j, norm) in b.column_norms().iter().enumerate() {
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::ColumnNotNormalized {
                index: j,
                norm: *norm,
                expected: 1.0,
            });
        }
    }
    let gram = b.gram();
    let mut gap = gram.clone();
    gap.sub_scaled_identity(1.0);
    let lhs = spectra::hermitian_spectral_norm(&gap)?;

    let exhaustive = n <= 12;
    let masks: Vec<u64> = if exhaustive {
        (0..(1u64 << n)).collect()
    } else {
        let mut rng = StreamRng::new(seed);
        (0..subset_budget).map(|_| rng.next_u64() & ((1u64 << n) - 1)).collect()
    };

    let rhs_max = masks
        .par_iter()
        .map(|&mask| {
            let inside: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let outside: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
            if inside.is_empty() || outside.is_empty() {
                return 0.0;
            }
            let block = gram.select_rows(&inside).select_columns(&outside);
            spectra::svd_values(&block).expect("finite").s_max()
        })
        .reduce(|| 0.0, f64::max);

    let rhs = 4.0 * rhs_max;
    if exhaustive {
        assert!(
            lhs <= rhs + 1e-12 * (1.0 + rhs),
            "matrix decoupling bound violated: lhs {lhs} > rhs {rhs}"
        );
    }
    Ok(MatrixDecoupling {
        lhs,
        rhs,
        exhaustive,
        subsets_examined: masks.len(),
    })
}

/// Three-term Latala sum
/// `max_i (sum_j E a_ij^2)^{1/2} + max_j (sum_i E a_ij^2)^{1/2} + (sum_ij E a_ij^4)^{1/4}`
/// from per-entry second and fourth moments.
pub fn latala_bound(second_moments: &DenseMatrix, fourth_moments: &DenseMatrix) -> Result<f64> {
    if second_moments.rows() != fourth_moments.rows()
        || second_moments.cols() != fourth_moments.cols()
    {
        return Err(Error::DimensionMismatch(
            "moment tables must share a shape".into(),
        ));
    }
    if second_moments.is_complex() || fourth_moments.is_complex() {
        return Err(Error::InvalidArgument("moment tables are real".into()));
    }
    let (rows, cols) = (second_moments.rows(), second_moments.cols());
    let all_nonneg = |m: &DenseMatrix| {
        (0..rows).all(|i| (0..cols).all(|j| m.get_real(i, j) >= 0.0))
    };
    if !all_nonneg(second_moments) || !all_nonneg(fourth_moments) {
        return Err(Error::InvalidArgument("moments must be nonnegative".into()));
    }
    let row_term = (0..rows)
        .map(|i| (0..cols).map(|j| second_moments.get_real(i, j)).sum::<f64>())
        .fold(0.0f64, f64::max)
        .sqrt();
    let col_term = (0..cols)
        .map(|j| (0..rows).map(|i| second_moments.get_real(i, j)).sum::<f64>())
        .fold(0.0f64, f64::max)
        .sqrt();
    let fourth_term = (0..rows)
        .map(|i| (0..cols).map(|j| fourth_moments.get_real(i, j)).sum::<f64>())
        .sum::<f64>()
        .powf(0.25);
    Ok(row_term + col_term + fourth_term)
}

/// Latala sum for iid entries with the given variance and fourth moment.
pub fn latala_bound_iid(rows: usize, cols: usize, variance: f64, fourth_moment: f64) -> f64 {
    let second = vec![variance; rows * cols];
    let fourth = vec![fourth_moment; rows * cols];
    latala_bound(
        &DenseMatrix::from_row_major(rows, cols, second).expect("finite"),
        &DenseMatrix::from_row_major(rows, cols, fourth).expect("finite"),
    )
    .expect("well-formed tables")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed(i: u64) -> SeedSpec {
        SeedSpec::new(0x5D4, i)
    }

    #[test]
    fn bernstein_bound_examples() {
        assert_eq!(matrix_bernstein_bound(3, 1.0, 1.0, 0.0), 1.0);
        let v = matrix_bernstein_bound(2, 1.0, 1.0, 3.0);
        assert!((v - 4.0 * (-2.25f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn bernstein_dominates_mixed_form_with_quarter_constant() {
        // the closed form is at most the mixed form with c = 1/4
        for &t in &[0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 40.0] {
            let closed = matrix_bernstein_bound(4, 1.5, 0.7, t);
            let mixed = matrix_bernstein_mixed_form(4, 1.5, 0.7, t, 0.25);
            assert!(closed <= mixed + 1e-12, "t = {t}: {closed} > {mixed}");
        }
    }

    #[test]
    fn sign_diagonal_tail_never_violates() {
        let ens = MatrixSumEnsemble::sign_diagonal(20);
        assert!((ens.sigma2 - 0.05).abs() < 1e-15);
        assert!((ens.k_bound - 0.05).abs() < 1e-15);
        let report =
            empirical_matrix_sum_tail(&ens, &[0.0, 0.25, 0.5, 1.0, 1.5], 500, seed(1)).unwrap();
        assert!(report.worst_margin <= 0.0, "margin {}", report.worst_margin);
        // sums of 20 sign-diagonals over 20 are bounded by 1
        let last = report.points.last().unwrap();
        assert_eq!(last.empirical, 0.0);
    }

    #[test]
    fn single_sign_unit_small_t_cap() {
        let ens = MatrixSumEnsemble::single_sign_unit(2);
        let report = empirical_matrix_sum_tail(&ens, &[0.5], 50, seed(2)).unwrap();
        assert_eq!(report.points[0].empirical, 1.0);
        assert_eq!(report.points[0].bound, 1.0); // capped
    }

    #[test]
    fn tail_beyond_count_times_k_is_zero() {
        let ens = MatrixSumEnsemble::sign_diagonal(8);
        let beyond = 8.0 * ens.k_bound + 0.1;
        let report = empirical_matrix_sum_tail(&ens, &[beyond], 200, seed(3)).unwrap();
        assert_eq!(report.points[0].empirical, 0.0);
    }

    #[test]
    fn ensemble_invariant_violation_identifies_draw() {
        let bad = MatrixSumEnsemble::new("bad", 2, 3, 0.5, 1.0, |_| {
            DenseMatrix::diagonal(&[1.0, -1.0]) // norm 1 > K = 0.5
        });
        let err = empirical_matrix_sum_tail(&bad, &[1.0], 2, seed(4)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("term 0"), "{msg}");
    }

    #[test]
    fn rudelson_orthonormal_case() {
        let n = 10usize;
        let vectors: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                v
            })
            .collect();
        let ratio = rudelson_ratio(&vectors, 64, seed(5)).unwrap();
        let expect = 1.0 / (n as f64).ln().sqrt();
        assert!((ratio - expect).abs() < 1e-12, "ratio {ratio}");
    }

    #[test]
    fn rudelson_repeated_vector() {
        // N copies of e_1: |sum eps x (x) x| = |sum eps|
        let n_copies = 20;
        let vectors: Vec<Vec<f64>> = (0..n_copies).map(|_| vec![1.0, 0.0]).collect();
        let ratio = rudelson_ratio(&vectors, 4000, seed(6)).unwrap();
        // exact E|S_20| = 3.52394104003906...; denominator sqrt(ln 2) sqrt(20)
        let exact = 3.523_941_040_039_062_5 / (2.0f64.ln().sqrt() * 20.0f64.sqrt());
        assert!((ratio - exact).abs() < 0.05, "ratio {ratio} vs {exact}");
    }

    #[test]
    fn rudelson_rejects_zero_vectors() {
        let vectors = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        assert!(rudelson_ratio(&vectors, 10, seed(7)).is_err());
    }

    #[test]
    fn symmetrization_symmetric_terms() {
        // X_i symmetric (eps * diag(1,-1)): lhs should match rhs
        let gen = |seed: SeedSpec| {
            let mut rng = StreamRng::new(seed);
            let s = rng.sign();
            DenseMatrix::diagonal(&[s, -s])
        };
        let mean = DenseMatrix::zeros(2, 2);
        let check = symmetrization_check(gen, &mean, 16, 400, seed(8)).unwrap();
        assert!(check.holds);
        assert!(check.ratio < 1.3, "ratio {}", check.ratio);
    }

    #[test]
    fn symmetrization_deterministic_terms() {
        // X_i = C constant: lhs = 0
        let gen = |_seed: SeedSpec| DenseMatrix::diagonal(&[2.0, 1.0]);
        let mean = DenseMatrix::diagonal(&[2.0, 1.0]);
        let check = symmetrization_check(gen, &mean, 8, 100, seed(9)).unwrap();
        assert!(check.lhs < 1e-12);
        assert!(check.holds);
    }

    #[test]
    fn decoupling_identity_small_cases() {
        let mut a = DenseMatrix::zeros(2, 2);
        a.set(0, 1, 1.0);
        let d = decoupling_identity(&a).unwrap();
        assert!((d.lhs - 1.0).abs() < 1e-15);
        assert!((d.rhs_exact - 1.0).abs() < 1e-15);

        let mut a = DenseMatrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    a.set(i, j, 1.0);
                }
            }
        }
        let d = decoupling_identity(&a).unwrap();
        assert!((d.lhs - 6.0).abs() < 1e-15);
        assert!((d.rhs_exact - 6.0).abs() < 1e-12);
        assert_eq!(d.min_over_subsets, 0.0); // empty and full subsets
        assert!((d.max_over_subsets - 2.25).abs() > -1.0); // exists
    }

    #[test]
    fn decoupling_rejects_nonzero_diagonal() {
        let a = DenseMatrix::identity(3);
        assert!(decoupling_identity(&a).is_err());
    }

    #[test]
    fn matrix_decoupling_examples() {
        // orthonormal columns: both sides vanish
        let mut b = DenseMatrix::zeros(4, 3);
        for i in 0..3 {
            b.set(i, i, 1.0);
        }
        let d = matrix_decoupling_bound(&b, 0, seed(10)).unwrap();
        assert!(d.lhs < 1e-12 && d.rhs < 1e-12);
        assert!(d.exhaustive);

        // two identical unit columns: lhs = 1, rhs = 4
        let b = DenseMatrix::from_rows(vec![vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let d = matrix_decoupling_bound(&b, 0, seed(11)).unwrap();
        assert!((d.lhs - 1.0).abs() < 1e-12);
        assert!((d.rhs - 4.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_decoupling_rejects_unnormalized() {
        let b = DenseMatrix::diagonal(&[2.0, 1.0]);
        assert!(matches!(
            matrix_decoupling_bound(&b, 0, seed(12)),
            Err(Error::ColumnNotNormalized { index: 0, .. })
        ));
    }

    #[test]
    fn latala_examples() {
        let v = latala_bound_iid(100, 100, 1.0, 3.0);
        assert!((v - 33.160_740_129_524_925).abs() < 1e-9);
        let zero = latala_bound_iid(5, 7, 0.0, 0.0);
        assert_eq!(zero, 0.0);
    }
}
