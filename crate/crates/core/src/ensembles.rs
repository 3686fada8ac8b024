//! Isotropic (and deliberately non-isotropic) high-dimensional samplers.
//!
//! A [`DistributionSpec`] pairs a sampling recipe with its exact analytic
//! metadata: whether `E X (x) X = I` holds, a sub-gaussian norm bound when
//! one is known in closed form, and an almost-sure Euclidean norm bound
//! `sqrt(m)` when the support is bounded. The metadata is what the theorem
//! verifiers consume; samplers are pure functions of `(spec, seed)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rng::{SeedSpec, StreamRng};
use crate::spectra;

/// Frame validation tolerance: constructed tight frames satisfy the
/// Parseval identity to machine precision, loose inputs must fail loudly.
pub const FRAME_TOL: f64 = 1e-10;

/// Zero-mean unit-variance scalar laws for product distributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ComponentLaw {
    /// Uniform on `[-sqrt(3), sqrt(3)]`.
    Uniform,
    /// Takes `sqrt((1-p)/p)` with probability `p`, else `-sqrt(p/(1-p))`.
    TwoPoint { p: f64 },
}

impl ComponentLaw {
    fn sample(&self, rng: &mut StreamRng) -> f64 {
        match self {
            ComponentLaw::Uniform => 3.0f64.sqrt() * rng.symmetric_uniform(),
            ComponentLaw::TwoPoint { p } => {
                let hi = ((1.0 - p) / p).sqrt();
                let lo = -(p / (1.0 - p)).sqrt();
                if rng.uniform() < *p {
                    hi
                } else {
                    lo
                }
            }
        }
    }

    fn sup_abs(&self) -> f64 {
        match self {
            ComponentLaw::Uniform => 3.0f64.sqrt(),
            ComponentLaw::TwoPoint { p } => {
                ((1.0 - p) / p).sqrt().max((p / (1.0 - p)).sqrt())
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let ComponentLaw::TwoPoint { p } = self {
            if !(*p > 0.0 && *p < 1.0) {
                return Err(Error::InvalidSpec(format!(
                    "two-point probability must lie in (0,1), got {p}"
                )));
            }
        }
        Ok(())
    }
}

/// A validated tight frame: `M` vectors in dimension `n` with
/// `(1/M) sum u_i (x) u_i = I` to within [`FRAME_TOL`] in spectral norm.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSet {
    vectors: DenseMatrix, // M x n, one frame vector per row
    max_norm: f64,
}

impl FrameSet {
    pub fn new(vectors: DenseMatrix) -> Result<Self> {
        if vectors.is_complex() {
            return Err(Error::InvalidSpec("frame vectors must be real".into()));
        }
        let m = vectors.rows();
        if m == 0 {
            return Err(Error::InvalidSpec("frame needs at least one vector".into()));
        }
        let gap = spectra::gram_identity_gap(&vectors, 1.0 / m as f64)?;
        if gap > FRAME_TOL {
            return Err(Error::InvalidSpec(format!(
                "not a tight frame with bounds A = B = M: |(1/M) sum u u^T - I| = {gap:.3e} > {FRAME_TOL:e}"
            )));
        }
        let max_norm = (0..m)
            .map(|i| {
                vectors
                    .row(i)
                    .iter()
                    .map(|x| x * x)
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0f64, f64::max);
        Ok(Self { vectors, max_norm })
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        Self::new(DenseMatrix::from_csv(text)?)
    }

    pub fn len(&self) -> usize {
        self.vectors.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        self.vectors.row(i)
    }

    pub fn max_norm(&self) -> f64 {
        self.max_norm
    }

    pub fn vectors(&self) -> &DenseMatrix {
        &self.vectors
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Variant {
    Gaussian,
    Bernoulli,
    ProductSubgaussian(ComponentLaw),
    Coordinate,
    Spherical,
    Frame(FrameSet),
    BoundedSelector {
        probability: f64,
        inner: Box<DistributionSpec>,
    },
    DftRow,
    HadamardRow,
    LinearImage {
        inner: Box<DistributionSpec>,
        sqrt_sigma: DenseMatrix,
    },
}

/// Declarative description of a high-dimensional distribution together
/// with its analytic metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSpec {
    dim: usize,
    variant: Variant,
    analytic_isotropic: bool,
    psi2_bound: Option<f64>,
    norm_bound: Option<f64>,
    exact_norm: bool,
}

impl DistributionSpec {
    fn check_dim(dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(Error::InvalidSpec("dimension must be positive".into()));
        }
        Ok(())
    }

    pub fn gaussian(dim: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        Ok(Self {
            dim,
            variant: Variant::Gaussian,
            analytic_isotropic: true,
            // marginals are standard normal in every direction; the moment
            // supremum is attained at p = 1
            psi2_bound: Some((2.0 / std::f64::consts::PI).sqrt()),
            norm_bound: None,
            exact_norm: false,
        })
    }

    pub fn bernoulli(dim: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        Ok(Self {
            dim,
            variant: Variant::Bernoulli,
            analytic_isotropic: true,
            psi2_bound: Some(1.0),
            norm_bound: Some((dim as f64).sqrt()),
            exact_norm: true,
        })
    }

    pub fn product(dim: usize, law: ComponentLaw) -> Result<Self> {
        Self::check_dim(dim)?;
        law.validate()?;
        Ok(Self {
            dim,
            variant: Variant::ProductSubgaussian(law),
            analytic_isotropic: true,
            psi2_bound: None,
            norm_bound: Some(law.sup_abs() * (dim as f64).sqrt()),
            exact_norm: false,
        })
    }

    pub fn coordinate(dim: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        Ok(Self {
            dim,
            variant: Variant::Coordinate,
            analytic_isotropic: true,
            psi2_bound: None,
            norm_bound: Some((dim as f64).sqrt()),
            exact_norm: true,
        })
    }

    pub fn spherical(dim: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        Ok(Self {
            dim,
            variant: Variant::Spherical,
            analytic_isotropic: true,
            // the sub-gaussian norm is dimension-free but has no closed
            // form; estimate it empirically via scalartails when needed
            psi2_bound: None,
            norm_bound: Some((dim as f64).sqrt()),
            exact_norm: true,
        })
    }

    pub fn frame(frame: FrameSet) -> Result<Self> {
        let dim = frame.dim();
        Self::check_dim(dim)?;
        let norms: Vec<f64> = (0..frame.len())
            .map(|i| frame.vector(i).iter().map(|x| x * x).sum::<f64>().sqrt())
            .collect();
        let exact_norm = norms
            .iter()
            .all(|&n| (n - norms[0]).abs() <= 1e-12 * norms[0].max(1.0));
        Ok(Self {
            dim,
            norm_bound: Some(frame.max_norm()),
            variant: Variant::Frame(frame),
            analytic_isotropic: true,
            psi2_bound: None,
            exact_norm,
        })
    }

    pub fn bounded_selector(probability: f64, inner: DistributionSpec) -> Result<Self> {
        if !(probability > 0.0 && probability <= 1.0) {
            return Err(Error::InvalidSpec(format!(
                "selector probability must lie in (0, 1], got {probability}"
            )));
        }
        let dim = inner.dim;
        Ok(Self {
            dim,
            analytic_isotropic: inner.analytic_isotropic,
            psi2_bound: None,
            norm_bound: inner.norm_bound.map(|b| b / probability.sqrt()),
            exact_norm: false,
            variant: Variant::BoundedSelector {
                probability,
                inner: Box::new(inner),
            },
        })
    }

    pub fn dft_row(dim: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        Ok(Self {
            dim,
            variant: Variant::DftRow,
            analytic_isotropic: true,
            psi2_bound: None,
            norm_bound: Some((dim as f64).sqrt()),
            exact_norm: true,
        })
    }

    pub fn hadamard_row(dim: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        if !dim.is_power_of_two() {
            return Err(Error::InvalidSpec(format!(
                "Hadamard rows need a power-of-two dimension, got {dim}"
            )));
        }
        Ok(Self {
            dim,
            variant: Variant::HadamardRow,
            analytic_isotropic: true,
            psi2_bound: None,
            norm_bound: Some((dim as f64).sqrt()),
            exact_norm: true,
        })
    }

    pub fn linear_image(inner: DistributionSpec, sqrt_sigma: DenseMatrix) -> Result<Self> {
        if sqrt_sigma.is_complex() {
            return Err(Error::InvalidSpec(
                "linear image transform must be real".into(),
            ));
        }
        if sqrt_sigma.cols() != inner.dim {
            return Err(Error::DimensionMismatch(format!(
                "transform has {} columns but inner dimension is {}",
                sqrt_sigma.cols(),
                inner.dim
            )));
        }
        let dim = sqrt_sigma.rows();
        Self::check_dim(dim)?;
        let norm_bound = match inner.norm_bound {
            Some(b) => Some(spectra::spectral_norm(&sqrt_sigma)? * b),
            None => None,
        };
        Ok(Self {
            dim,
            analytic_isotropic: false,
            psi2_bound: None,
            norm_bound,
            exact_norm: false,
            variant: Variant::LinearImage {
                inner: Box::new(inner),
                sqrt_sigma,
            },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn variant(&self) -> &Variant {
        &self.variant
    }

    /// Whether `E X (x) X = I` holds exactly.
    pub fn analytic_isotropic(&self) -> bool {
        self.analytic_isotropic
    }

    /// Known closed-form bound on `sup_x |<X, x>|_psi2`, when available.
    pub fn psi2_bound(&self) -> Option<f64> {
        self.psi2_bound
    }

    /// `sqrt(m)` with `|X|_2 <= sqrt(m)` almost surely, when the support
    /// is bounded.
    pub fn norm_bound(&self) -> Option<f64> {
        self.norm_bound
    }

    /// Whether every sample has exactly the same Euclidean norm (the
    /// normalization hypothesis of the column-model results).
    pub fn has_exact_norm(&self) -> bool {
        self.exact_norm
    }

    /// Second moment matrix `Sigma = E X (x) X`, when known analytically.
    pub fn second_moment(&self) -> Option<DenseMatrix> {
        if self.analytic_isotropic {
            return Some(DenseMatrix::identity(self.dim));
        }
        match &self.variant {
            Variant::LinearImage { inner, sqrt_sigma } if inner.analytic_isotropic => {
                Some(sqrt_sigma.matmul(&sqrt_sigma.adjoint()).expect("square"))
            }
            _ => None,
        }
    }

    pub fn produces_complex(&self) -> bool {
        matches!(self.variant, Variant::DftRow)
    }

    fn sample_into(&self, rng: &mut StreamRng) -> Sample {
        let n = self.dim;
        match &self.variant {
            Variant::Gaussian => {
                let mut v = vec![0.0; n];
                rng.fill_normal(&mut v);
                Sample::Real(v)
            }
            Variant::Bernoulli => Sample::Real((0..n).map(|_| rng.sign()).collect()),
            Variant::ProductSubgaussian(law) => {
                Sample::Real((0..n).map(|_| law.sample(rng)).collect())
            }
            Variant::Coordinate => {
                let i = rng.below(n as u64) as usize;
                let mut v = vec![0.0; n];
                v[i] = (n as f64).sqrt();
                Sample::Real(v)
            }
            Variant::Spherical => {
                loop {
                    let mut v = vec![0.0; n];
                    rng.fill_normal(&mut v);
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if norm > 0.0 {
                        let f = (n as f64).sqrt() / norm;
                        for x in &mut v {
                            *x *= f;
                        }
                        return Sample::Real(v);
                    }
                }
            }
            Variant::Frame(frame) => {
                let i = rng.below(frame.len() as u64) as usize;
                Sample::Real(frame.vector(i).to_vec())
            }
            Variant::BoundedSelector { probability, inner } => {
                let selected = rng.uniform() < *probability;
                let inner_sample = inner.sample_into(rng);
                if selected {
                    inner_sample.scaled(1.0 / probability.sqrt())
                } else {
                    match inner_sample {
                        Sample::Real(v) => Sample::Real(vec![0.0; v.len()]),
                        Sample::Complex(v) => {
                            Sample::Complex(vec![Complex64::new(0.0, 0.0); v.len()])
                        }
                    }
                }
            }
            Variant::DftRow => {
                let omega = rng.below(n as u64);
                Sample::Complex(dft_row_entries(n, omega as usize))
            }
            Variant::HadamardRow => {
                let omega = rng.below(n as u64) as usize;
                Sample::Real(
                    (0..n)
                        .map(|t| {
                            if (omega & t).count_ones().is_multiple_of(2) {
                                1.0
                            } else {
                                -1.0
                            }
                        })
                        .collect(),
                )
            }
            Variant::LinearImage { inner, sqrt_sigma } => {
                let y = inner.sample_into(rng);
                match y {
                    Sample::Real(v) => Sample::Real(sqrt_sigma.apply(&v)),
                    Sample::Complex(_) => {
                        unreachable!("linear images of complex inner specs are not constructed")
                    }
                }
            }
        }
    }
}

/// Row `omega` of the n x n DFT matrix, `exp(-2 pi i omega t / n)`.
/// Quarter-turn entries are constructed exactly.
pub(crate) fn dft_row_entries(n: usize, omega: usize) -> Vec<Complex64> {
    (0..n)
        .map(|t| {
            let r = (omega * t) % n;
            match (4 * r, n) {
                (0, _) => Complex64::new(1.0, 0.0),
                (x, _) if x == n => Complex64::new(0.0, -1.0),
                (x, _) if x == 2 * n => Complex64::new(-1.0, 0.0),
                (x, _) if x == 3 * n => Complex64::new(0.0, 1.0),
                _ => {
                    let theta = -2.0 * std::f64::consts::PI * r as f64 / n as f64;
                    Complex64::new(theta.cos(), theta.sin())
                }
            }
        })
        .collect()
}

/// One draw from a spec: a real vector, or complex for DFT rows.
#[derive(Debug, Clone, PartialEq)]
pub enum Sample {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl Sample {
    pub fn dim(&self) -> usize {
        match self {
            Sample::Real(v) => v.len(),
            Sample::Complex(v) => v.len(),
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, Sample::Complex(_))
    }

    pub fn norm(&self) -> f64 {
        match self {
            Sample::Real(v) => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Sample::Complex(v) => v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        }
    }

    pub fn as_real(&self) -> &[f64] {
        match self {
            Sample::Real(v) => v,
            Sample::Complex(_) => panic!("expected a real sample"),
        }
    }

    pub fn scaled(&self, f: f64) -> Sample {
        match self {
            Sample::Real(v) => Sample::Real(v.iter().map(|x| x * f).collect()),
            Sample::Complex(v) => Sample::Complex(v.iter().map(|z| z * f).collect()),
        }
    }
}

/// One draw; pure function of `(spec, seed)`.
pub fn sample_vector(spec: &DistributionSpec, seed: SeedSpec) -> Sample {
    let mut rng = StreamRng::new(seed);
    spec.sample_into(&mut rng)
}

/// `num_rows` independent draws stacked as rows. Row `i` is exactly
/// `sample_vector(spec, seed.substream(i))`, so any row is reproducible
/// in isolation.
pub fn sample_matrix_rows(
    spec: &DistributionSpec,
    num_rows: usize,
    seed: SeedSpec,
) -> DenseMatrix {
    assert!(num_rows > 0, "need at least one row");
    if spec.produces_complex() {
        let mut data = Vec::with_capacity(num_rows * spec.dim());
        for i in 0..num_rows {
            match sample_vector(spec, seed.substream(i as u64)) {
                Sample::Complex(v) => data.extend(v),
                Sample::Real(v) => data.extend(v.into_iter().map(|x| Complex64::new(x, 0.0))),
            }
        }
        DenseMatrix::from_row_major_complex(num_rows, spec.dim(), data)
            .expect("samplers produce finite entries")
    } else {
        let mut data = Vec::with_capacity(num_rows * spec.dim());
        for i in 0..num_rows {
            data.extend(sample_vector(spec, seed.substream(i as u64)).as_real());
        }
        DenseMatrix::from_row_major(num_rows, spec.dim(), data)
            .expect("samplers produce finite entries")
    }
}

/// `num_cols` independent draws stacked as columns (`spec.dim x num_cols`).
/// Column `j` is `sample_vector(spec, seed.substream(j))`.
pub fn sample_matrix_columns(
    spec: &DistributionSpec,
    num_cols: usize,
    seed: SeedSpec,
) -> DenseMatrix {
    sample_matrix_rows(spec, num_cols, seed).adjoint()
}

/// Empirical second moment `(1/N) sum X_i X_i*`; Hermitian by construction.
pub fn second_moment_empirical(samples: &[Sample]) -> Result<DenseMatrix> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument(
            "second moment needs at least one sample".into(),
        ));
    }
    let dim = samples[0].dim();
    if samples.iter().any(|s| s.dim() != dim) {
        return Err(Error::DimensionMismatch(
            "samples have unequal dimensions".into(),
        ));
    }
    let inv = 1.0 / samples.len() as f64;
    if samples.iter().any(|s| s.is_complex()) {
        let mut acc = vec![Complex64::new(0.0, 0.0); dim * dim];
        for s in samples {
            match s {
                Sample::Complex(v) => accumulate_outer_complex(&mut acc, v),
                Sample::Real(v) => {
                    let vz: Vec<Complex64> =
                        v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                    accumulate_outer_complex(&mut acc, &vz);
                }
            }
        }
        for z in &mut acc {
            *z *= inv;
        }
        // mirror the strictly lower triangle
        for i in 0..dim {
            for j in 0..i {
                acc[i * dim + j] = acc[j * dim + i].conj();
            }
        }
        DenseMatrix::from_row_major_complex(dim, dim, acc)
    } else {
        let mut acc = vec![0.0; dim * dim];
        for s in samples {
            let v = s.as_real();
            for i in 0..dim {
                let a = v[i] * inv;
                if a != 0.0 {
                    for j in i..dim {
                        acc[i * dim + j] += a * v[j];
                    }
                }
            }
        }
        for i in 0..dim {
            for j in 0..i {
                acc[i * dim + j] = acc[j * dim + i];
            }
        }
        DenseMatrix::from_row_major(dim, dim, acc)
    }
}

fn accumulate_outer_complex(acc: &mut [Complex64], v: &[Complex64]) {
    let dim = v.len();
    for i in 0..dim {
        let a = v[i];
        for j in i..dim {
            // X X* has entries x_i conj(x_j)
            acc[i * dim + j] += a * v[j].conj();
        }
    }
}

/// Serde-friendly mirror of [`DistributionSpec`] used by config files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum DistributionConfig {
    Gaussian { dim: usize },
    Bernoulli { dim: usize },
    ProductUniform { dim: usize },
    ProductTwoPoint { dim: usize, p: f64 },
    Coordinate { dim: usize },
    Spherical { dim: usize },
    Frame {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        csv_path: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vectors: Option<Vec<Vec<f64>>>,
    },
    BoundedSelector {
        probability: f64,
        inner: Box<DistributionConfig>,
    },
    DftRow { dim: usize },
    HadamardRow { dim: usize },
    LinearImage {
        inner: Box<DistributionConfig>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sqrt_sigma_diag: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sqrt_sigma: Option<Vec<Vec<f64>>>,
    },
}

impl DistributionConfig {
    pub fn build(&self) -> Result<DistributionSpec> {
        match self {
            Self::Gaussian { dim } => DistributionSpec::gaussian(*dim),
            Self::Bernoulli { dim } => DistributionSpec::bernoulli(*dim),
            Self::ProductUniform { dim } => {
                DistributionSpec::product(*dim, ComponentLaw::Uniform)
            }
            Self::ProductTwoPoint { dim, p } => {
                DistributionSpec::product(*dim, ComponentLaw::TwoPoint { p: *p })
            }
            Self::Coordinate { dim } => DistributionSpec::coordinate(*dim),
            Self::Spherical { dim } => DistributionSpec::spherical(*dim),
            Self::Frame { csv_path, vectors } => {
                let frame = match (csv_path, vectors) {
                    (Some(path), None) => {
                        FrameSet::from_csv(&std::fs::read_to_string(path)?)?
                    }
                    (None, Some(rows)) => FrameSet::new(DenseMatrix::from_rows(rows.clone())?)?,
                    _ => {
                        return Err(Error::InvalidSpec(
                            "frame config needs exactly one of csv_path or vectors".into(),
                        ))
                    }
                };
                DistributionSpec::frame(frame)
            }
            Self::BoundedSelector { probability, inner } => {
                DistributionSpec::bounded_selector(*probability, inner.build()?)
            }
            Self::DftRow { dim } => DistributionSpec::dft_row(*dim),
            Self::HadamardRow { dim } => DistributionSpec::hadamard_row(*dim),
            Self::LinearImage {
                inner,
                sqrt_sigma_diag,
                sqrt_sigma,
            } => {
                let r = match (sqrt_sigma_diag, sqrt_sigma) {
                    (Some(d), None) => DenseMatrix::diagonal(d),
                    (None, Some(rows)) => DenseMatrix::from_rows(rows.clone())?,
                    _ => {
                        return Err(Error::InvalidSpec(
                            "linear image needs exactly one of sqrt_sigma_diag or sqrt_sigma"
                                .into(),
                        ))
                    }
                };
                DistributionSpec::linear_image(inner.build()?, r)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed(s: u64) -> SeedSpec {
        SeedSpec::new(s, 0)
    }

    #[test]
    fn coordinate_support() {
        let spec = DistributionSpec::coordinate(4).unwrap();
        for i in 0..20 {
            let v = sample_vector(&spec, seed(i));
            let v = v.as_real();
            let nonzero: Vec<_> = v.iter().filter(|x| **x != 0.0).collect();
            assert_eq!(nonzero.len(), 1);
            assert_eq!(*nonzero[0], 2.0);
        }
    }

    #[test]
    fn spherical_norm_is_sqrt_dim() {
        let spec = DistributionSpec::spherical(10).unwrap();
        for i in 0..50 {
            let v = sample_vector(&spec, seed(i));
            assert!((v.norm() - 10.0f64.sqrt()).abs() <= 1e-12 * 10.0f64.sqrt());
        }
    }

    #[test]
    fn dft_row_unit_modulus() {
        let spec = DistributionSpec::dft_row(8).unwrap();
        for i in 0..16 {
            match sample_vector(&spec, seed(i)) {
                Sample::Complex(v) => {
                    assert_eq!(v.len(), 8);
                    assert_eq!(v[0], Complex64::new(1.0, 0.0));
                    for z in &v {
                        assert!((z.norm() - 1.0).abs() <= 3e-16);
                    }
                }
                Sample::Real(_) => panic!("DFT rows are complex"),
            }
        }
    }

    #[test]
    fn dft_row_one_has_minus_one_at_half() {
        let row = dft_row_entries(8, 1);
        assert_eq!(row[4], Complex64::new(-1.0, 0.0));
        assert_eq!(row[2], Complex64::new(0.0, -1.0));
    }

    #[test]
    fn hadamard_rows_sylvester() {
        let expect: [[f64; 4]; 4] = [
            [1.0, 1.0, 1.0, 1.0],
            [1.0, -1.0, 1.0, -1.0],
            [1.0, 1.0, -1.0, -1.0],
            [1.0, -1.0, -1.0, 1.0],
        ];
        for omega in 0..4usize {
            let row: Vec<f64> = (0..4)
                .map(|t| {
                    if (omega & t).count_ones().is_multiple_of(2) {
                        1.0
                    } else {
                        -1.0
                    }
                })
                .collect();
            assert_eq!(row, expect[omega]);
        }
    }

    #[test]
    fn bernoulli_matrix_entries() {
        let spec = DistributionSpec::bernoulli(3).unwrap();
        let m = sample_matrix_rows(&spec, 3, seed(7));
        for r in 0..3 {
            for c in 0..3 {
                assert!(m.get_real(r, c).abs() == 1.0);
            }
        }
    }

    #[test]
    fn rows_reproducible_in_isolation() {
        let spec = DistributionSpec::gaussian(5).unwrap();
        let base = SeedSpec::new(11, 3);
        let m = sample_matrix_rows(&spec, 4, base);
        for i in 0..4 {
            let v = sample_vector(&spec, base.substream(i as u64));
            assert_eq!(m.row(i), v.as_real());
        }
    }

    #[test]
    fn determinism() {
        let spec = DistributionSpec::spherical(7).unwrap();
        let a = sample_matrix_rows(&spec, 6, SeedSpec::new(5, 9));
        let b = sample_matrix_rows(&spec, 6, SeedSpec::new(5, 9));
        assert_eq!(a, b);
    }

    #[test]
    fn coordinate_full_support_second_moment_is_identity() {
        let spec = DistributionSpec::coordinate(3).unwrap();
        let mut support = Vec::new();
        for i in 0..3 {
            let mut v = vec![0.0; 3];
            v[i] = 3.0f64.sqrt();
            support.push(Sample::Real(v));
        }
        let sm = second_moment_empirical(&support).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((sm.get_real(i, j) - expect).abs() < 1e-15);
            }
        }
        drop(spec);
    }

    #[test]
    fn dft_full_support_second_moment_is_identity() {
        let rows: Vec<Sample> = (0..8)
            .map(|omega| Sample::Complex(dft_row_entries(8, omega)))
            .collect();
        let sm = second_moment_empirical(&rows).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((sm.get(i, j) - Complex64::new(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn frame_validation_rejects_loose_sets() {
        // orthonormal basis scaled to norm sqrt(n), taken once: tight
        let tight = DenseMatrix::diagonal(&[2.0f64.sqrt(), 2.0f64.sqrt()]);
        assert!(FrameSet::new(tight).is_ok());
        // a skewed pair is not tight
        let loose =
            DenseMatrix::from_rows(vec![vec![1.4, 0.1], vec![0.0, 1.5]]).unwrap();
        assert!(FrameSet::new(loose).is_err());
    }

    #[test]
    fn selector_zero_frequency() {
        let inner = DistributionSpec::spherical(4).unwrap();
        let spec = DistributionSpec::bounded_selector(0.3, inner).unwrap();
        let n = 4000;
        let zeros = (0..n)
            .filter(|&i| sample_vector(&spec, seed(i)).norm() == 0.0)
            .count();
        let freq = zeros as f64 / n as f64;
        let slack = 3.0 * (0.3f64 * 0.7 / n as f64).sqrt();
        assert!((freq - 0.7).abs() <= slack, "freq {freq}");
        assert!((spec.norm_bound().unwrap() - 2.0 / 0.3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gaussian_single_column_mean() {
        let spec = DistributionSpec::gaussian(1).unwrap();
        let m = sample_matrix_rows(&spec, 1000, seed(3));
        let mean: f64 = (0..1000).map(|r| m.get_real(r, 0)).sum::<f64>() / 1000.0;
        assert!(mean.abs() <= 0.1, "mean {mean}");
    }

    #[test]
    fn linear_image_second_moment_matches_target() {
        let inner = DistributionSpec::gaussian(3).unwrap();
        let r = DenseMatrix::diagonal(&[2.0, 1.0, 0.5]);
        let spec = DistributionSpec::linear_image(inner, r).unwrap();
        let sigma = spec.second_moment().unwrap();
        assert!((sigma.get_real(0, 0) - 4.0).abs() < 1e-12);
        assert!((sigma.get_real(2, 2) - 0.25).abs() < 1e-12);
        let samples: Vec<Sample> = (0..20_000)
            .map(|i| sample_vector(&spec, seed(i)))
            .collect();
        let sm = second_moment_empirical(&samples).unwrap();
        let mut diff = sm.clone();
        for i in 0..3 {
            for j in 0..3 {
                diff.set(i, j, sm.get_real(i, j) - sigma.get_real(i, j));
            }
        }
        let err = crate::spectra::hermitian_spectral_norm(&diff).unwrap();
        assert!(err < 0.2, "err {err}");
    }

    #[test]
    fn columns_model() {
        let spec = DistributionSpec::spherical(16).unwrap();
        let m = sample_matrix_columns(&spec, 4, seed(1));
        assert_eq!((m.rows(), m.cols()), (16, 4));
        for c in 0..4 {
            assert!((m.column_norm(c) - 4.0).abs() <= 1e-12 * 4.0);
        }
    }

    #[test]
    fn config_round_trip() {
        let cfg = DistributionConfig::BoundedSelector {
            probability: 0.5,
            inner: Box::new(DistributionConfig::Spherical { dim: 6 }),
        };
        let text = serde_json::to_string(&cfg).unwrap();
        let back: DistributionConfig = serde_json::from_str(&text).unwrap();
        let spec = back.build().unwrap();
        assert_eq!(spec.dim(), 6);
        assert!(spec.analytic_isotropic());
    }
}
