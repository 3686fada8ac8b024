//! Scalar sub-gaussian / sub-exponential machinery: moment profiles,
//! empirical Orlicz norms, and evaluable tail-bound formulas.
//!
//! The psi-norms here are grid suprema: `psi2 = max p^{-1/2} (E|X|^p)^{1/p}`
//! over a finite moment grid, so empirical values are lower-biased
//! estimates of the true supremum. No extrapolation is attempted.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::special;

/// Default moment grid. Empirical moments above p = 16 are excluded: with
/// desk-scale sample counts their Monte Carlo error explodes.
pub const DEFAULT_P_GRID: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];

/// Default absolute constant for the Hoeffding- and Bernstein-type bounds,
/// traceable to the proof step `P{X >= t} <= e^{-t^2/4}` in the moment
/// generating function argument.
pub const DEFAULT_TAIL_CONSTANT: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileData {
    /// Retains the sample so the profile can be re-centered.
    Empirical { samples: Vec<f64> },
    /// Closed-form moments with no re-centering rule.
    Analytic { name: String },
    /// The degenerate law `X = value`; re-centers exactly.
    Constant { value: f64 },
}

/// Moments `(E|X|^p)^{1/p}` tabulated on a finite grid of exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentProfile {
    p_grid: Vec<f64>,
    moments: Vec<f64>,
    data: ProfileData,
}

fn validate_grid(p_grid: &[f64]) -> Result<()> {
    if p_grid.is_empty() {
        return Err(Error::InvalidArgument("empty moment grid".into()));
    }
    if p_grid.windows(2).any(|w| w[0] >= w[1]) || p_grid[0] < 1.0 {
        return Err(Error::InvalidArgument(
            "moment grid must be increasing with p >= 1".into(),
        ));
    }
    for required in [1.0, 2.0, 4.0, 8.0] {
        if !p_grid.contains(&required) {
            return Err(Error::InvalidArgument(format!(
                "moment grid must contain p = {required}"
            )));
        }
    }
    Ok(())
}

impl MomentProfile {
    pub fn empirical(samples: Vec<f64>, p_grid: Vec<f64>) -> Result<Self> {
        validate_grid(&p_grid)?;
        if samples.is_empty() {
            return Err(Error::InvalidArgument("empty sample".into()));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite sample".into()));
        }
        let n = samples.len() as f64;
        let moments = p_grid
            .iter()
            .map(|&p| {
                (samples.iter().map(|x| x.abs().powf(p)).sum::<f64>() / n).powf(1.0 / p)
            })
            .collect();
        Ok(Self {
            p_grid,
            moments,
            data: ProfileData::Empirical { samples },
        })
    }

    pub fn analytic(
        name: impl Into<String>,
        p_grid: Vec<f64>,
        moment_fn: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        validate_grid(&p_grid)?;
        let moments: Vec<f64> = p_grid.iter().map(|&p| moment_fn(p)).collect();
        if moments.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::InvalidArgument(
                "analytic moments must be finite and nonnegative".into(),
            ));
        }
        Ok(Self {
            p_grid,
            moments,
            data: ProfileData::Analytic { name: name.into() },
        })
    }

    /// Standard normal via the gamma-function moment formula.
    pub fn standard_normal(p_grid: Vec<f64>) -> Result<Self> {
        Self::analytic("standard_normal", p_grid, special::normal_abs_moment)
    }

    /// Standard exponential, `(E X^p)^{1/p} = Gamma(p+1)^{1/p}`.
    pub fn standard_exponential(p_grid: Vec<f64>) -> Result<Self> {
        Self::analytic("standard_exponential", p_grid, special::exponential_moment)
    }

    /// Symmetric Bernoulli: every absolute moment equals 1.
    pub fn symmetric_bernoulli(p_grid: Vec<f64>) -> Result<Self> {
        Self::analytic("symmetric_bernoulli", p_grid, |_| 1.0)
    }

    /// The constant law `X = value`.
    pub fn constant(value: f64, p_grid: Vec<f64>) -> Result<Self> {
        validate_grid(&p_grid)?;
        if !value.is_finite() {
            return Err(Error::InvalidArgument("non-finite constant".into()));
        }
        let moments = vec![value.abs(); p_grid.len()];
        Ok(Self {
            p_grid,
            moments,
            data: ProfileData::Constant { value },
        })
    }

    pub fn p_grid(&self) -> &[f64] {
        &self.p_grid
    }

    pub fn moments(&self) -> &[f64] {
        &self.moments
    }

    pub fn data(&self) -> &ProfileData {
        &self.data
    }

    pub fn source_label(&self) -> String {
        match &self.data {
            ProfileData::Empirical { samples } => format!("empirical({})", samples.len()),
            ProfileData::Analytic { name } => format!("analytic({name})"),
            ProfileData::Constant { value } => format!("analytic(constant {value})"),
        }
    }

    /// CSV with columns `p,moment,source`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,moment,source\n");
        let label = self.source_label();
        for (p, m) in self.p_grid.iter().zip(&self.moments) {
            let _ = writeln!(out, "{p},{m},{label}");
        }
        out
    }

    /// Parses the CSV form. Samples are not serialized, so the result is an
    /// analytic profile tagged with the original source label.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut p_grid = Vec::new();
        let mut moments = Vec::new();
        let mut label = String::new();
        for (i, line) in text.lines().enumerate() {
            if i == 0 || line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.splitn(3, ',').collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!("line {}: need p,moment,source", i + 1)));
            }
            p_grid.push(
                fields[0]
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?,
            );
            moments.push(
                fields[1]
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?,
            );
            label = fields[2].trim().to_string();
        }
        validate_grid(&p_grid)?;
        Ok(Self {
            p_grid,
            moments,
            data: ProfileData::Analytic { name: label },
        })
    }
}

/// Grid supremum `max_p p^{-1/2} (E|X|^p)^{1/p}`; for empirical profiles a
/// lower estimate of the sub-gaussian norm.
pub fn psi2_norm(profile: &MomentProfile) -> f64 {
    profile
        .p_grid
        .iter()
        .zip(&profile.moments)
        .map(|(&p, &m)| m / p.sqrt())
        .fold(0.0, f64::max)
}

/// Grid supremum `max_p p^{-1} (E|X|^p)^{1/p}`, the sub-exponential
/// counterpart.
pub fn psi1_norm(profile: &MomentProfile) -> f64 {
    profile
        .p_grid
        .iter()
        .zip(&profile.moments)
        .map(|(&p, &m)| m / p)
        .fold(0.0, f64::max)
}

/// Parameters of the Hoeffding/Bernstein bound evaluators. The paper-style
/// absolute constant `c` is exposed explicitly; defaults to
/// [`DEFAULT_TAIL_CONSTANT`].
#[derive(Debug, Clone, PartialEq)]
pub struct TailBoundParams {
    k: f64,
    c: f64,
    coefficients: Vec<f64>,
    l2: f64,
    linf: f64,
}

impl TailBoundParams {
    pub fn new(k: f64, c: f64, coefficients: Vec<f64>) -> Result<Self> {
        if !k.is_finite() || k <= 0.0 {
            return Err(Error::InvalidArgument(format!("K must be positive, got {k}")));
        }
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::InvalidArgument(format!("c must be positive, got {c}")));
        }
        let l2 = coefficients.iter().map(|a| a * a).sum::<f64>().sqrt();
        let linf = coefficients.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        if !l2.is_finite() || l2 <= 0.0 {
            return Err(Error::InvalidArgument(
                "coefficient vector must be nonzero".into(),
            ));
        }
        Ok(Self {
            k,
            c,
            coefficients,
            l2,
            linf,
        })
    }

    pub fn with_default_constant(k: f64, coefficients: Vec<f64>) -> Result<Self> {
        Self::new(k, DEFAULT_TAIL_CONSTANT, coefficients)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    pub fn linf(&self) -> f64 {
        self.linf
    }

    /// `t` where the Bernstein exponent switches from the sub-gaussian to
    /// the sub-exponential branch: `K |a|_2^2 / |a|_inf`.
    pub fn bernstein_crossover(&self) -> f64 {
        self.k * self.l2 * self.l2 / self.linf
    }
}

/// `min(1, e * exp(-c t^2 / (K^2 |a|_2^2)))`.
pub fn hoeffding_bound(params: &TailBoundParams, t: f64) -> f64 {
    assert!(t >= 0.0, "tail bounds need t >= 0");
    let exponent = -params.c * t * t / (params.k * params.k * params.l2 * params.l2);
    (std::f64::consts::E * exponent.exp()).min(1.0)
}

/// `min(1, 2 exp(-c min(t^2/(K^2 |a|_2^2), t/(K |a|_inf))))`; the min
/// selects the sub-gaussian regime for small `t` and the sub-exponential
/// regime past the crossover.
pub fn bernstein_bound(params: &TailBoundParams, t: f64) -> f64 {
    assert!(t >= 0.0, "tail bounds need t >= 0");
    let quad = t * t / (params.k * params.k * params.l2 * params.l2);
    let lin = t / (params.k * params.linf);
    (2.0 * (-params.c * quad.min(lin)).exp()).min(1.0)
}

/// Result of [`khintchine_sandwich`].
#[derive(Debug, Clone, Copy)]
pub struct KhintchineSandwich {
    /// `|a|_2`, the unconditional lower bound.
    pub lower: f64,
    /// `(E|sum a_i eps_i|^p)^{1/p}` by full sign enumeration.
    pub exact_bernoulli: f64,
    /// `sqrt(p) |a|_2`; the constant in front is reported separately.
    pub upper_form: f64,
    /// `exact / (sqrt(p) |a|_2)`, the fitted constant.
    pub fitted_constant: f64,
}

/// Exact Khintchine moments for symmetric Bernoulli sums by enumerating
/// all `2^n` sign patterns; `n <= 20`, `p` even.
pub fn khintchine_sandwich(a: &[f64], p: u32) -> Result<KhintchineSandwich> {
    if a.is_empty() || a.len() > 20 {
        return Err(Error::BudgetExceeded(format!(
            "sign enumeration handles 1..=20 coefficients, got {}; use a Monte Carlo estimate instead",
            a.len()
        )));
    }
    if p < 2 || !p.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "exponent must be an even integer >= 2, got {p}"
        )));
    }
    let n = a.len();
    let lower = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut acc = 0.0f64;
    for mask in 0u32..(1u32 << n) {
        let mut s = 0.0;
        for (i, &ai) in a.iter().enumerate() {
            if mask >> i & 1 == 0 {
                s += ai;
            } else {
                s -= ai;
            }
        }
        acc += s.abs().powi(p as i32);
    }
    let exact = (acc / (1u64 << n) as f64).powf(1.0 / p as f64);
    let upper_form = (p as f64).sqrt() * lower;
    Ok(KhintchineSandwich {
        lower,
        exact_bernoulli: exact,
        upper_form,
        fitted_constant: exact / upper_form,
    })
}

/// Empirical survival function: fraction of samples with `|x| > t`
/// (strictly), per grid point. Monotone nonincreasing in `t`.
pub fn empirical_tail(samples: &[f64], t_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    let n = samples.len() as f64;
    Ok(t_grid
        .iter()
        .map(|&t| {
            let count = samples.iter().filter(|x| x.abs() > t).count();
            (t, count as f64 / n)
        })
        .collect())
}

/// Re-centers a profile to `X - mean`. Empirical profiles re-center their
/// retained sample; the constant law re-centers exactly; other analytic
/// profiles carry no re-centering rule and are rejected (unless mean = 0).
/// The output psi-norms are checked against the factor-2 centering bound.
pub fn center_shift(profile: &MomentProfile, mean: f64) -> Result<MomentProfile> {
    if mean == 0.0 {
        return Ok(profile.clone());
    }
    let shifted = match &profile.data {
        ProfileData::Empirical { samples } => {
            let shifted: Vec<f64> = samples.iter().map(|x| x - mean).collect();
            MomentProfile::empirical(shifted, profile.p_grid.clone())?
        }
        ProfileData::Constant { value } => {
            MomentProfile::constant(value - mean, profile.p_grid.clone())?
        }
        ProfileData::Analytic { name } => {
            return Err(Error::InvalidArgument(format!(
                "analytic profile '{name}' has no re-centering rule"
            )));
        }
    };
    let (before2, after2) = (psi2_norm(profile), psi2_norm(&shifted));
    let (before1, after1) = (psi1_norm(profile), psi1_norm(&shifted));
    assert!(
        after2 <= 2.0 * before2 + 1e-12 && after1 <= 2.0 * before1 + 1e-12,
        "centering must not grow the psi-norms beyond the factor-2 bound \
         (psi2 {before2} -> {after2}); was `mean` really E X?"
    );
    Ok(shifted)
}

/// Fits the largest `c` such that `fraction(|X| > t) <= exp(1 - c t^2 / K^2)`
/// holds on the whole grid, where `K` is the grid psi2 estimate of the
/// sample. Returns `(k_hat, c_fit)`; grid points with empirical tail zero
/// impose no constraint.
pub fn fit_subgaussian_tail_constant(samples: &[f64], t_grid: &[f64]) -> Result<(f64, f64)> {
    let profile = MomentProfile::empirical(samples.to_vec(), DEFAULT_P_GRID.to_vec())?;
    let k_hat = psi2_norm(&profile);
    let tail = empirical_tail(samples, t_grid)?;
    let mut c_fit = f64::INFINITY;
    for (t, f) in tail {
        if f > 0.0 && t > 0.0 {
            c_fit = c_fit.min((1.0 - f.ln()) * k_hat * k_hat / (t * t));
        }
    }
    Ok((k_hat, c_fit))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        DEFAULT_P_GRID.to_vec()
    }

    #[test]
    fn bernoulli_psi2_is_one() {
        let p = MomentProfile::symmetric_bernoulli(grid()).unwrap();
        assert_eq!(psi2_norm(&p), 1.0);
    }

    #[test]
    fn bounded_profile_psi2_below_bound() {
        let m = 2.5;
        let p = MomentProfile::analytic("bounded", grid(), |_| m).unwrap();
        assert!(psi2_norm(&p) <= m);
    }

    #[test]
    fn normal_psi2_attained_at_p_one() {
        let p = MomentProfile::standard_normal(grid()).unwrap();
        let expect = (2.0 / std::f64::consts::PI).sqrt();
        assert!((psi2_norm(&p) - expect).abs() < 1e-12);
    }

    #[test]
    fn exponential_psi1_is_one() {
        let p = MomentProfile::standard_exponential(vec![1.0, 2.0, 4.0, 8.0]).unwrap();
        assert!((psi1_norm(&p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_profile_has_zero_norms() {
        let p = MomentProfile::constant(0.0, grid()).unwrap();
        assert_eq!(psi1_norm(&p), 0.0);
        assert_eq!(psi2_norm(&p), 0.0);
    }

    #[test]
    fn square_of_bernoulli_sandwich() {
        // X^2 = 1 identically: psi2(X)^2 = 1 <= psi1(X^2) = 1 <= 2 psi2(X)^2
        let x = MomentProfile::symmetric_bernoulli(grid()).unwrap();
        let xsq = MomentProfile::constant(1.0, grid()).unwrap();
        let p2 = psi2_norm(&x);
        let p1 = psi1_norm(&xsq);
        assert!(p2 * p2 <= p1 + 1e-12);
        assert!(p1 <= 2.0 * p2 * p2 + 1e-12);
    }

    #[test]
    fn hoeffding_examples() {
        let params = TailBoundParams::with_default_constant(1.0, vec![1.0]).unwrap();
        assert_eq!(hoeffding_bound(&params, 0.0), 1.0);
        let v = hoeffding_bound(&params, 4.0);
        assert!((v - std::f64::consts::E * (-4.0f64).exp()).abs() < 1e-12);
        // ratio bound(2t)/bound(t) = exp(-3 c t^2) below the cap
        let r = hoeffding_bound(&params, 4.0) / hoeffding_bound(&params, 2.0);
        assert!((r - (-3.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn bernstein_examples() {
        let params = TailBoundParams::with_default_constant(1.0, vec![1.0]).unwrap();
        assert_eq!(bernstein_bound(&params, 0.0), 1.0);

        // averaged specialization: a_i = 1, t = eps N, c = 1
        let n = 8;
        let params = TailBoundParams::new(1.0, 1.0, vec![1.0; n]).unwrap();
        let v = bernstein_bound(&params, 0.5 * n as f64);
        assert!((v - 2.0 * (-2.0f64).exp()).abs() < 1e-12);

        // crossover for a = (1,1,1,1), K = 1 sits at t = 4
        let params = TailBoundParams::with_default_constant(1.0, vec![1.0; 4]).unwrap();
        assert!((params.bernstein_crossover() - 4.0).abs() < 1e-14);
        // below the crossover the quadratic branch is active
        let t = 3.9;
        let quad = t * t / 4.0;
        let lin = t;
        assert!(quad < lin);
    }

    #[test]
    fn khintchine_examples() {
        let s = khintchine_sandwich(&[1.0], 4).unwrap();
        assert_eq!(s.exact_bernoulli, 1.0);
        assert_eq!(s.lower, 1.0);

        let s = khintchine_sandwich(&[1.0, 1.0], 2).unwrap();
        assert!((s.exact_bernoulli - 2.0f64.sqrt()).abs() < 1e-12);
        assert!((s.exact_bernoulli - s.lower).abs() < 1e-12);

        let s = khintchine_sandwich(&[1.0, 1.0], 4).unwrap();
        assert!((s.exact_bernoulli - 8.0f64.powf(0.25)).abs() < 1e-12);
        assert!(s.lower <= s.exact_bernoulli && s.exact_bernoulli <= s.upper_form);
    }

    #[test]
    fn khintchine_budget_errors() {
        assert!(khintchine_sandwich(&[1.0; 21], 2).is_err());
        assert!(khintchine_sandwich(&[1.0, 2.0], 3).is_err());
    }

    #[test]
    fn empirical_tail_examples() {
        let samples = [1.0, -1.0, 1.0, -1.0];
        let tail = empirical_tail(&samples, &[0.5, 1.0]).unwrap();
        assert_eq!(tail[0], (0.5, 1.0));
        assert_eq!(tail[1], (1.0, 0.0)); // strict inequality
    }

    #[test]
    fn center_shift_examples() {
        let p = MomentProfile::standard_normal(grid()).unwrap();
        let same = center_shift(&p, 0.0).unwrap();
        assert_eq!(p, same);

        let c = MomentProfile::constant(1.0, grid()).unwrap();
        let zeroed = center_shift(&c, 1.0).unwrap();
        assert_eq!(psi2_norm(&zeroed), 0.0);

        // shifted Bernoulli on {0, 2}: centering recovers psi2 = 1
        let samples: Vec<f64> = (0..64).map(|i| if i % 2 == 0 { 0.0 } else { 2.0 }).collect();
        let p = MomentProfile::empirical(samples, grid()).unwrap();
        let centered = center_shift(&p, 1.0).unwrap();
        assert!((psi2_norm(&centered) - 1.0).abs() < 1e-12);

        // analytic non-constant profiles cannot re-center
        let e = MomentProfile::standard_exponential(vec![1.0, 2.0, 4.0, 8.0]).unwrap();
        assert!(center_shift(&e, 1.0).is_err());
    }

    #[test]
    fn csv_round_trip_moments() {
        let p = MomentProfile::standard_normal(grid()).unwrap();
        let text = p.to_csv();
        assert!(text.starts_with("p,moment,source\n"));
        let q = MomentProfile::from_csv(&text).unwrap();
        assert_eq!(p.p_grid(), q.p_grid());
        for (a, b) in p.moments().iter().zip(q.moments()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn grid_requirements() {
        assert!(MomentProfile::constant(1.0, vec![1.0, 2.0, 4.0]).is_err());
        assert!(MomentProfile::constant(1.0, vec![2.0, 1.0, 4.0, 8.0]).is_err());
        assert!(MomentProfile::constant(1.0, vec![0.5, 1.0, 2.0, 4.0, 8.0]).is_err());
    }
}
