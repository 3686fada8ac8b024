//! Small special-function kernel: log-gamma for analytic moment formulas.

/// Lanczos approximation (g = 7, 9 coefficients), accurate to ~2e-10
/// relative over the positive reals.
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires a positive argument, got {x}");
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * x).sin().ln()
            - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Gamma function for `x > 0`.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// Absolute moment `(E|X|^p)^{1/p}` of a standard normal:
/// `sqrt(2) * [Gamma((1+p)/2) / Gamma(1/2)]^{1/p}`.
pub fn normal_abs_moment(p: f64) -> f64 {
    assert!(p >= 1.0);
    let log_ratio = ln_gamma((1.0 + p) / 2.0) - ln_gamma(0.5);
    std::f64::consts::SQRT_2 * (log_ratio / p).exp()
}

/// Moment `(E X^p)^{1/p} = Gamma(p+1)^{1/p}` of a standard exponential.
pub fn exponential_moment(p: f64) -> f64 {
    assert!(p >= 1.0);
    (ln_gamma(p + 1.0) / p).exp()
}
