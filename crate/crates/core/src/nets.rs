//! Greedy epsilon-nets of the unit sphere and norm estimation through nets.
//!
//! A maximal eps-separated subset of the sphere is automatically an
//! eps-net. The greedy construction draws candidates from the rotation
//! invariant sphere distribution and admits one whenever it is at least
//! eps away from everything admitted so far; it stops after a long run of
//! consecutive rejections, which certifies maximality probabilistically.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rng::{SeedSpec, StreamRng};

/// Cardinality guard: `dim * ln(1 + 2/eps)` must stay below this, which
/// caps the net-size bound near 6e7.
const SIZE_GUARD: f64 = 18.0;
/// Admission uses `d >= eps * (1 - SEPARATION_SLACK)` so that exact
/// geometric configurations (e.g. antipodal pairs at distance 2) are not
/// lost to the last ulp of rounding.
const SEPARATION_SLACK: f64 = 1e-12;
/// Consecutive-rejection multiplier before the greedy loop declares the
/// net maximal.
const REJECTION_FACTOR: f64 = 200.0;

/// An eps-separated covering subset of the unit sphere `S^{dim-1}`.
#[derive(Debug, Clone)]
pub struct EpsilonNet {
    dim: usize,
    eps: f64,
    points: Vec<Vec<f64>>,
}

impl EpsilonNet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Volume-argument cardinality bound `(1 + 2/eps)^dim`.
    pub fn cardinality_bound(&self) -> f64 {
        cardinality_bound(self.dim, self.eps)
    }

    /// Distance from `x` to the nearest net point.
    pub fn distance_to(&self, x: &[f64]) -> f64 {
        self.points
            .iter()
            .map(|p| dist(p, x))
            .fold(f64::INFINITY, f64::min)
    }

    /// One point per row.
    pub fn to_csv(&self) -> String {
        let flat: Vec<f64> = self.points.iter().flatten().copied().collect();
        DenseMatrix::from_row_major(self.points.len(), self.dim, flat)
            .expect("net points are finite")
            .to_csv()
    }
}

fn cardinality_bound(dim: usize, eps: f64) -> f64 {
    (1.0 + 2.0 / eps).powi(dim as i32)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn unit_sphere_point(dim: usize, rng: &mut StreamRng) -> Vec<f64> {
    loop {
        let mut v = vec![0.0; dim];
        rng.fill_normal(&mut v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for x in &mut v {
                *x /= norm;
            }
            return v;
        }
    }
}

fn admissible(points: &[Vec<f64>], candidate: &[f64], eps: f64) -> bool {
    let threshold = eps * (1.0 - SEPARATION_SLACK);
    points.iter().all(|p| dist(p, candidate) >= threshold)
}

/// Greedy maximal eps-separated subset of `S^{dim-1}`; deterministic given
/// the seed. Fails when the cardinality bound exceeds the size guard.
pub fn build_net(dim: usize, eps: f64, seed: SeedSpec) -> Result<EpsilonNet> {
    if dim == 0 {
        return Err(Error::InvalidArgument("net dimension must be positive".into()));
    }
    if !(eps > 0.0 && eps <= 2.0) {
        return Err(Error::EpsilonOutOfRange(format!(
            "eps must lie in (0, 2], got {eps}"
        )));
    }
    if dim as f64 * (1.0 + 2.0 / eps).ln() > SIZE_GUARD {
        return Err(Error::NetBudgetExceeded {
            dim,
            eps,
            bound: cardinality_bound(dim, eps),
        });
    }

    let mut rng = StreamRng::new(seed);
    let mut points: Vec<Vec<f64>> = Vec::new();
    let rejection_cap = (REJECTION_FACTOR * cardinality_bound(dim, eps)).ceil() as u64;

    let mut consecutive_rejections = 0u64;
    while consecutive_rejections < rejection_cap {
        let candidate = unit_sphere_point(dim, &mut rng);
        if admissible(&points, &candidate, eps) {
            points.push(candidate);
            consecutive_rejections = 0;
        } else {
            consecutive_rejections += 1;
        }
    }

    // Antipode pass: the antipode of an admitted point is the farthest
    // point of the sphere from it and can be admissible while having
    // probability zero of arriving in the random stream (eps = 2). Repeat
    // until stable.
    loop {
        let mut grew = false;
        for i in 0..points.len() {
            let anti: Vec<f64> = points[i].iter().map(|x| -x).collect();
            if admissible(&points, &anti, eps) {
                points.push(anti);
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }

    let net = EpsilonNet { dim, eps, points };
    debug_assert!((net.len() as f64) <= net.cardinality_bound());
    Ok(net)
}

/// Sandwich estimate of the spectral norm through a net:
/// `lower = max |A x|` over net points, `upper = lower / (1 - eps)`;
/// the true norm lies in `[lower, upper]`.
pub fn norm_via_net(a: &DenseMatrix, net: &EpsilonNet) -> Result<(f64, f64)> {
    if net.eps >= 1.0 {
        return Err(Error::EpsilonOutOfRange(format!(
            "norm sandwich needs eps < 1, got {}",
            net.eps
        )));
    }
    if a.cols() != net.dim {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} columns, net lives on S^{}",
            a.cols(),
            net.dim as isize - 1
        )));
    }
    let mut lower = 0.0f64;
    for p in net.points() {
        let image = a.apply(p);
        let norm = image.iter().map(|x| x * x).sum::<f64>().sqrt();
        lower = lower.max(norm);
    }
    Ok((lower, lower / (1.0 - net.eps)))
}

/// Upper bound on the spectral norm of a symmetric matrix via the
/// quadratic form on a net: `(1 - 2 eps)^{-1} max |<A x, x>|`.
pub fn quadratic_form_via_net(a: &DenseMatrix, net: &EpsilonNet) -> Result<f64> {
    if net.eps >= 0.5 {
        return Err(Error::EpsilonOutOfRange(format!(
            "quadratic form bound needs eps < 1/2, got {}",
            net.eps
        )));
    }
    if a.rows() != a.cols() || a.cols() != net.dim {
        return Err(Error::DimensionMismatch(format!(
            "need a {0}x{0} symmetric matrix for a net on S^{1}",
            net.dim,
            net.dim as isize - 1
        )));
    }
    let dev = a.hermitian_deviation();
    if dev > 1e-12 * a.max_abs().max(1.0) {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: 1e-12 * a.max_abs().max(1.0),
        });
    }
    let mut best = 0.0f64;
    for p in net.points() {
        let image = a.apply(p);
        let form: f64 = image.iter().zip(p).map(|(y, x)| y * x).sum();
        best = best.max(form.abs());
    }
    Ok(best / (1.0 - 2.0 * net.eps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed(i: u64) -> SeedSpec {
        SeedSpec::new(0xE75, i)
    }

    #[test]
    fn one_dimensional_net_is_both_poles() {
        let net = build_net(1, 0.5, seed(0)).unwrap();
        assert_eq!(net.len(), 2);
        let mut vals: Vec<f64> = net.points().iter().map(|p| p[0]).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(vals, vec![-1.0, 1.0]);
        assert!(net.cardinality_bound() >= 2.0);
    }

    #[test]
    fn degenerate_eps_two_gives_antipodal_pair() {
        let net = build_net(2, 2.0, seed(1)).unwrap();
        assert_eq!(net.len(), 2);
        let (a, b) = (&net.points()[0], &net.points()[1]);
        assert!((a[0] + b[0]).abs() < 1e-12 && (a[1] + b[1]).abs() < 1e-12);
    }

    #[test]
    fn separation_and_cardinality_hold() {
        for (dim, eps) in [(2usize, 0.3), (3usize, 0.5), (4usize, 0.7)] {
            let net = build_net(dim, eps, seed(dim as u64)).unwrap();
            let pts = net.points();
            for i in 0..pts.len() {
                for j in 0..i {
                    assert!(dist(&pts[i], &pts[j]) >= eps * (1.0 - 2e-12));
                }
            }
            assert!((net.len() as f64) <= net.cardinality_bound());
        }
    }

    #[test]
    fn monte_carlo_covering_audit() {
        let net = build_net(3, 0.5, seed(9)).unwrap();
        let mut rng = StreamRng::new(seed(10));
        for _ in 0..10_000 {
            let x = unit_sphere_point(3, &mut rng);
            assert!(net.distance_to(&x) <= 0.5);
        }
    }

    #[test]
    fn budget_guard_trips() {
        assert!(matches!(
            build_net(12, 0.1, seed(0)),
            Err(Error::NetBudgetExceeded { .. })
        ));
    }

    #[test]
    fn identity_norm_sandwich() {
        let net = build_net(2, 0.25, seed(2)).unwrap();
        let (lower, upper) = norm_via_net(&DenseMatrix::identity(2), &net).unwrap();
        assert!((lower - 1.0).abs() < 1e-12);
        assert!((upper - 1.0 / 0.75).abs() < 1e-12);
    }

    #[test]
    fn rank_one_matrix_sandwich() {
        let net = build_net(2, 0.1, seed(3)).unwrap();
        let a = DenseMatrix::diagonal(&[2.0, 0.0]);
        let (lower, upper) = norm_via_net(&a, &net).unwrap();
        assert!(lower >= 1.99 && lower <= 2.0 + 1e-12, "lower {lower}");
        assert!(upper <= 2.0 / 0.9 + 1e-12);
    }

    #[test]
    fn zero_matrix_gives_zero() {
        let net = build_net(2, 0.25, seed(4)).unwrap();
        let (lower, upper) = norm_via_net(&DenseMatrix::zeros(3, 2), &net).unwrap();
        assert_eq!((lower, upper), (0.0, 0.0));
        let q = quadratic_form_via_net(&DenseMatrix::zeros(2, 2), &net).unwrap();
        assert_eq!(q, 0.0);
    }

    #[test]
    fn quadratic_form_examples() {
        let net = build_net(3, 0.2, seed(5)).unwrap();
        let upper = quadratic_form_via_net(&DenseMatrix::identity(3), &net).unwrap();
        assert!((upper - 1.0 / 0.6).abs() < 1e-12);

        let net2 = build_net(2, 0.2, seed(6)).unwrap();
        let a = DenseMatrix::diagonal(&[1.0, -1.0]);
        let upper = quadratic_form_via_net(&a, &net2).unwrap();
        assert!((1.0..=1.0 / 0.6 + 1e-12).contains(&upper), "upper {upper}");
    }

    #[test]
    fn eps_range_errors() {
        let net = build_net(2, 0.6, seed(7)).unwrap();
        assert!(quadratic_form_via_net(&DenseMatrix::identity(2), &net).is_err());
        assert!(build_net(2, 0.0, seed(8)).is_err());
        assert!(build_net(2, 2.5, seed(8)).is_err());
    }
}
