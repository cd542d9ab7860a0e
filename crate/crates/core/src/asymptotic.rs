//! Density evolution and asymptotic design for irregular product codes.
//!
//! Row and column profiles `α`, `β` are non-decreasing piecewise-linear
//! functions on `[0, 1]`. Peeling succeeds asymptotically on an erasure channel
//! with probability `ε` when `α⁻¹(ε β⁻¹(ε x)) < x` for every `x ∈ (0, 1]`,
//! where `f⁻¹(x) = sup{z : f(z) ≤ x}`.

use thiserror::Error;

use crate::scalar::Scalar;

/// Default number of safety grid points for [`de_check`].
pub const DEFAULT_GRID: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("a profile needs at least two breakpoints")]
    TooFewPoints,
    #[error("breakpoints must start at t = 0 and end at t = 1")]
    Endpoints,
    #[error("breakpoint {index}: coordinates must lie in [0, 1]")]
    OutOfUnit { index: usize },
    #[error("breakpoint {index}: t decreases")]
    NotSorted { index: usize },
    #[error("breakpoint {index}: value decreases")]
    Decreasing { index: usize },
    #[error("breakpoint {index}: more than two breakpoints share the same t")]
    CrowdedJump { index: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesignError {
    #[error("epsilon = {0} must lie in (0, 1)")]
    Epsilon(f64),
    #[error("beta(1) = {beta1} exceeds epsilon = {eps}")]
    BetaExceedsEpsilon { beta1: f64, eps: f64 },
    #[error("beta(0) = {0} must be 0")]
    BetaNonzeroAtZero(f64),
    #[error("minimum {which} distance {floor} must lie in [1, {max}]")]
    Floor { which: &'static str, floor: usize, max: usize },
    #[error("dimensions must be positive (got m = {m}, n = {n})")]
    EmptyShape { m: usize, n: usize },
}

/// Non-decreasing piecewise-linear function on `[0, 1]`.
///
/// Consecutive breakpoints may share `t` to encode a jump; the function is
/// right-continuous there, so `eval` returns the later value and
/// `eval_left` the earlier one.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear<T> {
    points: Vec<(T, T)>,
}

fn in_unit<T: Scalar>(x: T) -> bool {
    x >= T::zero() && x <= T::one()
}

fn lerp<T: Scalar>(a: (T, T), b: (T, T), x: T) -> T {
    a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
}

impl<T: Scalar> PiecewiseLinear<T> {
    pub fn new(points: Vec<(T, T)>) -> Result<Self, ProfileError> {
        if points.len() < 2 {
            return Err(ProfileError::TooFewPoints);
        }
        if points[0].0 != T::zero() || points[points.len() - 1].0 != T::one() {
            return Err(ProfileError::Endpoints);
        }
        for (index, &(t, v)) in points.iter().enumerate() {
            if !in_unit(t) || !in_unit(v) {
                return Err(ProfileError::OutOfUnit { index });
            }
            if index == 0 {
                continue;
            }
            let (pt, pv) = points[index - 1];
            if t < pt {
                return Err(ProfileError::NotSorted { index });
            }
            if v < pv {
                return Err(ProfileError::Decreasing { index });
            }
            if index >= 2 && t == pt && points[index - 2].0 == t {
                return Err(ProfileError::CrowdedJump { index });
            }
        }
        Ok(PiecewiseLinear { points })
    }

    /// Drops duplicates and keeps only the outer two of any run of
    /// breakpoints sharing `t`. Input must already be sorted.
    fn normalized(raw: Vec<(T, T)>) -> Self {
        let mut points: Vec<(T, T)> = Vec::with_capacity(raw.len());
        for p in raw {
            if points.last() == Some(&p) {
                continue;
            }
            let n = points.len();
            if n >= 2 && points[n - 1].0 == p.0 && points[n - 2].0 == p.0 {
                points[n - 1] = p;
            } else {
                points.push(p);
            }
        }
        if points.len() == 1 {
            points.push(points[0]);
        }
        Self::new(points).expect("normalized breakpoints form a valid profile")
    }

    /// `f(x) = c·x`.
    pub fn linear(c: T) -> Result<Self, ProfileError> {
        Self::new(vec![(T::zero(), T::zero()), (T::one(), c)])
    }

    pub fn constant(c: T) -> Result<Self, ProfileError> {
        Self::new(vec![(T::zero(), c), (T::one(), c)])
    }

    pub fn points(&self) -> &[(T, T)] {
        &self.points
    }

    /// Right-continuous value at `x` (clamped to `[0, 1]`).
    pub fn eval(&self, x: T) -> T {
        let p = &self.points;
        let k = p.partition_point(|q| q.0 <= x);
        if k == 0 {
            return p[0].1;
        }
        if k == p.len() || p[k - 1].0 == x {
            return p[k - 1].1;
        }
        lerp(p[k - 1], p[k], x)
    }

    /// Left limit at `x` (equals `eval` away from jumps; `f(0)` at 0).
    pub fn eval_left(&self, x: T) -> T {
        let p = &self.points;
        let k = p.partition_point(|q| q.0 < x);
        if k == p.len() {
            return p[k - 1].1;
        }
        if k == 0 || p[k].0 == x {
            return p[k].1;
        }
        lerp(p[k - 1], p[k], x)
    }

    /// `sup{z ∈ [0, 1] : f(z) ≤ x}`, or 0 when the set is empty.
    pub fn generalized_inverse(&self, x: T) -> T {
        if self.eval(T::zero()) > x {
            return T::zero();
        }
        if self.eval(T::one()) <= x {
            return T::one();
        }
        let p = &self.points;
        let j = p.partition_point(|q| q.1 <= x);
        let (a, b) = (p[j - 1], p[j]);
        if a.0 == b.0 {
            b.0
        } else {
            a.0 + (x - a.1) * (b.0 - a.0) / (b.1 - a.1)
        }
    }

    /// The generalized inverse as a profile of its own, obtained by
    /// reflecting the breakpoints across the diagonal.
    pub fn inverse_profile(&self) -> Self {
        let p = &self.points;
        let (v0, v1) = (p[0].1, p[p.len() - 1].1);
        let mut raw = vec![(T::zero(), T::zero()), (v0, T::zero())];
        raw.extend(p.iter().map(|&(t, v)| (v, t)));
        raw.push((v1, T::one()));
        raw.push((T::one(), T::one()));
        Self::normalized(raw)
    }

    /// Converts the breakpoints to another scalar type.
    pub fn convert<U: Scalar>(&self) -> PiecewiseLinear<U> {
        PiecewiseLinear {
            points: self.points.iter().map(|&(t, v)| (U::from_f64(t.to_f64()), U::from_f64(v.to_f64()))).collect(),
        }
    }
}

/// The map `x ↦ α⁻¹(ε β⁻¹(ε x))`.
pub fn composite<T: Scalar>(alpha: &PiecewiseLinear<T>, beta: &PiecewiseLinear<T>, epsilon: T, x: T) -> T {
    alpha.generalized_inverse(epsilon * beta.generalized_inverse(epsilon * x))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeVerdict<T> {
    Satisfied,
    /// `at` is the infimum of the set of `x ∈ (0, 1]` where the strict
    /// inequality fails.
    Violated { at: T },
}

impl<T> DeVerdict<T> {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, DeVerdict::Satisfied)
    }
}

/// Points where the composite map can change slope or jump, plus a uniform
/// safety grid, sorted and deduplicated inside `[0, 1]`.
fn composite_breakpoints<T: Scalar>(
    alpha: &PiecewiseLinear<T>,
    beta: &PiecewiseLinear<T>,
    epsilon: T,
    grid: usize,
) -> Vec<T> {
    let mut xs = vec![T::zero(), T::one()];
    xs.extend(beta.points().iter().map(|&(_, v)| v / epsilon));
    for &(_, u) in alpha.points() {
        let z0 = u / epsilon;
        if z0 <= T::one() {
            xs.push(beta.eval_left(z0) / epsilon);
            xs.push(beta.eval(z0) / epsilon);
        }
    }
    let g = T::from_usize(grid.max(1));
    xs.extend((1..grid).map(|i| T::from_usize(i) / g));
    xs.retain(|&x| in_unit(x));
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    xs.dedup();
    xs
}

/// Checks `α⁻¹(ε β⁻¹(ε x)) < x` on `(0, 1]`. The composite is linear between
/// consecutive candidate breakpoints, so each piece is settled from two
/// evaluations. Ties count as violations.
pub fn de_check<T: Scalar>(
    alpha: &PiecewiseLinear<T>,
    beta: &PiecewiseLinear<T>,
    epsilon: T,
    grid: usize,
) -> DeVerdict<T> {
    let tol = T::tie_tolerance();
    let h = |x: T| composite(alpha, beta, epsilon, x) - x;
    let xs = composite_breakpoints(alpha, beta, epsilon, grid);
    for w in xs.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = (lo + hi) * T::half();
        let (h_lo, h_mid) = (h(lo), h(mid));
        let slope = (h_mid - h_lo) / (mid - lo);
        if lo == T::zero() {
            if h_lo > tol || (h_lo >= T::zero() - tol && slope >= T::zero() - tol) {
                return DeVerdict::Violated { at: lo };
            }
        } else if h_lo >= T::zero() - tol {
            return DeVerdict::Violated { at: lo };
        }
        if slope > T::zero() {
            let x0 = lo - h_lo / slope;
            if x0 < hi {
                return DeVerdict::Violated { at: x0.max_of(lo) };
            }
        }
    }
    if h(T::one()) >= T::zero() - tol {
        return DeVerdict::Violated { at: T::one() };
    }
    DeVerdict::Satisfied
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeTrajectory<T> {
    pub epsilon: T,
    /// `x_0 = 1, x_1, …`, non-increasing.
    pub xs: Vec<T>,
    pub converged_to: T,
    pub rounds: usize,
    /// True when the iteration reached an exact fixed point above `x_stop`.
    pub stalled: bool,
}

/// Iterates `x_{i+1} = α⁻¹(ε β⁻¹(ε x_i))` from `x_0 = 1` until `x ≤ x_stop`,
/// a fixed point, or `max_rounds` iterations.
pub fn de_trajectory<T: Scalar>(
    alpha: &PiecewiseLinear<T>,
    beta: &PiecewiseLinear<T>,
    epsilon: T,
    x_stop: T,
    max_rounds: usize,
) -> DeTrajectory<T> {
    let mut xs = vec![T::one()];
    let mut stalled = false;
    let mut x = T::one();
    while x > x_stop && xs.len() <= max_rounds {
        let next = composite(alpha, beta, epsilon, x);
        if next >= x {
            stalled = true;
            break;
        }
        xs.push(next);
        x = next;
    }
    DeTrajectory { epsilon, rounds: xs.len() - 1, converged_to: x, xs, stalled }
}

/// `α(x) = ε β⁻¹(ε x)`: the row profile matched to `β` at channel erasure
/// probability `ε`.
pub fn design_alpha_from_beta<T: Scalar>(
    beta: &PiecewiseLinear<T>,
    epsilon: T,
) -> Result<PiecewiseLinear<T>, DesignError> {
    if epsilon <= T::zero() || epsilon >= T::one() {
        return Err(DesignError::Epsilon(epsilon.to_f64()));
    }
    let beta1 = beta.eval(T::one());
    if beta1 > epsilon {
        return Err(DesignError::BetaExceedsEpsilon { beta1: beta1.to_f64(), eps: epsilon.to_f64() });
    }
    let beta0 = beta.eval(T::zero());
    if beta0 > T::zero() {
        return Err(DesignError::BetaNonzeroAtZero(beta0.to_f64()));
    }
    let inv = beta.inverse_profile();
    let mut raw: Vec<(T, T)> =
        inv.points().iter().filter(|p| p.0 <= epsilon).map(|&(s, z)| (s / epsilon, epsilon * z)).collect();
    if raw.last().is_none_or(|p| p.0 < T::one()) {
        raw.push((T::one(), epsilon * inv.eval(epsilon)));
    }
    Ok(PiecewiseLinear::normalized(raw))
}

/// `∫_0^1 max(β⁻¹(x) − α(x), 0) dx`, integrated exactly piece by piece.
pub fn asymptotic_rate<T: Scalar>(alpha: &PiecewiseLinear<T>, beta: &PiecewiseLinear<T>) -> T {
    let inv = beta.inverse_profile();
    let mut xs: Vec<T> = inv.points().iter().chain(alpha.points()).map(|p| p.0).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    xs.dedup();
    let two = T::one() + T::one();
    let mut total = T::zero();
    for w in xs.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let width = hi - lo;
        let dl = inv.eval(lo) - alpha.eval(lo);
        let dr = inv.eval_left(hi) - alpha.eval_left(hi);
        let zero = T::zero();
        total = total
            + if dl >= zero && dr >= zero {
                width * (dl + dr) / two
            } else if dl <= zero && dr <= zero {
                zero
            } else {
                let pos = dl.max_of(dr);
                width * pos * pos / (two * (dl - dr).max_of(dr - dl))
            };
    }
    total
}

/// Finite-length row and column dimensions read off the profiles:
/// `a_i = round(n(1 − α(1 − i/m)))` and `b_j = round(m(1 − β(1 − j/n)))`,
/// rounded half up and clamped so that every component has at least the
/// requested minimum distance. Afterwards the `boosts` weakest-after-the-
/// strongest rows (and columns) are lowered to the strongest dimension.
pub fn discretize<T: Scalar>(
    alpha: &PiecewiseLinear<T>,
    beta: &PiecewiseLinear<T>,
    m: usize,
    n: usize,
    floors: (usize, usize),
    boosts: usize,
) -> Result<(Vec<usize>, Vec<usize>), DesignError> {
    if m == 0 || n == 0 {
        return Err(DesignError::EmptyShape { m, n });
    }
    if floors.0 == 0 || floors.0 > n {
        return Err(DesignError::Floor { which: "row", floor: floors.0, max: n });
    }
    if floors.1 == 0 || floors.1 > m {
        return Err(DesignError::Floor { which: "column", floor: floors.1, max: m });
    }
    let a = discretize_side(alpha, m, n, n - floors.0 + 1, boosts);
    let b = discretize_side(beta, n, m, m - floors.1 + 1, boosts);
    Ok((a, b))
}

fn discretize_side<T: Scalar>(f: &PiecewiseLinear<T>, count: usize, len: usize, cap: usize, boosts: usize) -> Vec<usize> {
    let total = T::from_usize(count);
    let scale = T::from_usize(len);
    let mut dims: Vec<usize> = (1..=count)
        .map(|i| {
            let x = T::one() - T::from_usize(i) / total;
            let raw = scale * (T::one() - f.eval(x));
            ((raw + T::half()).floor_i64().max(0) as usize).min(cap)
        })
        .collect();
    for i in 1..count {
        dims[i] = dims[i].max(dims[i - 1]);
    }
    let strongest = dims[0];
    let tied = dims.iter().take_while(|&&d| d == strongest).count();
    for d in dims.iter_mut().take((tied + boosts).min(count)) {
        *d = strongest;
    }
    assert!(dims.windows(2).all(|w| w[0] <= w[1]), "discretized profile must be non-decreasing");
    dims
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;
    use proptest::prelude::*;

    type P = PiecewiseLinear<f64>;
    type Q = PiecewiseLinear<Rational64>;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn validation() {
        assert_eq!(P::new(vec![(0.0, 0.0)]).unwrap_err(), ProfileError::TooFewPoints);
        assert_eq!(P::new(vec![(0.1, 0.0), (1.0, 0.0)]).unwrap_err(), ProfileError::Endpoints);
        assert_eq!(P::new(vec![(0.0, 0.5), (1.0, 0.2)]).unwrap_err(), ProfileError::Decreasing { index: 1 });
        assert_eq!(
            P::new(vec![(0.0, 0.0), (0.6, 0.0), (0.4, 0.1), (1.0, 0.2)]).unwrap_err(),
            ProfileError::NotSorted { index: 2 }
        );
        assert_eq!(
            P::new(vec![(0.0, 0.0), (0.5, 0.0), (0.5, 0.1), (0.5, 0.2), (1.0, 0.2)]).unwrap_err(),
            ProfileError::CrowdedJump { index: 3 }
        );
        assert_eq!(P::new(vec![(0.0, 0.0), (1.0, 1.5)]).unwrap_err(), ProfileError::OutOfUnit { index: 1 });
    }

    #[test]
    fn eval_at_jumps() {
        let f = P::new(vec![(0.0, 0.0), (0.5, 0.1), (0.5, 0.3), (1.0, 0.4)]).unwrap();
        assert_eq!(f.eval(0.5), 0.3);
        assert_eq!(f.eval_left(0.5), 0.1);
        assert!((f.eval(0.25) - 0.05).abs() < 1e-15);
        assert!((f.eval_left(0.75) - 0.35).abs() < 1e-15);
        assert_eq!(f.eval(1.0), 0.4);
        assert_eq!(f.eval_left(0.0), 0.0);
    }

    #[test]
    fn generalized_inverse_examples() {
        let f = P::linear(0.3).unwrap();
        assert!((f.generalized_inverse(0.15) - 0.5).abs() < 1e-15);
        assert_eq!(f.generalized_inverse(0.3), 1.0);
        assert_eq!(f.generalized_inverse(0.7), 1.0);
        assert_eq!(P::constant(0.2).unwrap().generalized_inverse(0.1), 0.0);
        assert_eq!(P::constant(0.2).unwrap().generalized_inverse(0.2), 1.0);
        let q = Q::linear(r(3, 10)).unwrap();
        assert_eq!(q.generalized_inverse(r(3, 20)), r(1, 2));
        // Flat piece: the supremum is its right end.
        let step = Q::new(vec![(r(0, 1), r(0, 1)), (r(1, 2), r(0, 1)), (r(1, 2), r(1, 4)), (r(1, 1), r(1, 4))]).unwrap();
        assert_eq!(step.generalized_inverse(r(0, 1)), r(1, 2));
        assert_eq!(step.generalized_inverse(r(1, 5)), r(1, 2));
        assert_eq!(step.generalized_inverse(r(1, 4)), r(1, 1));
    }

    #[test]
    fn inverse_profile_of_step() {
        let step = Q::new(vec![(r(0, 1), r(0, 1)), (r(1, 2), r(0, 1)), (r(1, 2), r(1, 4)), (r(1, 1), r(1, 4))]).unwrap();
        let inv = step.inverse_profile();
        assert_eq!(
            inv.points(),
            &[(r(0, 1), r(0, 1)), (r(0, 1), r(1, 2)), (r(1, 4), r(1, 2)), (r(1, 4), r(1, 1)), (r(1, 1), r(1, 1))]
        );
    }

    #[test]
    fn de_check_linear_examples() {
        let a = Q::linear(r(3, 10)).unwrap();
        assert_eq!(de_check(&a, &a, r(1, 4), 100), DeVerdict::Satisfied);
        assert_eq!(de_check(&a, &a, r(3, 10), 100), DeVerdict::Violated { at: r(0, 1) });
        // 25/36 composite.
        assert_eq!(composite(&a, &a, r(1, 4), r(1, 1)), r(25, 36));
        let af = P::linear(0.3).unwrap();
        assert!(de_check(&af, &af, 0.25, DEFAULT_GRID).is_satisfied());
        assert!(!de_check(&af, &af, 0.3, DEFAULT_GRID).is_satisfied());
        assert!(!de_check(&af, &af, 0.35, DEFAULT_GRID).is_satisfied());
    }

    #[test]
    fn de_check_zero_beta() {
        // β ≡ 0 makes β⁻¹ ≡ 1, so the composite is the constant α⁻¹(ε).
        let beta = Q::constant(r(0, 1)).unwrap();
        let alpha = Q::linear(r(3, 10)).unwrap();
        assert_eq!(de_check(&alpha, &beta, r(1, 4), 100), DeVerdict::Violated { at: r(0, 1) });
        let alpha = Q::constant(r(1, 2)).unwrap();
        assert_eq!(de_check(&alpha, &beta, r(1, 4), 100), DeVerdict::Satisfied);
    }

    #[test]
    fn de_check_interior_violation() {
        // Contracting below 1/3; the jump of β⁻¹ at 0.1 breaks it from there on.
        let f = Q::new(vec![(r(0, 1), r(0, 1)), (r(1, 5), r(1, 10)), (r(3, 5), r(1, 10)), (r(1, 1), r(3, 10))]).unwrap();
        assert_eq!(composite(&f, &f, r(3, 10), r(1, 4)), r(9, 100));
        assert_eq!(de_check(&f, &f, r(3, 10), 50), DeVerdict::Violated { at: r(1, 3) });
        assert_eq!(de_check(&f, &f, r(3, 10), 0), DeVerdict::Violated { at: r(1, 3) });
    }

    #[test]
    fn stall_at_positive_fixed_point() {
        let f = Q::new(vec![(r(0, 1), r(0, 1)), (r(1, 2), r(1, 20)), (r(1, 1), r(3, 5))]).unwrap();
        assert_eq!(composite(&f, &f, r(3, 10), r(5, 8)), r(5, 8));
        assert!(!de_check(&f, &f, r(3, 10), 50).is_satisfied());
        let ff = f.convert::<f64>();
        let t = de_trajectory(&ff, &ff, 0.3, 1e-6, 1000);
        assert!(t.stalled);
        assert!((t.converged_to - 0.625).abs() < 1e-12);
    }

    #[test]
    fn trajectory_examples() {
        let a = P::linear(0.3).unwrap();
        let t = de_trajectory(&a, &a, 0.25, 1e-3, 1000);
        let expected = (0..).find(|&i| (25.0f64 / 36.0).powi(i) <= 1e-3).unwrap() as usize;
        assert_eq!(expected, 19);
        assert_eq!(t.rounds, expected);
        assert!((t.xs[1] - 25.0 / 36.0).abs() < 1e-12);
        assert!(t.xs.windows(2).all(|w| w[1] <= w[0]));

        let t = de_trajectory(&a, &a, 0.25, 1.0, 1000);
        assert_eq!((t.rounds, t.xs.clone()), (0, vec![1.0]));

        let q = Q::linear(r(3, 10)).unwrap();
        let t = de_trajectory(&q, &q, r(3, 10), r(1, 1000000), 1000);
        assert!(t.stalled);
        assert_eq!(t.converged_to, r(1, 1));
    }

    #[test]
    fn design_examples() {
        let eps = r(3, 10);
        let beta = Q::linear(eps).unwrap();
        let alpha = design_alpha_from_beta(&beta, eps).unwrap();
        assert_eq!(alpha.points(), &[(r(0, 1), r(0, 1)), (r(1, 1), eps)]);

        let step = Q::new(vec![(r(0, 1), r(0, 1)), (r(1, 2), r(0, 1)), (r(1, 2), eps), (r(1, 1), eps)]).unwrap();
        let alpha = design_alpha_from_beta(&step, eps).unwrap();
        assert_eq!(alpha.points(), &[(r(0, 1), r(0, 1)), (r(0, 1), r(3, 20)), (r(1, 1), r(3, 20)), (r(1, 1), eps)]);
        assert_eq!(asymptotic_rate(&alpha, &step), r(7, 10));

        assert!(matches!(
            design_alpha_from_beta(&Q::constant(r(1, 5)).unwrap(), eps),
            Err(DesignError::BetaNonzeroAtZero(_))
        ));
        assert!(matches!(
            design_alpha_from_beta(&Q::linear(r(1, 2)).unwrap(), eps),
            Err(DesignError::BetaExceedsEpsilon { .. })
        ));
        assert!(design_alpha_from_beta(&beta, r(0, 1)).is_err());
    }

    #[test]
    fn rate_examples() {
        let eps = 0.3164;
        let beta = P::linear(eps).unwrap();
        let alpha = design_alpha_from_beta(&beta, eps).unwrap();
        assert!((asymptotic_rate(&alpha, &beta) - 0.6836).abs() < 1e-12);
        let zero = P::constant(0.0).unwrap();
        assert_eq!(asymptotic_rate(&zero, &zero), 1.0);
        let q = Q::linear(r(791, 2500)).unwrap();
        assert_eq!(asymptotic_rate(&q, &q), r(1709, 2500));
    }

    #[test]
    fn discretize_examples() {
        let zero = P::constant(0.0).unwrap();
        assert_eq!(discretize(&zero, &zero, 4, 5, (1, 1), 0).unwrap(), (vec![5; 4], vec![4; 5]));
        let lin = Q::linear(r(3, 10)).unwrap();
        // n(1 − 0.3(1 − i/10)) = 7 + 0.3 i: 7.3, 7.6, …, 10.
        let (a, b) = discretize(&lin, &lin, 10, 10, (1, 1), 0).unwrap();
        assert_eq!(a, vec![7, 8, 8, 8, 9, 9, 9, 9, 10, 10]);
        assert_eq!(a, b);
        let (a, _) = discretize(&lin, &lin, 10, 10, (2, 2), 2).unwrap();
        assert_eq!(a, vec![7, 7, 7, 8, 9, 9, 9, 9, 9, 9]);
        assert_eq!(
            discretize(&lin, &lin, 10, 10, (11, 1), 0).unwrap_err(),
            DesignError::Floor { which: "row", floor: 11, max: 10 }
        );
    }

    fn midpoint_rate(alpha: &P, beta: &P, steps: usize) -> f64 {
        (0..steps)
            .map(|i| {
                let x = (i as f64 + 0.5) / steps as f64;
                (beta.generalized_inverse(x) - alpha.eval(x)).max(0.0)
            })
            .sum::<f64>()
            / steps as f64
    }

    /// Random β with β(0) = 0, β(1) ≤ ε, possibly with flats and jumps.
    fn arb_beta() -> impl Strategy<Value = (Q, Rational64)> {
        (1i64..=9, proptest::collection::vec((0i64..=20, 0i64..=20, any::<bool>()), 0..6)).prop_map(|(e, raw)| {
            let eps = r(e, 10);
            let mut ts: Vec<i64> = raw.iter().map(|x| x.0).filter(|&t| t > 0 && t < 20).collect();
            ts.sort_unstable();
            ts.dedup();
            let mut vs: Vec<i64> = raw.iter().map(|x| x.1).collect();
            vs.sort_unstable();
            let mut pts = vec![(r(0, 1), r(0, 1))];
            for (k, &t) in ts.iter().enumerate() {
                let v = eps * r(vs[k], 20);
                if raw[k].2 {
                    let prev = pts.last().unwrap().1;
                    pts.push((r(t, 20), prev));
                }
                pts.push((r(t, 20), v));
            }
            let last = pts.last().unwrap().1;
            let end = eps * r(vs.last().copied().unwrap_or(20).max(if ts.is_empty() { 20 } else { 0 }), 20);
            pts.push((r(1, 1), end.max_of(last)));
            (Q::normalized(pts), eps)
        })
    }

    proptest! {
        #[test]
        fn inverse_is_monotone_and_right_continuous(pair in arb_beta(), xs in proptest::collection::vec(0u32..=1000, 1..40)) {
            let f = pair.0.convert::<f64>();
            let mut xs: Vec<f64> = xs.into_iter().map(|x| x as f64 / 1000.0).collect();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for w in xs.windows(2) {
                prop_assert!(f.generalized_inverse(w[0]) <= f.generalized_inverse(w[1]));
            }
            for &x in &xs {
                let at = f.generalized_inverse(x);
                let near = f.generalized_inverse((x + 1e-10).min(1.0));
                prop_assert!(near - at < 1e-6, "x={x} at={at} near={near}");
            }
        }

        #[test]
        fn inverse_profile_matches_pointwise(pair in arb_beta(), x in 0u32..=1000) {
            let f = pair.0;
            let x = r(x as i64, 1000);
            prop_assert_eq!(f.inverse_profile().eval(x), f.generalized_inverse(x));
        }

        #[test]
        fn designed_rate_is_one_minus_eps(pair in arb_beta()) {
            let (beta, eps) = pair;
            let alpha = design_alpha_from_beta(&beta, eps).unwrap();
            prop_assert_eq!(asymptotic_rate(&alpha, &beta), r(1, 1) - eps);
            let (af, bf) = (alpha.convert::<f64>(), beta.convert::<f64>());
            prop_assert!((asymptotic_rate(&af, &bf) - (1.0 - eps.to_f64())).abs() < 1e-9);
            prop_assert!((midpoint_rate(&af, &bf, 20_000) - (1.0 - eps.to_f64())).abs() < 1e-3);
        }

        #[test]
        fn design_clears_lower_channel(pair in arb_beta()) {
            let (beta, eps) = pair;
            let alpha = design_alpha_from_beta(&beta, eps).unwrap();
            for delta in [r(1, 100), r(5, 100)] {
                if eps - delta > r(0, 1) {
                    prop_assert_eq!(de_check(&alpha, &beta, eps - delta, 200), DeVerdict::Satisfied);
                }
            }
        }

        #[test]
        fn trajectory_dichotomy(pair in arb_beta(), shift in 0i64..=10) {
            let (beta, eps) = pair;
            let alpha = design_alpha_from_beta(&beta, eps).unwrap();
            let channel = eps + r(shift - 5, 100);
            prop_assume!(channel > r(0, 1) && channel < r(1, 1));
            let (af, bf, cf) = (alpha.convert::<f64>(), beta.convert::<f64>(), channel.to_f64());
            let t = de_trajectory(&af, &bf, cf, 1e-6, 100_000);
            match de_check(&alpha, &beta, channel, 200) {
                DeVerdict::Satisfied => prop_assert!(t.converged_to <= 1e-6),
                DeVerdict::Violated { at } => {
                    prop_assert!(t.converged_to > 0.0);
                    prop_assert!(t.converged_to >= at.to_f64() - 1e-9);
                }
            }
        }
    }
}
