//! Interface conditions at a single singular point of the separated beam equation
//!
//! ```text
//! sum_{i=0}^{2} C(2,i) [a0^(i) * phi^(4-i) + phi^(4-i) * a1^(i)] - w^2 (b0 * phi + phi * b1) = 0
//! ```
//!
//! with coefficients
//!
//! ```text
//! a_i = a_{i-} H(xi0 - x) + a_{i+} H(x - xi0) + sum_{j<=1} A_ij delta^(j)_{xi0}
//! b_i = b_{i-} H(xi0 - x) + b_{i+} H(x - xi0) + sum_{j<=3} B_ij delta^(j)_{xi0}
//! ```
//!
//! Solutions are `H(xi0 - x) phi1 + H(x - xi0) phi2` with smooth `phi1`, `phi2`
//! tied together by `A (phi1, phi1', phi1'', phi1''')(xi0) = B (phi2, ...)(xi0)`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::dist::{binomial, AlgebraError, DeltaTerm, DistributionA};
use crate::linalg::{det4, Mat4};
use crate::smooth::SmoothExpr;

/// Nonvanishing threshold for the leading-coefficient conditions.
pub const CONDITION_THRESHOLD: f64 = 1e-12;

/// Determinant magnitude below which an interface matrix counts as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

/// Relative tolerance for the smooth ODEs on each side.
pub const ODE_TOLERANCE: f64 = 1e-8;

/// Points per half-interval when checking the smooth ODEs.
pub const ODE_PROBE_POINTS: usize = 101;

/// Default relative tolerance for [`ResidualReport::passes`].
pub const RESIDUAL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InterfaceError {
    #[error("a(xi0) = {value} vanishes, the leading coefficient condition at the singular point fails")]
    SingularLeading { value: f64 },
    #[error("a_{side}({x}) = {value} vanishes on the working interval")]
    VanishingSide { side: Side, x: f64, value: f64 },
    #[error("phi on the {side} side does not solve its ODE: worst residual {residual:e} at x = {x} (scale {scale:e})")]
    OdeNotSatisfied { side: Side, x: f64, residual: f64, scale: f64 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Left => "-",
            Side::Right => "+",
        })
    }
}

/// Coefficient data at one singular point.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSet {
    pub xi0: f64,
    /// Angular frequency.
    pub w: f64,
    pub a0_minus: SmoothExpr,
    pub a0_plus: SmoothExpr,
    pub a1_minus: SmoothExpr,
    pub a1_plus: SmoothExpr,
    /// `A_ij`, i = 0, 1 and j = 0, 1.
    pub a_delta: [[f64; 2]; 2],
    /// `B_ij`, i = 0, 1 and j = 0..=3.
    pub b_delta: [[f64; 4]; 2],
    pub b_minus: SmoothExpr,
    pub b_plus: SmoothExpr,
    /// Working interval used for probe grids.
    pub domain: (f64, f64),
}

impl CoeffSet {
    /// All coefficients zero, working interval `[xi0 - 1, xi0 + 1]`.
    pub fn zeros(xi0: f64, w: f64) -> Self {
        CoeffSet {
            xi0,
            w,
            a0_minus: SmoothExpr::zero(),
            a0_plus: SmoothExpr::zero(),
            a1_minus: SmoothExpr::zero(),
            a1_plus: SmoothExpr::zero(),
            a_delta: [[0.0; 2]; 2],
            b_delta: [[0.0; 4]; 2],
            b_minus: SmoothExpr::zero(),
            b_plus: SmoothExpr::zero(),
            domain: (xi0 - 1.0, xi0 + 1.0),
        }
    }

    /// `a_i` as an element of the algebra.
    pub fn a_distribution(&self, i: usize) -> DistributionA {
        let (minus, plus) = if i == 0 {
            (&self.a0_minus, &self.a0_plus)
        } else {
            (&self.a1_minus, &self.a1_plus)
        };
        let deltas = (0..2).map(|j| DeltaTerm::new(self.xi0, j as u32, self.a_delta[i][j])).collect();
        DistributionA::new(vec![self.xi0], vec![minus.clone(), plus.clone()], deltas)
            .expect("single finite breakpoint")
    }

    /// `b_i` as an element of the algebra. Only the sums `b_-`, `b_+` enter the
    /// equation, so the smooth parts are carried entirely by `b_0`.
    pub fn b_distribution(&self, i: usize) -> DistributionA {
        let pieces = if i == 0 {
            vec![self.b_minus.clone(), self.b_plus.clone()]
        } else {
            vec![SmoothExpr::zero(), SmoothExpr::zero()]
        };
        let deltas = (0..4).map(|j| DeltaTerm::new(self.xi0, j as u32, self.b_delta[i][j])).collect();
        DistributionA::new(vec![self.xi0], pieces, deltas).expect("single finite breakpoint")
    }

    pub fn default_grid(&self) -> ProbeGrid {
        ProbeGrid::new(self.domain.0, self.domain.1, 1001)
    }
}

/// Uniform sample of a closed interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl ProbeGrid {
    pub fn new(lo: f64, hi: f64, points: usize) -> Self {
        ProbeGrid { lo, hi, points: points.max(2) }
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        let step = (self.hi - self.lo) / (self.points - 1) as f64;
        (0..self.points).map(move |i| if i + 1 == self.points { self.hi } else { self.lo + step * i as f64 })
    }
}

/// Combinations of the coefficients that the interface matrices are built from.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedCoeffs {
    /// `a = a_{0-} + a_{1+}`
    pub a: SmoothExpr,
    pub a_minus: SmoothExpr,
    pub a_plus: SmoothExpr,
    /// `v_i = a_{i+} - a_{i-}`
    pub v: [SmoothExpr; 2],
    pub b_minus: SmoothExpr,
    pub b_plus: SmoothExpr,
}

pub fn derived_coeffs(c: &CoeffSet) -> DerivedCoeffs {
    DerivedCoeffs {
        a: &c.a0_minus + &c.a1_plus,
        a_minus: &c.a0_minus + &c.a1_minus,
        a_plus: &c.a0_plus + &c.a1_plus,
        v: [&c.a0_plus - &c.a0_minus, &c.a1_plus - &c.a1_minus],
        b_minus: c.b_minus.clone(),
        b_plus: c.b_plus.clone(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub c1_ok: bool,
    pub c2_ok: bool,
    pub a_at_xi0: f64,
    /// First probe point where `a_-` or `a_+` vanishes.
    pub c2_violation: Option<(Side, f64, f64)>,
}

/// Leading-coefficient conditions: `a(xi0) != 0` and `a_-`, `a_+` nonvanishing
/// on the probe grid. The second one is only a semidecision.
pub fn check_conditions(c: &CoeffSet, grid: &ProbeGrid) -> ConditionReport {
    let d = derived_coeffs(c);
    let a_at_xi0 = d.a.eval(c.xi0);
    let c2_violation = grid.iter().find_map(|x| {
        [(Side::Left, &d.a_minus), (Side::Right, &d.a_plus)]
            .into_iter()
            .map(|(side, f)| (side, x, f.eval(x)))
            .find(|(_, _, v)| !(v.abs() > CONDITION_THRESHOLD))
    });
    ConditionReport {
        c1_ok: a_at_xi0.abs() > CONDITION_THRESHOLD,
        c2_ok: c2_violation.is_none(),
        a_at_xi0,
        c2_violation,
    }
}

/// The interface matrices evaluated at the singular point, acting on
/// `(phi, phi', phi'', phi''')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceMatrices {
    pub a_mat: Mat4,
    pub b_mat: Mat4,
}

pub fn build_interface_matrices(c: &CoeffSet) -> Result<InterfaceMatrices, InterfaceError> {
    let report = check_conditions(c, &c.default_grid());
    if !report.c1_ok {
        return Err(InterfaceError::SingularLeading { value: report.a_at_xi0 });
    }
    if let Some((side, x, value)) = report.c2_violation {
        return Err(InterfaceError::VanishingSide { side, x, value });
    }
    Ok(interface_matrices_unchecked(c))
}

fn interface_matrices_unchecked(c: &CoeffSet) -> InterfaceMatrices {
    let d = derived_coeffs(c);
    let x = c.xi0;
    let w2 = c.w * c.w;
    let (a, da) = (d.a.eval(x), d.a.derivative().eval(x));
    let (am, dam) = (d.a_minus.eval(x), d.a_minus.derivative().eval(x));
    let (ap, dap) = (d.a_plus.eval(x), d.a_plus.derivative().eval(x));
    let [a0, a1] = c.a_delta;
    let [b0, b1] = c.b_delta.map(|row| row.map(|v| v * w2));

    let a_mat = [
        [b1[0], -b1[1], dam + b1[2], am - b1[3]],
        [b1[1], -2.0 * b1[2], am + 3.0 * b1[3], 0.0],
        [-da + b1[2], a - 3.0 * b1[3], -a1[0], a1[1]],
        [a + b1[3], 0.0, -a1[1], 0.0],
    ];
    let b_mat = [
        [-b0[0], b0[1], dap - b0[2], ap + b0[3]],
        [-b0[1], 2.0 * b0[2], ap - 3.0 * b0[3], 0.0],
        [-da - b0[2], a + 3.0 * b0[3], a0[0], -a0[1]],
        [a - b0[3], 0.0, a0[1], 0.0],
    ];
    InterfaceMatrices { a_mat, b_mat }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solvability {
    pub det_a: f64,
    pub det_b: f64,
    /// Boundary data given left of the singular point fixes a unique solution.
    pub unique_from_left: bool,
    /// Boundary data given right of the singular point fixes a unique solution.
    pub unique_from_right: bool,
}

pub fn solvability(m: &InterfaceMatrices) -> Solvability {
    let det_a = det4(&m.a_mat);
    let det_b = det4(&m.b_mat);
    Solvability {
        det_a,
        det_b,
        unique_from_left: det_b.abs() > SINGULAR_THRESHOLD,
        unique_from_right: det_a.abs() > SINGULAR_THRESHOLD,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Regularity {
    /// Every solution is piecewise smooth.
    pub delta_free: bool,
    /// Upper bound on the order of the solutions.
    pub max_order_bound: u32,
}

/// Regularity of solutions given `M = max(ord a_i'', ord b_i)`.
pub fn classify_regularity(m: u32) -> Regularity {
    if m <= 4 {
        Regularity { delta_free: true, max_order_bound: 0 }
    } else {
        Regularity { delta_free: false, max_order_bound: m - 4 }
    }
}

/// `M = max(ord a_i'', ord b_i)` computed in the algebra.
pub fn coefficient_order(c: &CoeffSet) -> Result<u32, InterfaceError> {
    let mut m = 0;
    for i in 0..2 {
        m = m.max(c.a_distribution(i).derivative(2)?.order());
        m = m.max(c.b_distribution(i).order());
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContinuityClass {
    pub c0_guaranteed: bool,
    pub c1_guaranteed: bool,
}

/// Sufficient conditions for continuous (no `delta'` in `a_i`, no `delta'''` in
/// `b_i`) and continuously differentiable (additionally no `delta` in `a_i`,
/// no `delta''` in `b_i`) solutions. Not necessary conditions.
pub fn continuity_class(c: &CoeffSet) -> ContinuityClass {
    let zero = |v: f64| v.abs() < CONDITION_THRESHOLD;
    let c0 = (0..2).all(|i| zero(c.a_delta[i][1]) && zero(c.b_delta[i][3]));
    let c1 = c0 && (0..2).all(|i| zero(c.a_delta[i][0]) && zero(c.b_delta[i][2]));
    ContinuityClass { c0_guaranteed: c0, c1_guaranteed: c1 }
}

/// Outcome of substituting `H(xi0-x) phi1 + H(x-xi0) phi2` into the equation.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// Coefficient of `delta^(j)_{xi0}` in the residual, keyed by `j`.
    pub delta_coeffs: BTreeMap<u32, f64>,
    /// Largest absolute value of the regular part of the residual on the grid.
    pub smooth_residual_max: f64,
    /// `max(1, largest coefficient among the summands)`.
    pub scale: f64,
}

impl ResidualReport {
    pub fn max_delta(&self) -> f64 {
        self.delta_coeffs.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn passes(&self, rel_tol: f64) -> bool {
        self.max_delta() <= rel_tol * self.scale && self.smooth_residual_max <= rel_tol * self.scale
    }
}

/// Value of the regular ODE on one side and the sum of the magnitudes of its terms.
fn side_ode(phi: &SmoothExpr, a_side: &SmoothExpr, b_side: &SmoothExpr, w2: f64, x: f64) -> (f64, f64) {
    let phi_d = phi.eval_derivatives(x, 4);
    let a_d = a_side.eval_derivatives(x, 2);
    let mut value = 0.0;
    let mut size = 0.0;
    for i in 0..=2 {
        let t = binomial(2, i) * a_d[i] * phi_d[4 - i];
        value += t;
        size += t.abs();
    }
    let t = w2 * b_side.eval(x) * phi_d[0];
    value -= t;
    size += t.abs();
    (value, size)
}

fn check_side_ode(
    side: Side,
    phi: &SmoothExpr,
    a_side: &SmoothExpr,
    b_side: &SmoothExpr,
    w2: f64,
    grid: ProbeGrid,
) -> Result<(), InterfaceError> {
    let samples: Vec<(f64, f64, f64)> = grid
        .iter()
        .map(|x| {
            let (v, s) = side_ode(phi, a_side, b_side, w2, x);
            (x, v, s)
        })
        .collect();
    let scale = samples.iter().fold(0.0f64, |m, s| m.max(s.2));
    let (x, residual, _) = samples
        .iter()
        .copied()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("grid is non-empty");
    if !(residual.abs() <= ODE_TOLERANCE * scale) {
        return Err(InterfaceError::OdeNotSatisfied { side, x, residual, scale });
    }
    Ok(())
}

fn sampled_magnitude(d: &DistributionA, left: &ProbeGrid, right: &ProbeGrid) -> f64 {
    let mut m = d.deltas().iter().fold(0.0f64, |m, t| m.max(t.coeff.abs()));
    for x in left.iter() {
        m = m.max(d.piece_near(x, false).eval(x).abs());
    }
    for x in right.iter() {
        m = m.max(d.piece_near(x, true).eval(x).abs());
    }
    m
}

/// Assembles the residual of the equation for `H(xi0-x) phi1 + H(x-xi0) phi2`
/// entirely inside the algebra. Requires `phi1` and `phi2` to solve the
/// regular ODEs on their half of the working interval.
pub fn residual_check(
    phi1: &SmoothExpr,
    phi2: &SmoothExpr,
    c: &CoeffSet,
) -> Result<ResidualReport, InterfaceError> {
    let d = derived_coeffs(c);
    let w2 = c.w * c.w;
    let left = ProbeGrid::new(c.domain.0, c.xi0, ODE_PROBE_POINTS);
    let right = ProbeGrid::new(c.xi0, c.domain.1, ODE_PROBE_POINTS);
    check_side_ode(Side::Left, phi1, &d.a_minus, &d.b_minus, w2, left)?;
    check_side_ode(Side::Right, phi2, &d.a_plus, &d.b_plus, w2, right)?;

    let phi = DistributionA::from_sides(c.xi0, phi1.clone(), phi2.clone());
    let (a0, a1) = (c.a_distribution(0), c.a_distribution(1));
    let (b0, b1) = (c.b_distribution(0), c.b_distribution(1));

    let mut summands = Vec::with_capacity(8);
    for i in 0..=2u32 {
        let weight = binomial(2, i as usize);
        let phi_d = phi.derivative(4 - i)?;
        summands.push(a0.derivative(i)?.star(&phi_d).scale(weight));
        summands.push(phi_d.star(&a1.derivative(i)?).scale(weight));
    }
    summands.push(b0.star(&phi).scale(-w2));
    summands.push(phi.star(&b1).scale(-w2));

    let scale = summands
        .iter()
        .fold(1f64, |m, s| m.max(sampled_magnitude(s, &left, &right)));
    let total = summands.iter().fold(DistributionA::zero(), |acc, s| acc.add(s));

    let smooth_residual_max = left
        .iter()
        .map(|x| total.piece_near(x, false).eval(x).abs())
        .chain(right.iter().map(|x| total.piece_near(x, true).eval(x).abs()))
        .fold(0.0f64, f64::max);

    Ok(ResidualReport { delta_coeffs: total.delta_coeffs_at(c.xi0), smooth_residual_max, scale })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smooth_uniform(xi0: f64) -> CoeffSet {
        let mut c = CoeffSet::zeros(xi0, 0.0);
        c.a0_minus = SmoothExpr::one();
        c.a1_plus = SmoothExpr::one();
        c
    }

    #[test]
    fn derived_combinations() {
        let mut c = CoeffSet::zeros(0.0, 1.0);
        c.a0_minus = SmoothExpr::sin(1.0, 0.0);
        c.a1_plus = SmoothExpr::cos(1.0, 0.0);
        let d = derived_coeffs(&c);
        assert_eq!(d.a, SmoothExpr::sin(1.0, 0.0) + SmoothExpr::cos(1.0, 0.0));
        assert!(derived_coeffs(&CoeffSet::zeros(0.0, 1.0)).a.is_zero());
    }

    #[test]
    fn condition_failures() {
        let mut c = CoeffSet::zeros(0.5, 1.0);
        c.a0_minus = SmoothExpr::constant(2.0);
        c.a1_plus = SmoothExpr::constant(-2.0);
        c.a1_minus = SmoothExpr::one();
        c.a0_plus = SmoothExpr::one();
        let r = check_conditions(&c, &c.default_grid());
        assert!(!r.c1_ok);
        assert!(matches!(build_interface_matrices(&c), Err(InterfaceError::SingularLeading { .. })));

        let mut c = smooth_uniform(0.5);
        c.a1_plus = SmoothExpr::poly(&[1.0 - 0.5, 1.0]); // x - xi0 + 1
        let r = check_conditions(&c, &ProbeGrid::new(-0.5, 1.5, 5));
        assert!(r.c1_ok);
        assert!(!r.c2_ok);
        assert_eq!(r.c2_violation.map(|v| v.1), Some(-0.5));
    }

    #[test]
    fn smooth_limit_matrices() {
        let c = smooth_uniform(0.3);
        let m = build_interface_matrices(&c).unwrap();
        let expected = [
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 2.0, 0.0, 0.0],
            [2.0, 0.0, 0.0, 0.0],
        ];
        assert_eq!(m.a_mat, expected);
        assert_eq!(m.b_mat, expected);
    }

    #[test]
    fn zero_frequency_removes_b_terms() {
        let mut c = smooth_uniform(0.0);
        c.b_delta = [[1.0, -2.0, 3.0, 0.5], [0.25, 1.0, -1.0, 2.0]];
        c.a_delta = [[0.3, 0.1], [-0.2, 0.4]];
        let m0 = build_interface_matrices(&c).unwrap();
        let mut bare = c.clone();
        bare.b_delta = [[0.0; 4]; 2];
        assert_eq!(m0, build_interface_matrices(&bare).unwrap());
        c.w = 1.5;
        assert_ne!(m0, build_interface_matrices(&c).unwrap());
    }

    #[test]
    fn regularity_classes() {
        assert_eq!(classify_regularity(4), Regularity { delta_free: true, max_order_bound: 0 });
        assert_eq!(classify_regularity(6), Regularity { delta_free: false, max_order_bound: 2 });
        assert_eq!(classify_regularity(0), Regularity { delta_free: true, max_order_bound: 0 });
    }

    #[test]
    fn coefficient_order_counts_delta_derivatives() {
        let mut c = CoeffSet::zeros(0.0, 1.0);
        c.a0_minus = SmoothExpr::one();
        c.a0_plus = SmoothExpr::one();
        assert_eq!(coefficient_order(&c).unwrap(), 0);
        c.a_delta[0][1] = 1.0;
        assert_eq!(coefficient_order(&c).unwrap(), 4);
        c.b_delta[1][3] = 1.0;
        assert_eq!(coefficient_order(&c).unwrap(), 4);
        // H(xi0 - x) in a_0 gives a_0'' = -delta', order 2
        assert_eq!(coefficient_order(&smooth_uniform(0.0)).unwrap(), 2);
    }

    #[test]
    fn continuity_flags() {
        let c = smooth_uniform(0.0);
        assert_eq!(continuity_class(&c), ContinuityClass { c0_guaranteed: true, c1_guaranteed: true });
        let mut d = c.clone();
        d.a_delta[0][1] = 1.0;
        assert!(!continuity_class(&d).c0_guaranteed);
        let mut e = c.clone();
        e.a_delta[1][0] = -0.5;
        assert_eq!(continuity_class(&e), ContinuityClass { c0_guaranteed: true, c1_guaranteed: false });
    }

    #[test]
    fn singular_b_detected() {
        // B_03 = a / w^2 turns row 4 of B into (0, 0, A_01, 0), parallel to row 2
        let mut c = smooth_uniform(0.0);
        c.w = 2.0;
        c.b_delta[0][3] = 2.0 / 4.0;
        c.a_delta[0][1] = 0.7;
        let m = build_interface_matrices(&c).unwrap();
        assert_eq!(m.b_mat[3], [0.0, 0.0, 0.7, 0.0]);
        let s = solvability(&m);
        assert!(!s.unique_from_left);
        assert_eq!(s.det_b, 0.0);
        assert!(s.unique_from_right);
    }

    #[test]
    fn residual_rejects_non_solutions() {
        let c = smooth_uniform(0.5);
        let err = residual_check(&SmoothExpr::sin(1.0, 0.0), &SmoothExpr::sin(1.0, 0.0), &c).unwrap_err();
        assert!(matches!(err, InterfaceError::OdeNotSatisfied { side: Side::Left, .. }));
    }

    #[test]
    fn classical_mode_has_zero_residual() {
        let pi = std::f64::consts::PI;
        let mut c = smooth_uniform(0.5);
        c.w = pi * pi;
        c.b_minus = SmoothExpr::one();
        c.b_plus = SmoothExpr::one();
        c.domain = (0.0, 1.0);
        let phi = SmoothExpr::sin(pi, 0.0);
        let r = residual_check(&phi, &phi, &c).unwrap();
        assert!(r.max_delta() <= 1e-9, "{r:?}");
        assert!(r.smooth_residual_max <= 1e-9);
        assert!(r.passes(RESIDUAL_TOLERANCE));
    }
}
