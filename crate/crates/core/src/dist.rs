//! Distributions with finite singular support and the non-commutative product `*`.
//!
//! A [`DistributionA`] is kept in canonical form:
//!
//! ```text
//! F = sum_i sum_j c_ij * delta^(j)_{x_i}  +  sum_i f_i * chi_(x_i, x_{i+1})
//! ```
//!
//! with strictly increasing breakpoints `x_1 < ... < x_m`, one smooth piece per
//! open interval (`x_0 = -inf`, `x_{m+1} = +inf`) and delta terms sitting only
//! on breakpoints. Values are immutable; every operation returns a new value.
//!
//! The product `F * G` multiplies the deltas of `F` by the piece of `G` to the
//! *right* of the singular point and the deltas of `G` by the piece of `F` to
//! the *left*; delta-by-delta products vanish. Multiplication of a delta
//! derivative by a smooth function uses the expansion
//! `g * delta^(n) = sum_k (-1)^(n-k) C(n,k) g^(n-k)(xi) delta^(k)`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::smooth::SmoothExpr;

/// Largest delta derivative order accepted unless a caller asks otherwise.
pub const DEFAULT_MAX_DELTA_ORDER: u32 = 8;

/// Delta coefficients below this magnitude are dropped during normalization.
pub const ZERO_COEFF_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("breakpoints must be strictly increasing: x[{index}] = {prev} is not below x[{}] = {next}", index + 1)]
    NonIncreasing { index: usize, prev: f64, next: f64 },
    #[error("{breakpoints} breakpoints need {} pieces, got {got}", breakpoints + 1)]
    PieceCount { breakpoints: usize, got: usize },
    #[error("non-finite location {0}")]
    NonFinite(f64),
    #[error("delta order {order} exceeds the configured maximum {max}")]
    OrderTooHigh { order: u32, max: u32 },
}

/// `coeff * delta^(order)` located at `location`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaTerm {
    pub location: f64,
    pub order: u32,
    pub coeff: f64,
}

impl DeltaTerm {
    pub fn new(location: f64, order: u32, coeff: f64) -> Self {
        DeltaTerm { location, order, coeff }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionA {
    breakpoints: Vec<f64>,
    pieces: Vec<SmoothExpr>,
    deltas: Vec<DeltaTerm>,
}

impl DistributionA {
    /// Validates and normalizes a raw description. Duplicate delta terms are
    /// merged, deltas off the breakpoint set get their own breakpoint, and
    /// removable breakpoints are dropped.
    pub fn new(
        breakpoints: Vec<f64>,
        pieces: Vec<SmoothExpr>,
        deltas: Vec<DeltaTerm>,
    ) -> Result<Self, AlgebraError> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(AlgebraError::PieceCount { breakpoints: breakpoints.len(), got: pieces.len() });
        }
        if let Some(&x) = breakpoints.iter().find(|x| !x.is_finite()) {
            return Err(AlgebraError::NonFinite(x));
        }
        for (index, w) in breakpoints.windows(2).enumerate() {
            if w[0] >= w[1] {
                return Err(AlgebraError::NonIncreasing { index, prev: w[0], next: w[1] });
            }
        }
        for d in &deltas {
            if !d.location.is_finite() {
                return Err(AlgebraError::NonFinite(d.location));
            }
            if d.order > DEFAULT_MAX_DELTA_ORDER {
                return Err(AlgebraError::OrderTooHigh { order: d.order, max: DEFAULT_MAX_DELTA_ORDER });
            }
        }
        Ok(DistributionA::canonical(breakpoints, pieces, deltas))
    }

    /// Re-normalizes an existing value. Idempotent.
    pub fn normalize(&self) -> Self {
        DistributionA::canonical(self.breakpoints.clone(), self.pieces.clone(), self.deltas.clone())
    }

    /// Canonical form from sorted, finite breakpoints.
    fn canonical(
        mut breakpoints: Vec<f64>,
        mut pieces: Vec<SmoothExpr>,
        mut deltas: Vec<DeltaTerm>,
    ) -> Self {
        deltas.sort_by(|a, b| a.location.total_cmp(&b.location).then(a.order.cmp(&b.order)));
        let mut merged: Vec<DeltaTerm> = Vec::with_capacity(deltas.len());
        for d in deltas {
            match merged.last_mut() {
                Some(last) if last.location == d.location && last.order == d.order => {
                    last.coeff += d.coeff
                }
                _ => merged.push(d),
            }
        }
        merged.retain(|d| d.coeff.abs() >= ZERO_COEFF_THRESHOLD);

        for d in &merged {
            if let Err(pos) = breakpoints.binary_search_by(|x| x.total_cmp(&d.location)) {
                breakpoints.insert(pos, d.location);
                let piece = pieces[pos].clone();
                pieces.insert(pos, piece);
            }
        }

        let mut kept_points = Vec::with_capacity(breakpoints.len());
        let mut kept_pieces = Vec::with_capacity(pieces.len());
        let mut pieces = pieces.into_iter();
        kept_pieces.push(pieces.next().expect("at least one piece"));
        for (x, right) in breakpoints.into_iter().zip(pieces) {
            let has_delta = merged.iter().any(|d| d.location == x);
            let left = kept_pieces.last().expect("non-empty");
            if !has_delta && right.approx_eq(left) {
                continue;
            }
            kept_points.push(x);
            kept_pieces.push(right);
        }
        DistributionA { breakpoints: kept_points, pieces: kept_pieces, deltas: merged }
    }

    pub fn zero() -> Self {
        DistributionA::smooth(SmoothExpr::zero())
    }

    /// The regular distribution of a smooth function.
    pub fn smooth(f: SmoothExpr) -> Self {
        DistributionA { breakpoints: Vec::new(), pieces: vec![f], deltas: Vec::new() }
    }

    /// `H(x - x0)`.
    pub fn heaviside(x0: f64) -> Self {
        DistributionA::canonical(vec![x0], vec![SmoothExpr::zero(), SmoothExpr::one()], Vec::new())
    }

    /// `H(x0 - x)`.
    pub fn heaviside_left(x0: f64) -> Self {
        DistributionA::canonical(vec![x0], vec![SmoothExpr::one(), SmoothExpr::zero()], Vec::new())
    }

    /// `coeff * delta^(order)_{x0}`.
    pub fn delta(x0: f64, order: u32, coeff: f64) -> Self {
        DistributionA::canonical(
            vec![x0],
            vec![SmoothExpr::zero(), SmoothExpr::zero()],
            vec![DeltaTerm::new(x0, order, coeff)],
        )
    }

    /// `H(x0 - x) * left + H(x - x0) * right`.
    pub fn from_sides(x0: f64, left: SmoothExpr, right: SmoothExpr) -> Self {
        DistributionA::canonical(vec![x0], vec![left, right], Vec::new())
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[SmoothExpr] {
        &self.pieces
    }

    pub fn deltas(&self) -> &[DeltaTerm] {
        &self.deltas
    }

    /// Delta coefficients at `x`, keyed by derivative order.
    pub fn delta_coeffs_at(&self, x: f64) -> BTreeMap<u32, f64> {
        self.deltas.iter().filter(|d| d.location == x).map(|d| (d.order, d.coeff)).collect()
    }

    /// Smooth piece on the open interval to the left (`right == false`) or
    /// right of `x`.
    pub fn piece_near(&self, x: f64, right: bool) -> &SmoothExpr {
        let idx = if right {
            self.breakpoints.partition_point(|&b| b <= x)
        } else {
            self.breakpoints.partition_point(|&b| b < x)
        };
        &self.pieces[idx]
    }

    /// One-sided limits of the regular part at `x`; deltas are ignored.
    pub fn eval_limits(&self, x: f64) -> (f64, f64) {
        (self.piece_near(x, false).eval(x), self.piece_near(x, true).eval(x))
    }

    /// 0 for a regular distribution, otherwise one more than the highest delta
    /// derivative order: `delta^(j)` is the (j+1)-th derivative of a regular
    /// distribution but not of lower order.
    pub fn order(&self) -> u32 {
        self.deltas.iter().map(|d| d.order + 1).max().unwrap_or(0)
    }

    /// Points where the pieces do not glue smoothly or a delta sits. Pieces are
    /// entire functions, so two different pieces never glue smoothly and the
    /// canonical breakpoints are exactly the singular support.
    pub fn sing_supp(&self) -> Vec<f64> {
        self.breakpoints.clone()
    }

    pub fn is_regular(&self) -> bool {
        self.deltas.is_empty()
    }

    /// Pieces of `self` on each interval of `grid`, which must contain all of
    /// `self`'s breakpoints.
    fn refine(&self, grid: &[f64]) -> Vec<&SmoothExpr> {
        let mut out = Vec::with_capacity(grid.len() + 1);
        out.push(&self.pieces[0]);
        let mut j = 0;
        for &left_end in grid {
            while j < self.breakpoints.len() && self.breakpoints[j] <= left_end {
                j += 1;
            }
            out.push(&self.pieces[j]);
        }
        out
    }

    pub fn add(&self, other: &DistributionA) -> DistributionA {
        let grid = union(&self.breakpoints, &other.breakpoints);
        let pieces = self
            .refine(&grid)
            .into_iter()
            .zip(other.refine(&grid))
            .map(|(f, g)| f + g)
            .collect();
        let mut deltas = self.deltas.clone();
        deltas.extend_from_slice(&other.deltas);
        DistributionA::canonical(grid, pieces, deltas)
    }

    pub fn sub(&self, other: &DistributionA) -> DistributionA {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> DistributionA {
        if c == 0.0 {
            return DistributionA::zero();
        }
        DistributionA::canonical(
            self.breakpoints.clone(),
            self.pieces.iter().map(|p| p.scale(c)).collect(),
            self.deltas.iter().map(|d| DeltaTerm { coeff: d.coeff * c, ..*d }).collect(),
        )
    }

    /// Dual product `g F` of a smooth function with a distribution.
    pub fn dual_mul_smooth(&self, g: &SmoothExpr) -> DistributionA {
        let mut deltas = Vec::new();
        for d in &self.deltas {
            deltas.extend(expand_smooth_times_delta(g, d));
        }
        DistributionA::canonical(
            self.breakpoints.clone(),
            self.pieces.iter().map(|p| p * g).collect(),
            deltas,
        )
    }

    /// The product `self * other`.
    pub fn star(&self, other: &DistributionA) -> DistributionA {
        let grid = union(&self.breakpoints, &other.breakpoints);
        let f = self.refine(&grid);
        let g = other.refine(&grid);
        let mut deltas = Vec::new();
        for (i, &x) in grid.iter().enumerate() {
            // deltas of self meet other's piece to the right of x
            for d in self.deltas.iter().filter(|d| d.location == x) {
                deltas.extend(expand_smooth_times_delta(g[i + 1], d));
            }
            // deltas of other meet self's piece to the left of x
            for d in other.deltas.iter().filter(|d| d.location == x) {
                deltas.extend(expand_smooth_times_delta(f[i], d));
            }
        }
        let pieces = f.iter().zip(&g).map(|(a, b)| *a * *b).collect();
        DistributionA::canonical(grid, pieces, deltas)
    }

    /// `n`-th distributional derivative with the default order limit.
    pub fn derivative(&self, n: u32) -> Result<DistributionA, AlgebraError> {
        self.derivative_with_limit(n, DEFAULT_MAX_DELTA_ORDER)
    }

    pub fn derivative_with_limit(&self, n: u32, max_order: u32) -> Result<DistributionA, AlgebraError> {
        let mut cur = self.clone();
        for _ in 0..n {
            cur = cur.derivative_once(max_order)?;
        }
        Ok(cur)
    }

    fn derivative_once(&self, max_order: u32) -> Result<DistributionA, AlgebraError> {
        let mut deltas = Vec::with_capacity(self.deltas.len() + self.breakpoints.len());
        for d in &self.deltas {
            if d.order + 1 > max_order {
                return Err(AlgebraError::OrderTooHigh { order: d.order + 1, max: max_order });
            }
            deltas.push(DeltaTerm { order: d.order + 1, ..*d });
        }
        for (i, &x) in self.breakpoints.iter().enumerate() {
            let jump = self.pieces[i + 1].eval(x) - self.pieces[i].eval(x);
            deltas.push(DeltaTerm::new(x, 0, jump));
        }
        Ok(DistributionA::canonical(
            self.breakpoints.clone(),
            self.pieces.iter().map(SmoothExpr::derivative).collect(),
            deltas,
        ))
    }

    /// Largest absolute coefficient appearing anywhere in the representation.
    pub fn magnitude(&self) -> f64 {
        let p = self.pieces.iter().fold(0.0f64, |m, p| m.max(p.max_abs_coeff()));
        self.deltas.iter().fold(p, |m, d| m.max(d.coeff.abs()))
    }

    /// Coefficient-wise distance on the common refinement: the largest
    /// difference of delta coefficients or of piece term coefficients.
    pub fn coefficient_distance(&self, other: &DistributionA) -> f64 {
        let grid = union(&self.breakpoints, &other.breakpoints);
        let mut worst = self
            .refine(&grid)
            .into_iter()
            .zip(other.refine(&grid))
            .fold(0.0f64, |m, (f, g)| m.max((f - g).max_abs_coeff()));
        let mut diff: BTreeMap<(u64, u32), f64> = BTreeMap::new();
        for d in &self.deltas {
            *diff.entry((d.location.to_bits(), d.order)).or_default() += d.coeff;
        }
        for d in &other.deltas {
            *diff.entry((d.location.to_bits(), d.order)).or_default() -= d.coeff;
        }
        for v in diff.values() {
            worst = worst.max(v.abs());
        }
        worst
    }

    /// Coefficient-wise equality relative to `max(1, magnitude)`.
    pub fn approx_eq(&self, other: &DistributionA, tol: f64) -> bool {
        let scale = 1f64.max(self.magnitude()).max(other.magnitude());
        self.coefficient_distance(other) <= tol * scale
    }
}

/// `g * (c delta^(n)_xi)` expanded into delta terms of order `0..=n`.
pub fn expand_smooth_times_delta(g: &SmoothExpr, d: &DeltaTerm) -> Vec<DeltaTerm> {
    let n = d.order as usize;
    let values = g.eval_derivatives(d.location, n);
    (0..=n)
        .map(|k| {
            let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
            DeltaTerm::new(d.location, k as u32, d.coeff * sign * binomial(n, k) * values[n - k])
        })
        .collect()
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn union(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(_), Some(&y)) => {
                j += 1;
                y
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        out.push(next);
    }
    out
}

impl fmt::Display for DistributionA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.pieces[0])?;
        for (x, p) in self.breakpoints.iter().zip(&self.pieces[1..]) {
            write!(f, " | {x} | [{p}]")?;
        }
        for d in &self.deltas {
            write!(f, " + {}*delta^({})_{}", d.coeff, d.order, d.location)?;
        }
        Ok(())
    }
}
