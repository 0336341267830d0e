//! Euler-Bernoulli beam on `[0, 1]` with a stiffness jump and a crack at `xi0`.
//!
//! The flexural stiffness is
//!
//! ```text
//! a(x) = A (H(xi0 - x) - lambda0 delta_xi0) + kA (H(x - xi0) - lambda1 delta_xi0)
//! ```
//!
//! split into the two coefficients of the product formulation as
//! `a0 = A H(xi0 - x) - kA lambda1 delta`, `a1 = kA H(x - xi0) - A lambda0 delta`.
//! All stiffness values are divided by `A` internally, so the left and right
//! stiffness are exactly `1` and `k`, and the frequency parameter `alpha`
//! satisfies `alpha^4 = w^2 m / A`.

mod mode;
mod oracle;
mod roots;
mod split;
mod sweep;
mod system;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::interface::{CoeffSet, InterfaceError};
use crate::smooth::SmoothExpr;

pub use mode::{eval_mode, mode_shape, mode_shape_unchecked, Mode, Piece, FREQUENCY_DET_THRESHOLD, SHAPE_GRID_POINTS};
pub use oracle::{oracle_char_fn, oracle_stepped_beam};
pub use roots::{find_frequencies, find_roots, scan_roots, TOUCH_ACCEPT, TOUCH_CANDIDATE, Root, RootKind, ScanOptions};
pub use split::{
    coeffset_for, effective_s, find_frequencies_with, interface_char_det, to_coeffset_general, CrackSplit,
    StiffnessSplit,
};
pub use sweep::{sweep, SweepParam, SweepRow, SweepSpec};
pub use system::{build_m, char_det, conditioned_det, interface_residual};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeamError {
    #[error("invalid beam model: {0}")]
    InvalidModel(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("found only {} of {requested} frequencies below alpha = {alpha_max}", found.len())]
    Shortfall { found: Vec<f64>, requested: usize, alpha_max: f64 },
    #[error("alpha = {alpha} is not a characteristic frequency (|det| = {det:e})")]
    NotAFrequency { alpha: f64, det: f64 },
    #[error(transparent)]
    Interface(#[from] InterfaceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    /// Displacement and moment vanish at both ends.
    PinnedPinned,
    /// Displacement and slope vanish at both ends.
    ClampedClamped,
}

impl FromStr for BoundaryCondition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pp" => Ok(BoundaryCondition::PinnedPinned),
            "cc" => Ok(BoundaryCondition::ClampedClamped),
            other => Err(format!("unknown boundary condition `{other}` (expected pp or cc)")),
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryCondition::PinnedPinned => "pp",
            BoundaryCondition::ClampedClamped => "cc",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamModel {
    /// Flexural stiffness of the left section, N m^2.
    pub stiffness: f64,
    /// Ratio of right to left stiffness.
    pub k: f64,
    /// Mass per unit length, kg/m.
    pub mass: f64,
    /// Junction and crack position, strictly inside `(0, 1)`.
    pub xi0: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub bc: BoundaryCondition,
}

impl BeamModel {
    /// Uniform, crack-free beam with unit stiffness and mass, junction at the midpoint.
    pub fn uniform(bc: BoundaryCondition) -> Self {
        BeamModel { stiffness: 1.0, k: 1.0, mass: 1.0, xi0: 0.5, lambda0: 0.0, lambda1: 0.0, bc }
    }

    pub fn with_k(self, k: f64) -> Self {
        BeamModel { k, ..self }
    }

    pub fn with_xi0(self, xi0: f64) -> Self {
        BeamModel { xi0, ..self }
    }

    pub fn with_crack(self, lambda0: f64, lambda1: f64) -> Self {
        BeamModel { lambda0, lambda1, ..self }
    }

    pub fn validate(&self) -> Result<(), BeamError> {
        let check = |ok: bool, msg: String| if ok { Ok(()) } else { Err(BeamError::InvalidModel(msg)) };
        check(self.stiffness > 0.0 && self.stiffness.is_finite(), format!("stiffness A = {} must be positive", self.stiffness))?;
        check(self.k > 0.0 && self.k.is_finite(), format!("stiffness ratio k = {} must be positive", self.k))?;
        check(self.mass > 0.0 && self.mass.is_finite(), format!("mass m = {} must be positive", self.mass))?;
        check(self.xi0 > 0.0 && self.xi0 < 1.0, format!("xi0 = {} must lie strictly inside (0, 1)", self.xi0))?;
        check(self.lambda0 >= 0.0 && self.lambda0.is_finite(), format!("lambda0 = {} must be non-negative", self.lambda0))?;
        check(self.lambda1 >= 0.0 && self.lambda1.is_finite(), format!("lambda1 = {} must be non-negative", self.lambda1))
    }

    /// `beta = k^(-1/4)`, the wavenumber ratio of the right section.
    pub fn beta(&self) -> f64 {
        self.k.powf(-0.25)
    }
}

/// Effective crack parameter `S = (lambda0 + lambda1) / (k + 1)`.
pub fn s_param(bm: &BeamModel) -> f64 {
    (bm.lambda0 + bm.lambda1) / (bm.k + 1.0)
}

/// Angular frequency `w = alpha^2 sqrt(A / m)`.
pub fn alpha_to_omega(bm: &BeamModel, alpha: f64) -> f64 {
    alpha * alpha * (bm.stiffness / bm.mass).sqrt()
}

/// `T(t) = P cos(w t) + Q sin(w t)`.
pub fn time_factor(w: f64, p: f64, q: f64, t: f64) -> f64 {
    p * (w * t).cos() + q * (w * t).sin()
}

/// Coefficient data of the beam at angular frequency `w`, normalized by `A`.
pub fn to_coeffset(bm: &BeamModel, w: f64) -> Result<CoeffSet, BeamError> {
    bm.validate()?;
    let mut c = CoeffSet::zeros(bm.xi0, w);
    c.a0_minus = SmoothExpr::one();
    c.a1_plus = SmoothExpr::constant(bm.k);
    c.a_delta = [[-bm.k * bm.lambda1, 0.0], [-bm.lambda0, 0.0]];
    c.b_minus = SmoothExpr::constant(bm.mass / bm.stiffness);
    c.b_plus = SmoothExpr::constant(bm.mass / bm.stiffness);
    c.domain = (0.0, 1.0);
    Ok(c)
}
