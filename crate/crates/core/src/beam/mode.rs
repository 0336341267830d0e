use super::system::{conditioned_det_unchecked, conditioned_matrix, interface_residual, substitutions};
use super::{alpha_to_omega, to_coeffset, BeamError, BeamModel, BoundaryCondition};
use crate::interface::{residual_check, ResidualReport};
use crate::linalg::null_vector;
use crate::smooth::SmoothExpr;

/// Conditioned determinant above this value means `alpha` is not treated as a frequency.
pub const FREQUENCY_DET_THRESHOLD: f64 = 1e-6;

/// Sample count used for sup-norm normalization and for shape output.
pub const SHAPE_GRID_POINTS: usize = 1001;

/// `sin s(rx) + cos c(rx) + grow e^{r(x - grow_at)} + decay e^{-r(x - decay_at)}`.
///
/// Equivalent to `A sin + B cos + C sinh + D cosh`, but stays accurate when
/// `r` is large and `C` and `D` nearly cancel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub rate: f64,
    pub sin: f64,
    pub cos: f64,
    pub grow: f64,
    pub grow_at: f64,
    pub decay: f64,
    pub decay_at: f64,
}

impl Piece {
    pub fn eval(&self, x: f64) -> f64 {
        let t = self.rate * x;
        self.sin * t.sin()
            + self.cos * t.cos()
            + self.grow * (self.rate * (x - self.grow_at)).exp()
            + self.decay * (-self.rate * (x - self.decay_at)).exp()
    }

    pub fn expr(&self) -> SmoothExpr {
        let r = self.rate;
        SmoothExpr::sin(r, 0.0) * self.sin
            + SmoothExpr::cos(r, 0.0) * self.cos
            + SmoothExpr::exp(r, -r * self.grow_at) * self.grow
            + SmoothExpr::exp(-r, r * self.decay_at) * self.decay
    }

    /// `(A, B, C, D)` of the sin/cos/sinh/cosh form.
    pub fn constants(&self) -> [f64; 4] {
        let e = self.grow * (-self.rate * self.grow_at).exp();
        let f = self.decay * (self.rate * self.decay_at).exp();
        [self.sin, self.cos, e - f, e + f]
    }

    fn scale(&mut self, c: f64) {
        self.sin *= c;
        self.cos *= c;
        self.grow *= c;
        self.decay *= c;
    }
}

/// A vibration mode `phi(x) = H(xi0 - x) phi1(x) + H(x - xi0) phi2(x)` with
/// `phi1 = A1 sin(ax) + B1 cos(ax) + C1 sinh(ax) + D1 cosh(ax)` and the same form
/// for `phi2` with rate `a beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub alpha: f64,
    pub bc: BoundaryCondition,
    pub xi0: f64,
    pub beta: f64,
    /// Left and right pieces.
    pub pieces: [Piece; 2],
    /// Smallest singular value of the row-normalized conditioned matrix.
    pub sigma_min: f64,
    /// Conditioned determinant at `alpha`.
    pub det: f64,
}

impl Mode {
    /// `(A1, B1, C1, D1, A2, B2, C2, D2)`.
    pub fn constants(&self) -> [f64; 8] {
        let (l, r) = (self.pieces[0].constants(), self.pieces[1].constants());
        [l[0], l[1], l[2], l[3], r[0], r[1], r[2], r[3]]
    }

    pub fn left(&self) -> SmoothExpr {
        self.pieces[0].expr()
    }

    pub fn right(&self) -> SmoothExpr {
        self.pieces[1].expr()
    }

    /// `(phi, phi', phi'', phi''')` of the left and right pieces at `xi0`.
    pub fn interface_vectors(&self) -> ([f64; 4], [f64; 4]) {
        let to4 = |v: Vec<f64>| [v[0], v[1], v[2], v[3]];
        (
            to4(self.left().eval_derivatives(self.xi0, 3)),
            to4(self.right().eval_derivatives(self.xi0, 3)),
        )
    }

    fn eval_raw(&self, x: f64) -> f64 {
        if x < self.xi0 {
            self.pieces[0].eval(x)
        } else {
            self.pieces[1].eval(x)
        }
    }

    /// `points` uniform samples `(x, phi(x))` on `[0, 1]`.
    pub fn samples(&self, points: usize) -> Vec<(f64, f64)> {
        let n = points.max(2);
        (0..n)
            .map(|i| {
                let x = i as f64 / (n - 1) as f64;
                (x, self.eval_raw(x))
            })
            .collect()
    }

    /// Substitutes the mode into the distributional equation of the beam.
    pub fn residual_report(&self, bm: &BeamModel) -> Result<ResidualReport, BeamError> {
        let c = to_coeffset(bm, alpha_to_omega(bm, self.alpha))?;
        Ok(residual_check(&self.left(), &self.right(), &c)?)
    }

    pub fn junction_residual(&self, bm: &BeamModel) -> [f64; 4] {
        let (l, r) = self.interface_vectors();
        interface_residual(bm, &l, &r)
    }
}

/// Mode for a frequency parameter returned by the root finder.
pub fn mode_shape(bm: &BeamModel, alpha: f64) -> Result<Mode, BeamError> {
    let mode = mode_shape_unchecked(bm, alpha)?;
    if !(mode.det.abs() <= FREQUENCY_DET_THRESHOLD) {
        return Err(BeamError::NotAFrequency { alpha, det: mode.det.abs() });
    }
    Ok(mode)
}

/// Same as [`mode_shape`] without the determinant check: the smallest singular
/// direction is used whatever its singular value.
pub fn mode_shape_unchecked(bm: &BeamModel, alpha: f64) -> Result<Mode, BeamError> {
    bm.validate()?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(BeamError::InvalidInput(format!("alpha = {alpha} must be positive")));
    }
    let det = conditioned_det_unchecked(bm, alpha);
    let (v, sigma_min) = null_vector(conditioned_matrix(bm, alpha));
    let [left_sub, right_sub] = substitutions(bm, alpha);
    let (r1, r2) = (alpha, alpha * bm.beta());

    let left = match bm.bc {
        BoundaryCondition::PinnedPinned => {
            // C1 sinh(ax) with C1 = E e^{-a xi0}
            let e = v[left_sub.c_col];
            Piece {
                rate: r1,
                sin: v[0],
                cos: 0.0,
                grow: 0.5 * e,
                grow_at: bm.xi0,
                decay: -0.5 * e * (-left_sub.grow_at).exp(),
                decay_at: 0.0,
            }
        }
        BoundaryCondition::ClampedClamped => {
            // C1 (sinh - sin) + D1 (cosh - cos)
            let (e, f) = (v[0], v[1]);
            let c1 = e * (-left_sub.grow_at).exp() - f;
            let d1 = e * (-left_sub.grow_at).exp() + f;
            Piece { rate: r1, sin: -c1, cos: -d1, grow: e, grow_at: bm.xi0, decay: f, decay_at: 0.0 }
        }
    };
    let right = Piece { rate: r2, sin: v[2], cos: v[3], grow: v[4], grow_at: 1.0, decay: v[5], decay_at: bm.xi0 };
    debug_assert_eq!(right_sub.c_col, 4);

    let mut mode = Mode { alpha, bc: bm.bc, xi0: bm.xi0, beta: bm.beta(), pieces: [left, right], sigma_min, det };
    let sup = mode.samples(SHAPE_GRID_POINTS).iter().fold(0.0f64, |m, &(_, y)| m.max(y.abs()));
    let lead = mode
        .constants()
        .into_iter()
        .reduce(|best, c| if c.abs() > best.abs() { c } else { best })
        .unwrap_or(1.0);
    let factor = lead.signum() / sup;
    for p in &mut mode.pieces {
        p.scale(factor);
    }
    Ok(mode)
}

/// `phi(x)` for `x` in `[0, 1]`.
pub fn eval_mode(mode: &Mode, x: f64) -> Result<f64, BeamError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(BeamError::InvalidInput(format!("x = {x} lies outside [0, 1]")));
    }
    Ok(mode.eval_raw(x))
}
