use std::ops::{Add, Mul, Neg};

use nalgebra::DMatrix;

use super::{s_param, BeamError, BeamModel, BoundaryCondition};
use crate::linalg::row_normalized_det;

/// Left-minus-right values of the four junction conditions at `xi0`:
/// shear, moment, slope jump and displacement. Vectors hold
/// `(phi, phi', phi'', phi''')` of the left and right pieces.
pub fn interface_residual(bm: &BeamModel, phi1: &[f64; 4], phi2: &[f64; 4]) -> [f64; 4] {
    let s = s_param(bm);
    [
        phi1[3] - bm.k * phi2[3],
        phi1[2] - bm.k * phi2[2],
        phi1[1] + s * phi1[2] - phi2[1],
        phi1[0] - phi2[0],
    ]
}

/// One matrix entry: an already evaluated trigonometric part plus
/// coefficients of `sinh(t_i)` and `cosh(t_i)` for the three arguments
/// `t_1 = alpha beta`, `t_2 = xi0 alpha beta`, `t_3 = xi0 alpha`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Entry {
    trig: f64,
    sh: [f64; 3],
    ch: [f64; 3],
}

impl Entry {
    fn trig(v: f64) -> Self {
        Entry { trig: v, ..Default::default() }
    }

    fn sh(i: usize) -> Self {
        let mut e = Entry::default();
        e.sh[i - 1] = 1.0;
        e
    }

    fn ch(i: usize) -> Self {
        let mut e = Entry::default();
        e.ch[i - 1] = 1.0;
        e
    }

    fn eval(&self, t: &[f64; 3]) -> f64 {
        (0..3).fold(self.trig, |acc, i| acc + self.sh[i] * t[i].sinh() + self.ch[i] * t[i].cosh())
    }

    /// `e^shift` times the entry, with the hyperbolic parts written as
    /// exponentials so that nothing large is formed before the shift.
    fn eval_shifted(&self, t: &[f64; 3], shift: f64) -> f64 {
        let mut v = self.trig * shift.exp();
        for i in 0..3 {
            let grow = 0.5 * (self.sh[i] + self.ch[i]);
            let decay = 0.5 * (self.ch[i] - self.sh[i]);
            if grow != 0.0 {
                v += grow * (t[i] + shift).exp();
            }
            if decay != 0.0 {
                v += decay * (shift - t[i]).exp();
            }
        }
        v
    }
}

impl Add for Entry {
    type Output = Entry;
    fn add(self, o: Entry) -> Entry {
        let mut out = self;
        out.trig += o.trig;
        for i in 0..3 {
            out.sh[i] += o.sh[i];
            out.ch[i] += o.ch[i];
        }
        out
    }
}

impl Mul<Entry> for f64 {
    type Output = Entry;
    fn mul(self, e: Entry) -> Entry {
        Entry { trig: self * e.trig, sh: e.sh.map(|v| self * v), ch: e.ch.map(|v| self * v) }
    }
}

impl Neg for Entry {
    type Output = Entry;
    fn neg(self) -> Entry {
        -1.0 * self
    }
}

struct Symbolic {
    rows: [[Entry; 6]; 6],
    t: [f64; 3],
}

fn symbolic(bm: &BeamModel, alpha: f64) -> Symbolic {
    let beta = bm.beta();
    let rk = bm.k.sqrt();
    let qk = bm.k.powf(0.25);
    let s = s_param(bm);
    let t = [alpha * beta, bm.xi0 * alpha * beta, bm.xi0 * alpha];
    let (s1, c1) = (t[0].sin(), t[0].cos());
    let (s2, c2) = (t[1].sin(), t[1].cos());
    let (s3, c3) = (t[2].sin(), t[2].cos());
    let tr = Entry::trig;
    let (sh1, ch1, sh2, ch2, sh3, ch3) = (Entry::sh(1), Entry::ch(1), Entry::sh(2), Entry::ch(2), Entry::sh(3), Entry::ch(3));
    let z = Entry::default();

    let rows = match bm.bc {
        BoundaryCondition::PinnedPinned => {
            let f1 = tr(-c3 + alpha * s * s3);
            let f2 = -ch3 + (-alpha * s) * sh3;
            [
                [z, z, tr(s1), tr(c1), sh1, ch1],
                [z, z, tr(-s1), tr(-c1), sh1, ch1],
                [tr(s3), sh3, tr(-s2), tr(-c2), -sh2, -ch2],
                [f1, f2, tr(beta * c2), tr(-beta * s2), beta * ch2, beta * sh2],
                [tr(-s3), sh3, tr(rk * s2), tr(rk * c2), -rk * sh2, -rk * ch2],
                [tr(-c3), ch3, tr(qk * c2), tr(-qk * s2), -qk * ch2, -qk * sh2],
            ]
        }
        BoundaryCondition::ClampedClamped => {
            let g1 = tr(-c3 + s * alpha * s3) + ch3 + (s * alpha) * sh3;
            let g2 = tr(s3 + s * alpha * c3) + sh3 + (s * alpha) * ch3;
            [
                [z, z, tr(c1), tr(-s1), ch1, sh1],
                [z, z, tr(s1), tr(c1), sh1, ch1],
                [tr(-s3) + sh3, tr(-c3) + ch3, tr(-s2), tr(-c2), -sh2, -ch2],
                [g1, g2, tr(-beta * c2), tr(beta * s2), -beta * ch2, -beta * sh2],
                [tr(s3) + sh3, tr(c3) + ch3, tr(rk * s2), tr(rk * c2), -rk * sh2, -rk * ch2],
                [tr(c3) + ch3, tr(-s3) + sh3, tr(qk * c2), tr(-qk * s2), -qk * ch2, -qk * sh2],
            ]
        }
    };
    Symbolic { rows, t }
}

/// Characteristic matrix of the 6x6 homogeneous system. Unknowns are
/// `(A1, C1, A2, B2, C2, D2)` for pinned ends and `(C1, D1, A2, B2, C2, D2)`
/// for clamped ends.
pub fn build_m(bm: &BeamModel, alpha: f64) -> Result<DMatrix<f64>, BeamError> {
    bm.validate()?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(BeamError::InvalidInput(format!("alpha = {alpha} must be positive")));
    }
    Ok(build_m_unchecked(bm, alpha))
}

pub(crate) fn build_m_unchecked(bm: &BeamModel, alpha: f64) -> DMatrix<f64> {
    let sym = symbolic(bm, alpha);
    DMatrix::from_fn(6, 6, |r, c| sym.rows[r][c].eval(&sym.t))
}

/// Determinant of the characteristic matrix with every row scaled to unit
/// Euclidean norm.
pub fn char_det(bm: &BeamModel, alpha: f64) -> Result<f64, BeamError> {
    Ok(row_normalized_det(build_m(bm, alpha)?))
}

/// Hyperbolic unknowns `(C, D)` of one piece are replaced by `(E, F)` with
/// `C sinh(rx) + D cosh(rx) = E e^{r x - grow_at} + F e^{-r x + decay_at}`,
/// that is `C = E e^{-grow_at} - F e^{decay_at}`, `D = E e^{-grow_at} + F e^{decay_at}`.
/// The substitution has positive determinant and keeps every entry bounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Substitution {
    pub c_col: usize,
    /// `None` when the piece has only a `sinh` unknown.
    pub d_col: Option<usize>,
    pub grow_at: f64,
    pub decay_at: f64,
}

pub(crate) fn substitutions(bm: &BeamModel, alpha: f64) -> [Substitution; 2] {
    let t1 = alpha * bm.beta();
    let t2 = bm.xi0 * t1;
    let t3 = bm.xi0 * alpha;
    let right = Substitution { c_col: 4, d_col: Some(5), grow_at: t1, decay_at: t2 };
    let left = match bm.bc {
        BoundaryCondition::PinnedPinned => Substitution { c_col: 1, d_col: None, grow_at: t3, decay_at: 0.0 },
        BoundaryCondition::ClampedClamped => Substitution { c_col: 0, d_col: Some(1), grow_at: t3, decay_at: 0.0 },
    };
    [left, right]
}

/// The characteristic matrix after the substitution. Same null space up to
/// the substitution, same determinant sign and zeros, but well conditioned
/// for large `alpha`.
pub(crate) fn conditioned_matrix(bm: &BeamModel, alpha: f64) -> DMatrix<f64> {
    let sym = symbolic(bm, alpha);
    let mut m = DMatrix::from_fn(6, 6, |r, c| sym.rows[r][c].eval(&sym.t));
    for sub in substitutions(bm, alpha) {
        for r in 0..6 {
            let c = sym.rows[r][sub.c_col];
            match sub.d_col {
                Some(dc) => {
                    let d = sym.rows[r][dc];
                    m[(r, sub.c_col)] = (c + d).eval_shifted(&sym.t, -sub.grow_at);
                    m[(r, dc)] = (d + -c).eval_shifted(&sym.t, sub.decay_at);
                }
                None => m[(r, sub.c_col)] = c.eval_shifted(&sym.t, -sub.grow_at),
            }
        }
    }
    m
}

/// Row-normalized determinant of the conditioned matrix. Vanishes exactly
/// where [`char_det`] does and has the same sign.
pub fn conditioned_det(bm: &BeamModel, alpha: f64) -> Result<f64, BeamError> {
    bm.validate()?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(BeamError::InvalidInput(format!("alpha = {alpha} must be positive")));
    }
    Ok(conditioned_det_unchecked(bm, alpha))
}

pub(crate) fn conditioned_det_unchecked(bm: &BeamModel, alpha: f64) -> f64 {
    row_normalized_det(conditioned_matrix(bm, alpha))
}
