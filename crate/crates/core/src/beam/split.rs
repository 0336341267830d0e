//! Frequencies computed directly from the interface matrices, which also
//! covers other ways of splitting the stiffness between the two coefficients.

use nalgebra::DMatrix;

use super::roots::scan_roots;
use super::{alpha_to_omega, to_coeffset, BeamError, BeamModel, BoundaryCondition, ScanOptions};
use crate::interface::{build_interface_matrices, CoeffSet, InterfaceMatrices};
use crate::linalg::{row_normalized_det, Mat4};
use crate::smooth::SmoothExpr;

const SPLIT_TOLERANCE: f64 = 1e-12;

/// Crack intensities assigned to each coefficient: `lambda[i][j]` is the
/// share of coefficient `a_i` on side `j` (0 left, 1 right).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrackSplit {
    pub lambda: [[f64; 2]; 2],
}

impl CrackSplit {
    /// Half of each intensity on each coefficient.
    pub fn symmetric(bm: &BeamModel) -> Self {
        let (l0, l1) = (0.5 * bm.lambda0, 0.5 * bm.lambda1);
        CrackSplit { lambda: [[l0, l1], [l0, l1]] }
    }

    /// Left intensity on `a_0`, right intensity on `a_1`.
    pub fn by_side(bm: &BeamModel) -> Self {
        CrackSplit { lambda: [[bm.lambda0, 0.0], [0.0, bm.lambda1]] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StiffnessSplit {
    /// Left section in `a_0`, right section in `a_1`.
    Standard,
    /// Both sections halved between `a_0` and `a_1`, cracks split as given.
    General(CrackSplit),
}

/// `a_i = (H(xi0 - x) + k H(x - xi0)) / 2 - lambda_i0 delta - k lambda_i1 delta`, normalized by `A`.
pub fn to_coeffset_general(bm: &BeamModel, split: &CrackSplit, w: f64) -> Result<CoeffSet, BeamError> {
    bm.validate()?;
    let l = split.lambda;
    if l.iter().flatten().any(|v| !v.is_finite()) {
        return Err(BeamError::InvalidInput("crack split contains a non-finite value".into()));
    }
    let close = |a: f64, b: f64| (a - b).abs() <= SPLIT_TOLERANCE * 1f64.max(b.abs());
    if !close(l[0][0] + l[1][0], bm.lambda0) || !close(l[0][1] + l[1][1], bm.lambda1) {
        return Err(BeamError::InvalidInput(format!(
            "crack split {:?} does not add up to lambda0 = {}, lambda1 = {}",
            l, bm.lambda0, bm.lambda1
        )));
    }
    let mut c = CoeffSet::zeros(bm.xi0, w);
    c.a0_minus = SmoothExpr::constant(0.5);
    c.a1_minus = SmoothExpr::constant(0.5);
    c.a0_plus = SmoothExpr::constant(0.5 * bm.k);
    c.a1_plus = SmoothExpr::constant(0.5 * bm.k);
    for i in 0..2 {
        c.a_delta[i][0] = -(l[i][0] + bm.k * l[i][1]);
    }
    c.b_minus = SmoothExpr::constant(bm.mass / bm.stiffness);
    c.b_plus = SmoothExpr::constant(bm.mass / bm.stiffness);
    c.domain = (0.0, 1.0);
    Ok(c)
}

/// Slope-jump factor: `phi2' - phi1' = S phi1''` at the junction.
pub fn effective_s(bm: &BeamModel, split: &StiffnessSplit) -> f64 {
    match split {
        StiffnessSplit::Standard => super::s_param(bm),
        StiffnessSplit::General(s) => {
            let l = s.lambda;
            2.0 * (l[1][0] + bm.k * l[1][1] + l[0][0] / bm.k + l[0][1]) / (1.0 + bm.k)
        }
    }
}

pub fn coeffset_for(bm: &BeamModel, split: &StiffnessSplit, w: f64) -> Result<CoeffSet, BeamError> {
    match split {
        StiffnessSplit::Standard => to_coeffset(bm, w),
        StiffnessSplit::General(s) => to_coeffset_general(bm, s, w),
    }
}

/// Rows `phi, phi', phi'', phi'''` of the basis
/// `sin(rx), cos(rx), e^{r(x - g)}, e^{-r(x - d)}` at `x`. The shifts keep the
/// exponentials bounded on `[d, g]`.
fn basis_derivatives(r: f64, x: f64, g: f64, d: f64) -> Mat4 {
    let t = r * x;
    let (s, c) = (t.sin(), t.cos());
    let (up, down) = ((r * (x - g)).exp(), (-r * (x - d)).exp());
    [
        [s, c, up, down],
        [r * c, -r * s, r * up, -r * down],
        [-r * r * s, -r * r * c, r * r * up, r * r * down],
        [-r.powi(3) * c, r.powi(3) * s, r.powi(3) * up, -r.powi(3) * down],
    ]
}

fn boundary_rows(bc: BoundaryCondition) -> [usize; 2] {
    match bc {
        BoundaryCondition::PinnedPinned => [0, 2],
        BoundaryCondition::ClampedClamped => [0, 1],
    }
}

fn matrix_8x8(bm: &BeamModel, m: &InterfaceMatrices, alpha: f64) -> DMatrix<f64> {
    let r1 = alpha;
    let r2 = alpha * bm.beta();
    let at0 = basis_derivatives(r1, 0.0, bm.xi0, 0.0);
    let at1 = basis_derivatives(r2, 1.0, 1.0, bm.xi0);
    let d1 = basis_derivatives(r1, bm.xi0, bm.xi0, 0.0);
    let d2 = basis_derivatives(r2, bm.xi0, 1.0, bm.xi0);
    let mut out = DMatrix::zeros(8, 8);
    for (row, &d) in boundary_rows(bm.bc).iter().enumerate() {
        for c in 0..4 {
            out[(row, c)] = at0[d][c];
            out[(row + 2, c + 4)] = at1[d][c];
        }
    }
    for i in 0..4 {
        for c in 0..4 {
            let left: f64 = (0..4).map(|j| m.a_mat[i][j] * d1[j][c]).sum();
            let right: f64 = (0..4).map(|j| m.b_mat[i][j] * d2[j][c]).sum();
            out[(4 + i, c)] = left;
            out[(4 + i, c + 4)] = -right;
        }
    }
    out
}

/// The interface matrices of the beam. The coefficients carry no delta terms
/// in the mass, so the matrices do not depend on the frequency.
fn beam_interface_matrices(bm: &BeamModel, split: &StiffnessSplit) -> Result<InterfaceMatrices, BeamError> {
    let c = coeffset_for(bm, split, 1.0)?;
    Ok(build_interface_matrices(&c)?)
}

/// Row-normalized determinant of the 8x8 system formed by the boundary
/// conditions and the interface matrices.
pub fn interface_char_det(bm: &BeamModel, split: &StiffnessSplit, alpha: f64) -> Result<f64, BeamError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(BeamError::InvalidInput(format!("alpha = {alpha} must be positive")));
    }
    let c = coeffset_for(bm, split, alpha_to_omega(bm, alpha))?;
    let m = build_interface_matrices(&c)?;
    Ok(row_normalized_det(matrix_8x8(bm, &m, alpha)))
}

/// First `n_modes` frequencies of the beam under the given stiffness split.
pub fn find_frequencies_with(
    bm: &BeamModel,
    split: &StiffnessSplit,
    n_modes: usize,
    opts: &ScanOptions,
) -> Result<Vec<f64>, BeamError> {
    opts.validate()?;
    if n_modes == 0 {
        return Err(BeamError::InvalidInput("at least one mode must be requested".into()));
    }
    let m = beam_interface_matrices(bm, split)?;
    let roots: Vec<f64> =
        scan_roots(|a| row_normalized_det(matrix_8x8(bm, &m, a)), opts).into_iter().map(|r| r.alpha).collect();
    if roots.len() < n_modes {
        return Err(BeamError::Shortfall { found: roots, requested: n_modes, alpha_max: opts.alpha_max });
    }
    Ok(roots[..n_modes].to_vec())
}
