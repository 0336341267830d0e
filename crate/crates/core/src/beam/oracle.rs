//! Transfer-matrix frequencies for the crack-free stepped beam, used to
//! cross-check the characteristic determinant.

use super::{BeamError, BeamModel, BoundaryCondition};

const ORACLE_STEP: f64 = 0.005;
const ORACLE_ALPHA_MAX: f64 = 40.0;
const ORACLE_TOL: f64 = 1e-13;

type M4 = [[f64; 4]; 4];

/// Propagates `(phi, phi', a phi'', a phi''')` along a uniform section of
/// stiffness `a` and length `len`.
fn section(alpha: f64, a: f64, len: f64) -> M4 {
    let r = alpha * a.powf(-0.25);
    let t = r * len;
    let (s, c, sh, ch) = (t.sin(), t.cos(), t.sinh(), t.cosh());
    let k1 = 0.5 * (ch + c);
    let k2 = 0.5 * (sh + s) / r;
    let k3 = 0.5 * (ch - c) / (r * r);
    let k4 = 0.5 * (sh - s) / r.powi(3);
    let r4 = r.powi(4);
    let plain = [
        [k1, k2, k3, k4],
        [r4 * k4, k1, k2, k3],
        [r4 * k3, r4 * k4, k1, k2],
        [r4 * k2, r4 * k3, r4 * k4, k1],
    ];
    let d = [1.0, 1.0, a, a];
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = d[i] * plain[i][j] / d[j];
        }
    }
    out
}

fn mul(a: &M4, b: &M4) -> M4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|l| a[i][l] * b[l][j]).sum();
        }
    }
    out
}

/// Frequency function of the stepped beam, with both rows scaled to unit norm.
pub fn oracle_char_fn(bm: &BeamModel, alpha: f64) -> f64 {
    let t = mul(&section(alpha, bm.k, 1.0 - bm.xi0), &section(alpha, 1.0, bm.xi0));
    // free state components at x = 0 and conditions at x = 1
    let (cols, rows) = match bm.bc {
        BoundaryCondition::PinnedPinned => ([1, 3], [0, 2]),
        BoundaryCondition::ClampedClamped => ([2, 3], [0, 1]),
    };
    let row = |r: usize| {
        let (x, y) = (t[r][cols[0]], t[r][cols[1]]);
        let n = x.hypot(y);
        (x / n, y / n)
    };
    let (a, b) = row(rows[0]);
    let (c, d) = row(rows[1]);
    a * d - b * c
}

/// First `n_modes` frequency parameters of the crack-free beam.
pub fn oracle_stepped_beam(bm: &BeamModel, n_modes: usize) -> Result<Vec<f64>, BeamError> {
    bm.validate()?;
    if bm.lambda0 != 0.0 || bm.lambda1 != 0.0 {
        return Err(BeamError::InvalidInput("the transfer-matrix oracle needs zero crack intensities".into()));
    }
    let f = |a: f64| oracle_char_fn(bm, a);
    let mut out = Vec::with_capacity(n_modes);
    let mut lo = ORACLE_STEP;
    let mut f_lo = f(lo);
    while out.len() < n_modes && lo < ORACLE_ALPHA_MAX {
        let hi = lo + ORACLE_STEP;
        let f_hi = f(hi);
        if f_lo == 0.0 {
            out.push(lo);
        } else if f_lo * f_hi < 0.0 {
            let (mut a, mut b, mut fa) = (lo, hi, f_lo);
            while b - a > ORACLE_TOL {
                let m = 0.5 * (a + b);
                let fm = f(m);
                if fa * fm <= 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            out.push(0.5 * (a + b));
        }
        lo = hi;
        f_lo = f_hi;
    }
    if out.len() < n_modes {
        return Err(BeamError::Shortfall { found: out, requested: n_modes, alpha_max: ORACLE_ALPHA_MAX });
    }
    Ok(out)
}
