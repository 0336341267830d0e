use super::system::conditioned_det_unchecked;
use super::{BeamError, BeamModel};

/// Grid minima of `|f|` below this value are refined as possible double roots.
pub const TOUCH_CANDIDATE: f64 = 1e-8;

/// A refined minimum is accepted as a root when `|f|` drops below this.
pub const TOUCH_ACCEPT: f64 = 1e-11;

const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub alpha_max: f64,
    pub grid_step: f64,
    /// Absolute bracket width at which refinement stops.
    pub tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { alpha_max: 25.0, grid_step: 0.01, tol: 1e-12 }
    }
}

impl ScanOptions {
    pub fn validate(&self) -> Result<(), BeamError> {
        let bad = |msg: String| Err(BeamError::InvalidInput(msg));
        if !(self.grid_step > 0.0 && self.grid_step.is_finite()) {
            return bad(format!("grid step {} must be positive", self.grid_step));
        }
        if !(self.alpha_max > self.grid_step && self.alpha_max.is_finite()) {
            return bad(format!("alpha_max {} must exceed the grid step", self.alpha_max));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("tolerance {} must be positive", self.tol));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    /// Bracketed by a sign change and bisected.
    SignChange,
    /// Found at a local minimum of `|f|` with no sign change; best effort.
    Touch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub alpha: f64,
    pub kind: RootKind,
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, mut f_lo: f64, tol: f64) -> f64 {
    for _ in 0..MAX_ITERATIONS {
        if hi - lo < tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_lo < 0.0) == (f_mid < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn golden_min<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1).abs(), f(x2).abs());
    for _ in 0..MAX_ITERATIONS {
        if hi - lo < tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1).abs();
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2).abs();
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x).abs())
}

/// Roots of `f` on `(0, alpha_max]`, in ascending order.
pub fn scan_roots<F: Fn(f64) -> f64>(f: F, opts: &ScanOptions) -> Vec<Root> {
    let n = (opts.alpha_max / opts.grid_step + 1e-9).floor() as usize;
    let grid: Vec<f64> = (1..=n).map(|i| i as f64 * opts.grid_step).collect();
    let values: Vec<f64> = grid.iter().map(|&a| f(a)).collect();
    let mut roots = Vec::new();

    for i in 0..grid.len() {
        let (a, d) = (grid[i], values[i]);
        if d == 0.0 {
            roots.push(Root { alpha: a, kind: RootKind::SignChange });
            continue;
        }
        if let Some(&d_next) = values.get(i + 1) {
            if d_next != 0.0 && (d < 0.0) != (d_next < 0.0) {
                let alpha = bisect(&f, a, grid[i + 1], d, opts.tol);
                roots.push(Root { alpha, kind: RootKind::SignChange });
            }
        }
        if i == 0 || i + 1 == grid.len() {
            continue;
        }
        let (prev, next) = (values[i - 1], values[i + 1]);
        let same_sign = (prev < 0.0) == (d < 0.0) && (d < 0.0) == (next < 0.0);
        if same_sign && d.abs() < TOUCH_CANDIDATE && d.abs() < prev.abs() && d.abs() <= next.abs() {
            let (alpha, value) = golden_min(&f, grid[i - 1], grid[i + 1], opts.tol);
            if value < TOUCH_ACCEPT {
                roots.push(Root { alpha, kind: RootKind::Touch });
            }
        }
    }
    roots.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    roots
}

/// First `n_modes` roots of the characteristic determinant, with their kind.
/// The scan runs on the conditioned form of the determinant.
pub fn find_roots(bm: &BeamModel, n_modes: usize, opts: &ScanOptions) -> Result<Vec<Root>, BeamError> {
    bm.validate()?;
    opts.validate()?;
    if n_modes == 0 {
        return Err(BeamError::InvalidInput("at least one mode must be requested".into()));
    }
    let mut roots = scan_roots(|a| conditioned_det_unchecked(bm, a), opts);
    if roots.len() < n_modes {
        return Err(BeamError::Shortfall {
            found: roots.iter().map(|r| r.alpha).collect(),
            requested: n_modes,
            alpha_max: opts.alpha_max,
        });
    }
    roots.truncate(n_modes);
    Ok(roots)
}

/// First `n_modes` frequency parameters, ascending.
pub fn find_frequencies(bm: &BeamModel, n_modes: usize, opts: &ScanOptions) -> Result<Vec<f64>, BeamError> {
    Ok(find_roots(bm, n_modes, opts)?.into_iter().map(|r| r.alpha).collect())
}
