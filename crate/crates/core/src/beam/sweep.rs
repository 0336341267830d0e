use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::roots::{find_roots, RootKind};
use super::{BeamError, BeamModel, ScanOptions};

/// A jump larger than this multiple of the expected change flags the row.
const CONTINUITY_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// `lambda0 = lambda1 = value`.
    Lambda,
    K,
    Xi0,
}

impl SweepParam {
    pub fn apply(&self, base: &BeamModel, value: f64) -> BeamModel {
        match self {
            SweepParam::Lambda => base.with_crack(value, value),
            SweepParam::K => base.with_k(value),
            SweepParam::Xi0 => base.with_xi0(value),
        }
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lambda" => Ok(SweepParam::Lambda),
            "k" => Ok(SweepParam::K),
            "xi0" => Ok(SweepParam::Xi0),
            other => Err(format!("unknown sweep parameter `{other}` (expected lambda, k or xi0)")),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::Lambda => "lambda",
            SweepParam::K => "k",
            SweepParam::Xi0 => "xi0",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub base: BeamModel,
    pub n_modes: usize,
    pub scan: ScanOptions,
}

impl SweepSpec {
    /// `count` evenly spaced values from `start` to `stop` inclusive.
    pub fn linspace(param: SweepParam, start: f64, stop: f64, count: usize, base: BeamModel, n_modes: usize, scan: ScanOptions) -> Self {
        let values = match count {
            0 => Vec::new(),
            1 => vec![start],
            n => (0..n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect(),
        };
        SweepSpec { param, values, base, n_modes, scan }
    }

    pub fn validate(&self) -> Result<(), BeamError> {
        if self.values.is_empty() {
            return Err(BeamError::InvalidInput("sweep grid is empty".into()));
        }
        if self.n_modes == 0 {
            return Err(BeamError::InvalidInput("at least one mode must be requested".into()));
        }
        self.scan.validate()?;
        for &v in &self.values {
            if !v.is_finite() {
                return Err(BeamError::InvalidInput(format!("sweep value {v} is not finite")));
            }
            self.param.apply(&self.base, v).validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// `None` where the scan found fewer roots than requested.
    pub alphas: Vec<Option<f64>>,
    pub flagged: bool,
    pub notes: Vec<String>,
}

fn compute_row(spec: &SweepSpec, value: f64) -> SweepRow {
    let bm = spec.param.apply(&spec.base, value);
    let mut row = SweepRow { value, alphas: vec![None; spec.n_modes], flagged: false, notes: Vec::new() };
    match find_roots(&bm, spec.n_modes, &spec.scan) {
        Ok(roots) => {
            for (slot, r) in row.alphas.iter_mut().zip(&roots) {
                *slot = Some(r.alpha);
            }
            if roots.iter().any(|r| r.kind == RootKind::Touch) {
                row.flagged = true;
                row.notes.push("contains a root found at a minimum of |det| (possible double root)".into());
            }
        }
        Err(BeamError::Shortfall { found, .. }) => {
            for (slot, a) in row.alphas.iter_mut().zip(&found) {
                *slot = Some(*a);
            }
            row.flagged = true;
            row.notes.push(format!("found only {} of {} roots", found.len(), spec.n_modes));
        }
        Err(e) => {
            row.flagged = true;
            row.notes.push(e.to_string());
        }
    }
    row
}

/// Flags rows where some `alpha_i` jumps by more than ten times the change
/// expected from the previous step, scaled to the parameter spacing.
fn check_continuity(rows: &mut [SweepRow], grid_step: f64) {
    let n_modes = rows.first().map_or(0, |r| r.alphas.len());
    for mode in 0..n_modes {
        let mut prev_rate: Option<f64> = None;
        for r in 1..rows.len() {
            let (p0, p1) = (rows[r - 1].value, rows[r].value);
            let (Some(a0), Some(a1)) = (rows[r - 1].alphas[mode], rows[r].alphas[mode]) else {
                prev_rate = None;
                continue;
            };
            let dp = (p1 - p0).abs();
            let jump = (a1 - a0).abs();
            if let Some(rate) = prev_rate {
                let bound = CONTINUITY_FACTOR * (rate * dp).max(grid_step);
                if jump > bound {
                    rows[r].flagged = true;
                    rows[r].notes.push(format!("alpha{} jumps by {jump:.3e} (bound {bound:.3e})", mode + 1));
                }
            }
            prev_rate = (dp > 0.0).then(|| jump / dp);
        }
    }
}

/// Frequencies over a parameter grid. Rows are computed in parallel and
/// returned in ascending parameter order.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, BeamError> {
    spec.validate()?;
    let mut values = spec.values.clone();
    values.sort_by(f64::total_cmp);
    let mut rows: Vec<SweepRow> = values.par_iter().map(|&v| compute_row(spec, v)).collect();
    check_continuity(&mut rows, spec.scan.grid_step);
    Ok(rows)
}
