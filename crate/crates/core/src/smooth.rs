//! Closed-form smooth functions on the real line.
//!
//! A [`SmoothExpr`] is stored in a flat sum-of-products normal form. Every term
//! is `c * x^p * f_1(a_1 x + b_1) * ... * f_r(a_r x + b_r)` where each `f_i` is
//! one of sin, cos, sinh, cosh or exp. The form is closed under sums, products,
//! real scaling and differentiation, so derivatives of any order are exact and
//! never go through finite differences.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Points used to decide value-equality of two expressions whose normal forms
/// differ (trigonometric identities are not canonicalized).
pub const PROBE_GRID: [f64; 17] = [
    -1.9877, -1.7377, -1.4877, -1.2377, -0.9877, -0.7377, -0.4877, -0.2377, 0.0123, 0.2623,
    0.5123, 0.7623, 1.0123, 1.2623, 1.5123, 1.7623, 2.0123,
];

/// Relative tolerance for value-equality on [`PROBE_GRID`].
pub const PROBE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomKind {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
}

/// `kind(rate * x + phase)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub kind: AtomKind,
    pub rate: f64,
    pub phase: f64,
}

impl Atom {
    fn new(kind: AtomKind, rate: f64, phase: f64) -> Self {
        // adding 0.0 folds -0.0 into 0.0 so that ordering and equality agree
        Atom { kind, rate: rate + 0.0, phase: phase + 0.0 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = self.rate * x + self.phase;
        match self.kind {
            AtomKind::Sin => t.sin(),
            AtomKind::Cos => t.cos(),
            AtomKind::Sinh => t.sinh(),
            AtomKind::Cosh => t.cosh(),
            AtomKind::Exp => t.exp(),
        }
    }

    fn key_cmp(&self, other: &Atom) -> Ordering {
        self.kind
            .cmp(&other.kind)
            .then(self.rate.total_cmp(&other.rate))
            .then(self.phase.total_cmp(&other.phase))
    }

    /// d/dx of the atom as `factor * atom'`.
    fn derivative(&self) -> (f64, Atom) {
        let r = self.rate;
        match self.kind {
            AtomKind::Sin => (r, Atom::new(AtomKind::Cos, r, self.phase)),
            AtomKind::Cos => (-r, Atom::new(AtomKind::Sin, r, self.phase)),
            AtomKind::Sinh => (r, Atom::new(AtomKind::Cosh, r, self.phase)),
            AtomKind::Cosh => (r, Atom::new(AtomKind::Sinh, r, self.phase)),
            AtomKind::Exp => (r, *self),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Term {
    coeff: f64,
    power: u32,
    atoms: Vec<Atom>,
}

impl Term {
    fn constant(c: f64) -> Self {
        Term { coeff: c, power: 0, atoms: Vec::new() }
    }

    /// Folds constant atoms into the coefficient, merges exponentials and
    /// sorts the remaining atoms.
    fn canonical(mut self) -> Self {
        let mut exp_rate = 0.0;
        let mut exp_phase = 0.0;
        let mut has_exp = false;
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for atom in self.atoms.drain(..) {
            if atom.rate == 0.0 {
                self.coeff *= atom.eval(0.0);
            } else if atom.kind == AtomKind::Exp {
                has_exp = true;
                exp_rate += atom.rate;
                exp_phase += atom.phase;
            } else {
                atoms.push(atom);
            }
        }
        if has_exp {
            if exp_rate == 0.0 {
                self.coeff *= exp_phase.exp();
            } else {
                atoms.push(Atom::new(AtomKind::Exp, exp_rate, exp_phase));
            }
        }
        atoms.sort_by(Atom::key_cmp);
        self.atoms = atoms;
        self
    }

    fn shape_cmp(&self, other: &Term) -> Ordering {
        self.power.cmp(&other.power).then_with(|| {
            for (a, b) in self.atoms.iter().zip(&other.atoms) {
                let c = a.key_cmp(b);
                if c != Ordering::Equal {
                    return c;
                }
            }
            self.atoms.len().cmp(&other.atoms.len())
        })
    }

    fn mul(&self, other: &Term) -> Term {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        Term { coeff: self.coeff * other.coeff, power: self.power + other.power, atoms }.canonical()
    }

    fn eval(&self, x: f64) -> f64 {
        let mut v = self.coeff * x.powi(self.power as i32);
        for a in &self.atoms {
            v *= a.eval(x);
        }
        v
    }

    fn derivative(&self) -> Vec<Term> {
        let mut out = Vec::with_capacity(self.atoms.len() + 1);
        if self.power > 0 {
            out.push(Term {
                coeff: self.coeff * self.power as f64,
                power: self.power - 1,
                atoms: self.atoms.clone(),
            });
        }
        for i in 0..self.atoms.len() {
            let (factor, datom) = self.atoms[i].derivative();
            let mut atoms = self.atoms.clone();
            atoms[i] = datom;
            out.push(Term { coeff: self.coeff * factor, power: self.power, atoms }.canonical());
        }
        out
    }
}

/// A smooth function in sum-of-products normal form.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SmoothExpr {
    terms: Vec<Term>,
}

impl SmoothExpr {
    fn from_terms(terms: Vec<Term>) -> Self {
        let mut terms: Vec<Term> = terms.into_iter().map(Term::canonical).collect();
        terms.sort_by(Term::shape_cmp);
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.shape_cmp(&t) == Ordering::Equal => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != 0.0);
        SmoothExpr { terms: merged }
    }

    pub fn zero() -> Self {
        SmoothExpr::default()
    }

    pub fn constant(c: f64) -> Self {
        SmoothExpr::from_terms(vec![Term::constant(c)])
    }

    pub fn one() -> Self {
        SmoothExpr::constant(1.0)
    }

    /// The identity function `x`.
    pub fn x() -> Self {
        SmoothExpr::monomial(1.0, 1)
    }

    /// `c * x^power`.
    pub fn monomial(c: f64, power: u32) -> Self {
        SmoothExpr::from_terms(vec![Term { coeff: c, power, atoms: Vec::new() }])
    }

    /// Polynomial with coefficients in ascending order of degree.
    pub fn poly(coeffs: &[f64]) -> Self {
        SmoothExpr::from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(p, &c)| Term { coeff: c, power: p as u32, atoms: Vec::new() })
                .collect(),
        )
    }

    pub fn atom(kind: AtomKind, rate: f64, phase: f64) -> Self {
        SmoothExpr::from_terms(vec![Term {
            coeff: 1.0,
            power: 0,
            atoms: vec![Atom::new(kind, rate, phase)],
        }])
    }

    pub fn sin(rate: f64, phase: f64) -> Self {
        SmoothExpr::atom(AtomKind::Sin, rate, phase)
    }

    pub fn cos(rate: f64, phase: f64) -> Self {
        SmoothExpr::atom(AtomKind::Cos, rate, phase)
    }

    pub fn sinh(rate: f64, phase: f64) -> Self {
        SmoothExpr::atom(AtomKind::Sinh, rate, phase)
    }

    pub fn cosh(rate: f64, phase: f64) -> Self {
        SmoothExpr::atom(AtomKind::Cosh, rate, phase)
    }

    pub fn exp(rate: f64, phase: f64) -> Self {
        SmoothExpr::atom(AtomKind::Exp, rate, phase)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of terms in the normal form.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` when the expression is the constant `c`.
    pub fn as_constant(&self) -> Option<f64> {
        match self.terms.as_slice() {
            [] => Some(0.0),
            [t] if t.power == 0 && t.atoms.is_empty() => Some(t.coeff),
            _ => None,
        }
    }

    /// Largest absolute term coefficient of the normal form.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, t| m.max(t.coeff.abs()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn derivative(&self) -> SmoothExpr {
        SmoothExpr::from_terms(self.terms.iter().flat_map(Term::derivative).collect())
    }

    pub fn nth_derivative(&self, n: usize) -> SmoothExpr {
        let mut d = self.clone();
        for _ in 0..n {
            if d.is_zero() {
                break;
            }
            d = d.derivative();
        }
        d
    }

    /// Values `f(x), f'(x), ..., f^(n)(x)`.
    pub fn eval_derivatives(&self, x: f64, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        let mut d = self.clone();
        for i in 0..=n {
            out.push(d.eval(x));
            if i < n {
                d = d.derivative();
            }
        }
        out
    }

    pub fn scale(&self, c: f64) -> SmoothExpr {
        if c == 0.0 {
            return SmoothExpr::zero();
        }
        SmoothExpr::from_terms(
            self.terms.iter().map(|t| Term { coeff: t.coeff * c, ..t.clone() }).collect(),
        )
    }

    /// Structural equality of the normal forms, falling back to value
    /// comparison on [`PROBE_GRID`].
    pub fn approx_eq(&self, other: &SmoothExpr) -> bool {
        if self == other {
            return true;
        }
        PROBE_GRID.iter().all(|&x| {
            let (a, b) = (self.eval(x), other.eval(x));
            (a - b).abs() <= PROBE_TOLERANCE * 1f64.max(a.abs()).max(b.abs())
        })
    }
}

impl Add<&SmoothExpr> for &SmoothExpr {
    type Output = SmoothExpr;
    fn add(self, rhs: &SmoothExpr) -> SmoothExpr {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&rhs.terms);
        SmoothExpr::from_terms(terms)
    }
}

impl Add for SmoothExpr {
    type Output = SmoothExpr;
    fn add(mut self, rhs: SmoothExpr) -> SmoothExpr {
        self.terms.extend(rhs.terms);
        SmoothExpr::from_terms(self.terms)
    }
}

impl Neg for &SmoothExpr {
    type Output = SmoothExpr;
    fn neg(self) -> SmoothExpr {
        self.scale(-1.0)
    }
}

impl Neg for SmoothExpr {
    type Output = SmoothExpr;
    fn neg(self) -> SmoothExpr {
        self.scale(-1.0)
    }
}

impl Sub<&SmoothExpr> for &SmoothExpr {
    type Output = SmoothExpr;
    fn sub(self, rhs: &SmoothExpr) -> SmoothExpr {
        self + &(-rhs)
    }
}

impl Sub for SmoothExpr {
    type Output = SmoothExpr;
    fn sub(self, rhs: SmoothExpr) -> SmoothExpr {
        self + (-rhs)
    }
}

impl Mul<&SmoothExpr> for &SmoothExpr {
    type Output = SmoothExpr;
    fn mul(self, rhs: &SmoothExpr) -> SmoothExpr {
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                terms.push(a.mul(b));
            }
        }
        SmoothExpr::from_terms(terms)
    }
}

impl Mul for SmoothExpr {
    type Output = SmoothExpr;
    fn mul(self, rhs: SmoothExpr) -> SmoothExpr {
        &self * &rhs
    }
}

impl Mul<f64> for &SmoothExpr {
    type Output = SmoothExpr;
    fn mul(self, c: f64) -> SmoothExpr {
        self.scale(c)
    }
}

impl Mul<f64> for SmoothExpr {
    type Output = SmoothExpr;
    fn mul(self, c: f64) -> SmoothExpr {
        self.scale(c)
    }
}

impl From<f64> for SmoothExpr {
    fn from(c: f64) -> Self {
        SmoothExpr::constant(c)
    }
}

impl fmt::Display for AtomKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AtomKind::Sin => "sin",
            AtomKind::Cos => "cos",
            AtomKind::Sinh => "sinh",
            AtomKind::Cosh => "cosh",
            AtomKind::Exp => "exp",
        })
    }
}

impl fmt::Display for SmoothExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(if t.coeff < 0.0 { " - " } else { " + " })?;
                write!(f, "{}", t.coeff.abs())?;
            } else {
                write!(f, "{}", t.coeff)?;
            }
            match t.power {
                0 => {}
                1 => f.write_str("*x")?,
                p => write!(f, "*x^{p}")?,
            }
            for a in &t.atoms {
                write!(f, "*{}({}*x{:+})", a.kind, a.rate, a.phase)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central_difference(f: &SmoothExpr, x: f64, n: usize, h: f64) -> f64 {
        // n-th central difference built from binomial weights
        let mut acc = 0.0;
        for k in 0..=n {
            let w = binom(n, k) * if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += w * f.eval(x + (n as f64 / 2.0 - k as f64) * h);
        }
        acc / h.powi(n as i32)
    }

    fn binom(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn like_terms_merge_and_cancel() {
        let p = SmoothExpr::poly(&[1.0, 2.0]);
        let q = SmoothExpr::poly(&[-1.0, -2.0]);
        assert!((&p + &q).is_zero());
        let s = SmoothExpr::sin(2.0, 0.5);
        assert_eq!((&s + &s), s.scale(2.0));
    }

    #[test]
    fn exponentials_combine() {
        let e = &SmoothExpr::exp(1.5, 0.2) * &SmoothExpr::exp(-1.5, 0.3);
        assert_eq!(e.as_constant(), Some(0.5f64.exp()));
    }

    #[test]
    fn derivatives_of_atoms() {
        assert!(SmoothExpr::sin(1.0, 0.0).derivative().approx_eq(&SmoothExpr::cos(1.0, 0.0)));
        assert_eq!(SmoothExpr::cos(3.0, 0.0).derivative(), SmoothExpr::sin(3.0, 0.0).scale(-3.0));
        assert_eq!(SmoothExpr::sinh(2.0, 1.0).derivative(), SmoothExpr::cosh(2.0, 1.0).scale(2.0));
        assert_eq!(SmoothExpr::poly(&[0.0, 0.0, 1.0]).nth_derivative(2).as_constant(), Some(2.0));
        assert!(SmoothExpr::poly(&[1.0, 1.0]).nth_derivative(2).is_zero());
    }

    #[test]
    fn pythagorean_identity_is_value_equal() {
        let s = SmoothExpr::sin(1.3, 0.1);
        let c = SmoothExpr::cos(1.3, 0.1);
        let sum = &(&s * &s) + &(&c * &c);
        assert_ne!(sum, SmoothExpr::one());
        assert!(sum.approx_eq(&SmoothExpr::one()));
        assert!(!SmoothExpr::x().approx_eq(&SmoothExpr::zero()));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let f = &(&SmoothExpr::poly(&[0.3, -1.0, 0.5, 0.0, 0.1]) * &SmoothExpr::sin(1.7, 0.2))
            + &(&SmoothExpr::cosh(0.8, -0.1) * &SmoothExpr::exp(-0.4, 0.0));
        for &x in &[-1.2, -0.3, 0.4, 1.1] {
            for n in 1..=4 {
                let exact = f.nth_derivative(n).eval(x);
                // Richardson extrapolation cancels the h^2 error term
                let h = 0.02;
                let fd = (4.0 * central_difference(&f, x, n, h / 2.0)
                    - central_difference(&f, x, n, h))
                    / 3.0;
                assert!(
                    (exact - fd).abs() <= 1e-6 * exact.abs().max(1.0),
                    "n={n} x={x} exact={exact} fd={fd}"
                );
            }
        }
    }

    #[test]
    fn eval_derivatives_lists_values_in_order() {
        let f = SmoothExpr::poly(&[1.0, 2.0, 3.0]);
        assert_eq!(f.eval_derivatives(1.0, 3), vec![6.0, 8.0, 6.0, 0.0]);
    }
}
