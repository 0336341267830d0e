//! Seeded identity and property checks for the distribution algebra.
//!
//! Used by the `algebra-check` command and the acceptance suite. The random
//! family draws breakpoints from a small lattice so that singular supports
//! overlap often, which is where the product stops being commutative.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dist::DistributionA;
use crate::smooth::SmoothExpr;

pub const DEFAULT_SEED: u64 = 0x5eed_0f_a1;
pub const DEFAULT_TRIPLES: usize = 200;

/// Coefficient tolerance for the Leibniz, associativity and distributivity checks.
pub const PROPERTY_TOLERANCE: f64 = 1e-9;

/// Tolerance for the exact delta/Heaviside identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

const LATTICE: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Largest relative coefficient error seen.
    pub max_error: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

/// Random element with at most 3 breakpoints, polynomial pieces of degree at
/// most 4 and delta orders at most 2.
pub fn random_element<R: Rng>(rng: &mut R) -> DistributionA {
    let n_points = rng.random_range(0..=3);
    let mut points: Vec<f64> = Vec::with_capacity(n_points);
    while points.len() < n_points {
        let x = LATTICE[rng.random_range(0..LATTICE.len())];
        if !points.contains(&x) {
            points.push(x);
        }
    }
    points.sort_by(f64::total_cmp);
    let pieces = (0..=n_points)
        .map(|_| {
            let degree = rng.random_range(0..=4);
            let coeffs: Vec<f64> = (0..=degree).map(|_| rng.random_range(-1.0..1.0)).collect();
            SmoothExpr::poly(&coeffs)
        })
        .collect();
    let mut deltas = Vec::new();
    for &x in &points {
        for order in 0..=2 {
            if rng.random_bool(0.4) {
                deltas.push(crate::dist::DeltaTerm::new(x, order, rng.random_range(-1.0..1.0)));
            }
        }
    }
    DistributionA::new(points, pieces, deltas).expect("lattice points are sorted and distinct")
}

pub fn random_triples(seed: u64, n: usize) -> Vec<[DistributionA; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| [random_element(&mut rng), random_element(&mut rng), random_element(&mut rng)])
        .collect()
}

fn relative_error(a: &DistributionA, b: &DistributionA) -> f64 {
    let scale = 1f64.max(a.magnitude()).max(b.magnitude());
    a.coefficient_distance(b) / scale
}

fn tally(
    name: &'static str,
    tolerance: f64,
    errors: impl Iterator<Item = f64>,
) -> CheckResult {
    let mut res = CheckResult { name, cases: 0, failures: 0, max_error: 0.0, tolerance };
    for e in errors {
        res.cases += 1;
        res.max_error = res.max_error.max(e);
        if !(e <= tolerance) {
            res.failures += 1;
        }
    }
    res
}

/// `H(x0-x)*delta^(i) = delta^(i)*H(x-x0) = delta^(i)`,
/// `H(x-x0)*delta^(i) = delta^(i)*H(x0-x) = 0`, `delta^(i)*delta^(j) = 0`.
pub fn product_identities() -> CheckResult {
    let mut errors = Vec::new();
    for &x0 in &[-0.75, 0.0, 0.5, 2.0] {
        let left = DistributionA::heaviside_left(x0);
        let right = DistributionA::heaviside(x0);
        for i in 0..=4 {
            let d = DistributionA::delta(x0, i, 1.0);
            errors.push(left.star(&d).coefficient_distance(&d));
            errors.push(d.star(&right).coefficient_distance(&d));
            errors.push(right.star(&d).magnitude());
            errors.push(d.star(&left).magnitude());
            for j in 0..=4 {
                for &x1 in &[x0, x0 + 0.25] {
                    errors.push(d.star(&DistributionA::delta(x1, j, 1.0)).magnitude());
                }
            }
        }
    }
    tally("product identities", IDENTITY_TOLERANCE, errors.into_iter())
}

/// `(F*G)' = F'*G + F*G'`.
pub fn leibniz(triples: &[[DistributionA; 3]]) -> CheckResult {
    tally(
        "Leibniz rule",
        PROPERTY_TOLERANCE,
        triples.iter().map(|[f, g, _]| {
            let lhs = f.star(g).derivative(1).expect("orders stay small");
            let df = f.derivative(1).expect("orders stay small");
            let dg = g.derivative(1).expect("orders stay small");
            let rhs = df.star(g).add(&f.star(&dg));
            relative_error(&lhs, &rhs)
        }),
    )
}

/// `(F*G)*H = F*(G*H)`.
pub fn associativity(triples: &[[DistributionA; 3]]) -> CheckResult {
    tally(
        "associativity",
        PROPERTY_TOLERANCE,
        triples.iter().map(|[f, g, h]| relative_error(&f.star(g).star(h), &f.star(&g.star(h)))),
    )
}

/// `F*(G+H) = F*G + F*H`.
pub fn distributivity(triples: &[[DistributionA; 3]]) -> CheckResult {
    tally(
        "distributivity",
        PROPERTY_TOLERANCE,
        triples
            .iter()
            .map(|[f, g, h]| relative_error(&f.star(&g.add(h)), &f.star(g).add(&f.star(h)))),
    )
}

/// On disjoint singular supports the product commutes.
pub fn disjoint_support_commutes(triples: &[[DistributionA; 3]]) -> CheckResult {
    tally(
        "commutes on disjoint singular supports",
        PROPERTY_TOLERANCE,
        triples.iter().filter_map(|[f, g, _]| {
            let disjoint = f.sing_supp().iter().all(|x| !g.sing_supp().contains(x));
            disjoint.then(|| relative_error(&f.star(g), &g.star(f)))
        }),
    )
}

pub fn run_suite(seed: u64, n: usize) -> SuiteReport {
    let triples = random_triples(seed, n);
    SuiteReport {
        checks: vec![
            product_identities(),
            leibniz(&triples),
            associativity(&triples),
            distributivity(&triples),
            disjoint_support_commutes(&triples),
        ],
    }
}
