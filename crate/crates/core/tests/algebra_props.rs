use cracked_beam::algebra_check::random_element;
use cracked_beam::dist::{expand_smooth_times_delta, DeltaTerm};
use cracked_beam::{DistributionA, SmoothExpr};
use proptest::prelude::*;
use proptest::test_runner::FileFailurePersistence;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const L: f64 = -2.0;
const R: f64 = 2.0;

/// Polynomial coefficients, lowest degree first.
type Poly = Vec<f64>;

fn poly_mul(a: &[f64], b: &[f64]) -> Poly {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_der(a: &[f64]) -> Poly {
    if a.len() <= 1 {
        return vec![0.0];
    }
    a.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect()
}

fn poly_der_n(a: &[f64], n: u32) -> Poly {
    (0..n).fold(a.to_vec(), |p, _| poly_der(&p))
}

fn poly_eval(a: &[f64], x: f64) -> f64 {
    a.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// `(x - L)^5 (R - x)^5`: vanishes with four derivatives at both ends.
fn bump() -> Poly {
    let left = (0..5).fold(vec![1.0], |p, _| poly_mul(&p, &[-L, 1.0]));
    (0..5).fold(left, |p, _| poly_mul(&p, &[R, -1.0]))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    gauss_legendre(12).iter().map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// `<F, psi>` for a polynomial test function supported on `[L, R]`.
fn pairing(f: &DistributionA, psi: &[f64]) -> f64 {
    let mut edges = vec![L];
    edges.extend(f.breakpoints().iter().copied().filter(|x| *x > L && *x < R));
    edges.push(R);
    let mut total = 0.0;
    for w in edges.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let piece = f.piece_near(mid, true).clone();
        total += integrate(|x| piece.eval(x) * poly_eval(psi, x), w[0], w[1]);
    }
    for d in f.deltas() {
        let sign = if d.order % 2 == 0 { 1.0 } else { -1.0 };
        total += d.coeff * sign * poly_eval(&poly_der_n(psi, d.order), d.location);
    }
    total
}

fn element(seed: u64) -> DistributionA {
    random_element(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn rel(a: &DistributionA, b: &DistributionA) -> f64 {
    a.coefficient_distance(b) / 1f64.max(a.magnitude()).max(b.magnitude())
}

#[test]
fn pairing_oracle_on_known_cases() {
    let psi = bump();
    // <delta', psi> = -psi'(0)
    let d = DistributionA::delta(0.0, 1, 1.0);
    assert!((pairing(&d, &psi) + poly_eval(&poly_der(&psi), 0.0)).abs() < 1e-12);
    // <H', psi> = psi(0)
    let h = DistributionA::heaviside(0.0).derivative(1).unwrap();
    assert!((pairing(&h, &psi) - poly_eval(&psi, 0.0)).abs() < 1e-9);
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: Some(Box::new(FileFailurePersistence::Off)), ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn derivative_is_the_transpose_of_differentiation(seed in any::<u64>()) {
        let f = element(seed);
        let psi = bump();
        let lhs = pairing(&f.derivative(1).unwrap(), &psi);
        let rhs = -pairing(&f, &poly_der(&psi));
        prop_assert!((lhs - rhs).abs() < 1e-8 * (1.0 + lhs.abs()), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn smooth_times_delta_pairs_like_a_product(
        g in prop::collection::vec(-1.0f64..1.0, 1..5),
        order in 0u32..4,
        x0 in -1.0f64..1.0,
    ) {
        let psi = bump();
        let expanded = expand_smooth_times_delta(&SmoothExpr::poly(&g), &DeltaTerm::new(x0, order, 1.0));
        let lhs: f64 = expanded
            .iter()
            .map(|d| {
                let sign = if d.order % 2 == 0 { 1.0 } else { -1.0 };
                d.coeff * sign * poly_eval(&poly_der_n(&psi, d.order), d.location)
            })
            .sum();
        let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = sign * poly_eval(&poly_der_n(&poly_mul(&g, &psi), order), x0);
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + rhs.abs()), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn leibniz(a in any::<u64>(), b in any::<u64>()) {
        let (f, g) = (element(a), element(b));
        let lhs = f.star(&g).derivative(1).unwrap();
        let rhs = f.derivative(1).unwrap().star(&g).add(&f.star(&g.derivative(1).unwrap()));
        prop_assert!(rel(&lhs, &rhs) < 1e-9);
    }

    #[test]
    fn associativity(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (f, g, h) = (element(a), element(b), element(c));
        prop_assert!(rel(&f.star(&g).star(&h), &f.star(&g.star(&h))) < 1e-9);
    }

    #[test]
    fn distributivity(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (f, g, h) = (element(a), element(b), element(c));
        prop_assert!(rel(&f.star(&g.add(&h)), &f.star(&g).add(&f.star(&h))) < 1e-9);
        prop_assert!(rel(&g.add(&h).star(&f), &g.star(&f).add(&h.star(&f))) < 1e-9);
    }

    #[test]
    fn pieces_multiply_pointwise(a in any::<u64>(), b in any::<u64>(), x in -1.9f64..1.9) {
        let (f, g) = (element(a), element(b));
        prop_assume!(!f.breakpoints().contains(&x) && !g.breakpoints().contains(&x));
        let p = f.star(&g);
        let expected = f.piece_near(x, true).eval(x) * g.piece_near(x, true).eval(x);
        prop_assert!((p.piece_near(x, true).eval(x) - expected).abs() < 1e-12 * (1.0 + expected.abs()));
    }

    #[test]
    fn unit_and_zero(a in any::<u64>()) {
        let f = element(a);
        let one = DistributionA::smooth(SmoothExpr::one());
        prop_assert!(rel(&one.star(&f), &f) < 1e-15);
        prop_assert!(rel(&f.star(&one), &f) < 1e-15);
        prop_assert!(f.star(&DistributionA::zero()).magnitude() == 0.0);
    }
}

#[test]
fn product_is_not_commutative_at_shared_points() {
    let h = DistributionA::heaviside(0.0);
    let d = DistributionA::delta(0.0, 0, 1.0);
    let hd = h.star(&h.add(&d));
    let dh = h.add(&d).star(&h);
    assert!(hd.approx_eq(&h, 1e-15));
    assert!(dh.approx_eq(&h.add(&d), 1e-15));
}
