mod common;

use common::*;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;
use sonc::{
    circuit_number, classify_circuit, is_nonnegative_circuit, CircuitClass, CircuitPolynomial,
    Verdict,
};

fn as_circuit(f: &sonc::SparsePolynomial) -> CircuitPolynomial {
    match classify_circuit(f).unwrap() {
        CircuitClass::Circuit(c) => c,
        other => panic!("{other:?}"),
    }
}

#[test]
fn boundary_fixtures_have_exact_rational_theta() {
    for (f, theta) in boundary_fixtures() {
        let c = as_circuit(&f);
        let t = circuit_number(&c, 64);
        assert_eq!(t.exact.as_ref(), Some(&theta), "{f}");
        assert_eq!(is_nonnegative_circuit(&c), Verdict::Boundary, "{f}");
        assert!(
            (t.value - theta_f64(c.trellis().vertices(), c.coeffs(), c.beta())).abs()
                < 1e-9 * t.value
        );
    }
}

#[test]
fn verdict_flips_around_theta() {
    let base = as_circuit(&poly("x^2 + 1 - 2*x", 1));
    let eps = q(1, 1_000_000);
    assert_eq!(base.with_d(q(2, 1) - &eps).verdict(), Verdict::Yes);
    assert_eq!(base.with_d(q(2, 1) + &eps).verdict(), Verdict::No);
    assert_eq!(base.with_d(q(-2, 1) - &eps).verdict(), Verdict::No);
    assert_eq!(as_circuit(&poly("x^2 + 1 - 3*x", 1)).verdict(), Verdict::No);
    assert_eq!(
        as_circuit(&poly("2 + 8*x^2 - 7*x", 1)).verdict(),
        Verdict::Yes
    );
}

#[test]
fn even_inner_point_with_negative_d_is_nonnegative() {
    let c = as_circuit(&poly("x^4 + 1 + 100*x^2", 1));
    assert!(c.d() < &sonc::Rational::zero());
    assert_eq!(c.verdict(), Verdict::Yes);
}

#[test]
fn classification_rejects_non_circuits() {
    for text in [
        "x^4 + y^4 + 1 - x*y - x^2*y^2",
        "x^3 + 1 - x",
        "x^2*y^2 + 1 - x*y^3",
    ] {
        assert!(
            matches!(
                classify_circuit(&poly(text, 2)).unwrap(),
                CircuitClass::NotCircuit(_)
            ),
            "{text}"
        );
    }
    assert!(matches!(
        classify_circuit(&poly("x^2 + y^4", 2)).unwrap(),
        CircuitClass::MonomialSquares
    ));
}

#[test]
fn theta_agrees_with_closed_form() {
    let mut r = rng(21);
    for _ in 0..100 {
        let n = r.gen_range(1..=3);
        let c = random_nonnegative_circuit(&mut r, n, 8);
        let t = circuit_number(&c, 48);
        let oracle = theta_f64(c.trellis().vertices(), c.coeffs(), c.beta());
        assert!((t.value - oracle).abs() <= 1e-9 * oracle);
        assert!(
            to_f64(&t.lower) <= oracle * (1.0 + 1e-12)
                && oracle <= to_f64(&t.upper) * (1.0 + 1e-12)
        );
    }
}

#[test]
fn verdicts_agree_with_grid_minimisation() {
    let mut r = rng(22);
    let mut negatives_seen = 0;
    for i in 0..80 {
        let n = r.gen_range(1..=2);
        let c = if i % 2 == 0 {
            random_nonnegative_circuit(&mut r, n, 8)
        } else {
            random_negative_circuit(&mut r, n, 8)
        };
        let f = c.to_polynomial();
        let min = grid_minimum(&f, if n == 1 { 2000 } else { 200 });
        let scale = c.coeffs().iter().map(to_f64).fold(0.0, f64::max);
        match c.verdict() {
            Verdict::Yes | Verdict::Boundary => assert!(min >= -1e-6 * scale, "{f}: min {min}"),
            Verdict::No => {
                // The negative region may leave the search box; only check what the grid sees.
                if min < 0.0 {
                    negatives_seen += 1;
                }
            }
        }
    }
    assert!(
        negatives_seen >= 20,
        "grid found only {negatives_seen} negative circuits"
    );
}

#[test]
fn motzkin_vanishes_at_ones() {
    let f = poly("x^4*y^2 + x^2*y^4 + 1 - 3*x^2*y^2", 2);
    for x in [[1.0, 1.0], [-1.0, 1.0], [1.0, -1.0], [-1.0, -1.0]] {
        assert_eq!(f.evaluate_f64(&x), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_scales_linearly(seed in 0u64..100_000, num in 1i64..30, den in 1i64..30) {
        let mut r = rng(seed);
        let c = random_nonnegative_circuit(&mut r, 2, 8);
        let t = q(num, den);
        let a = circuit_number(&c, 48);
        let b = circuit_number(&c.with_scaled_coeffs(&t), 48);
        // Θ(t c)^q = t^q Θ(c)^q exactly.
        let tq = (0..a.root_degree).fold(sonc::Rational::one(), |acc, _| acc * &t);
        prop_assert_eq!(b.power.clone(), a.power.clone() * tq);
        prop_assert!((b.value - a.value * to_f64(&t)).abs() <= 1e-9 * b.value);
    }

    #[test]
    fn theta_increases_with_each_coefficient(seed in 0u64..100_000, bump in 1i64..10) {
        let mut r = rng(seed);
        let c = random_nonnegative_circuit(&mut r, 2, 8);
        let i = r.gen_range(0..c.coeffs().len());
        let mut coeffs = c.coeffs().to_vec();
        coeffs[i] += q(bump, 7);
        let bigger = CircuitPolynomial::new(c.trellis().clone(), coeffs, c.beta().clone(), c.d().clone()).unwrap();
        let lo = circuit_number(&c, 48);
        let hi = circuit_number(&bigger, 48);
        prop_assert!(lo.power < hi.power);
        prop_assert!(lo.lower < hi.upper);
    }

    #[test]
    fn odd_power_substitution_preserves_verdict(seed in 0u64..100_000, k in prop_oneof![Just(3u32), Just(5u32)]) {
        let mut r = rng(seed);
        let c = if seed % 2 == 0 {
            random_nonnegative_circuit(&mut r, 2, 8)
        } else {
            random_negative_circuit(&mut r, 2, 8)
        };
        let s = c.power_substitute(k);
        prop_assert_eq!(s.verdict(), c.verdict());
        let f = c.to_polynomial();
        prop_assert_eq!(s.to_polynomial(), f.power_substitute(k));
        prop_assert_eq!(f.power_substitute(k).power_unsubstitute(k), Some(f));
    }
}
