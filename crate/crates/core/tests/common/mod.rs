//! Shared fixtures, random generators and brute-force oracles.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sonc::{
    circuit_number, parse_polynomial, CircuitPolynomial, Exponent, Simplex, SparsePolynomial,
};

pub type Q = BigRational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn e(v: &[u32]) -> Exponent {
    Exponent(v.to_vec())
}

pub fn poly(text: &str, nvars: usize) -> SparsePolynomial {
    parse_polynomial(text, nvars).unwrap()
}

/// The worked example with two inner terms and four vertices.
pub fn worked_example_poly() -> SparsePolynomial {
    poly("50*x^4*y^4 + x^4 + 3*y^4 + 800 - 300*x*y^2 - 180*x^2*y", 2)
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap()
}

// ---------------------------------------------------------------- exact linear algebra

/// Unique solution of `Σ λ_i p_i = target, Σ λ_i = 1`, or `None` when the
/// points are affinely dependent or the system is inconsistent.
pub fn affine_solve(points: &[Exponent], target: &Exponent) -> Option<Vec<Q>> {
    let m = points.len();
    let n = target.0.len();
    let rows = n + 1;
    let mut a: Vec<Vec<Q>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Q> = points
                .iter()
                .map(|p| {
                    if r < n {
                        Q::from_integer(p.0[r].into())
                    } else {
                        Q::one()
                    }
                })
                .collect();
            row.push(if r < n {
                Q::from_integer(target.0[r].into())
            } else {
                Q::one()
            });
            row
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..m {
        let Some(r) = (pivot_row..rows).find(|&r| !a[r][col].is_zero()) else {
            return None;
        };
        a.swap(pivot_row, r);
        let inv = a[pivot_row][col].recip();
        for x in a[pivot_row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..rows {
            if r != pivot_row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..=m {
                    let delta = &f * &a[pivot_row][c];
                    a[r][c] = &a[r][c] - delta;
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    if (pivot_row..rows).any(|r| !a[r][m].is_zero()) {
        return None;
    }
    Some((0..m).map(|i| a[i][m].clone()).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Membership in `conv(points)` by scanning every affinely independent
/// subset of size at most `n + 1`.
pub fn hull_contains(points: &[Exponent], p: &Exponent) -> bool {
    let n = p.0.len();
    (1..=(n + 1).min(points.len())).any(|k| {
        combinations(points.len(), k).into_iter().any(|idx| {
            let sub: Vec<Exponent> = idx.iter().map(|&i| points[i].clone()).collect();
            affine_solve(&sub, p).is_some_and(|w| w.iter().all(|x| !x.is_negative()))
        })
    })
}

/// Vertex sets of every simplex on `lambda` holding `beta` in its relative interior.
pub fn covers_oracle(lambda: &[Exponent], beta: &Exponent) -> BTreeSet<Vec<Exponent>> {
    let n = beta.0.len();
    let mut out = BTreeSet::new();
    for k in 2..=(n + 1).min(lambda.len()) {
        for idx in combinations(lambda.len(), k) {
            let mut sub: Vec<Exponent> = idx.iter().map(|&i| lambda[i].clone()).collect();
            if affine_solve(&sub, beta).is_some_and(|w| w.iter().all(Signed::is_positive)) {
                sub.sort();
                out.insert(sub);
            }
        }
    }
    out
}

/// Lattice points of `conv(vertices)` from a bounding-box scan.
pub fn lattice_oracle(vertices: &[Exponent]) -> BTreeSet<Exponent> {
    let n = vertices[0].0.len();
    let hi: Vec<u32> = (0..n)
        .map(|i| vertices.iter().map(|v| v.0[i]).max().unwrap())
        .collect();
    let lo: Vec<u32> = (0..n)
        .map(|i| vertices.iter().map(|v| v.0[i]).min().unwrap())
        .collect();
    let mut out = BTreeSet::new();
    let mut cur = lo.clone();
    loop {
        let p = Exponent(cur.clone());
        if hull_contains(vertices, &p) {
            out.insert(p);
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            if cur[i] < hi[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = lo[i];
            i += 1;
        }
    }
}

/// Largest mediated set by naive deletion in a random order until stable.
pub fn maximal_mediated_oracle(vertices: &[Exponent], rng: &mut impl Rng) -> BTreeSet<Exponent> {
    let corners: BTreeSet<Exponent> = vertices.iter().cloned().collect();
    let mut set = lattice_oracle(vertices);
    loop {
        let mut order: Vec<Exponent> = set.difference(&corners).cloned().collect();
        order.shuffle(rng);
        let mut changed = false;
        for p in order {
            let evens: Vec<&Exponent> = set
                .iter()
                .filter(|x| x.0.iter().all(|c| c % 2 == 0))
                .collect();
            let witnessed = evens.iter().any(|u| {
                let v: Option<Vec<u32>> =
                    u.0.iter()
                        .zip(&p.0)
                        .map(|(a, b)| (2 * b).checked_sub(*a))
                        .collect();
                v.is_some_and(|v| {
                    v != u.0 && set.contains(&Exponent(v.clone())) && v.iter().all(|c| c % 2 == 0)
                })
            });
            if !witnessed {
                set.remove(&p);
                changed = true;
            }
        }
        if !changed {
            return set;
        }
    }
}

// ---------------------------------------------------------------- f64 oracles

/// `Π (c_a / λ_a)^λ_a` in floating point from independently solved weights.
pub fn theta_f64(vertices: &[Exponent], coeffs: &[Q], beta: &Exponent) -> f64 {
    let w = affine_solve(vertices, beta).expect("beta in the affine hull");
    w.iter()
        .zip(coeffs)
        .map(|(l, c)| {
            let l = to_f64(l);
            l * (to_f64(c) / l).ln()
        })
        .sum::<f64>()
        .exp()
}

/// Approximate minimum of `f` on `[-3, 3]^n` from a grid plus coordinate descent.
pub fn grid_minimum(f: &SparsePolynomial, steps: usize) -> f64 {
    let n = f.nvars();
    let h = 6.0 / steps as f64;
    let mut best = (f64::INFINITY, vec![0.0; n]);
    let mut idx = vec![0usize; n];
    'outer: loop {
        let x: Vec<f64> = idx.iter().map(|&i| -3.0 + h * i as f64).collect();
        let v = f.evaluate_f64(&x);
        if v < best.0 {
            best = (v, x);
        }
        let mut i = 0;
        loop {
            if i == n {
                break 'outer;
            }
            if idx[i] < steps {
                idx[i] += 1;
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
    let (mut val, mut x) = best;
    let mut step = h;
    while step > 1e-9 {
        let mut improved = false;
        for i in 0..n {
            for s in [-step, step] {
                let mut y = x.clone();
                y[i] += s;
                let v = f.evaluate_f64(&y);
                if v < val {
                    val = v;
                    x = y;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    val
}

// ---------------------------------------------------------------- generators

fn random_even_point(rng: &mut impl Rng, n: usize, max_degree: u32) -> Exponent {
    loop {
        let p: Vec<u32> = (0..n)
            .map(|_| 2 * rng.gen_range(0..=max_degree / 2))
            .collect();
        if p.iter().sum::<u32>() <= max_degree {
            return Exponent(p);
        }
    }
}

/// A full-dimensional even simplex with at least one interior lattice point.
pub fn random_trellis(rng: &mut impl Rng, n: usize, max_degree: u32) -> (Simplex, Vec<Exponent>) {
    loop {
        let verts: Vec<Exponent> = (0..=n)
            .map(|_| random_even_point(rng, n, max_degree))
            .collect();
        let Ok(s) = Simplex::new(verts.clone()) else {
            continue;
        };
        let inner: Vec<Exponent> = lattice_oracle(&verts)
            .into_iter()
            .filter(|p| affine_solve(&verts, p).is_some_and(|w| w.iter().all(Signed::is_positive)))
            .collect();
        if !inner.is_empty() {
            return (s, inner);
        }
    }
}

pub fn random_coeff(rng: &mut impl Rng) -> Q {
    q(rng.gen_range(1..=16), rng.gen_range(1..=4))
}

/// Inner coefficient `±factor · Θ` rounded down to a rational, so the verdict
/// is `yes` for `factor < 1` and `no` for `factor > 1` (with margin).
pub fn scaled_theta(c: &CircuitPolynomial, num: i64, den: i64) -> Q {
    let theta = circuit_number(c, 40);
    let base = if num <= den { theta.lower } else { theta.upper };
    base * q(num, den)
}

/// Nonnegative circuit with `d` a fixed fraction in `[1/5, 19/20]` of `Θ`;
/// odd inner points get a random sign.
pub fn random_nonnegative_circuit(
    rng: &mut impl Rng,
    n: usize,
    max_degree: u32,
) -> CircuitPolynomial {
    let (s, inner) = random_trellis(rng, n, max_degree);
    let beta = inner.choose(rng).unwrap().clone();
    let coeffs: Vec<Q> = (0..=n).map(|_| random_coeff(rng)).collect();
    let c = CircuitPolynomial::new(s, coeffs, beta, Q::one()).unwrap();
    let mut d = scaled_theta(&c, rng.gen_range(4..=19), 20);
    if !c.beta().is_even() && rng.gen_bool(0.5) {
        d = -d;
    }
    c.with_d(d)
}

/// Circuit whose verdict is `no`: `d` between `1.05 Θ` and `3 Θ`, odd or even β.
pub fn random_negative_circuit(rng: &mut impl Rng, n: usize, max_degree: u32) -> CircuitPolynomial {
    let (s, inner) = random_trellis(rng, n, max_degree);
    let beta = inner.choose(rng).unwrap().clone();
    let coeffs: Vec<Q> = (0..=n).map(|_| random_coeff(rng)).collect();
    let c = CircuitPolynomial::new(s, coeffs, beta, Q::one()).unwrap();
    let mut d = scaled_theta(&c, rng.gen_range(21..=60), 20);
    if !c.beta().is_even() && rng.gen_bool(0.5) {
        d = -d;
    }
    c.with_d(d)
}

/// Nonnegative circuits drawn on a shared pool of even points, so their sum
/// has a small support with repeated vertices.
pub fn random_circuit_list(
    rng: &mut impl Rng,
    n: usize,
    max_degree: u32,
    count: usize,
) -> Vec<CircuitPolynomial> {
    let pool_size = rng.gen_range(n + 1..=n + 3);
    let pool: Vec<Exponent> = loop {
        let pts: BTreeSet<Exponent> = (0..pool_size)
            .map(|_| random_even_point(rng, n, max_degree))
            .collect();
        let pts: Vec<Exponent> = pts.into_iter().collect();
        if pts.len() > n
            && combinations(pts.len(), n + 1)
                .iter()
                .any(|idx| Simplex::new(idx.iter().map(|&i| pts[i].clone()).collect()).is_ok())
        {
            break pts;
        }
    };
    let mut out = Vec::new();
    while out.len() < count {
        let k = rng.gen_range(2..=(n + 1));
        let idx = combinations(pool.len(), k);
        let pick = idx.choose(rng).unwrap();
        let verts: Vec<Exponent> = pick.iter().map(|&i| pool[i].clone()).collect();
        let Ok(s) = Simplex::new(verts.clone()) else {
            continue;
        };
        let inner: Vec<Exponent> = lattice_oracle(&verts)
            .into_iter()
            .filter(|p| affine_solve(&verts, p).is_some_and(|w| w.iter().all(Signed::is_positive)))
            .collect();
        let Some(beta) = inner.choose(rng).cloned() else {
            continue;
        };
        let coeffs: Vec<Q> = verts.iter().map(|_| random_coeff(rng)).collect();
        let c = CircuitPolynomial::new(s, coeffs, beta, Q::one()).unwrap();
        let mut d = scaled_theta(&c, rng.gen_range(4..=19), 20);
        if !c.beta().is_even() && rng.gen_bool(0.5) {
            d = -d;
        }
        out.push(c.with_d(d));
    }
    out
}

pub fn sum_of(circuits: &[CircuitPolynomial]) -> SparsePolynomial {
    circuits
        .iter()
        .fold(SparsePolynomial::zero(circuits[0].nvars()), |acc, c| {
            &acc + &c.to_polynomial()
        })
}

/// Circuits at `d = Θ` with rational `Θ`.
pub fn boundary_fixtures() -> Vec<(SparsePolynomial, Q)> {
    vec![
        (poly("x^2 + 1 - 2*x", 1), q(2, 1)),
        (poly("x^4*y^2 + x^2*y^4 + 1 - 3*x^2*y^2", 2), q(3, 1)),
        (poly("2 + 8*x^2 - 8*x", 1), q(8, 1)),
        (poly("x^4 + 1 - 2*x^2", 1), q(2, 1)),
        (poly("4*x^6 + 27 - 27*x^2", 1), q(27, 1)),
    ]
}

pub fn q_is_integer(x: &Q) -> bool {
    x.denom().is_one()
}
