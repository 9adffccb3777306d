//! Acceptance run: one PASS/FAIL line per criterion; exits non-zero on any failure.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use common::*;
use rand::Rng;
use sonc::{
    circuit_number, circuit_to_sosb, classify_circuit, decide_sonc, enumerate_covers, is_h_trellis,
    is_mediated_set, maximal_mediated_set, same_support_transform, sonc_to_sosb, support_partition,
    verify_sum, BinomialSquare, CircuitClass, CircuitPolynomial, Decision, Exponent, LatticeSet,
    MonomialSquare, Simplex, SoncError, SparsePolynomial, Verdict, DEFAULT_TOL,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn as_circuit(f: &SparsePolynomial) -> Result<CircuitPolynomial, String> {
    match classify_circuit(f).map_err(|e| e.to_string())? {
        CircuitClass::Circuit(c) => Ok(c),
        other => Err(format!("{f} is not a circuit: {other:?}")),
    }
}

fn worked_example() -> Outcome {
    let t = Instant::now();
    let f = worked_example_poly();
    let d = decide_sonc(&f, DEFAULT_TOL).map_err(|e| e.to_string())?;
    let slack = d.slack().ok_or("no slack reported")?;
    ensure(matches!(d, Decision::NotSonc { .. }), || {
        format!("status {}", d.status())
    })?;
    ensure(slack < -1e-6, || format!("slack {slack}"))?;
    let part = support_partition(&f).map_err(|e| e.to_string())?;
    let lambda: Vec<Exponent> = part.lambda.keys().cloned().collect();
    let covers = |beta: &[u32]| -> BTreeSet<Vec<Exponent>> {
        enumerate_covers(&lambda, &e(beta))
            .simplices
            .iter()
            .map(|(s, _)| s.sorted_vertices())
            .collect()
    };
    let d1 = vec![e(&[0, 0]), e(&[0, 4]), e(&[4, 0])];
    let d2 = vec![e(&[0, 0]), e(&[4, 0]), e(&[4, 4])];
    let d3 = vec![e(&[0, 0]), e(&[0, 4]), e(&[4, 4])];
    ensure(
        covers(&[2, 1]) == [d1.clone(), d2].into_iter().collect(),
        || "covers of (2,1)".into(),
    )?;
    ensure(covers(&[1, 2]) == [d1, d3].into_iter().collect(), || {
        "covers of (1,2)".into()
    })?;
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 1.0, || format!("took {secs:.3} s"))?;
    Ok(format!(
        "NOT_SONC, slack {slack:.5}, covers match, {secs:.3} s"
    ))
}

fn worked_example_mediated_sets() -> Outcome {
    let t = Instant::now();
    let a = [e(&[0, 0]), e(&[4, 0]), e(&[0, 4]), e(&[4, 4])];
    let (b1, b2, b3, b4, b5) = (e(&[2, 1]), e(&[1, 2]), e(&[2, 2]), e(&[2, 0]), e(&[0, 2]));
    let cases = [
        ([0, 1, 2], [&b1, &b3, &b4], &b1),
        ([0, 1, 3], [&b1, &b3, &b4], &b1),
        ([0, 1, 2], [&b2, &b3, &b5], &b2),
        ([0, 2, 3], [&b2, &b3, &b5], &b2),
    ];
    for (idx, extra, target) in cases {
        let verts: Vec<Exponent> = idx.iter().map(|&i| a[i].clone()).collect();
        let s = Simplex::new(verts.clone()).map_err(|e| e.to_string())?;
        let m: LatticeSet = verts
            .into_iter()
            .chain(extra.into_iter().cloned())
            .collect();
        ensure(m.contains(target), || format!("{target} missing"))?;
        ensure(is_mediated_set(&m, &s), || format!("{m:?} not mediated"))?;
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 0.1, || format!("took {secs:.3} s"))?;
    Ok(format!(
        "4 sets mediated, {secs:.4} s (sets for (1,2) read with b2 for b1)"
    ))
}

fn circuit_numbers() -> Outcome {
    let cases = [
        ("x^2 + 1 - 2*x", 1, 2),
        ("x^4*y^2 + x^2*y^4 + 1 - 3*x^2*y^2", 2, 3),
        ("2 + 8*x^2 - 8*x", 1, 8),
    ];
    for (text, nvars, theta) in cases {
        let c = as_circuit(&poly(text, nvars))?;
        let t = circuit_number(&c, 64);
        ensure(t.exact == Some(q(theta, 1)), || {
            format!("{text}: theta {:?}", t.exact)
        })?;
        ensure(c.verdict() == Verdict::Boundary, || {
            format!("{text}: {:?}", c.verdict())
        })?;
        ensure(
            c.with_d(q(theta, 1) + q(1, 1_000_000)).verdict() == Verdict::No,
            || text.into(),
        )?;
        ensure(
            c.with_d(q(theta, 1) - q(1, 1_000_000)).verdict() == Verdict::Yes,
            || text.into(),
        )?;
    }
    Ok("theta = 2, 3, 8 exact; boundary at d = theta".into())
}

fn maximal_mediated_sets() -> Outcome {
    let mut r = rng(4);
    let motzkin =
        Simplex::new(vec![e(&[0, 0]), e(&[4, 2]), e(&[2, 4])]).map_err(|e| e.to_string())?;
    let want: LatticeSet = [[0, 0], [4, 2], [2, 4], [2, 1], [1, 2], [3, 3]]
        .iter()
        .map(|p| e(p))
        .collect();
    let got = maximal_mediated_set(&motzkin).map_err(|e| e.to_string())?;
    ensure(got.points() == &want, || format!("{:?}", got.points()))?;
    for _ in 0..10 {
        ensure(
            maximal_mediated_oracle(motzkin.vertices(), &mut r) == want,
            || "oracle disagrees".into(),
        )?;
    }
    let tri = Simplex::new(vec![e(&[0, 0]), e(&[2, 0]), e(&[0, 2])]).map_err(|e| e.to_string())?;
    let all = maximal_mediated_set(&tri).map_err(|e| e.to_string())?;
    ensure(all.len() == 6, || format!("{} points", all.len()))?;
    ensure(
        maximal_mediated_oracle(tri.vertices(), &mut r).len() == 6,
        || "oracle disagrees".into(),
    )?;
    Ok("Motzkin A* has 6 points without (2,2); standard triangle A* is all 6 points".into())
}

fn h_trellis_scaling() -> Outcome {
    let t = Instant::now();
    let mut r = rng(5);
    for (n, count, degree) in [(2usize, 50, 8), (3, 20, 4)] {
        for _ in 0..count {
            let (s, _) = random_trellis(&mut r, n, degree);
            let ok = is_h_trellis(&s.scaled(n as u32)).map_err(|e| e.to_string())?;
            ensure(ok, || {
                format!("{:?} scaled by {n} is not an H-trellis", s.vertices())
            })?;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("70 scaled trellises are H-trellises, {secs:.2} s"))
}

fn sosb_exactness() -> Outcome {
    let mut r = rng(6);
    let mut scaled = 0;
    for _ in 0..200 {
        let n = r.gen_range(1..=2);
        let c = random_nonnegative_circuit(&mut r, n, 8);
        let m = maximal_mediated_set(c.trellis()).map_err(|e| e.to_string())?;
        let (k, squares, monos) = match circuit_to_sosb(&c, &m) {
            Ok((s, mo)) => (1, s, mo),
            Err(SoncError::NoMediatedWitness { .. }) => {
                scaled += 1;
                let k = n as u32;
                let (s, mo) =
                    sonc_to_sosb(std::slice::from_ref(&c), k).map_err(|e| e.to_string())?;
                (k, s, mo)
            }
            Err(e) => return Err(format!("{}: {e}", c.to_polynomial())),
        };
        let parts: Vec<SparsePolynomial> = squares
            .iter()
            .map(BinomialSquare::expand)
            .chain(monos.iter().map(MonomialSquare::to_polynomial))
            .collect();
        let target = c.to_polynomial().power_substitute(k);
        ensure(
            verify_sum(&parts, &target).map_err(|e| e.to_string())?,
            || format!("{target}"),
        )?;
    }
    let motzkin = as_circuit(&poly("x^4*y^2 + x^2*y^4 + 1 - 3*x^2*y^2", 2))?;
    let m = maximal_mediated_set(motzkin.trellis()).map_err(|e| e.to_string())?;
    match circuit_to_sosb(&motzkin, &m) {
        Err(e @ SoncError::NoMediatedWitness { .. }) => {
            ensure(e.to_string().contains("no mediated witness"), || {
                e.to_string()
            })?
        }
        other => return Err(format!("unscaled Motzkin: {other:?}")),
    }
    let (s, mo) = sonc_to_sosb(std::slice::from_ref(&motzkin), 2).map_err(|e| e.to_string())?;
    let parts: Vec<SparsePolynomial> = s
        .iter()
        .map(BinomialSquare::expand)
        .chain(mo.iter().map(MonomialSquare::to_polynomial))
        .collect();
    ensure(
        verify_sum(&parts, &motzkin.to_polynomial().power_substitute(2)).unwrap_or(false),
        || "Motzkin at k = 2".into(),
    )?;
    Ok(format!("200 exact decompositions ({scaled} needed k = n); Motzkin fails unscaled, succeeds at k = 2"))
}

fn rep_round_trip() -> Outcome {
    let t = Instant::now();
    let mut r = rng(7);
    let mut checked = 0;
    while checked < 100 {
        let n = r.gen_range(1..=3);
        let count = r.gen_range(1..=8);
        let circuits = random_circuit_list(&mut r, n, if n == 3 { 4 } else { 8 }, count);
        let f = sum_of(&circuits);
        if f.is_zero() {
            continue;
        }
        checked += 1;
        let d = decide_sonc(&f, DEFAULT_TOL).map_err(|e| format!("{f}: {e}"))?;
        let cert = match &d {
            Decision::Sonc { certificate, .. } => certificate,
            other => return Err(format!("{f}: {}", other.status())),
        };
        ensure(cert.exact, || format!("{f}: inexact certificate"))?;
        ensure(
            cert.circuits.iter().all(|c| c.verdict.is_nonnegative()),
            || format!("{f}: circuit fails"),
        )?;
        ensure(verify_sum(&cert.parts(), &f).unwrap_or(false), || {
            format!("{f}: sum differs")
        })?;
    }
    let sweep = |d: &str| {
        decide_sonc(&poly(&format!("x^2 + 1 - {d}*x"), 1), DEFAULT_TOL)
            .map(|x| x.is_sonc())
            .ok()
    };
    ensure(sweep("1999999/1000000") == Some(true), || {
        "d = 2 - 1e-6 rejected".into()
    })?;
    ensure(sweep("2") == Some(true), || "d = 2 rejected".into())?;
    ensure(sweep("2000001/1000000") == Some(false), || {
        "d = 2 + 1e-6 accepted".into()
    })?;
    Ok(format!(
        "100 exact certificates; verdict flips at d = 2 +- 1e-6; {:.2} s",
        t.elapsed().as_secs_f64()
    ))
}

fn same_support() -> Outcome {
    let mut r = rng(8);
    for _ in 0..100 {
        let n = r.gen_range(1..=2);
        let count = r.gen_range(1..=4);
        let circuits = random_circuit_list(&mut r, n, 8, count);
        let f = sum_of(&circuits);
        let cert =
            same_support_transform(&circuits, DEFAULT_TOL).map_err(|e| format!("{f}: {e}"))?;
        ensure(cert.exact, || format!("{f}: inexact"))?;
        ensure(verify_sum(&cert.parts(), &f).unwrap_or(false), || {
            format!("{f}: sum differs")
        })?;
        ensure(cert.is_same_support(&f), || format!("{f}: support leaks"))?;
    }
    let a = as_circuit(&poly("1/2*x^4 + 1/2 - x^2", 1))?;
    let b = as_circuit(&poly("1/2*x^4 + 1/2 + x^2", 1))?;
    let cert = same_support_transform(&[a, b], DEFAULT_TOL).map_err(|e| e.to_string())?;
    let squares: BTreeSet<(String, Exponent)> = cert
        .monomial_squares
        .iter()
        .map(|m| (m.c.to_string(), m.w.clone()))
        .collect();
    let want: BTreeSet<(String, Exponent)> =
        [("1".to_string(), e(&[0])), ("1".to_string(), e(&[4]))].into();
    ensure(cert.circuits.is_empty() && squares == want, || {
        format!("{squares:?}")
    })?;
    Ok("100 transforms without support leakage; cancellation gives x^4 + 1".into())
}

fn odd_powers() -> Outcome {
    let mut r = rng(9);
    for i in 0..200 {
        let n = r.gen_range(1..=2);
        let c = if i % 2 == 0 {
            random_nonnegative_circuit(&mut r, n, 8)
        } else {
            random_negative_circuit(&mut r, n, 8)
        };
        let f = c.to_polynomial();
        for k in [3, 5] {
            let s = c.power_substitute(k);
            ensure(s.verdict() == c.verdict(), || format!("{f} at k = {k}"))?;
            let g = f.power_substitute(k);
            ensure(s.to_polynomial() == g, || {
                format!("{f}: substitution mismatch")
            })?;
            ensure(g.power_unsubstitute(k).as_ref() == Some(&f), || {
                format!("{f}: round trip")
            })?;
        }
    }
    Ok("200 circuits keep their verdict under x -> x^3, x^5 and round-trip".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("worked example NOT_SONC with its covers", worked_example),
        ("worked example mediated sets", worked_example_mediated_sets),
        ("exact circuit numbers", circuit_numbers),
        ("maximal mediated sets", maximal_mediated_sets),
        ("H-trellis scaling", h_trellis_scaling),
        ("binomial-square exactness", sosb_exactness),
        ("REP round trip and boundary sweep", rep_round_trip),
        ("same-support transform", same_support),
        ("odd-power substitution", odd_powers),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
