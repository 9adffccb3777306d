//! Binomial-square decompositions of nonnegative circuit polynomials.
//!
//! Given a circuit `Σ c_a x^a - d x^β` and an A-mediated set `M ∋ β`, every
//! non-trellis point `p` reached from `β` gets a witness pair `(u_p, v_p)` of
//! even points of `M` with `p = (u_p + v_p)/2`, and a square
//!
//! ```text
//! w_p (r_p x^{u_p} - 2 x^p + r_p^{-1} x^{v_p}) = (sqrt(w_p r_p) x^{u_p/2} - sqrt(w_p / r_p) x^{v_p/2})^2
//! ```
//!
//! With the ratios `r_p` fixed, the weights `w_p` follow from a linear
//! system: the square at `β` carries `-d`, and at every inner even point the
//! negative middle term cancels exactly what the parent squares deposit
//! there. Choosing `r_p` from the balancing point of the circuit makes the
//! mass deposited at each vertex equal `c_a |d| / Θ`, which fits whenever
//! `|d| <= Θ`. Ratios are rationalized (exact when the balancing point gives
//! rational ratios), so the final identity is checked in exact arithmetic.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::circuit::{log_rational, rational_nth_root, CircuitPolynomial, Verdict};
use crate::geometry::AffineFrame;
use crate::mediated::{maximal_mediated_set, MediatedSet};
use crate::poly::{verify_sum, Exponent, SparsePolynomial};
use crate::{f64_to_rational, Rational, SoncError};

/// `(a x^u - b x^v)^2` stored through its expansion: `a² x^{2u} + b² x^{2v} - 2ab x^{u+v}`.
///
/// `a > 0`; the sign of `ab` carries the sign of `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinomialSquare {
    pub a_sq: Rational,
    pub u: Exponent,
    pub b_sq: Rational,
    pub v: Exponent,
    pub ab: Rational,
}

impl BinomialSquare {
    pub fn new(
        a_sq: Rational,
        u: Exponent,
        b_sq: Rational,
        v: Exponent,
        ab: Rational,
    ) -> Result<Self, SoncError> {
        if u == v {
            return Err(SoncError::Sosb("binomial square needs u != v".into()));
        }
        if !a_sq.is_positive() || !b_sq.is_positive() || &ab * &ab != &a_sq * &b_sq {
            return Err(SoncError::Sosb(
                "inconsistent binomial square coefficients".into(),
            ));
        }
        Ok(BinomialSquare {
            a_sq,
            u,
            b_sq,
            v,
            ab,
        })
    }

    pub fn nvars(&self) -> usize {
        self.u.nvars()
    }

    /// Exponent of the cross term, `u + v`.
    pub fn middle(&self) -> Exponent {
        self.u.add(&self.v)
    }

    pub fn expand(&self) -> SparsePolynomial {
        let mut p = SparsePolynomial::zero(self.nvars());
        p.add_term(self.u.scaled(2), self.a_sq.clone());
        p.add_term(self.v.scaled(2), self.b_sq.clone());
        p.add_term(
            self.middle(),
            -(&self.ab * Rational::from_integer(2.into())),
        );
        p
    }

    pub fn power_substitute(&self, k: u32) -> BinomialSquare {
        BinomialSquare {
            u: self.u.scaled(k),
            v: self.v.scaled(k),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> SquareJson {
        SquareJson {
            a: sqrt_string(&self.a_sq, false),
            u: self.u.0.clone(),
            b: sqrt_string(&self.b_sq, self.ab.is_negative()),
            v: self.v.0.clone(),
        }
    }
}

/// `"p/q"` if the square root is rational, else `"sqrt(p/q)"`.
fn sqrt_string(sq: &Rational, negative: bool) -> String {
    let body = match rational_nth_root(sq, 2) {
        Some(r) => r.to_string(),
        None => format!("sqrt({sq})"),
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareJson {
    pub a: String,
    pub u: Vec<u32>,
    pub b: String,
    pub v: Vec<u32>,
}

/// `c x^w` with `c > 0`, `w` even.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialSquare {
    pub c: Rational,
    pub w: Exponent,
}

impl MonomialSquare {
    pub fn new(c: Rational, w: Exponent) -> Result<Self, SoncError> {
        if !c.is_positive() || !w.is_even() {
            return Err(SoncError::Internal(format!(
                "{c}*x^{w} is not a monomial square"
            )));
        }
        Ok(MonomialSquare { c, w })
    }

    pub fn to_polynomial(&self) -> SparsePolynomial {
        SparsePolynomial::monomial(self.c.clone(), self.w.clone())
    }
}

/// Merges monomial squares with equal exponents.
pub(crate) fn collect_monomials(list: Vec<MonomialSquare>) -> Vec<MonomialSquare> {
    let mut acc: BTreeMap<Exponent, Rational> = BTreeMap::new();
    for m in list {
        *acc.entry(m.w).or_insert_with(Rational::zero) += m.c;
    }
    acc.into_iter()
        .filter(|(_, c)| c.is_positive())
        .map(|(w, c)| MonomialSquare { c, w })
        .collect()
}

/// Witness structure for `β` inside a mediated set: each non-trellis node
/// `p` maps to its parent pair `(u, v)` of even points with `p = (u+v)/2`.
///
/// Parents are chosen by lowest grounding level first (the number of
/// midpoint steps needed to reach `p` from the trellis), then
/// lexicographically. Points of a mediated set that cannot be grounded
/// (e.g. 2 and 4 for `A = {0, 6}`) are resolved by each other, so the
/// structure may contain cycles; every walk still ends at the trellis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MediationTree {
    pub root: Exponent,
    pub nodes: BTreeMap<Exponent, (Exponent, Exponent)>,
}

impl MediationTree {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }
}

fn grounding_levels(m: &MediatedSet) -> HashMap<Exponent, usize> {
    let mut level: HashMap<Exponent, usize> = m
        .trellis()
        .vertices()
        .iter()
        .map(|a| (a.clone(), 0))
        .collect();
    let even: Vec<&Exponent> = m.points().iter().filter(|p| p.is_even()).collect();
    let mut round = 0;
    loop {
        round += 1;
        let mut fresh = Vec::new();
        for p in m.points() {
            if level.contains_key(p) {
                continue;
            }
            let grounded = even.iter().any(|u| {
                level.get(*u).is_some_and(|&lu| lu < round)
                    && p.reflect(u).is_some_and(|v| {
                        v != **u && v.is_even() && level.get(&v).is_some_and(|&lv| lv < round)
                    })
            });
            if grounded {
                fresh.push(p.clone());
            }
        }
        if fresh.is_empty() {
            return level;
        }
        for p in fresh {
            level.insert(p, round);
        }
    }
}

pub fn mediation_tree(m: &MediatedSet, beta: &Exponent) -> Result<MediationTree, SoncError> {
    if !m.contains(beta) {
        return Err(SoncError::NoMediatedWitness { beta: beta.clone() });
    }
    let trellis: HashSet<&Exponent> = m.trellis().vertices().iter().collect();
    let levels = grounding_levels(m);
    let even: Vec<&Exponent> = m.points().iter().filter(|p| p.is_even()).collect();
    let mut nodes = BTreeMap::new();
    let mut queue = VecDeque::new();
    if !trellis.contains(beta) {
        queue.push_back(beta.clone());
    }
    let mut seen: HashSet<Exponent> = queue.iter().cloned().collect();
    while let Some(p) = queue.pop_front() {
        let mut best: Option<(usize, Exponent, Exponent)> = None;
        for u in &even {
            let Some(v) = p.reflect(u) else { continue };
            if **u >= v || !v.is_even() || !m.contains(&v) {
                continue;
            }
            let lvl = levels
                .get(*u)
                .copied()
                .unwrap_or(usize::MAX)
                .max(levels.get(&v).copied().unwrap_or(usize::MAX));
            let cand = (lvl, (*u).clone(), v);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
        let (_, u, v) = best.ok_or_else(|| {
            SoncError::Internal(format!(
                "{p} has no witness pair although the set is mediated"
            ))
        })?;
        for child in [&u, &v] {
            if !trellis.contains(child) && seen.insert(child.clone()) {
                queue.push_back(child.clone());
            }
        }
        nodes.insert(p, (u, v));
    }
    Ok(MediationTree {
        root: beta.clone(),
        nodes,
    })
}

/// Decomposes a nonnegative circuit into binomial squares and monomial
/// squares whose exponents lie in `M ∪ {β}`.
pub fn circuit_to_sosb(
    c: &CircuitPolynomial,
    m: &MediatedSet,
) -> Result<(Vec<BinomialSquare>, Vec<MonomialSquare>), SoncError> {
    let mut mine = c.trellis().sorted_vertices();
    let mut theirs = m.trellis().sorted_vertices();
    mine.dedup();
    theirs.dedup();
    if mine != theirs {
        return Err(SoncError::Sosb(
            "mediated set belongs to a different trellis".into(),
        ));
    }
    let verdict = c.verdict();
    if verdict == Verdict::No {
        return Err(SoncError::NotNonnegative);
    }
    let vertex_monomials = |deposits: Option<&[Rational]>| -> Vec<MonomialSquare> {
        c.trellis()
            .vertices()
            .iter()
            .zip(c.coeffs())
            .enumerate()
            .filter_map(|(i, (a, ca))| {
                let rest = match deposits {
                    Some(dep) => ca - &dep[i],
                    None => ca.clone(),
                };
                rest.is_positive().then(|| MonomialSquare {
                    c: rest,
                    w: a.clone(),
                })
            })
            .collect()
    };
    if c.d().is_zero() || (c.beta().is_even() && c.d().is_negative()) {
        let mut monos = vertex_monomials(None);
        if c.d().is_negative() {
            monos.push(MonomialSquare {
                c: -c.d().clone(),
                w: c.beta().clone(),
            });
        }
        return Ok((Vec::new(), collect_monomials(monos)));
    }
    let tree = mediation_tree(m, c.beta())?;
    let plan = SquarePlan::new(c, &tree);

    let mut attempts: Vec<Option<f64>> = Vec::new();
    if verdict == Verdict::Boundary {
        attempts.push(None);
    }
    attempts.extend([1e-3, 1e-6, 1e-9, 1e-12, 0.0].map(Some));
    let target = c.to_polynomial();
    let mut last_err = String::new();
    for tol in attempts {
        let ratios = match tol {
            None => match plan.exact_ratios() {
                Some(r) => r,
                None => continue,
            },
            Some(t) => plan.approximate_ratios(t),
        };
        match plan.assemble(&ratios) {
            Ok((squares, deposits)) => {
                let monos = vertex_monomials(Some(&deposits));
                let mut parts: Vec<SparsePolynomial> =
                    squares.iter().map(BinomialSquare::expand).collect();
                parts.extend(monos.iter().map(MonomialSquare::to_polynomial));
                if verify_sum(&parts, &target)? {
                    return Ok((squares, monos));
                }
                last_err = "expansion mismatch".into();
            }
            Err(e) => last_err = e,
        }
    }
    Err(SoncError::Sosb(format!(
        "no exact decomposition for circuit with inner point {} ({last_err})",
        c.beta()
    )))
}

/// Node bookkeeping shared by the ratio choices.
struct SquarePlan<'a> {
    circuit: &'a CircuitPolynomial,
    order: Vec<Exponent>,
    index: HashMap<Exponent, usize>,
    parents: Vec<(Exponent, Exponent)>,
    /// `(μ^v - μ^u) / 2` per node, affine coordinates w.r.t. the trellis.
    exponents: Vec<Vec<Rational>>,
    log_weights: Vec<f64>,
}

impl<'a> SquarePlan<'a> {
    fn new(circuit: &'a CircuitPolynomial, tree: &MediationTree) -> Self {
        let mut order = vec![tree.root.clone()];
        order.extend(tree.nodes.keys().filter(|p| **p != tree.root).cloned());
        let index: HashMap<Exponent, usize> = order
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        let parents: Vec<(Exponent, Exponent)> =
            order.iter().map(|p| tree.nodes[p].clone()).collect();
        let frame = AffineFrame::new(circuit.trellis().vertices());
        let half = Rational::new(1.into(), 2.into());
        let exponents = parents
            .iter()
            .map(|(u, v)| {
                let mu = frame.coordinates(u).expect("parent off the affine hull");
                let mv = frame.coordinates(v).expect("parent off the affine hull");
                mv.iter().zip(&mu).map(|(a, b)| (a - b) * &half).collect()
            })
            .collect();
        // log(λ_a / c_a)
        let log_weights = circuit
            .lambdas()
            .weights
            .iter()
            .zip(circuit.coeffs())
            .map(|(l, c)| log_rational(l) - log_rational(c))
            .collect();
        SquarePlan {
            circuit,
            order,
            index,
            parents,
            exponents,
            log_weights,
        }
    }

    fn approximate_ratios(&self, tol: f64) -> Vec<Rational> {
        self.exponents
            .iter()
            .map(|ex| {
                let log_r: f64 = ex
                    .iter()
                    .zip(&self.log_weights)
                    .map(|(e, lw)| crate::rational_to_f64(e) * lw)
                    .sum();
                let r = f64_to_rational(log_r.exp(), tol);
                if r.is_positive() {
                    r
                } else {
                    Rational::one()
                }
            })
            .collect()
    }

    /// Ratios `Π (λ_a/c_a)^{e_a}` when all of them are rational.
    fn exact_ratios(&self) -> Option<Vec<Rational>> {
        let bases: Vec<Rational> = self
            .circuit
            .lambdas()
            .weights
            .iter()
            .zip(self.circuit.coeffs())
            .map(|(l, c)| l / c)
            .collect();
        self.exponents
            .iter()
            .map(|ex| {
                let q = ex.iter().fold(num_bigint::BigInt::one(), |acc, e| {
                    num_integer::lcm(acc, e.denom().clone())
                });
                let qn: u32 = num_traits::ToPrimitive::to_u32(&q)?;
                let mut power = Rational::one();
                for (e, base) in ex.iter().zip(&bases) {
                    let k = (e * Rational::from_integer(q.clone())).to_integer();
                    let kk: i64 = num_traits::ToPrimitive::to_i64(&k)?;
                    let b = if kk < 0 { base.recip() } else { base.clone() };
                    power *= num_traits::pow(b, kk.unsigned_abs() as usize);
                }
                rational_nth_root(&power, qn)
            })
            .collect()
    }

    /// Solves for the weights, builds the squares and returns the mass
    /// deposited at each trellis vertex.
    fn assemble(
        &self,
        ratios: &[Rational],
    ) -> Result<(Vec<BinomialSquare>, Vec<Rational>), String> {
        let n = self.order.len();
        let half = Rational::new(1.into(), 2.into());
        // w = T w + e_root * |d|/2, with T[q][p] = r_p/2 if u_p = q, 1/(2 r_p) if v_p = q
        let mut incoming: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
        for (p, (u, v)) in self.parents.iter().enumerate() {
            if let Some(&q) = self.index.get(u) {
                incoming[q].push((p, &ratios[p] * &half));
            }
            if let Some(&q) = self.index.get(v) {
                incoming[q].push((p, ratios[p].recip() * &half));
            }
        }
        let source = self.circuit.d().abs() * &half;
        let weights = match topological(n, &incoming) {
            Some(topo) => {
                let mut w = vec![Rational::zero(); n];
                for q in topo {
                    let mut val = if q == 0 {
                        source.clone()
                    } else {
                        Rational::zero()
                    };
                    for (p, t) in &incoming[q] {
                        val += t * &w[*p];
                    }
                    w[q] = val;
                }
                w
            }
            None => {
                let mut a = vec![vec![Rational::zero(); n]; n];
                for q in 0..n {
                    a[q][q] = Rational::one();
                    for (p, t) in &incoming[q] {
                        a[q][*p] -= t;
                    }
                }
                let mut b = vec![Rational::zero(); n];
                b[0] = source.clone();
                crate::lp::solve_linear(&a, &b).ok_or("singular weight system")?
            }
        };
        if weights.iter().any(|w| !w.is_positive()) {
            return Err("nonpositive square weight".into());
        }
        let verts = self.circuit.trellis().vertices();
        let mut deposits = vec![Rational::zero(); verts.len()];
        let mut squares = Vec::with_capacity(n);
        let sign_flip = self.circuit.d().is_negative();
        for (p, (u, v)) in self.parents.iter().enumerate() {
            let a_sq = &weights[p] * &ratios[p];
            let b_sq = &weights[p] / &ratios[p];
            if let Some(i) = verts.iter().position(|a| a == u) {
                deposits[i] += &a_sq;
            }
            if let Some(i) = verts.iter().position(|a| a == v) {
                deposits[i] += &b_sq;
            }
            let ab = if p == 0 && sign_flip {
                -weights[p].clone()
            } else {
                weights[p].clone()
            };
            let u2 = u.divided(2).ok_or("odd parent point")?;
            let v2 = v.divided(2).ok_or("odd parent point")?;
            squares.push(BinomialSquare::new(a_sq, u2, b_sq, v2, ab).map_err(|e| e.to_string())?);
        }
        for (dep, c) in deposits.iter().zip(self.circuit.coeffs()) {
            if dep > c {
                return Err("vertex budget exceeded".into());
            }
        }
        Ok((squares, deposits))
    }
}

/// Order in which every node comes after all nodes feeding into it, or
/// `None` when the dependency graph has a cycle.
fn topological(n: usize, incoming: &[Vec<(usize, Rational)>]) -> Option<Vec<usize>> {
    let mut indeg: Vec<usize> = incoming.iter().map(Vec::len).collect();
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (q, inc) in incoming.iter().enumerate() {
        for (p, _) in inc {
            outgoing[*p].push(q);
        }
    }
    let mut ready: VecDeque<usize> = (0..n).filter(|&q| indeg[q] == 0).collect();
    let mut out = Vec::with_capacity(n);
    while let Some(p) = ready.pop_front() {
        out.push(p);
        for &q in &outgoing[p] {
            indeg[q] -= 1;
            if indeg[q] == 0 {
                ready.push_back(q);
            }
        }
    }
    (out.len() == n).then_some(out)
}

/// Binomial-square decomposition of `Σ circuits` evaluated at `x^k`,
/// using the maximal mediated set of each scaled trellis.
pub fn sonc_to_sosb(
    circuits: &[CircuitPolynomial],
    k: u32,
) -> Result<(Vec<BinomialSquare>, Vec<MonomialSquare>), SoncError> {
    let mut squares = Vec::new();
    let mut monos = Vec::new();
    for c in circuits {
        if (k as usize) < c.nvars() {
            return Err(SoncError::Sosb(format!(
                "scaling k = {k} is below n = {}",
                c.nvars()
            )));
        }
        let scaled = c.power_substitute(k);
        let m = maximal_mediated_set(scaled.trellis())?;
        let (s, mo) = circuit_to_sosb(&scaled, &m).map_err(|e| match e {
            SoncError::NoMediatedWitness { beta } => SoncError::Internal(format!(
                "{beta} missing from the maximal mediated set of a k-scaled trellis with k >= n"
            )),
            other => other,
        })?;
        squares.extend(s);
        monos.extend(mo);
    }
    Ok((squares, collect_monomials(monos)))
}
