//! Turning an arbitrary SONC decomposition into one with the same support.
//!
//! Pipeline: substitute `x -> x^k` with odd `k = 2n+1`, split every circuit
//! into binomial squares, merge the squares into banana polynomials (at
//! most one non-square term each) that live on the support of the total,
//! certify each banana as a sum of circuits on its own support, and divide
//! the exponents by `k` again.
//!
//! Merging keeps every piece a nonnegative combination of input squares
//! and monomial squares. Whenever a point `p` carries contributions of both
//! signs, a negative contribution `-e` (the non-square term of a piece `X`)
//! is cancelled against a positive one `c` (from a piece or the monomial
//! pool `Y`): if `c >= e` the new piece is `X + (e/c) Y`, otherwise
//! `(c/e) X + Y`, and the unused fraction stays behind. The new piece has
//! no term at `p` and at most one non-square term. Once no point has mixed
//! signs, every term of every piece sits where the total has a term of the
//! same sign, so nothing leaks outside the total's support.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::certificate::SoncCertificate;
use crate::circuit::{is_nonnegative_circuit, CircuitPolynomial};
use crate::geometry::Simplex;
use crate::poly::{Exponent, SparsePolynomial};
use crate::rep::{decide_sonc, Decision};
use crate::sosb::{collect_monomials, sonc_to_sosb, BinomialSquare, MonomialSquare};
use crate::{Rational, SoncError};

/// Largest scaled degree the pipeline accepts.
pub const MAX_SCALED_DEGREE: u64 = 60;
/// Number of variables from which the pipeline refuses to run.
pub const MAX_NVARS: usize = 4;

/// A nonnegative term source: input square `i`, or the monomial `x^p`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Square(usize),
    Monomial(Exponent),
}

/// `Σ positive_terms - d x^β`, nonnegative by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BananaPolynomial {
    pub positive_terms: BTreeMap<Exponent, Rational>,
    pub beta: Exponent,
    pub d: Rational,
    /// `banana = Σ scale · source`, where a square source is the `i`-th
    /// input square and a monomial source is `x^p` itself.
    pub provenance: Vec<(Rational, Source)>,
}

impl BananaPolynomial {
    pub fn nvars(&self) -> usize {
        self.beta.nvars()
    }

    pub fn to_polynomial(&self) -> SparsePolynomial {
        let mut p = SparsePolynomial::zero(self.nvars());
        for (e, c) in &self.positive_terms {
            p.add_term(e.clone(), c.clone());
        }
        p.add_term(self.beta.clone(), -self.d.clone());
        p
    }

    /// Expands the provenance against the squares it refers to.
    pub fn provenance_expansion(&self, squares: &[BinomialSquare]) -> SparsePolynomial {
        let mut p = SparsePolynomial::zero(self.nvars());
        for (scale, src) in &self.provenance {
            match src {
                Source::Square(i) => p.add_assign_scaled(&squares[*i].expand(), scale),
                Source::Monomial(e) => p.add_term(e.clone(), scale.clone()),
            }
        }
        p
    }
}

fn is_square_term(e: &Exponent, c: &Rational) -> bool {
    e.is_even() && c.is_positive()
}

#[derive(Clone, Debug)]
struct Piece {
    poly: SparsePolynomial,
    prov: BTreeMap<Source, Rational>,
}

impl Piece {
    fn scaled(&self, s: &Rational) -> Piece {
        Piece {
            poly: self.poly.scale(s),
            prov: self.prov.iter().map(|(k, v)| (k.clone(), v * s)).collect(),
        }
    }

    fn add(&mut self, other: &Piece) {
        self.poly.add_assign_scaled(&other.poly, &Rational::one());
        for (k, v) in &other.prov {
            *self.prov.entry(k.clone()).or_insert_with(Rational::zero) += v;
        }
    }

    fn non_square(&self) -> Option<Exponent> {
        self.poly
            .terms()
            .find(|(e, c)| !is_square_term(e, c))
            .map(|(e, _)| e.clone())
    }
}

#[derive(Clone, Copy)]
enum Holder {
    Piece(usize),
    Pool,
}

struct Merger {
    nvars: usize,
    pieces: Vec<Piece>,
    pool: BTreeMap<Exponent, Rational>,
    total: SparsePolynomial,
}

impl Merger {
    fn to_pool(&mut self, piece: Piece) {
        for (e, c) in piece.poly.terms() {
            debug_assert!(is_square_term(e, c));
            *self.pool.entry(e.clone()).or_insert_with(Rational::zero) += c;
        }
    }

    fn push(&mut self, piece: Piece) {
        if piece.poly.is_zero() {
            return;
        }
        if piece.non_square().is_some() {
            self.pieces.push(piece);
        } else {
            self.to_pool(piece);
        }
    }

    fn take(&mut self, h: Holder, p: &Exponent, fraction: &Rational) -> Piece {
        match h {
            Holder::Piece(k) => {
                let part = self.pieces[k].scaled(fraction);
                let rest = self.pieces[k].scaled(&(Rational::one() - fraction));
                self.pieces[k] = rest;
                part
            }
            Holder::Pool => {
                let c = self.pool.get(p).cloned().unwrap_or_else(Rational::zero);
                let amount = &c * fraction;
                let left = c - &amount;
                if left.is_zero() {
                    self.pool.remove(p);
                } else {
                    self.pool.insert(p.clone(), left);
                }
                Piece {
                    poly: SparsePolynomial::monomial(amount.clone(), p.clone()),
                    prov: [(Source::Monomial(p.clone()), amount)]
                        .into_iter()
                        .collect(),
                }
            }
        }
    }

    /// Cancels opposite-sign contributions at `p` until all agree with the total.
    fn resolve(&mut self, p: &Exponent) {
        loop {
            let mut neg: Option<(Holder, Rational)> = None;
            let mut pos: Option<(Holder, Rational)> = None;
            for (k, piece) in self.pieces.iter().enumerate() {
                let c = piece.poly.coefficient(p);
                if c.is_negative() && neg.is_none() {
                    neg = Some((Holder::Piece(k), -c));
                } else if c.is_positive() && pos.is_none() {
                    pos = Some((Holder::Piece(k), c));
                }
            }
            if pos.is_none() {
                if let Some(c) = self.pool.get(p) {
                    pos = Some((Holder::Pool, c.clone()));
                }
            }
            let (Some((x, e)), Some((y, c))) = (neg, pos) else {
                break;
            };
            let (zx, zy) = if c >= e {
                let theta = &e / &c;
                (self.take(x, p, &Rational::one()), self.take(y, p, &theta))
            } else {
                let theta = &c / &e;
                (self.take(x, p, &theta), self.take(y, p, &Rational::one()))
            };
            let mut z = zx;
            z.add(&zy);
            debug_assert!(z.poly.coefficient(p).is_zero());
            self.pieces.retain(|pc| !pc.poly.is_zero());
            self.push(z);
        }
        // fully absorbed pieces may have lost their non-square term
        let (keep, spill): (Vec<Piece>, Vec<Piece>) = std::mem::take(&mut self.pieces)
            .into_iter()
            .partition(|pc| pc.non_square().is_some());
        self.pieces = keep;
        for pc in spill {
            self.to_pool(pc);
        }
        debug_assert!(self.consistent());
    }

    fn consistent(&self) -> bool {
        let mut sum = SparsePolynomial::zero(self.nvars);
        for pc in &self.pieces {
            sum = &sum + &pc.poly;
        }
        for (e, c) in &self.pool {
            sum.add_term(e.clone(), c.clone());
        }
        sum == self.total
    }
}

/// Merges binomial squares and monomial squares into banana polynomials
/// plus a monomial-square remainder, with the same total sum.
///
/// Squares are folded in lexicographic order of their cross-term exponent.
pub fn merge_squares_to_bananas(
    squares: &[BinomialSquare],
    monos: &[MonomialSquare],
) -> (Vec<BananaPolynomial>, Vec<MonomialSquare>) {
    let nvars = squares
        .first()
        .map(BinomialSquare::nvars)
        .or_else(|| monos.first().map(|m| m.w.nvars()))
        .unwrap_or(0);
    let mut m = Merger {
        nvars,
        pieces: Vec::new(),
        pool: BTreeMap::new(),
        total: SparsePolynomial::zero(nvars),
    };
    for mono in monos {
        m.total.add_term(mono.w.clone(), mono.c.clone());
        *m.pool.entry(mono.w.clone()).or_insert_with(Rational::zero) += &mono.c;
    }
    let mut order: Vec<usize> = (0..squares.len()).collect();
    order.sort_by_key(|&i| (squares[i].middle(), i));
    for i in order {
        let s = &squares[i];
        let poly = s.expand();
        m.total = &m.total + &poly;
        m.push(Piece {
            poly,
            prov: [(Source::Square(i), Rational::one())].into_iter().collect(),
        });
        for p in [s.u.scaled(2), s.v.scaled(2), s.middle()] {
            m.resolve(&p);
        }
    }
    // one banana per inner point
    let mut by_beta: BTreeMap<Exponent, Piece> = BTreeMap::new();
    for pc in m.pieces {
        let beta = pc.non_square().expect("pieces keep a non-square term");
        match by_beta.get_mut(&beta) {
            Some(acc) => acc.add(&pc),
            None => {
                by_beta.insert(beta, pc);
            }
        }
    }
    let bananas = by_beta
        .into_iter()
        .map(|(beta, pc)| {
            let d = -pc.poly.coefficient(&beta);
            let positive_terms = pc
                .poly
                .terms()
                .filter(|(e, _)| **e != beta)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect();
            BananaPolynomial {
                positive_terms,
                beta,
                d,
                provenance: pc
                    .prov
                    .into_iter()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(k, v)| (v, k))
                    .collect(),
            }
        })
        .collect();
    let rest = m
        .pool
        .into_iter()
        .filter(|(_, c)| c.is_positive())
        .map(|(w, c)| MonomialSquare { c, w })
        .collect();
    (bananas, rest)
}

/// Moves remainder mass into bananas that already have a positive term at
/// the same point, which only adds slack to them.
fn feed_bananas(
    bananas: &mut [BananaPolynomial],
    rest: Vec<MonomialSquare>,
) -> Vec<MonomialSquare> {
    let mut left = Vec::new();
    for m in rest {
        let takers: Vec<usize> = (0..bananas.len())
            .filter(|&i| bananas[i].positive_terms.contains_key(&m.w))
            .collect();
        if takers.is_empty() {
            left.push(m);
            continue;
        }
        let share = &m.c / Rational::from_integer(takers.len().into());
        for i in takers {
            *bananas[i].positive_terms.get_mut(&m.w).unwrap() += &share;
            bananas[i]
                .provenance
                .push((share.clone(), Source::Monomial(m.w.clone())));
        }
    }
    left
}

/// Splits a banana into nonnegative circuits on its own support.
pub fn banana_to_circuits(
    b: &BananaPolynomial,
    tol: f64,
) -> Result<(Vec<CircuitPolynomial>, Vec<MonomialSquare>), SoncError> {
    let f = b.to_polynomial();
    match decide_sonc(&f, tol)? {
        Decision::Sonc { certificate, .. } => Ok((
            certificate.circuit_polynomials(),
            certificate.monomial_squares,
        )),
        other => Err(SoncError::Internal(format!(
            "banana with inner point {} was not certified: {} (slack {:?})",
            b.beta,
            other.status(),
            other.slack()
        ))),
    }
}

fn unscale_circuit(c: &CircuitPolynomial, k: u32) -> Result<CircuitPolynomial, SoncError> {
    let leak = || {
        SoncError::Internal(format!(
            "exponent of {} not divisible by {k}",
            c.to_polynomial()
        ))
    };
    let verts = c
        .trellis()
        .vertices()
        .iter()
        .map(|v| v.divided(k).ok_or_else(leak))
        .collect::<Result<Vec<_>, _>>()?;
    let beta = c.beta().divided(k).ok_or_else(leak)?;
    CircuitPolynomial::new(
        Simplex::new(verts)?,
        c.coeffs().to_vec(),
        beta,
        c.d().clone(),
    )
}

/// Rewrites a list of nonnegative circuits as a certificate whose circuits
/// use only the support of their sum.
pub fn same_support_transform(
    circuits: &[CircuitPolynomial],
    tol: f64,
) -> Result<SoncCertificate, SoncError> {
    let first = circuits.first().ok_or(SoncError::ZeroPolynomial)?;
    let n = first.nvars();
    if n >= MAX_NVARS {
        return Err(SoncError::DeskScaleLimit(format!(
            "{n} variables (limit {})",
            MAX_NVARS - 1
        )));
    }
    let k = 2 * n as u32 + 1;
    let mut f = SparsePolynomial::zero(n);
    for c in circuits {
        if c.nvars() != n {
            return Err(SoncError::DimensionMismatch {
                expected: n,
                found: c.nvars(),
            });
        }
        if !is_nonnegative_circuit(c).is_nonnegative() {
            return Err(SoncError::NotNonnegative);
        }
        let deg = c.to_polynomial().degree() * k as u64;
        if deg > MAX_SCALED_DEGREE {
            return Err(SoncError::DeskScaleLimit(format!(
                "scaled degree {deg} exceeds {MAX_SCALED_DEGREE}"
            )));
        }
        f = &f + &c.to_polynomial();
    }
    if f.is_zero() {
        return Err(SoncError::ZeroPolynomial);
    }
    let (squares, monos) = sonc_to_sosb(circuits, k)?;
    let (mut bananas, rest) = merge_squares_to_bananas(&squares, &monos);
    let rest = feed_bananas(&mut bananas, rest);
    let mut out_circuits = Vec::new();
    let mut out_monos = Vec::new();
    for b in &bananas {
        let (cs, ms) = banana_to_circuits(b, tol)?;
        for c in &cs {
            out_circuits.push(unscale_circuit(c, k)?);
        }
        out_monos.extend(ms);
    }
    out_monos.extend(rest);
    let out_monos = collect_monomials(out_monos)
        .into_iter()
        .map(|m| {
            let w =
                m.w.divided(k)
                    .ok_or_else(|| SoncError::Internal(format!("monomial {} leaked", m.w)))?;
            Ok(MonomialSquare { c: m.c, w })
        })
        .collect::<Result<Vec<_>, SoncError>>()?;
    let cert = SoncCertificate::assemble(&f, out_circuits, out_monos)?;
    if !cert.is_same_support(&f) {
        return Err(SoncError::Internal(
            "support leakage in the transformed certificate".into(),
        ));
    }
    Ok(cert)
}
