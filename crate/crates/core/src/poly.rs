//! Exact sparse multivariate polynomials over the rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Exponent`], so iteration is
//! lexicographic and every serialization is deterministic. Zero
//! coefficients are never stored.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::{Rational, SoncError};

/// Exponent vector of a monomial, one entry per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Exponent(pub Vec<u32>);

impl Exponent {
    pub fn zero(nvars: usize) -> Self {
        Exponent(vec![0; nvars])
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    /// All entries even, i.e. the point lies in (2N)^n.
    pub fn is_even(&self) -> bool {
        self.0.iter().all(|e| e % 2 == 0)
    }

    pub fn scaled(&self, k: u32) -> Exponent {
        Exponent(self.0.iter().map(|&e| e * k).collect())
    }

    /// Componentwise division by `k`, if every entry is divisible.
    pub fn divided(&self, k: u32) -> Option<Exponent> {
        if k == 0 || self.0.iter().any(|e| e % k != 0) {
            return None;
        }
        Some(Exponent(self.0.iter().map(|&e| e / k).collect()))
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Integer midpoint `(self + other) / 2`, if it is a lattice point.
    pub fn midpoint(&self, other: &Exponent) -> Option<Exponent> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            let s = a + b;
            if s % 2 != 0 {
                return None;
            }
            out.push(s / 2);
        }
        Some(Exponent(out))
    }

    /// `2 * self - other` if nonnegative; the partner of `other` around `self`.
    pub fn reflect(&self, other: &Exponent) -> Option<Exponent> {
        let mut out = Vec::with_capacity(self.0.len());
        for (p, o) in self.0.iter().zip(&other.0) {
            let twice = 2 * p;
            if *o > twice {
                return None;
            }
            out.push(twice - o);
        }
        Some(Exponent(out))
    }

    pub fn as_rationals(&self) -> Vec<Rational> {
        self.0
            .iter()
            .map(|&e| Rational::from_integer(BigInt::from(e)))
            .collect()
    }
}

impl From<Vec<u32>> for Exponent {
    fn from(v: Vec<u32>) -> Self {
        Exponent(v)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Multivariate polynomial with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePolynomial {
    nvars: usize,
    terms: BTreeMap<Exponent, Rational>,
}

impl SparsePolynomial {
    pub fn zero(nvars: usize) -> Self {
        SparsePolynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(coef: Rational, exp: Exponent) -> Self {
        let mut p = SparsePolynomial::zero(exp.nvars());
        p.add_term(exp, coef);
        p
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, merging like terms.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self, SoncError>
    where
        I: IntoIterator<Item = (Exponent, Rational)>,
    {
        let mut p = SparsePolynomial::zero(nvars);
        for (e, c) in terms {
            if e.nvars() != nvars {
                return Err(SoncError::DimensionMismatch {
                    expected: nvars,
                    found: e.nvars(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn term_map(&self) -> &BTreeMap<Exponent, Rational> {
        &self.terms
    }

    pub fn coefficient(&self, e: &Exponent) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> Vec<Exponent> {
        self.terms.keys().cloned().collect()
    }

    pub fn degree(&self) -> u64 {
        self.terms.keys().map(Exponent::degree).max().unwrap_or(0)
    }

    /// Adds `coef * x^exp` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, exp: Exponent, coef: Rational) {
        debug_assert_eq!(exp.nvars(), self.nvars);
        if coef.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + coef;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &SparsePolynomial, scale: &Rational) {
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c * scale);
        }
    }

    pub fn scale(&self, s: &Rational) -> SparsePolynomial {
        let mut out = SparsePolynomial::zero(self.nvars);
        if s.is_zero() {
            return out;
        }
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), c * s);
        }
        out
    }

    /// Substitutes `x_i -> x_i^k` for every variable.
    pub fn power_substitute(&self, k: u32) -> SparsePolynomial {
        assert!(k >= 1, "substitution power must be positive");
        SparsePolynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.scaled(k), c.clone()))
                .collect(),
        }
    }

    /// Inverse of [`power_substitute`](Self::power_substitute); `None` unless
    /// every exponent is divisible by `k`.
    pub fn power_unsubstitute(&self, k: u32) -> Option<SparsePolynomial> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            terms.insert(e.divided(k)?, c.clone());
        }
        Some(SparsePolynomial {
            nvars: self.nvars,
            terms,
        })
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> Rational {
        self.terms
            .values()
            .map(|c| c.abs())
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn evaluate_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let m: f64 =
                    e.0.iter()
                        .zip(x)
                        .map(|(&k, &xi)| xi.powi(k as i32))
                        .product();
                crate::rational_to_f64(c) * m
            })
            .sum()
    }

    pub fn to_json(&self) -> PolynomialJson {
        PolynomialJson {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    coef: c.to_string(),
                    exp: e.0.clone(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &PolynomialJson) -> Result<Self, SoncError> {
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            terms.push((Exponent(t.exp.clone()), parse_rational(&t.coef)?));
        }
        SparsePolynomial::from_terms(j.nvars, terms)
    }
}

impl Add for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn add(self, rhs: &SparsePolynomial) -> SparsePolynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &Rational::one());
        out
    }
}

impl Sub for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn sub(self, rhs: &SparsePolynomial) -> SparsePolynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &-Rational::one());
        out
    }
}

impl Neg for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn neg(self) -> SparsePolynomial {
        self.scale(&-Rational::one())
    }
}

/// Serializes in the text grammar with variables `x1..xn`, highest
/// exponents (lexicographically) first.
impl fmt::Display for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mut factors: Vec<String> = Vec::new();
            let constant = e.0.iter().all(|&k| k == 0);
            if !mag.is_one() || constant {
                factors.push(mag.to_string());
            }
            for (i, &k) in e.0.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(format!("x{}", i + 1)),
                    _ => factors.push(format!("x{}^{}", i + 1, k)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// JSON form `{"nvars": n, "terms": [{"coef": "p/q", "exp": [..]}, ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub nvars: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub coef: String,
    pub exp: Vec<u32>,
}

/// Λ/Γ split of the support.
///
/// `gamma` stores `d_b = -(coefficient)`, so that
/// `f = Σ_Λ c_a x^a - Σ_Γ d_b x^b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportPartition {
    pub lambda: BTreeMap<Exponent, Rational>,
    pub gamma: BTreeMap<Exponent, Rational>,
}

pub fn support_partition(f: &SparsePolynomial) -> Result<SupportPartition, SoncError> {
    if f.is_zero() {
        return Err(SoncError::ZeroPolynomial);
    }
    let mut lambda = BTreeMap::new();
    let mut gamma = BTreeMap::new();
    for (e, c) in f.terms() {
        if e.is_even() && c.is_positive() {
            lambda.insert(e.clone(), c.clone());
        } else {
            gamma.insert(e.clone(), -c.clone());
        }
    }
    Ok(SupportPartition { lambda, gamma })
}

/// Exact check that `Σ parts == f`.
pub fn verify_sum(parts: &[SparsePolynomial], f: &SparsePolynomial) -> Result<bool, SoncError> {
    Ok(residual(parts, f)?.is_zero())
}

/// `f - Σ parts`.
pub fn residual(
    parts: &[SparsePolynomial],
    f: &SparsePolynomial,
) -> Result<SparsePolynomial, SoncError> {
    let mut r = f.clone();
    for p in parts {
        if p.nvars() != f.nvars() {
            return Err(SoncError::DimensionMismatch {
                expected: f.nvars(),
                found: p.nvars(),
            });
        }
        r.add_assign_scaled(p, &-Rational::one());
    }
    Ok(r)
}

/// Parses `"p/q"`, an integer, or a decimal literal (converted exactly).
pub fn parse_rational(s: &str) -> Result<Rational, SoncError> {
    let s = s.trim();
    let bad = || SoncError::Parse {
        position: 0,
        message: format!("invalid rational literal {s:?}"),
    };
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let value = parse_unsigned_decimal(body).ok_or_else(bad)?;
    Ok(if neg { -value } else { value })
}

fn parse_unsigned_decimal(s: &str) -> Option<Rational> {
    if s.is_empty() {
        return None;
    }
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = digits.parse().ok()?;
    let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
    Some(Rational::new(num, den))
}

/// Parses the text grammar
///
/// ```text
/// poly   := term (('+'|'-') term)*
/// term   := coeff ('*' factor)* | factor ('*' factor)*
/// factor := var ('^' nat)?
/// var    := 'x' nat            (x, y, z accepted when nvars <= 3)
/// ```
///
/// A leading sign is allowed. Like terms are merged.
pub fn parse_polynomial(text: &str, nvars: usize) -> Result<SparsePolynomial, SoncError> {
    if nvars == 0 {
        return Err(SoncError::Parse {
            position: 0,
            message: "nvars must be positive".into(),
        });
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        nvars,
    };
    p.polynomial()
}

/// Largest variable index mentioned in `text` (aliases x,y,z count as 1,2,3).
pub fn infer_nvars(text: &str) -> usize {
    let b = text.as_bytes();
    let mut best = 0;
    let mut i = 0;
    while i < b.len() {
        match b[i] {
            b'x' => {
                let start = i + 1;
                let mut j = start;
                while j < b.len() && b[j].is_ascii_digit() {
                    j += 1;
                }
                let idx = if j > start {
                    text[start..j].parse().unwrap_or(0)
                } else {
                    1
                };
                best = best.max(idx);
                i = j;
            }
            b'y' => {
                best = best.max(2);
                i += 1;
            }
            b'z' => {
                best = best.max(3);
                i += 1;
            }
            _ => i += 1,
        }
    }
    best.max(1)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn err(&self, message: impl Into<String>) -> SoncError {
        SoncError::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn polynomial(&mut self) -> Result<SparsePolynomial, SoncError> {
        let mut poly = SparsePolynomial::zero(self.nvars);
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                1
            }
            None => return Err(self.err("empty polynomial")),
            _ => 1,
        };
        loop {
            let (exp, coef) = self.term()?;
            let coef = if sign < 0 { -coef } else { coef };
            poly.add_term(exp, coef);
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1;
                }
                Some(c) => return Err(self.err(format!("unexpected character {:?}", c as char))),
            }
        }
        Ok(poly)
    }

    fn term(&mut self) -> Result<(Exponent, Rational), SoncError> {
        let mut exp = vec![0u32; self.nvars];
        let mut coef = Rational::one();
        let first = self.peek().ok_or_else(|| self.err("expected a term"))?;
        if first.is_ascii_digit() || first == b'.' {
            coef = self.coefficient()?;
        } else {
            self.factor(&mut exp)?;
        }
        while self.peek() == Some(b'*') {
            self.pos += 1;
            self.factor(&mut exp)?;
        }
        Ok((Exponent(exp), coef))
    }

    fn coefficient(&mut self) -> Result<Rational, SoncError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
        {
            self.pos += 1;
        }
        let mut text = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
        // optional "/den"
        let save = self.pos;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let ds = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if ds == self.pos {
                return Err(self.err("expected denominator"));
            }
            text.push('/');
            text.push_str(&String::from_utf8_lossy(&self.src[ds..self.pos]));
        } else {
            self.pos = save;
        }
        parse_rational(&text).map_err(|_| SoncError::Parse {
            position: start,
            message: format!("invalid coefficient {text:?}"),
        })
    }

    fn factor(&mut self, exp: &mut [u32]) -> Result<(), SoncError> {
        let at = self.pos;
        let var = match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                match self.natural_opt()? {
                    Some(i) => i,
                    None if self.nvars <= 3 => 1,
                    None => return Err(self.err("expected variable index after 'x'")),
                }
            }
            Some(b'y') if self.nvars <= 3 => {
                self.pos += 1;
                2
            }
            Some(b'z') if self.nvars <= 3 => {
                self.pos += 1;
                3
            }
            _ => return Err(self.err("expected a variable")),
        };
        if var == 0 || var as usize > self.nvars {
            return Err(SoncError::VariableIndex {
                position: at,
                index: var as usize,
                nvars: self.nvars,
            });
        }
        let mut power = 1u32;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            if self.peek() == Some(b'-') {
                return Err(SoncError::NegativeExponent { position: self.pos });
            }
            power = self
                .natural_opt()?
                .ok_or_else(|| self.err("expected exponent after '^'"))?;
        }
        exp[var as usize - 1] += power;
        Ok(())
    }

    fn natural_opt(&mut self) -> Result<Option<u32>, SoncError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Ok(None);
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        s.parse().map(Some).map_err(|_| SoncError::Parse {
            position: start,
            message: format!("integer {s} out of range"),
        })
    }
}
