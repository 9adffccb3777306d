//! Circuit polynomials and their circuit numbers.
//!
//! A circuit polynomial is `Σ_{a∈A} c_a x^a - d x^β` with `A` a trellis
//! (even vertices of a simplex), `c_a > 0`, and `β` in the relative
//! interior of `conv(A)`. With `β = Σ λ_a a`, its circuit number is
//! `Θ = Π (c_a/λ_a)^{λ_a}` and nonnegativity is decided by `|d| <= Θ`
//! (odd `β`) or `d <= Θ` (even `β`).
//!
//! All decisions here are exact: with `q` the common denominator of the
//! `λ_a`, `Θ^q = Π (c_a/λ_a)^{q λ_a}` is rational, so comparing `|d|^q`
//! against it settles yes/no/boundary without rounding.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::geometry::{barycentric_coordinates, vertices, Barycentrics, Simplex};
use crate::poly::{support_partition, Exponent, SparsePolynomial};
use crate::{rational_to_f64, Rational, SoncError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitPolynomial {
    trellis: Simplex,
    coeffs: Vec<Rational>,
    beta: Exponent,
    d: Rational,
    lambdas: Barycentrics,
}

impl CircuitPolynomial {
    pub fn new(
        trellis: Simplex,
        coeffs: Vec<Rational>,
        beta: Exponent,
        d: Rational,
    ) -> Result<Self, SoncError> {
        if !trellis.is_even() {
            return Err(SoncError::InvalidCircuit(
                "trellis has an odd vertex".into(),
            ));
        }
        if coeffs.len() != trellis.vertices().len() {
            return Err(SoncError::InvalidCircuit(
                "coefficient count differs from vertex count".into(),
            ));
        }
        if coeffs.iter().any(|c| !c.is_positive()) {
            return Err(SoncError::InvalidCircuit(
                "vertex coefficients must be positive".into(),
            ));
        }
        let lambdas = barycentric_coordinates(&trellis, &beta).ok_or_else(|| {
            SoncError::InvalidCircuit(format!(
                "{beta} is not in the relative interior of the trellis"
            ))
        })?;
        Ok(CircuitPolynomial {
            trellis,
            coeffs,
            beta,
            d,
            lambdas,
        })
    }

    pub fn trellis(&self) -> &Simplex {
        &self.trellis
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn beta(&self) -> &Exponent {
        &self.beta
    }

    pub fn d(&self) -> &Rational {
        &self.d
    }

    pub fn lambdas(&self) -> &Barycentrics {
        &self.lambdas
    }

    pub fn nvars(&self) -> usize {
        self.beta.nvars()
    }

    /// Expansion `Σ c_a x^a - d x^β`.
    pub fn to_polynomial(&self) -> SparsePolynomial {
        let mut p = SparsePolynomial::zero(self.nvars());
        for (a, c) in self.trellis.vertices().iter().zip(&self.coeffs) {
            p.add_term(a.clone(), c.clone());
        }
        p.add_term(self.beta.clone(), -self.d.clone());
        p
    }

    /// The circuit `g(x_1^k, ..., x_n^k)`; barycentric weights are unchanged.
    pub fn power_substitute(&self, k: u32) -> CircuitPolynomial {
        CircuitPolynomial {
            trellis: self.trellis.scaled(k),
            coeffs: self.coeffs.clone(),
            beta: self.beta.scaled(k),
            d: self.d.clone(),
            lambdas: self.lambdas.clone(),
        }
    }

    pub fn verdict(&self) -> Verdict {
        is_nonnegative_circuit(self)
    }

    /// Same circuit with inner coefficient replaced.
    pub fn with_d(&self, d: Rational) -> CircuitPolynomial {
        CircuitPolynomial { d, ..self.clone() }
    }

    /// Same circuit with all vertex coefficients multiplied by `t > 0`.
    pub fn with_scaled_coeffs(&self, t: &Rational) -> CircuitPolynomial {
        assert!(t.is_positive());
        CircuitPolynomial {
            coeffs: self.coeffs.iter().map(|c| c * t).collect(),
            ..self.clone()
        }
    }

    /// `(q, Θ^q)` with `q` the common denominator of the barycentric weights.
    pub(crate) fn theta_power(&self) -> (u32, Rational) {
        theta_power(&self.coeffs, &self.lambdas)
    }
}

pub(crate) fn theta_power(coeffs: &[Rational], lambdas: &Barycentrics) -> (u32, Rational) {
    let q = lambdas.common_denominator();
    let qn = q.to_u32().expect("barycentric denominator too large");
    let mut acc = Rational::one();
    for (c, l) in coeffs.iter().zip(&lambdas.weights) {
        let p = (l * Rational::from_integer(q.clone())).to_integer();
        let base = c / l;
        acc *= num_traits::pow(base, p.to_usize().unwrap());
    }
    (qn, acc)
}

/// Outcome of [`classify_circuit`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CircuitClass {
    Circuit(CircuitPolynomial),
    /// Every term is an even monomial with a positive coefficient.
    MonomialSquares,
    NotCircuit(String),
}

/// Recognizes `f` as a circuit polynomial: its support is the vertex set of
/// an even simplex with positive coefficients plus one point in the
/// relative interior.
pub fn classify_circuit(f: &SparsePolynomial) -> Result<CircuitClass, SoncError> {
    let parts = support_partition(f)?;
    if parts.gamma.is_empty() && vertices(&f.support()).len() == f.len() {
        return Ok(CircuitClass::MonomialSquares);
    }
    let verts = vertices(&f.support());
    let inner: Vec<&Exponent> = f
        .terms()
        .map(|(e, _)| e)
        .filter(|e| !verts.contains(e))
        .collect();
    if inner.len() != 1 {
        return Ok(CircuitClass::NotCircuit(format!(
            "expected exactly one non-vertex term, found {}",
            inner.len()
        )));
    }
    if let Some(v) = verts
        .iter()
        .find(|v| !v.is_even() || !f.coefficient(v).is_positive())
    {
        return Ok(CircuitClass::NotCircuit(format!(
            "vertex {v} is not an even point with positive coefficient"
        )));
    }
    let trellis = match Simplex::new(verts.clone()) {
        Ok(s) => s,
        Err(_) => {
            return Ok(CircuitClass::NotCircuit(
                "vertices are affinely dependent".into(),
            ))
        }
    };
    let beta = inner[0].clone();
    let coeffs = verts.iter().map(|v| f.coefficient(v)).collect();
    let d = -f.coefficient(&beta);
    match CircuitPolynomial::new(trellis, coeffs, beta, d) {
        Ok(c) => Ok(CircuitClass::Circuit(c)),
        Err(e) => Ok(CircuitClass::NotCircuit(e.to_string())),
    }
}

/// Circuit number `Θ` with an exact ledger.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitNumber {
    /// Common denominator `q` of the barycentric weights.
    pub root_degree: u32,
    /// `Θ^q`, always rational.
    pub power: Rational,
    /// `Θ` itself when it is rational.
    pub exact: Option<Rational>,
    /// Rational enclosure `lower <= Θ <= upper`.
    pub lower: Rational,
    pub upper: Rational,
    pub value: f64,
}

/// Computes `Θ` exactly when rational, otherwise to an enclosure of width
/// at most `2^-precision`.
pub fn circuit_number(c: &CircuitPolynomial, precision: u32) -> CircuitNumber {
    let (q, power) = c.theta_power();
    let log_theta: f64 = c
        .coeffs
        .iter()
        .zip(&c.lambdas.weights)
        .map(|(ci, li)| {
            let l = rational_to_f64(li);
            l * (log_rational(ci) - l.ln())
        })
        .sum();
    if let Some(root) = rational_nth_root(&power, q) {
        return CircuitNumber {
            root_degree: q,
            power,
            value: rational_to_f64(&root),
            lower: root.clone(),
            upper: root.clone(),
            exact: Some(root),
        };
    }
    let (lower, upper) = root_enclosure(&power, q, log_theta.exp(), precision);
    CircuitNumber {
        root_degree: q,
        power,
        exact: None,
        value: rational_to_f64(&((&lower + &upper) / Rational::from_integer(2.into()))),
        lower,
        upper,
    }
}

pub(crate) fn log_rational(r: &Rational) -> f64 {
    let n = r.numer().abs();
    let d = r.denom();
    let ln_big = |x: &BigInt| {
        let bits = x.bits();
        if bits < 1000 {
            x.to_f64().unwrap().ln()
        } else {
            let shift = bits - 60;
            let top: BigInt = x >> shift;
            top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
        }
    };
    ln_big(&n) - ln_big(d)
}

/// Exact rational `q`-th root of a positive rational, if it exists.
pub(crate) fn rational_nth_root(x: &Rational, q: u32) -> Option<Rational> {
    if !x.is_positive() {
        return None;
    }
    let rn = x.numer().nth_root(q);
    let rd = x.denom().nth_root(q);
    if num_traits::pow(rn.clone(), q as usize) == *x.numer()
        && num_traits::pow(rd.clone(), q as usize) == *x.denom()
    {
        Some(Rational::new(rn, rd))
    } else {
        None
    }
}

fn root_enclosure(power: &Rational, q: u32, guess: f64, precision: u32) -> (Rational, Rational) {
    let qs = q as usize;
    let below = |y: &Rational| num_traits::pow(y.clone(), qs) < *power;
    let mut lo = crate::f64_to_rational(guess * (1.0 - 1e-9), 0.0);
    let mut hi = crate::f64_to_rational(guess * (1.0 + 1e-9), 0.0);
    while !lo.is_positive() || !below(&lo) {
        lo = if lo.is_positive() {
            lo / Rational::from_integer(2.into())
        } else {
            Rational::new(1.into(), 1024.into())
        };
    }
    while below(&hi) {
        hi *= Rational::from_integer(2.into());
    }
    let width = Rational::new(BigInt::one(), BigInt::one() << precision);
    let two = Rational::from_integer(2.into());
    while &hi - &lo > width {
        let mid = (&lo + &hi) / &two;
        if below(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Yes,
    No,
    Boundary,
}

impl Verdict {
    /// `Yes` or `Boundary`.
    pub fn is_nonnegative(self) -> bool {
        !matches!(self, Verdict::No)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Boundary => "boundary",
        }
    }
}

/// Exact nonnegativity test against the circuit number.
pub fn is_nonnegative_circuit(c: &CircuitPolynomial) -> Verdict {
    if c.d.is_zero() || (c.beta.is_even() && c.d.is_negative()) {
        return Verdict::Yes;
    }
    let (q, power) = c.theta_power();
    let lhs = num_traits::pow(c.d.abs(), q as usize);
    match lhs.cmp(&power) {
        std::cmp::Ordering::Less => Verdict::Yes,
        std::cmp::Ordering::Equal => Verdict::Boundary,
        std::cmp::Ordering::Greater => Verdict::No,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn e(v: &[u32]) -> Exponent {
        Exponent(v.to_vec())
    }

    fn circuit(text: &str, n: usize) -> CircuitPolynomial {
        match classify_circuit(&parse_polynomial(text, n).unwrap()).unwrap() {
            CircuitClass::Circuit(c) => c,
            other => panic!("{text}: {other:?}"),
        }
    }

    #[test]
    fn classify_examples() {
        let c = circuit("x^2 - 2*x + 1", 1);
        assert_eq!(c.trellis().vertices(), &[e(&[0]), e(&[2])]);
        assert_eq!(c.coeffs(), &[q(1, 1), q(1, 1)]);
        assert_eq!(c.beta(), &e(&[1]));
        assert_eq!(c.d(), &q(2, 1));
        assert_eq!(c.lambdas().weights, vec![q(1, 2), q(1, 2)]);

        let m = circuit("x^4*y^2 + x^2*y^4 + 1 - 3*x^2*y^2", 2);
        assert_eq!(m.beta(), &e(&[2, 2]));
        assert_eq!(m.d(), &q(3, 1));
        assert_eq!(m.lambdas().weights, vec![q(1, 3); 3]);

        let f = parse_polynomial("x^4 + y^4 + 1 - x^2 - y^2", 2).unwrap();
        assert!(matches!(
            classify_circuit(&f).unwrap(),
            CircuitClass::NotCircuit(_)
        ));
        let g = parse_polynomial("x^2 + 1", 1).unwrap();
        assert_eq!(classify_circuit(&g).unwrap(), CircuitClass::MonomialSquares);
        // positive even inner term: a circuit with negative d
        let h = circuit("x^4 + 1 + x^2", 1);
        assert_eq!(h.d(), &q(-1, 1));
        assert_eq!(h.verdict(), Verdict::Yes);
    }

    #[test]
    fn circuit_numbers_exact() {
        let c = circuit("x^2 - 2*x + 1", 1);
        assert_eq!(circuit_number(&c, 64).exact, Some(q(2, 1)));
        let m = circuit("x^4*y^2 + x^2*y^4 + 1 - 3*x^2*y^2", 2);
        assert_eq!(circuit_number(&m, 64).exact, Some(q(3, 1)));
        let c = circuit("8*x^2 + 2 - x", 1);
        assert_eq!(circuit_number(&c, 64).exact, Some(q(8, 1)));
    }

    #[test]
    fn irrational_circuit_number_enclosure() {
        // c = (1, 2), λ = (1/2, 1/2): Θ = 2·sqrt(2)
        let c = circuit("2*x^2 + 1 - x", 1);
        let t = circuit_number(&c, 80);
        assert!(t.exact.is_none());
        let width = &t.upper - &t.lower;
        assert!(width <= Rational::new(1.into(), BigInt::one() << 80));
        assert!((t.value - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        assert!(num_traits::pow(t.lower.clone(), 2) < q(8, 1));
        assert!(num_traits::pow(t.upper.clone(), 2) > q(8, 1));
    }

    #[test]
    fn nonnegativity_examples() {
        assert_eq!(circuit("x^2 - 2*x + 1", 1).verdict(), Verdict::Boundary);
        assert_eq!(
            circuit("x^4*y^2 + x^2*y^4 + 1 - 3*x^2*y^2", 2).verdict(),
            Verdict::Boundary
        );
        assert_eq!(circuit("x^2 - 3*x + 1", 1).verdict(), Verdict::No);
        assert_eq!(circuit("x^2 + 2*x + 1", 1).verdict(), Verdict::Boundary);
        assert_eq!(circuit("x^2 + 3*x + 1", 1).verdict(), Verdict::No);
        assert_eq!(circuit("x^4 + 1 - 2*x^2", 1).verdict(), Verdict::Boundary);
        assert_eq!(circuit("x^4 + 1 - 2.0001*x^2", 1).verdict(), Verdict::No);
    }

    #[test]
    fn zero_inner_coefficient_is_nonnegative() {
        let s = Simplex::new(vec![e(&[0]), e(&[2])]).unwrap();
        let c = CircuitPolynomial::new(s, vec![q(2, 1), q(2, 1)], e(&[1]), q(0, 1)).unwrap();
        assert_eq!(c.verdict(), Verdict::Yes);
        assert_eq!(c.to_polynomial(), parse_polynomial("2*x^2 + 2", 1).unwrap());
    }

    #[test]
    fn invalid_circuits_rejected() {
        let s = Simplex::new(vec![e(&[0]), e(&[3])]).unwrap();
        assert!(CircuitPolynomial::new(s, vec![q(1, 1), q(1, 1)], e(&[1]), q(1, 1)).is_err());
        let s = Simplex::new(vec![e(&[0]), e(&[2])]).unwrap();
        assert!(
            CircuitPolynomial::new(s.clone(), vec![q(1, 1), q(-1, 1)], e(&[1]), q(1, 1)).is_err()
        );
        assert!(CircuitPolynomial::new(s, vec![q(1, 1), q(1, 1)], e(&[2]), q(1, 1)).is_err());
    }
}
