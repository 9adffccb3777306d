//! Same-support certificates for sums of nonnegative circuit polynomials (SONC).
//!
//! The crate decides whether a sparse polynomial is SONC by a relative
//! entropy feasibility program posed only on the polynomial's own support,
//! and builds certificates that are re-checked with exact rational
//! arithmetic:
//!
//! - [`poly`]: exact sparse polynomials, parsing, Λ/Γ support split;
//! - [`geometry`]: hull vertices, barycentric coordinates, cover simplices;
//! - [`circuit`]: circuit polynomials, circuit numbers, exact nonnegativity;
//! - [`mediated`]: mediated sets, maximal mediated sets, H-trellises;
//! - [`sosb`]: binomial-square decompositions of nonnegative circuits;
//! - [`rep`]: the feasibility program, its solver and certificate extraction;
//! - [`samesupport`]: turning any SONC decomposition into a same-support one;
//! - [`cli`]: the command-line front end used by the `sonc` binary.
//!
//! Runnable walkthroughs live in this crate's `examples/` directory.

pub mod certificate;
pub mod circuit;
pub mod cli;
pub mod geometry;
pub mod lp;
pub mod mediated;
pub mod poly;
pub mod rep;
pub mod samesupport;
pub mod sosb;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

pub use certificate::{CertificateJson, SoncCertificate};
pub use circuit::{
    circuit_number, classify_circuit, is_nonnegative_circuit, CircuitClass, CircuitNumber,
    CircuitPolynomial, Verdict,
};
pub use geometry::{
    barycentric_coordinates, enumerate_covers, necessary_conditions, vertices, Barycentrics,
    CoverSet, NecessaryConditions, Simplex,
};
pub use mediated::{
    averages, is_h_trellis, is_mediated_set, maximal_mediated_set, LatticeSet, MediatedSet,
};
pub use poly::{
    parse_polynomial, support_partition, verify_sum, Exponent, SparsePolynomial, SupportPartition,
};
pub use rep::{
    build_rep, decide_sonc, extract_certificate, solve_rep, Decision, RepInstance, RepSolution,
    RepStatus,
};
pub use samesupport::{
    banana_to_circuits, merge_squares_to_bananas, same_support_transform, BananaPolynomial,
};
pub use sosb::{
    circuit_to_sosb, mediation_tree, sonc_to_sosb, BinomialSquare, MediationTree, MonomialSquare,
};

/// Exact rational number used for every coefficient.
pub type Rational = num_rational::BigRational;

/// Default numerical tolerance of the feasibility solver.
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SoncError {
    #[error("syntax error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("negative exponent at position {position}")]
    NegativeExponent { position: usize },
    #[error("variable x{index} at position {position} exceeds nvars = {nvars}")]
    VariableIndex {
        position: usize,
        index: usize,
        nvars: usize,
    },
    #[error("zero polynomial has empty support")]
    ZeroPolynomial,
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid simplex: {0}")]
    InvalidSimplex(String),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("circuit is not nonnegative")]
    NotNonnegative,
    #[error(
        "no mediated witness: {beta} is not in the mediated set (scale the trellis by k >= n)"
    )]
    NoMediatedWitness { beta: Exponent },
    #[error("polynomial is a sum of monomial squares (trivially nonnegative)")]
    TriviallyNonnegative,
    #[error("necessary conditions fail at vertex {vertex}: {reason}")]
    NecessaryConditions { vertex: Exponent, reason: String },
    #[error("uncovered negative term at {beta}")]
    Uncovered { beta: Exponent },
    #[error("solver did not converge after {iterations} iterations (best slack {slack})")]
    NonConvergence { iterations: usize, slack: f64 },
    #[error("desk-scale limit: {0}")]
    DeskScaleLimit(String),
    #[error("SOSB construction failed: {0}")]
    Sosb(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // ratio of huge integers: shift both down first
    let n = r.numer();
    let d = r.denom();
    let shift = n.bits().max(d.bits()).saturating_sub(1000);
    let n2: BigInt = n >> shift;
    let d2: BigInt = d >> shift;
    n2.to_f64().unwrap_or(f64::NAN) / d2.to_f64().unwrap_or(f64::NAN)
}

/// Best rational approximation of `x` with relative error at most `rel_tol`,
/// via continued fractions. `rel_tol = 0` gives the exact binary value.
pub(crate) fn f64_to_rational(x: f64, rel_tol: f64) -> Rational {
    if x == 0.0 || !x.is_finite() {
        return Rational::zero();
    }
    if rel_tol <= 0.0 {
        return Rational::from_float(x).unwrap_or_else(Rational::zero);
    }
    let target = x.abs();
    let (mut h0, mut h1) = (BigInt::from(0), BigInt::from(1));
    let (mut k0, mut k1) = (BigInt::from(1), BigInt::from(0));
    let mut rem = target;
    for _ in 0..64 {
        let a = rem.floor();
        let ab = BigInt::from(a as u64);
        let h2 = &ab * &h1 + &h0;
        let k2 = &ab * &k1 + &k0;
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let approx = h1.to_f64().unwrap() / k1.to_f64().unwrap();
        let frac = rem - a;
        if ((approx - target) / target).abs() <= rel_tol || frac < 1e-300 {
            break;
        }
        rem = 1.0 / frac;
        if !rem.is_finite() || rem > 1e18 {
            break;
        }
    }
    let r = Rational::new(h1, k1);
    if x < 0.0 {
        -r
    } else {
        r
    }
}
