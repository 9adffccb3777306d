//! SONC certificates and their JSON form.
//!
//! A certificate is a list of circuit polynomials plus monomial squares.
//! It is exact when every circuit passes the exact `d <= Θ` check and the
//! parts add up to the target polynomial with zero rational residual.

use serde::{Deserialize, Serialize};

use crate::circuit::{is_nonnegative_circuit, CircuitPolynomial, Verdict};
use crate::geometry::Simplex;
use crate::poly::{parse_rational, residual, support_partition, Exponent, SparsePolynomial};
use crate::sosb::{MonomialSquare, SquareJson};
use crate::{rational_to_f64, SoncError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedCircuit {
    pub circuit: CircuitPolynomial,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoncCertificate {
    pub circuits: Vec<CertifiedCircuit>,
    pub monomial_squares: Vec<MonomialSquare>,
    pub exact: bool,
    /// `f - Σ parts`.
    pub residual: SparsePolynomial,
}

impl SoncCertificate {
    /// Tags every circuit with its exact verdict and checks the sum against `f`.
    pub fn assemble(
        f: &SparsePolynomial,
        circuits: Vec<CircuitPolynomial>,
        monomial_squares: Vec<MonomialSquare>,
    ) -> Result<Self, SoncError> {
        let circuits: Vec<CertifiedCircuit> = circuits
            .into_iter()
            .map(|c| CertifiedCircuit {
                verdict: is_nonnegative_circuit(&c),
                circuit: c,
            })
            .collect();
        let mut parts: Vec<SparsePolynomial> =
            circuits.iter().map(|c| c.circuit.to_polynomial()).collect();
        parts.extend(monomial_squares.iter().map(MonomialSquare::to_polynomial));
        let residual = residual(&parts, f)?;
        let exact = residual.is_zero() && circuits.iter().all(|c| c.verdict.is_nonnegative());
        Ok(SoncCertificate {
            circuits,
            monomial_squares,
            exact,
            residual,
        })
    }

    pub fn parts(&self) -> Vec<SparsePolynomial> {
        let mut parts: Vec<SparsePolynomial> = self
            .circuits
            .iter()
            .map(|c| c.circuit.to_polynomial())
            .collect();
        parts.extend(
            self.monomial_squares
                .iter()
                .map(MonomialSquare::to_polynomial),
        );
        parts
    }

    pub fn circuit_polynomials(&self) -> Vec<CircuitPolynomial> {
        self.circuits.iter().map(|c| c.circuit.clone()).collect()
    }

    /// Every inner point in `Γ(f)` and every vertex in `Λ(f)`; monomial
    /// squares inside `Λ(f)`.
    pub fn is_same_support(&self, f: &SparsePolynomial) -> bool {
        let Ok(part) = support_partition(f) else {
            return self.circuits.is_empty() && self.monomial_squares.is_empty();
        };
        self.circuits.iter().all(|c| {
            part.gamma.contains_key(c.circuit.beta())
                && c.circuit
                    .trellis()
                    .vertices()
                    .iter()
                    .all(|a| part.lambda.contains_key(a))
        }) && self
            .monomial_squares
            .iter()
            .all(|m| part.lambda.contains_key(&m.w))
    }

    pub fn to_json(&self, status: &str, slack: Option<f64>) -> CertificateJson {
        CertificateJson {
            status: status.to_string(),
            slack,
            reason: None,
            circuits: self.circuits.iter().map(circuit_json).collect(),
            monomial_squares: self
                .monomial_squares
                .iter()
                .map(|m| MonomialJson {
                    coef: m.c.to_string(),
                    exp: m.w.0.clone(),
                })
                .collect(),
            squares: Vec::new(),
            exact: self.exact,
            residual_norm: rational_to_f64(&self.residual.l1_norm()),
        }
    }
}

fn circuit_json(c: &CertifiedCircuit) -> CircuitJson {
    CircuitJson {
        vertices: c
            .circuit
            .trellis()
            .vertices()
            .iter()
            .map(|v| v.0.clone())
            .collect(),
        coeffs: c.circuit.coeffs().iter().map(ToString::to_string).collect(),
        beta: c.circuit.beta().0.clone(),
        d: c.circuit.d().to_string(),
        theta_check: match c.verdict {
            Verdict::Yes | Verdict::Boundary => "exact_pass",
            Verdict::No => "fail",
        }
        .to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitJson {
    pub vertices: Vec<Vec<u32>>,
    pub coeffs: Vec<String>,
    pub beta: Vec<u32>,
    pub d: String,
    #[serde(default)]
    pub theta_check: String,
}

impl CircuitJson {
    pub fn to_circuit(&self) -> Result<CircuitPolynomial, SoncError> {
        let s = Simplex::new(self.vertices.iter().cloned().map(Exponent).collect())?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| parse_rational(c))
            .collect::<Result<Vec<_>, _>>()?;
        CircuitPolynomial::new(
            s,
            coeffs,
            Exponent(self.beta.clone()),
            parse_rational(&self.d)?,
        )
    }

    pub fn from_circuit(c: &CircuitPolynomial) -> Self {
        circuit_json(&CertifiedCircuit {
            circuit: c.clone(),
            verdict: is_nonnegative_circuit(c),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialJson {
    pub coef: String,
    pub exp: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub status: String,
    pub slack: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default)]
    pub circuits: Vec<CircuitJson>,
    #[serde(default)]
    pub monomial_squares: Vec<MonomialJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub squares: Vec<SquareJson>,
    #[serde(default)]
    pub exact: bool,
    #[serde(default)]
    pub residual_norm: f64,
}

impl CertificateJson {
    /// Rebuilds the certificate from its parts and re-checks it against `f`,
    /// ignoring the stored verdicts.
    pub fn recheck(&self, f: &SparsePolynomial) -> Result<SoncCertificate, SoncError> {
        let circuits = self
            .circuits
            .iter()
            .map(CircuitJson::to_circuit)
            .collect::<Result<Vec<_>, _>>()?;
        let monos = self
            .monomial_squares
            .iter()
            .map(|m| MonomialSquare::new(parse_rational(&m.coef)?, Exponent(m.exp.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        for c in &circuits {
            if c.nvars() != f.nvars() {
                return Err(SoncError::DimensionMismatch {
                    expected: f.nvars(),
                    found: c.nvars(),
                });
            }
        }
        SoncCertificate::assemble(f, circuits, monos)
    }
}
