//! Turning an arbitrary SONC decomposition into one that uses only the
//! support of the sum.

use sonc::{
    classify_circuit, parse_polynomial, same_support_transform, CircuitClass, CircuitPolynomial,
    DEFAULT_TOL,
};

fn circuit(text: &str, nvars: usize) -> Result<CircuitPolynomial, sonc::SoncError> {
    match classify_circuit(&parse_polynomial(text, nvars)?)? {
        CircuitClass::Circuit(c) => Ok(c),
        _ => Err(sonc::SoncError::InvalidCircuit(text.into())),
    }
}

fn main() -> Result<(), sonc::SoncError> {
    let lists = [
        vec![
            circuit("1/2*x^4 + 1/2 - x^2", 1)?,
            circuit("1/2*x^4 + 1/2 + x^2", 1)?,
        ],
        vec![
            circuit("x^4*y^2 + x^2*y^4 + 1 - 2*x^3*y^2", 2)?,
            circuit("x^4*y^2 + x^2*y^4 + 1 + 2*x^3*y^2", 2)?,
            circuit("x^4*y^2 + x^2*y^4 + 1 - 3*x^2*y^2", 2)?,
        ],
    ];
    for circuits in lists {
        let f = circuits.iter().fold(
            sonc::SparsePolynomial::zero(circuits[0].nvars()),
            |acc, c| &acc + &c.to_polynomial(),
        );
        println!("sum = {f}");
        for c in &circuits {
            println!("  input circuit  {}", c.to_polynomial());
        }
        let cert = same_support_transform(&circuits, DEFAULT_TOL)?;
        for c in &cert.circuits {
            println!(
                "  output circuit {}  ({})",
                c.circuit.to_polynomial(),
                c.verdict.as_str()
            );
        }
        for m in &cert.monomial_squares {
            println!("  monomial square {} x^{}", m.c, m.w);
        }
        println!(
            "  exact: {}, same support: {}",
            cert.exact,
            cert.is_same_support(&f)
        );
    }
    Ok(())
}
