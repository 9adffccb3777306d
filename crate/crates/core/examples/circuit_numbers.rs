//! Circuit numbers and exact nonnegativity verdicts.

use sonc::{circuit_number, classify_circuit, parse_polynomial, CircuitClass};

fn main() -> Result<(), sonc::SoncError> {
    let examples = [
        ("x^2 + 1 - 2*x", 1),
        ("x^2 + 1 - 3*x", 1),
        ("2 + 8*x^2 - 7*x", 1),
        ("x^4*y^2 + x^2*y^4 + 1 - 3*x^2*y^2", 2),
        ("x^4*y^2 + x^2*y^4 + 1 - 2*x^3*y^2", 2),
        ("x^6 + 1 + 5*x^2", 1),
    ];
    for (text, nvars) in examples {
        let f = parse_polynomial(text, nvars)?;
        let CircuitClass::Circuit(c) = classify_circuit(&f)? else {
            println!("{text}: not a circuit");
            continue;
        };
        let theta = circuit_number(&c, 64);
        let shown = match &theta.exact {
            Some(t) => t.to_string(),
            None => format!(
                "{:.12} (theta^{} = {})",
                theta.value, theta.root_degree, theta.power
            ),
        };
        println!(
            "{text:<40} theta = {shown:<40} d = {:<4} verdict {}",
            c.d(),
            c.verdict().as_str()
        );
    }
    Ok(())
}
