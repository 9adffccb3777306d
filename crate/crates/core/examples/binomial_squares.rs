//! Writing nonnegative circuits as sums of binomial squares.

use sonc::{
    circuit_to_sosb, classify_circuit, maximal_mediated_set, parse_polynomial, sonc_to_sosb,
    verify_sum, BinomialSquare, CircuitClass, MonomialSquare, SoncError,
};

fn print(squares: &[BinomialSquare], monos: &[MonomialSquare]) {
    for s in squares {
        let j = s.to_json();
        println!("  ({} x^{} - {} x^{})^2", j.a, s.u, j.b, s.v);
    }
    for m in monos {
        println!("  {} x^{}", m.c, m.w);
    }
}

fn main() -> Result<(), SoncError> {
    for (text, nvars) in [
        ("x^6 + 1 - 3/2*x^2", 1),
        ("x^4*y^2 + x^2*y^4 + 1 - 3*x^2*y^2", 2),
    ] {
        let f = parse_polynomial(text, nvars)?;
        let CircuitClass::Circuit(c) = classify_circuit(&f)? else {
            unreachable!()
        };
        let m = maximal_mediated_set(c.trellis())?;
        println!("{text}");
        match circuit_to_sosb(&c, &m) {
            Ok((s, mo)) => print(&s, &mo),
            Err(e @ SoncError::NoMediatedWitness { .. }) => {
                println!("  unscaled: {e}; substituting x -> x^{nvars}");
                let (s, mo) = sonc_to_sosb(std::slice::from_ref(&c), nvars as u32)?;
                print(&s, &mo);
                let parts: Vec<_> = s
                    .iter()
                    .map(BinomialSquare::expand)
                    .chain(mo.iter().map(MonomialSquare::to_polynomial))
                    .collect();
                println!(
                    "  exact: {}",
                    verify_sum(&parts, &f.power_substitute(nvars as u32))?
                );
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
