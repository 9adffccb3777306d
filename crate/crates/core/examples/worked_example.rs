//! The four-term example with two inner points: nonnegative, but not SONC.

use sonc::{
    decide_sonc, enumerate_covers, parse_polynomial, support_partition, Decision, DEFAULT_TOL,
};

fn main() -> Result<(), sonc::SoncError> {
    let f = parse_polynomial("50*x^4*y^4 + x^4 + 3*y^4 + 800 - 300*x*y^2 - 180*x^2*y", 2)?;
    println!("f = {f}");

    let part = support_partition(&f)?;
    let lambda: Vec<_> = part.lambda.keys().cloned().collect();
    for beta in part.gamma.keys() {
        let covers = enumerate_covers(&lambda, beta);
        println!("{} simplices cover {beta}:", covers.len());
        for (s, w) in &covers.simplices {
            let weights: Vec<String> = w.weights.iter().map(ToString::to_string).collect();
            println!(
                "  {:?}  weights {}",
                s.sorted_vertices()
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>(),
                weights.join(", ")
            );
        }
    }

    match decide_sonc(&f, DEFAULT_TOL)? {
        Decision::NotSonc { reason, slack } => println!("not SONC: {reason} (slack {slack:?})"),
        other => println!("unexpected: {}", other.status()),
    }
    Ok(())
}
