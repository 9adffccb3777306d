//! Necessary conditions and cover simplices of every inner term.

use sonc::{
    enumerate_covers, necessary_conditions, parse_polynomial, support_partition,
    NecessaryConditions,
};

fn main() -> Result<(), sonc::SoncError> {
    for text in ["x^4 + y^4 + z^4 + 1 - x*y*z - x^2*y^2", "x^3 + 1 - x"] {
        let f = parse_polynomial(text, 3)?;
        println!("{text}");
        if let NecessaryConditions::Fail { vertex, reason } = necessary_conditions(&f)? {
            println!("  fails at vertex {vertex}: {reason}");
            continue;
        }
        let part = support_partition(&f)?;
        let lambda: Vec<_> = part.lambda.keys().cloned().collect();
        for beta in part.gamma.keys() {
            let covers = enumerate_covers(&lambda, beta);
            println!("  {beta}: {} covering simplices", covers.len());
            for (s, w) in &covers.simplices {
                let verts: Vec<String> = s.vertices().iter().map(ToString::to_string).collect();
                let weights: Vec<String> = w.weights.iter().map(ToString::to_string).collect();
                println!("    {} with weights {}", verts.join(" "), weights.join(" "));
            }
        }
    }
    Ok(())
}
