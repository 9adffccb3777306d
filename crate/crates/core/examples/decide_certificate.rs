//! Deciding SONC membership and checking the emitted certificate.

use sonc::{decide_sonc, parse_polynomial, CertificateJson, Decision, DEFAULT_TOL};

fn main() -> Result<(), sonc::SoncError> {
    let inputs = [
        ("x^4*y^2 + x^2*y^4 + 2 - 3*x^2*y^2 + x^6 - x^3", 2),
        ("x^2 + 1 - 2*x", 1),
        ("x^2 + 1 - 2000001/1000000*x", 1),
        ("x^3 + 1 - x", 1),
    ];
    for (text, nvars) in inputs {
        let f = parse_polynomial(text, nvars)?;
        let decision = decide_sonc(&f, DEFAULT_TOL)?;
        println!("{text}: {}", decision.status());
        match &decision {
            Decision::Sonc { certificate, slack } => {
                let json = certificate.to_json("SONC", *slack);
                let text = serde_json::to_string(&json)?;
                println!("{text}");
                let back: CertificateJson = serde_json::from_str(&text)?;
                println!("re-checked from JSON: exact = {}", back.recheck(&f)?.exact);
            }
            Decision::NotSonc { reason, .. } => println!("  {reason}"),
            Decision::Inconclusive { slack, .. } => {
                println!("  slack {slack:e} is within tolerance")
            }
        }
    }
    Ok(())
}
