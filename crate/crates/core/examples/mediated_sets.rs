//! Maximal mediated sets, H-trellises and the effect of scaling.

use sonc::{is_h_trellis, maximal_mediated_set, Exponent, Simplex};

fn show(label: &str, s: &Simplex) -> Result<(), sonc::SoncError> {
    let m = maximal_mediated_set(s)?;
    let pts: Vec<String> = m.points().iter().map(ToString::to_string).collect();
    println!(
        "{label}: {} of {} lattice points mediated",
        m.len(),
        s.lattice_points().len()
    );
    println!("  {}", pts.join(" "));
    println!("  H-trellis: {}", is_h_trellis(s)?);
    Ok(())
}

fn main() -> Result<(), sonc::SoncError> {
    let motzkin = Simplex::new(vec![
        Exponent(vec![0, 0]),
        Exponent(vec![4, 2]),
        Exponent(vec![2, 4]),
    ])?;
    show("Motzkin trellis", &motzkin)?;
    show("Motzkin trellis scaled by 2", &motzkin.scaled(2))?;
    let corner = Simplex::new(vec![
        Exponent(vec![0, 0]),
        Exponent(vec![2, 0]),
        Exponent(vec![0, 2]),
    ])?;
    show("standard triangle", &corner)?;
    Ok(())
}
