//! Truncated traveling waves below and above the critical velocity bracket
//! the Heaviside solution for the whole run.
use frontlab::model::validate_params;
use frontlab::pde::{build_subsolution, build_supersolution, comparison_check, simulate, IcKind, SimOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = validate_params(3.0, 3.0, 1.0, 2.0)?;
    let sim = simulate(&m, &IcKind::Heaviside, 20.0, &SimOptions { l: Some(60.0), ..Default::default() })?;
    let sub = build_subsolution(&m, 1.0, 0.0)?;
    let sup = build_supersolution(&m, 2.0, 0.0)?;
    println!("subsolution  c = 1: ordered = {}", comparison_check(&sim, &sub)?);
    println!("supersolution c = 2: ordered = {}", comparison_check(&sim, &sup)?);
    for f in sim.snapshots.iter().filter(|f| f.t.fract().abs() < 1e-9 && (f.t as u32).is_multiple_of(5)) {
        let (mut below, mut above) = (f64::INFINITY, f64::INFINITY);
        for (x, &u) in sim.grid.nodes().zip(&f.u) {
            below = below.min(u - sub.eval(x, f.t));
            above = above.min(sup.eval(x, f.t) - u);
        }
        println!("t = {:4.1}: min(u - sub) = {below:+.2e}, min(super - u) = {above:+.2e}", f.t);
    }
    Ok(())
}
