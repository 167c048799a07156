//! Shoot from `P1` at a few velocities and report how each trajectory ends.
//! Pass a velocity to dump that trajectory as CSV instead.
use frontlab::model::validate_params;
use frontlab::phaseplane::{shoot, ShootOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = validate_params(3.0, 3.0, 1.0, 2.0)?;
    let opts = ShootOptions::default();
    if let Some(c) = std::env::args().nth(1) {
        let t = shoot(&m, c.parse()?, &ShootOptions { sample: Some(0.05), ..opts })?;
        print!("{}", t.to_csv());
        return Ok(());
    }
    for c in [0.0, 1.0, 1.4, 1.5, 1.6, 2.0, 3.0] {
        let t = shoot(&m, c, &opts)?;
        let end = t.last();
        print!("c = {c:4.1}: {:?}", t.connection);
        match t.x0_crossing {
            Some(x0) => println!(", crosses Y = 0 at X = {x0:.6}"),
            None => println!(", ends at ({:.8}, {:.2e}) after {} steps", end.x, end.y, t.points.len()),
        }
    }
    Ok(())
}
