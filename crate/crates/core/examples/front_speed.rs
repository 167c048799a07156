//! Heaviside data for `k` below, at and above the threshold: the front
//! vanishes, stalls or spreads at the critical velocity.
use frontlab::critical::{cbar, DEFAULT_TOL};
use frontlab::model::validate_params;
use frontlab::pde::{shape_error, simulate, IcKind, SimOptions};
use frontlab::phaseplane::{reconstruct_profile, shoot, ShootOptions};
use rayon::prelude::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t_end = 30.0;
    let rows: Vec<Result<String, String>> = [0.5, 1.0, 2.0]
        .par_iter()
        .map(|&k| {
            let m = validate_params(3.0, 3.0, 1.0, k).map_err(|e| e.to_string())?;
            let opts = SimOptions { keep_snapshots: false, ..Default::default() };
            let sim = simulate(&m, &IcKind::Heaviside, t_end, &opts).map_err(|e| e.to_string())?;
            let c = cbar(&m, DEFAULT_TOL).map_err(|e| e.to_string())?.value;
            let shape = shoot(&m, c, &ShootOptions::default())
                .ok()
                .and_then(|t| reconstruct_profile(&t, &m, c).ok())
                .and_then(|p| shape_error(&sim.final_field, &sim.grid, &p).ok());
            Ok(format!(
                "k = {k}: cbar = {c:+.4}, fitted speed = {:+.4}, u(0,T) = {:.3e}, shape error = {}",
                sim.trace.fitted_speed.unwrap_or(f64::NAN),
                sim.final_field.value_at(&sim.grid, 0.0),
                shape.map_or("-".into(), |s| format!("{s:.2e}"))
            ))
        })
        .collect();
    for r in rows {
        println!("{}", r?);
    }
    Ok(())
}
