//! Parameter sets related by the self-map share their `c = 0` orbits up to a
//! change of variables, so `k* sqrt(n)` is constant along an orbit.
use frontlab::critical::DEFAULT_TOL;
use frontlab::model::validate_params;
use frontlab::phaseplane::{shoot, ShootOptions};
use frontlab::selfmap::{kstar_invariance, map_params, transformed_residual};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let src = validate_params(3.0, 3.0, 1.0, 2.0)?;
    for n2 in [3.5, 4.0, 6.0] {
        let t = map_params(&src, n2)?.target;
        println!("(3, 3, 1, 2) -> ({}, {:.4}, {:.4}, {:.4})", t.n, t.p, t.q, t.k);
    }
    let traj = shoot(&src, 0.0, &ShootOptions { sample: Some(0.005), ..Default::default() })?;
    println!("transformed residual on (3, 3, 1, 2), n2 = 2: {:.2e}", transformed_residual(&src, &traj, 2.0)?);
    for ((n, p, q), n2) in [((1.0, 2.0, 1.0), 2.0), ((3.0, 3.0, 1.0), 5.0), ((2.0, 4.0, 3.0), 3.0)] {
        let r = kstar_invariance((n, p, q), n2, DEFAULT_TOL)?;
        println!(
            "{:?} k* = {:.8} -> {:?} k* = {:.8}, |k* sqrt(n) gap| = {:.1e}",
            r.source, r.kstar_source, r.target, r.kstar_target, r.invariant_gap
        );
    }
    Ok(())
}
