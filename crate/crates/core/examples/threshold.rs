//! Convection coefficient at which the critical velocity changes sign, and
//! the sign of `cbar` on either side of it.
use frontlab::critical::{cbar, kstar, DEFAULT_TOL};
use frontlab::model::validate_params;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (n, p, q) in [(3.0, 3.0, 1.0), (3.0, 5.0, 1.0), (7.0, 13.0, 1.0), (5.0, 6.0, 3.0), (2.0, 4.0, 3.0), (4.0, 4.0, 2.0)] {
        let ks = kstar(n, p, q, DEFAULT_TOL)?;
        let below = cbar(&validate_params(n, p, q, 0.8 * ks.value)?, DEFAULT_TOL)?.value;
        let above = cbar(&validate_params(n, p, q, 1.2 * ks.value)?, DEFAULT_TOL)?.value;
        println!(
            "k*({n}, {p}, {q}) = {:.8}   cbar(0.8 k*) = {below:+.4}   cbar(1.2 k*) = {above:+.4}",
            ks.value
        );
    }
    Ok(())
}
