//! Decreasing step data travel with `kn + 2 sqrt(p - q)`, independent of the
//! critical velocity. The trace is written as CSV `t,x_front`.
use frontlab::model::{ctilde, validate_params};
use frontlab::pde::{simulate, IcKind, SimOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = validate_params(3.0, 3.0, 1.0, 0.5)?;
    let opts = SimOptions { keep_snapshots: false, ..Default::default() };
    let sim = simulate(&m, &IcKind::AntiHeaviside, 40.0, &opts)?;
    eprintln!(
        "fitted speed {:.4}, predicted {:.4}",
        sim.trace.fitted_speed.unwrap_or(f64::NAN),
        -ctilde(&m)
    );
    print!("{}", sim.trace.to_csv());
    Ok(())
}
