//! Type of the equilibrium `P2` as the wave velocity sweeps through the
//! node and focus bands.
use frontlab::model::{cbar_bracket, ctilde, p2_eigen, validate_params};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = validate_params(3.0, 3.0, 1.0, 2.0)?;
    let (lo, hi) = cbar_bracket(&m);
    println!("critical velocity bracket [{lo:.4}, {hi:.4}], ctilde = {:.4}", ctilde(&m));
    println!("{:>7} {:>14} {:>10} {:>10} {:>10}", "c", "class", "lambda+", "lambda-", "imag");
    for i in 0..=12 {
        let c = -4.0 + i as f64 * 1.25;
        let e = p2_eigen(&m, c);
        println!(
            "{c:>7.2} {:>14} {:>10.4} {:>10.4} {:>10.4}",
            format!("{:?}", e.p2_class),
            e.lambda_plus,
            e.lambda_minus,
            e.imag
        );
    }
    Ok(())
}
