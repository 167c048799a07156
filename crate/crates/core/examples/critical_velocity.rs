//! Critical velocity by bisection on the connection class, against the
//! closed forms where they exist.
use frontlab::critical::{cbar, cbar_explicit, DEFAULT_TOL};
use frontlab::model::validate_params;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        (3.0, 3.0, 1.0, 0.5),
        (3.0, 3.0, 1.0, 1.0),
        (3.0, 3.0, 1.0, 2.0),
        (3.0, 5.0, 3.0, 2.0),
        (4.0, 7.0, 4.0, 2.0),
        (2.0, 5.0, 1.5, 0.7),
    ];
    println!("{:>20} {:>14} {:>14} {:>6}", "(n, p, q, k)", "cbar", "closed form", "evals");
    for (n, p, q, k) in cases {
        let m = validate_params(n, p, q, k)?;
        let r = cbar(&m, DEFAULT_TOL)?;
        let exact = cbar_explicit(&m).map_or("-".to_string(), |c| format!("{c:.10}"));
        println!("{:>20} {:>14.10} {:>14} {:>6}", format!("({n}, {p}, {q}, {k})"), r.value, exact, r.evaluations);
    }
    Ok(())
}
