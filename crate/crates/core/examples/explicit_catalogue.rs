//! Closed-form trajectories and invariant curves: residuals, flow signs and
//! how closely shooting follows each curve.
use frontlab::explicit::{list_cases, verify_table};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for case in list_cases() {
        let m = case.params;
        println!("{:<12} (n, p, q, k) = ({}, {}, {}, {:.6}), c = {:.6}, {:?}", case.id.name(), m.n, m.p, m.q, m.k, case.c, case.kind);
    }
    println!();
    print!("{}", verify_table(&list_cases())?);
    Ok(())
}

