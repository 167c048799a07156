use frontlab::explicit::{curve0, list_cases, residual_wave};
use frontlab::model::p2_eigen;
use frontlab::ode::Tolerances;
use frontlab::phaseplane::{shoot, ConnectionClass, ShootOptions};

#[test]
fn wave_forms_solve_the_equation() {
    let mut checked = 0;
    for case in list_cases() {
        if case.wave.is_some() {
            let r = residual_wave(&case, 200).unwrap();
            assert!(r < 1e-10, "{}: {r:e}", case.id.name());
            checked += 1;
        }
    }
    assert!(checked >= 2);
}

#[test]
fn curve0_arrives_along_the_strong_direction() {
    for (n, k) in [(3.0, 2.0), (2.0, 1.5), (4.0, 1.2), (3.0, 3.0)] {
        let case = curve0(n, k);
        assert!(k * k * (n - 1.0) > 1.0);
        // Integration error leaves an e₊ component that tilts the slope
        // measured inside the terminal ball, so tighten both.
        let opts = ShootOptions {
            tol: Tolerances { rtol: 1e-13, atol: 1e-15 },
            eps_p2: 1e-7,
            ..Default::default()
        };
        let t = shoot(&case.params, case.c, &opts).unwrap();
        assert_eq!(t.connection, ConnectionClass::DirectCritical, "n = {n}, k = {k}");
        let lm = p2_eigen(&case.params, case.c).lambda_minus;
        assert!((lm + k * (n - 1.0)).abs() < 1e-12);
        let slope = t.approach.unwrap().slope;
        assert!((slope - lm).abs() < 1e-6, "n = {n}, k = {k}: {slope} vs {lm}");
    }
}
