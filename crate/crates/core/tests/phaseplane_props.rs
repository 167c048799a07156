use frontlab::critical::{cbar, DEFAULT_TOL};
use frontlab::model::{validate_params, ModelParams};
use frontlab::phaseplane::{reconstruct_profile, shoot, PhaseError, ShootOptions};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ModelParams> {
    (2.0..5.0f64, 1.0..3.0f64, 0.5..3.0f64, 0.3..3.0f64)
        .prop_map(|(n, q, gap, k)| validate_params(n, q + gap, q, k).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn faster_waves_lie_above(m in params(), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(b - a > 0.05);
        let r = 2.0 * m.sqrt_gap();
        let (c1, c2) = (-r + a * (m.kn() + r), -r + b * (m.kn() + r));
        let opts = ShootOptions::default();
        let (t1, t2) = (shoot(&m, c1, &opts).unwrap(), shoot(&m, c2, &opts).unwrap());
        let mut compared = 0;
        for i in 1..200 {
            let x = i as f64 / 200.0;
            if let (Some(y1), Some(y2)) = (t1.y_at(x), t2.y_at(x)) {
                prop_assert!(y1 < y2, "X = {x}: {y1} !< {y2}");
                compared += 1;
            }
        }
        prop_assert!(compared > 20);
    }

    #[test]
    fn shots_climb_and_never_cross_below_one(m in params(), s in 0.0..1.0f64) {
        let r = 2.0 * m.sqrt_gap();
        let c = -r + s * (m.kn() + 2.0 * r);
        match shoot(&m, c, &ShootOptions::default()) {
            Err(PhaseError::IntegrityViolation { .. }) => prop_assert!(false, "integrity violation at c = {c}"),
            Err(e) => prop_assert!(false, "{e}"),
            Ok(t) => {
                let climbing: Vec<_> = t.points.iter().take_while(|p| p.1.y > 0.0).collect();
                for w in climbing.windows(2) {
                    prop_assert!(w[1].1.x > w[0].1.x);
                }
            }
        }
    }

    #[test]
    fn halving_delta_keeps_the_class(m in params(), s in 0.0..1.0f64) {
        let cb = cbar(&m, DEFAULT_TOL).unwrap().value;
        let r = 2.0 * m.sqrt_gap();
        let c = -r + s * (m.kn() + 2.0 * r);
        prop_assume!((c - cb).abs() > 1e-4);
        let a = shoot(&m, c, &ShootOptions::default()).unwrap();
        let b = shoot(&m, c, &ShootOptions { delta: 5e-7, ..Default::default() }).unwrap();
        prop_assert_eq!(a.connection.is_direct(), b.connection.is_direct());
        prop_assert_eq!(a.connection.is_direct(), c < cb);
    }
}

/// Sup of `f'' − (c f' − kn f^{n−1} f' − f^p + f^q)` over the middle 80% of
/// the table, with `f''` from second differences of `f`.
fn profile_residual(m: &ModelParams, c: f64) -> f64 {
    let opts = ShootOptions { sample: Some(1e-3), ..Default::default() };
    let t = shoot(m, c, &opts).unwrap();
    let prof = reconstruct_profile(&t, m, c).unwrap();
    let s = &prof.samples;
    let (lo, hi) = prof.xi_range();
    let (a, b) = (lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo));
    let mut worst: f64 = 0.0;
    for i in 1..s.len() - 1 {
        let (x0, x1, x2) = (s[i - 1].0, s[i].0, s[i + 1].0);
        if x1 < a || x1 > b {
            continue;
        }
        let (h0, h1) = (x1 - x0, x2 - x1);
        let (f0, f1, f2) = (s[i - 1].1, s[i].1, s[i + 1].1);
        let d2 = 2.0 * (h0 * f2 - (h0 + h1) * f1 + h1 * f0) / (h0 * h1 * (h0 + h1));
        let d1 = (h0 * h0 * f2 + (h1 * h1 - h0 * h0) * f1 - h1 * h1 * f0) / (h0 * h1 * (h0 + h1));
        let rhs = c * d1 - m.kn() * f1.powf(m.n - 1.0) * d1 - f1.powf(m.p) + f1.powf(m.q);
        worst = worst.max((d2 - rhs).abs());
    }
    worst
}

#[test]
fn reconstructed_profiles_solve_the_wave_equation() {
    let cases = [((3.0, 3.0, 1.0, 2.0), 1.5), ((3.0, 3.0, 1.0, 2.0), 1.0), ((3.0, 5.0, 3.0, 2.0), (6.0 + 24f64.sqrt()) / 6.0)];
    for ((n, p, q, k), c) in cases {
        let m = validate_params(n, p, q, k).unwrap();
        let r = profile_residual(&m, c);
        assert!(r < 1e-5, "({n},{p},{q},{k}) c = {c}: {r:e}");
    }
}
