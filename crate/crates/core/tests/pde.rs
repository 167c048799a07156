use frontlab::explicit::curve0;
use frontlab::model::validate_params;
use frontlab::pde::{
    build_subsolution, build_supersolution, comparison_check, simulate, simulate_field,
    Field, Grid, IcKind, PdeError, SimOptions, TailParams,
};
use frontlab::suite::transport_refinement;
use proptest::prelude::*;

#[test]
fn exact_wave_is_transported() {
    let case = curve0(3.0, 2.0);
    let wave = case.wave.unwrap();
    let g = Grid::new(30.0, 0.05).unwrap();
    let u0 = Field { t: 0.0, u: g.nodes().map(|x| wave.eval(x, 1.0).0).collect() };
    let opts = SimOptions { dx: 0.05, ..Default::default() };
    let s = simulate_field(&case.params, g, u0, 1.0, &opts, Some(1.0), "curve0").unwrap();
    let err = g
        .nodes()
        .zip(&s.final_field.u)
        .map(|(x, u)| (u - wave.eval(x + case.c, 1.0).0).abs())
        .fold(0.0, f64::max);
    assert!(err < 5e-3, "{err:e}");
    let factor = transport_refinement().unwrap();
    assert!((3.5..=4.5).contains(&factor), "{factor}");
}

#[test]
fn speed_is_stable_under_refinement() {
    let m = validate_params(3.0, 3.0, 1.0, 2.0).unwrap();
    let speeds: Vec<f64> = [0.05, 0.025]
        .map(|dx| {
            let opts = SimOptions { l: Some(60.0), dx, keep_snapshots: false, ..Default::default() };
            simulate(&m, &IcKind::Heaviside, 30.0, &opts).unwrap().trace.fitted_speed.unwrap()
        })
        .to_vec();
    assert!(((speeds[1] - speeds[0]) / speeds[0]).abs() < 0.01, "{speeds:?}");
}

#[test]
fn bracket_waves_stay_ordered() {
    let m = validate_params(3.0, 3.0, 1.0, 2.0).unwrap();
    let opts = SimOptions { l: Some(40.0), ..Default::default() };
    let sim = simulate(&m, &IcKind::Heaviside, 10.0, &opts).unwrap();
    let sub = build_subsolution(&m, 1.0, 0.0).unwrap();
    let sup = build_supersolution(&m, 2.0, 0.0).unwrap();
    assert!(comparison_check(&sim, &sub).unwrap());
    assert!(comparison_check(&sim, &sup).unwrap());
    let early = build_subsolution(&m, 1.0, -3.0).unwrap();
    assert!(matches!(comparison_check(&sim, &early), Err(PdeError::InitialOrderViolated)));
}

#[test]
fn general_data_spread_at_the_critical_speed() {
    let m = validate_params(3.0, 3.0, 1.0, 2.0).unwrap();
    let tp = TailParams::new(&m, 1.5, 1.0, 1.0, -5.0, 5.0).unwrap();
    let opts = SimOptions { keep_snapshots: false, ..Default::default() };
    let sim = simulate(&m, &IcKind::TailGeneral(tp), 25.0, &opts).unwrap();
    let speed = sim.trace.fitted_speed.unwrap();
    assert!((speed + 1.5).abs() < 0.075, "{speed}");
}

#[test]
fn small_domain_is_reported() {
    let m = validate_params(3.0, 3.0, 1.0, 2.0).unwrap();
    let opts = SimOptions { l: Some(10.0), dx: 0.1, ..Default::default() };
    assert!(matches!(
        simulate(&m, &IcKind::Heaviside, 20.0, &opts),
        Err(PdeError::DomainTooSmall { .. })
    ));
    let opts = SimOptions { dt: Some(1.0), ..Default::default() };
    assert!(matches!(
        simulate(&m, &IcKind::Heaviside, 1.0, &opts),
        Err(PdeError::CflViolated { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// `simulate` fails on any range or monotonicity violation.
    #[test]
    fn step_data_stay_in_range_and_monotone(
        n in 1.0..4.0f64, q in 1.0..3.0f64, gap in 0.2..3.0f64, k in 0.1..3.0f64, anti in any::<bool>()
    ) {
        let m = validate_params(n, q + gap, q, k).unwrap();
        let ic = if anti { IcKind::AntiHeaviside } else { IcKind::Heaviside };
        let opts = SimOptions { dx: 0.1, keep_snapshots: false, ..Default::default() };
        let sim = simulate(&m, &ic, 2.0, &opts);
        prop_assert!(sim.is_ok(), "{:?}", sim.err());
        let u = &sim.unwrap().final_field.u;
        prop_assert!(u.iter().all(|v| (-1e-9..=1.0 + 1e-9).contains(v)));
    }
}
