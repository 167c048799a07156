//! Reference checks for the solver stack: critical velocities, threshold
//! coefficients, PDE front dynamics, the explicit catalogue and the
//! self-map. Each check prints as one pass/fail line.

use std::fmt;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::critical::{cbar, kstar, DEFAULT_TOL};
use crate::explicit::{
    curve0, list_cases, residual_trajectory, shoot_deviation, sign_check, CaseKind,
};
use crate::model::{p2_eigen, validate_params, ModelParams};
use crate::pde::{
    build_subsolution, build_supersolution, comparison_check, shape_error, simulate,
    simulate_field, Field, Grid, IcKind, SimOptions, Simulation,
};
use crate::phaseplane::{reconstruct_profile, shoot, ShootOptions};
use crate::selfmap::{kstar_invariance, transformed_residual};

pub const CRITERIA: [u8; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub limit_seconds: f64,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} [{:.1} s / {:.0} s] {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.seconds,
            self.limit_seconds,
            self.title,
            self.detail
        )
    }
}

struct Run {
    sim: Result<Simulation, String>,
    seconds: f64,
}

/// Shared state so the long PDE runs happen once per suite.
pub struct Suite {
    seed: u64,
    runs: OnceLock<Vec<Run>>,
}

const FIG1: [(f64, &str, f64); 4] =
    [(2.0, "heaviside", 30.0), (0.5, "heaviside", 40.0), (1.0, "heaviside", 40.0), (0.5, "anti_heaviside", 40.0)];

fn m331(k: f64) -> ModelParams {
    validate_params(3.0, 3.0, 1.0, k).expect("valid parameters")
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

impl Suite {
    pub fn new(seed: u64) -> Self {
        Self { seed, runs: OnceLock::new() }
    }

    fn runs(&self) -> &[Run] {
        self.runs.get_or_init(|| {
            FIG1.par_iter()
                .map(|&(k, ic, t_end)| {
                    let start = Instant::now();
                    let kind = if ic == "heaviside" { IcKind::Heaviside } else { IcKind::AntiHeaviside };
                    let opts = if k == 2.0 {
                        SimOptions { l: Some(80.0), dx: 0.05, ..Default::default() }
                    } else {
                        SimOptions::default()
                    };
                    let sim = simulate(&m331(k), &kind, t_end, &opts).map_err(|e| e.to_string());
                    Run { sim, seconds: start.elapsed().as_secs_f64() }
                })
                .collect()
        })
    }

    pub fn run(&self, id: u8) -> CriterionReport {
        let start = Instant::now();
        let (title, limit, outcome, extra) = match id {
            1 => ("cbar(3,3,1,2) = 1.5", 10.0, self.c1(), 0.0),
            2 => ("cbar(3,5,3,2) = (6+sqrt 24)/6", 10.0, self.c2(), 0.0),
            3 => ("kstar closed forms", 60.0, self.c3(), 0.0),
            4 => ("sign law for (3,3,1)", 30.0, self.c4(), 0.0),
            5 => ("Heaviside front (3,3,1,2)", 300.0, self.c5(), self.runs()[0].seconds),
            6 => {
                let out = self.c6();
                let runs = self.runs();
                ("vanishing and borderline (3,3,1)", 300.0, out, runs[1].seconds.max(runs[2].seconds))
            }
            7 => ("anti-Heaviside front (3,3,1,0.5)", 300.0, self.c7(), self.runs()[3].seconds),
            8 => ("explicit catalogue", 60.0, self.c8(), 0.0),
            9 => ("self-map", 120.0, self.c9(), 0.0),
            10 => ("property suites", f64::INFINITY, self.c10(), 0.0),
            _ => ("unknown", 0.0, Err(format!("no criterion {id}")), 0.0),
        };
        // Shared runs are charged to the criteria that use them.
        let seconds = start.elapsed().as_secs_f64().max(extra);
        let (passed, detail) = match outcome {
            Ok((ok, d)) => (ok && seconds < limit, d),
            Err(e) => (false, e),
        };
        CriterionReport { id, title, passed, detail, seconds, limit_seconds: limit }
    }

    pub fn run_all(&self) -> Vec<CriterionReport> {
        CRITERIA.iter().map(|&id| self.run(id)).collect()
    }

    fn c1(&self) -> Result<(bool, String), String> {
        let r = cbar(&m331(2.0), DEFAULT_TOL).map_err(|e| e.to_string())?;
        Ok((close(r.value, 1.5, 1e-4), format!("cbar = {:.10}", r.value)))
    }

    fn c2(&self) -> Result<(bool, String), String> {
        let m = validate_params(3.0, 5.0, 3.0, 2.0).map_err(|e| e.to_string())?;
        let r = cbar(&m, DEFAULT_TOL).map_err(|e| e.to_string())?;
        let want = (6.0 + 24f64.sqrt()) / 6.0;
        Ok((close(r.value, want, 1e-4), format!("cbar = {:.10}, expected {want:.10}", r.value)))
    }

    fn c3(&self) -> Result<(bool, String), String> {
        let cases = [
            ((3.0, 3.0, 1.0), 1.0),
            ((3.0, 5.0, 1.0), 4.0 / 3.0),
            ((7.0, 13.0, 1.0), 8.0 / 7.0),
            ((5.0, 6.0, 3.0), 2.0 / 8f64.sqrt()),
            ((2.0, 4.0, 3.0), 1.0),
        ];
        let rows: Vec<Result<(bool, String), String>> = cases
            .par_iter()
            .map(|&((n, p, q), want)| {
                let start = Instant::now();
                let r = kstar(n, p, q, DEFAULT_TOL).map_err(|e| e.to_string())?;
                let secs = start.elapsed().as_secs_f64();
                Ok((
                    close(r.value, want, 1e-3) && secs < 60.0,
                    format!("k*({n},{p},{q}) = {:.8}", r.value),
                ))
            })
            .collect();
        let mut ok = true;
        let mut parts = Vec::new();
        for r in rows {
            let (pass, s) = r?;
            ok &= pass;
            parts.push(s);
        }
        Ok((ok, parts.join(", ")))
    }

    fn c4(&self) -> Result<(bool, String), String> {
        let (a, b) = rayon::join(|| cbar(&m331(0.5), DEFAULT_TOL), || cbar(&m331(2.0), DEFAULT_TOL));
        let (a, b) = (a.map_err(|e| e.to_string())?.value, b.map_err(|e| e.to_string())?.value);
        Ok((a < -0.1 && b > 0.1, format!("cbar(k=0.5) = {a:.6}, cbar(k=2) = {b:.6}")))
    }

    fn sim(&self, i: usize) -> Result<&Simulation, String> {
        self.runs()[i].sim.as_ref().map_err(|e| e.clone())
    }

    fn c5(&self) -> Result<(bool, String), String> {
        let sim = self.sim(0)?;
        let speed = sim.trace.fitted_speed.ok_or("no speed fit")?;
        let m = m331(2.0);
        let traj = shoot(&m, 1.5, &ShootOptions::default()).map_err(|e| e.to_string())?;
        let prof = reconstruct_profile(&traj, &m, 1.5).map_err(|e| e.to_string())?;
        let err = shape_error(&sim.final_field, &sim.grid, &prof).map_err(|e| e.to_string())?;
        Ok((
            close(speed, -1.5, 0.05 * 1.5) && err < 0.05,
            format!("speed = {speed:.5}, shape error = {err:.2e}"),
        ))
    }

    fn c6(&self) -> Result<(bool, String), String> {
        let (vanish, border) = (self.sim(1)?, self.sim(2)?);
        let u0 = vanish.final_field.value_at(&vanish.grid, 0.0);
        let speed = border.trace.fitted_speed.ok_or("no speed fit")?;
        let secs = self.runs()[1].seconds.max(self.runs()[2].seconds);
        Ok((
            u0 < 0.1 && speed.abs() < 0.05 && secs < 300.0,
            format!("u(0,40) at k=0.5 = {u0:.3e}, speed at k=1 = {speed:.5}"),
        ))
    }

    fn c7(&self) -> Result<(bool, String), String> {
        let speed = self.sim(3)?.trace.fitted_speed.ok_or("no speed fit")?;
        let want = -(1.5 + 8f64.sqrt());
        Ok((
            close(speed, want, 0.1 * want.abs()),
            format!("speed = {speed:.5}, expected {want:.5}"),
        ))
    }

    fn c8(&self) -> Result<(bool, String), String> {
        let cases = list_cases();
        let rows: Vec<Result<(bool, String), String>> = cases
            .par_iter()
            .map(|case| {
                let e = |e: crate::explicit::ExplicitError| e.to_string();
                if case.kind == CaseKind::Trajectory {
                    let r = residual_trajectory(case, 100).map_err(e)?;
                    let d = shoot_deviation(case, &ShootOptions::default()).map_err(e)?;
                    Ok((r < 1e-10 && d < 1e-6, format!("{} {r:.1e}/{d:.1e}", case.id.name())))
                } else {
                    let s = sign_check(case, 1000).map_err(e)?;
                    Ok((s, format!("{} sign {s}", case.id.name())))
                }
            })
            .collect();
        let mut ok = true;
        let mut parts = Vec::new();
        for r in rows {
            let (pass, s) = r?;
            ok &= pass;
            parts.push(s);
        }
        Ok((ok, parts.join(", ")))
    }

    fn c9(&self) -> Result<(bool, String), String> {
        let (inv, res) = rayon::join(
            || kstar_invariance((1.0, 2.0, 1.0), 2.0, DEFAULT_TOL),
            || {
                let m = m331(2.0);
                let opts = ShootOptions { sample: Some(0.005), ..Default::default() };
                let traj = shoot(&m, 0.0, &opts).map_err(|e| e.to_string())?;
                transformed_residual(&m, &traj, 2.0).map_err(|e| e.to_string())
            },
        );
        let inv = inv.map_err(|e| e.to_string())?;
        let res = res?;
        let gap = (inv.kstar_target * 2f64.sqrt() - 2.0).abs();
        Ok((
            gap < 5e-3 && res < 1e-4,
            format!("|k*2 sqrt2 - 2| = {gap:.2e}, transformed residual = {res:.2e}"),
        ))
    }

    fn c10(&self) -> Result<(bool, String), String> {
        let (worst, eig_ok) = eigen_identities(self.seed, 1000);
        let mut parts = vec![format!("eigen identities worst {worst:.1e}")];
        let mut ok = eig_ok;

        let mut fig_ok = true;
        for (run, (k, ic, _)) in self.runs().iter().zip(FIG1) {
            let good = run.sim.as_ref().map(|s| range_and_order(s, ic)).unwrap_or(false);
            if !good {
                parts.push(format!("run k={k} {ic} failed"));
            }
            fig_ok &= good;
        }
        parts.push(format!("range/monotone {fig_ok}"));
        ok &= fig_ok;

        let sim = self.sim(0)?;
        let m = m331(2.0);
        let (sub, sup) = rayon::join(|| build_subsolution(&m, 1.0, 0.0), || build_supersolution(&m, 2.0, 0.0));
        let sub = comparison_check(sim, &sub.map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let sup = comparison_check(sim, &sup.map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        parts.push(format!("sub {sub}, super {sup}"));
        ok &= sub && sup;

        let factor = transport_refinement()?;
        parts.push(format!("refinement factor {factor:.3}"));
        ok &= (3.5..=4.5).contains(&factor);
        Ok((ok, parts.join(", ")))
    }
}

/// Worst relative error of `λ₊λ₋ = p − q` and `λ₊ + λ₋ = c − kn` over random
/// parameter draws.
pub fn eigen_identities(seed: u64, draws: usize) -> (f64, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let n = rng.gen_range(1.0..8.0);
        let q = rng.gen_range(1.0..6.0);
        let p = q + rng.gen_range(0.01..6.0);
        let k = rng.gen_range(0.01..5.0);
        let c = rng.gen_range(-10.0..10.0);
        let Ok(m) = validate_params(n, p, q, k) else { continue };
        let e = p2_eigen(&m, c);
        let (prod, sum) = if e.is_node() {
            (e.lambda_plus * e.lambda_minus, e.lambda_plus + e.lambda_minus)
        } else {
            (e.lambda_plus.powi(2) + e.imag.powi(2), 2.0 * e.lambda_plus)
        };
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
        worst = worst.max(rel(prod, p - q)).max(rel(sum, c - m.kn()));
    }
    (worst, worst <= 1e-12)
}

fn range_and_order(sim: &Simulation, ic: &str) -> bool {
    let dir = if ic == "heaviside" { 1.0 } else { -1.0 };
    sim.snapshots.iter().chain(std::iter::once(&sim.final_field)).all(|f| {
        f.u.iter().all(|&u| (-1e-9..=1.0 + 1e-9).contains(&u))
            && f.u.windows(2).all(|w| dir * (w[1] - w[0]) >= -1e-12)
    })
}

/// Ratio of sup errors at `dx = 0.05` and `dx = 0.025` after transporting the
/// closed-form CURVE0 wave to `t = 1`.
pub fn transport_refinement() -> Result<f64, String> {
    let case = curve0(3.0, 2.0);
    let wave = case.wave.ok_or("CURVE0 has no wave form")?;
    let errs: Vec<Result<f64, String>> = [0.05, 0.025]
        .par_iter()
        .map(|&dx| {
            let g = Grid::new(30.0, dx).map_err(|e| e.to_string())?;
            let u0 = Field { t: 0.0, u: g.nodes().map(|x| wave.eval(x, 1.0).0).collect() };
            let opts = SimOptions { dx, keep_snapshots: false, ..Default::default() };
            let s = simulate_field(&case.params, g, u0, 1.0, &opts, Some(1.0), "curve0")
                .map_err(|e| e.to_string())?;
            Ok(g.nodes()
                .zip(&s.final_field.u)
                .map(|(x, u)| (u - wave.eval(x + case.c, 1.0).0).abs())
                .fold(0.0, f64::max))
        })
        .collect();
    let (a, b) = (errs[0].clone()?, errs[1].clone()?);
    Ok(a / b)
}
