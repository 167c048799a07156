use serde::Serialize;

use super::front::{fit_speed, front_position, FrontTrace};
use super::ic::{initial_condition, IcKind};
use super::{Field, Grid, PdeError};
use crate::model::{cbar_bracket, ctilde, ModelParams};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SimOptions {
    /// Half-width; sized from the speed bound when absent.
    pub l: Option<f64>,
    pub dx: f64,
    pub safety: f64,
    /// Explicit time step; must respect [`stable_dt`].
    pub dt: Option<f64>,
    pub snapshot_every: f64,
    pub keep_snapshots: bool,
    pub window_fraction: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            l: None,
            dx: 0.05,
            safety: 0.4,
            dt: None,
            snapshot_every: 0.1,
            keep_snapshots: true,
            window_fraction: 1.0 / 3.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Simulation {
    pub params: ModelParams,
    pub ic: String,
    pub grid: Grid,
    pub dt: f64,
    pub snapshots: Vec<Field>,
    pub final_field: Field,
    pub trace: FrontTrace,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub params: ModelParams,
    pub ic: String,
    pub fitted_speed: Option<f64>,
    pub fit_residual: Option<f64>,
    pub shape_error_final: Option<f64>,
    /// `u(0, T)`.
    pub u_origin_final: f64,
}

impl Simulation {
    pub fn summary(&self, shape_error_final: Option<f64>) -> Summary {
        Summary {
            params: self.params,
            ic: self.ic.clone(),
            fitted_speed: self.trace.fitted_speed,
            fit_residual: self.trace.fit_residual,
            shape_error_final,
            u_origin_final: self.final_field.value_at(&self.grid, 0.0),
        }
    }

    /// Long-format CSV `t,x,u` of all kept snapshots.
    pub fn snapshots_csv(&self) -> String {
        let mut s = String::from("t,x,u\n");
        for f in &self.snapshots {
            for (i, u) in f.u.iter().enumerate() {
                s.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", f.t, self.grid.x(i), u));
            }
        }
        s
    }
}

/// Largest step for which the forward-Euler stage keeps the scheme monotone:
/// `min(dx²/2, dx/(kn))`.
pub fn stable_dt(params: &ModelParams, dx: f64) -> f64 {
    (0.5 * dx * dx).min(dx / params.kn())
}

#[derive(Clone, Copy)]
enum Power {
    One,
    Two,
    Three,
    Int(i32),
    Real(f64),
}

impl Power {
    fn new(e: f64) -> Self {
        match e {
            1.0 => Self::One,
            2.0 => Self::Two,
            3.0 => Self::Three,
            _ if e.fract() == 0.0 && e.abs() <= 64.0 => Self::Int(e as i32),
            _ => Self::Real(e),
        }
    }

    #[inline(always)]
    fn of(self, x: f64) -> f64 {
        match self {
            Self::One => x,
            Self::Two => x * x,
            Self::Three => x * x * x,
            Self::Int(i) => x.powi(i),
            Self::Real(e) => x.powf(e),
        }
    }
}

struct Stepper {
    flux: Vec<f64>,
    k: Vec<f64>,
    stage: Vec<f64>,
}

impl Stepper {
    fn new(len: usize) -> Self {
        Self { flux: vec![0.0; len], k: vec![0.0; len], stage: vec![0.0; len] }
    }

    fn rhs(&mut self, params: &ModelParams, u: &[f64], dx: f64) {
        let (n, p, q) = (Power::new(params.n), Power::new(params.p), Power::new(params.q));
        for (f, &v) in self.flux.iter_mut().zip(u) {
            *f = n.of(v.max(0.0));
        }
        let (idx2, adv) = (1.0 / (dx * dx), params.k / (2.0 * dx));
        let last = u.len() - 1;
        self.k[0] = 0.0;
        self.k[last] = 0.0;
        let flux = &self.flux;
        for (i, (k, w)) in self.k[1..last].iter_mut().zip(u.windows(3)).enumerate() {
            let v = w[1].max(0.0);
            *k = (w[2] - 2.0 * w[1] + w[0]) * idx2 + adv * (flux[i + 2] - flux[i]) + p.of(v) - q.of(v);
        }
    }

    /// Heun step in place; boundary values stay fixed.
    fn advance(&mut self, params: &ModelParams, u: &mut [f64], dt: f64, dx: f64) {
        self.rhs(params, u, dx);
        for ((s, &v), &k) in self.stage.iter_mut().zip(u.iter()).zip(&self.k) {
            *s = v + dt * k;
        }
        let stage = std::mem::take(&mut self.stage);
        self.rhs(params, &stage, dx);
        for i in 0..u.len() {
            u[i] = 0.5 * (u[i] + stage[i] + dt * self.k[i]);
        }
        self.stage = stage;
    }
}

const RANGE_EPS: f64 = 1e-9;
const MONOTONE_EPS: f64 = 1e-12;

fn check_range(grid: &Grid, f: &Field) -> Result<(), PdeError> {
    for (i, &u) in f.u.iter().enumerate() {
        if !(-RANGE_EPS..=1.0 + RANGE_EPS).contains(&u) {
            return Err(PdeError::RangeViolated { t: f.t, x: grid.x(i), u });
        }
    }
    Ok(())
}

/// One Heun step of the method-of-lines system.
pub fn step(params: &ModelParams, f: &Field, dt: f64, grid: &Grid) -> Result<Field, PdeError> {
    let max = stable_dt(params, grid.dx);
    if dt > max * (1.0 + 1e-12) {
        return Err(PdeError::CflViolated { dt, max });
    }
    let mut out = Field { t: f.t + dt, u: f.u.clone() };
    Stepper::new(f.u.len()).advance(params, &mut out.u, dt, grid.dx);
    check_range(grid, &out)?;
    Ok(out)
}

/// Bound on the front speed used to size the domain.
fn speed_bound(params: &ModelParams, ic: &IcKind) -> f64 {
    match ic {
        IcKind::AntiHeaviside => ctilde(params),
        _ => {
            let (lo, hi) = cbar_bracket(params);
            lo.abs().max(hi.abs())
        }
    }
}

pub fn simulate(
    params: &ModelParams,
    ic: &IcKind,
    t_end: f64,
    opts: &SimOptions,
) -> Result<Simulation, PdeError> {
    let mut l = opts.l.unwrap_or(speed_bound(params, ic) * t_end + 20.0);
    if let (None, IcKind::TailGeneral(tp)) = (opts.l, ic) {
        l += tp.r_minus.abs().max(tp.r_plus.abs());
    }
    let grid = Grid::new(l, opts.dx)?;
    let u0 = initial_condition(ic, &grid)?;
    simulate_field(params, grid, u0, t_end, opts, Some(ic.direction()), ic.name())
}

/// Time-step arbitrary data in `[0, 1]`. `direction` (±1) requests a
/// monotonicity check at every snapshot.
pub fn simulate_field(
    params: &ModelParams,
    grid: Grid,
    u0: Field,
    t_end: f64,
    opts: &SimOptions,
    direction: Option<f64>,
    label: &str,
) -> Result<Simulation, PdeError> {
    let max = stable_dt(params, grid.dx);
    let dt_target = match opts.dt {
        Some(dt) if dt > max * (1.0 + 1e-12) => return Err(PdeError::CflViolated { dt, max }),
        Some(dt) => dt,
        None => opts.safety * max,
    };
    let every = opts.snapshot_every;
    let per_snapshot = (every / dt_target).ceil().max(1.0) as usize;
    let dt = every / per_snapshot as f64;
    let n_snap = (t_end / every).round() as usize;

    check_range(&grid, &u0)?;
    let mut field = u0;
    let mut stepper = Stepper::new(grid.len());
    let mut snapshots = Vec::new();
    let mut trace = FrontTrace::default();

    let mut record = |field: &Field, snapshots: &mut Vec<Field>| -> Result<(), PdeError> {
        if let Some(dir) = direction {
            for w in field.u.windows(2) {
                if dir * (w[1] - w[0]) < -MONOTONE_EPS {
                    return Err(PdeError::MonotonicityLost { t: field.t });
                }
            }
        }
        if let Ok(x) = front_position(field, &grid, 0.5) {
            let margin = 5.0 * grid.dx;
            if x < -grid.l + margin || x > grid.l - margin {
                return Err(PdeError::DomainTooSmall { t: field.t, x });
            }
            trace.samples.push((field.t, x));
        }
        if opts.keep_snapshots {
            snapshots.push(field.clone());
        }
        Ok(())
    };

    record(&field, &mut snapshots)?;
    for s in 1..=n_snap {
        for _ in 0..per_snapshot {
            stepper.advance(params, &mut field.u, dt, grid.dx);
        }
        field.t = s as f64 * every;
        check_range(&grid, &field)?;
        record(&field, &mut snapshots)?;
    }

    if let Ok(fit) = fit_speed(&trace, opts.window_fraction) {
        trace.fitted_speed = Some(fit.slope);
        trace.fit_residual = Some(fit.residual);
        trace.fit_window = Some(fit.window);
    }
    Ok(Simulation {
        params: *params,
        ic: label.to_string(),
        grid,
        dt,
        snapshots,
        final_field: field,
        trace,
    })
}
