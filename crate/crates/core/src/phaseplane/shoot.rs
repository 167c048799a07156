use super::launch::refined_launch;
use super::{Approach, ConnectionClass, Event, EventKind, PhaseError, PhasePoint, Trajectory};
use crate::model::{p2_eigen, pow, EigenData, ModelParams};
use crate::ode::{Control, Dopri5, State, Tolerances};

#[derive(Debug, Clone, Copy)]
pub struct ShootOptions {
    pub delta: f64,
    pub tol: Tolerances,
    /// Radius of the terminal ball around `P2`.
    pub eps_p2: f64,
    pub x_max: f64,
    pub arc_cap: f64,
    pub max_steps: usize,
    /// Record points on a uniform `ξ` grid instead of at every step.
    pub sample: Option<f64>,
    pub max_step: f64,
    /// Inside the terminal ball a node approach with `a > ratio·|b|` is an
    /// overshoot.
    pub overshoot_ratio: f64,
    /// Below this eigen-gap the tangency test is skipped.
    pub degenerate_gap: f64,
    /// Retry with `delta = 1e-7, 1e-8` when the outcome is undetermined.
    pub retry: bool,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            delta: 1e-6,
            tol: Tolerances::default(),
            eps_p2: 1e-8,
            x_max: 10.0,
            arc_cap: 1e4,
            max_steps: 2_000_000,
            sample: None,
            max_step: f64::INFINITY,
            overshoot_ratio: 1e-5,
            degenerate_gap: 1e-4,
            retry: true,
        }
    }
}

/// Switch to coordinates centered at `P2` once `X` passes this value.
const SHIFT_AT: f64 = 0.5;

/// Shoot from `P1` along its outgoing trajectory and classify the outcome.
pub fn shoot(params: &ModelParams, c: f64, opts: &ShootOptions) -> Result<Trajectory, PhaseError> {
    let mut traj = shoot_once(params, c, opts)?;
    if opts.retry {
        for delta in [1e-7, 1e-8] {
            if traj.connection != ConnectionClass::Undetermined || delta >= opts.delta {
                continue;
            }
            traj = shoot_once(params, c, &ShootOptions { delta, ..*opts })?;
        }
    }
    Ok(traj)
}

enum Outcome {
    Running,
    Done(ConnectionClass),
    Integrity { x: f64, xi: f64 },
}

struct Run<'a> {
    params: &'a ModelParams,
    c: f64,
    opts: &'a ShootOptions,
    eig: EigenData,
    traj: Trajectory,
    arc: f64,
    outcome: Outcome,
}

impl Run<'_> {
    /// Returns true when the trajectory should stop.
    fn step(
        &mut self,
        shift: f64,
        (y0, t1, y1, on_grid): (State, f64, State, bool),
        root: impl Fn(&dyn Fn(&State) -> f64) -> (f64, State),
    ) -> bool {
        let to_point = |s: &State| PhasePoint::new(s[0] + shift, s[1]);
        let (p0, p1) = (to_point(&y0), to_point(&y1));
        self.arc += (p1.x - p0.x).hypot(p1.y - p0.y);
        let record = self.opts.sample.is_none() || on_grid;

        if p1.y <= 0.0 {
            let (xi, s) = root(&|s: &State| s[1]);
            let p = to_point(&s);
            if p.x > 1.0 {
                self.traj.events.push(Event { kind: EventKind::HitXAxis, xi, point: p });
                if self.opts.sample.is_none() {
                    self.traj.points.push((xi, PhasePoint::new(p.x, 0.0)));
                }
                self.traj.x0_crossing = Some(p.x);
                self.outcome = Outcome::Done(ConnectionClass::Overshoot);
            } else {
                self.outcome = Outcome::Integrity { x: p.x, xi };
            }
            return true;
        }
        if p0.x < 1.0 && p1.x >= 1.0 {
            let (xi, s) = root(&|s: &State| s[0] + shift - 1.0);
            self.traj.events.push(Event { kind: EventKind::CrossedX1, xi, point: to_point(&s) });
        }
        if record {
            self.traj.points.push((t1, p1));
        }
        let dist = if shift == 1.0 { y1[0].hypot(y1[1]) } else { (p1.x - 1.0).hypot(p1.y) };
        if dist < self.opts.eps_p2 {
            self.traj.events.push(Event { kind: EventKind::NearP2, xi: t1, point: p1 });
            let class = self.terminal(p1.x - 1.0, p1.y, shift, y1);
            self.outcome = Outcome::Done(class);
            return true;
        }
        if p1.x > self.opts.x_max || self.arc > self.opts.arc_cap {
            self.traj.events.push(Event { kind: EventKind::Capped, xi: t1, point: p1 });
            self.outcome = Outcome::Done(ConnectionClass::Undetermined);
            return true;
        }
        false
    }

    fn terminal(&mut self, dx: f64, dy: f64, shift: f64, s: State) -> ConnectionClass {
        // Use the centered coordinates directly when available.
        let (dx, dy) = if shift == 1.0 { (s[0], s[1]) } else { (dx, dy) };
        let e = self.eig;
        if e.gap() <= self.opts.degenerate_gap {
            self.traj.degenerate = true;
            return ConnectionClass::DirectCritical;
        }
        if !e.is_node() {
            self.traj.x0_crossing = Some(1.0 + focus_crossing(self.params, self.c, &e, dx, dy));
            return ConnectionClass::Overshoot;
        }
        let (lp, lm) = (e.lambda_plus, e.lambda_minus);
        let a = (lm * dx - dy) / (lm - lp);
        let b = (dy - lp * dx) / (lm - lp);
        let slope = dy / dx;
        self.traj.approach = Some(Approach { a, b, slope });
        if a > self.opts.overshoot_ratio * b.abs() {
            // Linear flow: Y vanishes when a λ₊ e^{λ₊s} + b λ₋ e^{λ₋s} = 0.
            let s_star = if b == 0.0 {
                0.0
            } else {
                ((-b * lm) / (a * lp)).ln().max(0.0) / (lp - lm)
            };
            let xs = a * (lp * s_star).exp() + b * (lm * s_star).exp();
            self.traj.x0_crossing = Some(1.0 + xs.max(f64::MIN_POSITIVE));
            return ConnectionClass::Overshoot;
        }
        if (slope - lp).abs() < (slope - lm).abs() {
            ConnectionClass::DirectLeading
        } else {
            ConnectionClass::DirectCritical
        }
    }
}

/// `X − 1` at the first zero of `Y` under the linearized flow at a focus.
fn focus_crossing(params: &ModelParams, c: f64, e: &EigenData, dx: f64, dy: f64) -> f64 {
    let trace = c - params.kn();
    let det = params.p - params.q;
    let (al, om) = (e.lambda_plus, e.imag);
    // d(s) = e^{αs} [cos(ωs) I + sin(ωs)/ω (J − αI)] d₀, J = [[0,1],[−det, trace]].
    let y_sin = (-det * dx + (trace - al) * dy) / om;
    // Y(s) ∝ dy cos(ωs) + y_sin sin(ωs) = R cos(ωs − φ).
    let phi = y_sin.atan2(dy);
    let mut s = (phi + std::f64::consts::FRAC_PI_2) / om;
    while s <= 0.0 {
        s += std::f64::consts::PI / om;
    }
    let x_sin = (-al * dx + dy) / om;
    (al * s).exp() * ((om * s).cos() * dx + (om * s).sin() * x_sin)
}

/// One shot at a fixed `delta`.
pub fn shoot_once(
    params: &ModelParams,
    c: f64,
    opts: &ShootOptions,
) -> Result<Trajectory, PhaseError> {
    let start = refined_launch(params, c, opts.delta)?;
    let mut run = Run {
        params,
        c,
        opts,
        eig: p2_eigen(params, c),
        traj: Trajectory {
            params: *params,
            c,
            delta: opts.delta,
            points: vec![(0.0, start)],
            events: Vec::new(),
            connection: ConnectionClass::Undetermined,
            x0_crossing: None,
            degenerate: false,
            approach: None,
        },
        arc: 0.0,
        outcome: Outcome::Running,
    };

    let mut solver = Dopri5::new(opts.tol);
    solver.max_step = opts.max_step;
    solver.max_steps = opts.max_steps;
    solver.grid = opts.sample;

    let field = |s: &State| {
        let (a, b) = super::vector_field(params, c, PhasePoint::new(s[0], s[1]));
        [a, b]
    };
    let mut switch: Option<(f64, State)> = None;
    let (_, _, stopped) = solver.integrate(field, 0.0, [start.x, start.y], 1.0, |st| {
        if run.step(0.0, (st.y0, st.t1, st.y1, st.on_grid), |g| st.dense.find_root(g, 1e-12)) {
            return Control::Stop;
        }
        let ready = opts.sample.is_none() || st.on_grid;
        if st.y1[0] >= SHIFT_AT && ready {
            switch = Some((st.t1, st.y1));
            return Control::Stop;
        }
        Control::Continue
    })?;

    if let Some((t1, y1)) = switch {
        let (n1, dpq, kn, q) = (params.n - 1.0, params.p - params.q, params.kn(), params.q);
        let centered = move |s: &State| {
            let x = 1.0 + s[0];
            let y = s[1];
            // X^p − X^q = X^q (X^{p−q} − 1), kept accurate near X = 1.
            let reaction = pow(x, q) * (dpq * s[0].ln_1p()).exp_m1();
            [y, c * y - kn * pow(x, n1) * y - reaction]
        };
        let mut tol = opts.tol;
        tol.atol *= 1e-2;
        let mut solver2 = solver;
        solver2.tol = tol;
        solver2.max_steps = opts.max_steps.saturating_sub(run.traj.points.len());
        let (_, _, stopped2) =
            solver2.integrate(centered, t1, [y1[0] - 1.0, y1[1]], 1.0, |st| {
                if run.step(1.0, (st.y0, st.t1, st.y1, st.on_grid), |g| {
                    st.dense.find_root(g, 1e-12)
                }) {
                    Control::Stop
                } else {
                    Control::Continue
                }
            })?;
        if !stopped2 {
            run.capped();
        }
    } else if !stopped {
        run.capped();
    }

    match run.outcome {
        Outcome::Integrity { x, xi } => Err(PhaseError::IntegrityViolation { x, xi }),
        Outcome::Done(class) => {
            run.traj.connection = class;
            Ok(run.traj)
        }
        Outcome::Running => Ok(run.traj),
    }
}

impl Run<'_> {
    fn capped(&mut self) {
        let (xi, p) = *self.traj.points.last().unwrap();
        self.traj.events.push(Event { kind: EventKind::Capped, xi, point: p });
        self.outcome = Outcome::Done(ConnectionClass::Undetermined);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_params;

    fn opts() -> ShootOptions {
        ShootOptions::default()
    }

    #[test]
    fn spreading_case_is_direct() {
        let m = validate_params(3.0, 3.0, 1.0, 2.0).unwrap();
        let t = shoot(&m, 0.0, &opts()).unwrap();
        assert_eq!(t.connection, ConnectionClass::DirectLeading);
        let t = shoot(&m, 1.4, &opts()).unwrap();
        assert_eq!(t.connection, ConnectionClass::DirectLeading);
        let t = shoot(&m, 1.6, &opts()).unwrap();
        assert_eq!(t.connection, ConnectionClass::Overshoot);
        assert!(t.x0_crossing.unwrap() > 1.0);
    }

    #[test]
    fn vanishing_case_overshoots() {
        let m = validate_params(3.0, 3.0, 1.0, 0.5).unwrap();
        let t = shoot(&m, 0.0, &opts()).unwrap();
        assert_eq!(t.connection, ConnectionClass::Overshoot);
        assert!(t.x0_crossing.unwrap() > 1.0);
    }

    #[test]
    fn threshold_case_is_critical() {
        let m = validate_params(3.0, 3.0, 1.0, 1.0).unwrap();
        let t = shoot(&m, 0.0, &opts()).unwrap();
        assert_eq!(t.connection, ConnectionClass::DirectCritical);
        let ap = t.approach.unwrap();
        assert!((ap.slope + 2.0).abs() < 1e-2);
    }

    #[test]
    fn follows_basic_curve() {
        let m = validate_params(3.0, 3.0, 1.0, 1.0).unwrap();
        let t = shoot(&m, 0.0, &opts()).unwrap();
        for (_, p) in &t.points {
            assert!((p.y - (p.x - p.x.powi(3))).abs() < 1e-8, "{p:?}");
        }
    }

    #[test]
    fn x_increases_while_y_positive() {
        let m = validate_params(4.0, 6.0, 2.0, 0.7).unwrap();
        for c in [-1.5, 0.0, 1.0] {
            let t = shoot(&m, c, &opts()).unwrap();
            for w in t.points.windows(2) {
                if w[0].1.y > 0.0 && w[1].1.y > 0.0 {
                    assert!(w[1].1.x > w[0].1.x);
                }
            }
        }
    }

    #[test]
    fn stiff_center_launch_reaches_outcome() {
        let m = validate_params(3.0, 5.0, 3.0, 0.5).unwrap();
        let t = shoot(&m, -2.0, &opts()).unwrap();
        assert_ne!(t.connection, ConnectionClass::Undetermined);
    }

    #[test]
    fn focus_is_overshoot() {
        let m = validate_params(3.0, 3.0, 1.0, 2.0).unwrap();
        let t = shoot(&m, 5.0, &opts()).unwrap();
        assert_eq!(t.connection, ConnectionClass::Overshoot);
    }
}
