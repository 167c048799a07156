//! Dormand–Prince 5(4) integrator with dense output for planar autonomous
//! systems.

use thiserror::Error;

pub type State = [f64; 2];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("non-finite state at t = {0}")]
    NonFinite(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

// Butcher tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Continuous extension (Hairer, Nørsett & Wanner).
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Interpolant over one accepted step `[t0, t0 + h]`.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep {
    pub t0: f64,
    pub h: f64,
    r: [State; 5],
}

impl DenseStep {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn eval(&self, t: f64) -> State {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let mut out = [0.0; 2];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.r[0][i]
                + th * (self.r[1][i]
                    + th1 * (self.r[2][i] + th * (self.r[3][i] + th1 * self.r[4][i])));
        }
        out
    }

    /// Locate a sign change of `g` on the step by bisection. `g` must have
    /// opposite signs at the two ends of the step.
    pub fn find_root<G: Fn(&State) -> f64>(&self, g: G, t_tol: f64) -> (f64, State) {
        let (mut a, mut b) = (self.t0, self.t1());
        let ga = g(&self.eval(a));
        for _ in 0..200 {
            if (b - a).abs() <= t_tol {
                break;
            }
            let m = 0.5 * (a + b);
            let gm = g(&self.eval(m));
            if (gm > 0.0) == (ga > 0.0) && gm != 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        (b, self.eval(b))
    }
}

pub enum Control {
    Continue,
    Stop,
}

/// What the observer sees after each accepted step.
pub struct Step<'a> {
    pub t0: f64,
    pub y0: State,
    pub t1: f64,
    pub y1: State,
    pub dense: &'a DenseStep,
    /// `t1` lies on the sampling grid.
    pub on_grid: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub tol: Tolerances,
    pub max_step: f64,
    pub max_steps: usize,
    /// Absolute step floor.
    pub h_min: f64,
    /// When set, step ends are aligned to `t_start + m * spacing`.
    pub grid: Option<f64>,
}

impl Dopri5 {
    pub fn new(tol: Tolerances) -> Self {
        Self {
            tol,
            max_step: f64::INFINITY,
            max_steps: 5_000_000,
            h_min: 1e-14,
            grid: None,
        }
    }

    fn err_norm(&self, y0: &State, y1: &State, e: &State) -> f64 {
        let mut s = 0.0;
        for i in 0..2 {
            let sc = self.tol.atol + self.tol.rtol * y0[i].abs().max(y1[i].abs());
            s += (e[i] / sc).powi(2);
        }
        (0.5 * s).sqrt()
    }

    fn initial_step<F: Fn(&State) -> State>(&self, f: &F, y0: &State, f0: &State) -> f64 {
        let mut d0: f64 = 0.0;
        let mut d1: f64 = 0.0;
        for i in 0..2 {
            let sc = self.tol.atol + self.tol.rtol * y0[i].abs();
            d0 += (y0[i] / sc).powi(2);
            d1 += (f0[i] / sc).powi(2);
        }
        let (d0, d1) = ((0.5 * d0).sqrt(), (0.5 * d1).sqrt());
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let y1 = [y0[0] + h0 * f0[0], y0[1] + h0 * f0[1]];
        let f1 = f(&y1);
        let mut d2: f64 = 0.0;
        for i in 0..2 {
            let sc = self.tol.atol + self.tol.rtol * y0[i].abs();
            d2 += ((f1[i] - f0[i]) / sc).powi(2);
        }
        let d2 = (0.5 * d2).sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.max_step)
    }

    /// Integrate `y' = f(y)` from `(t0, y0)` in the direction of `dir`
    /// (±1) until the observer stops or the step budget runs out. Returns the
    /// final time and state and whether the observer requested the stop.
    pub fn integrate<F, O>(
        &self,
        f: F,
        t0: f64,
        y0: State,
        dir: f64,
        mut observe: O,
    ) -> Result<(f64, State, bool), OdeError>
    where
        F: Fn(&State) -> State,
        O: FnMut(Step<'_>) -> Control,
    {
        let dir = dir.signum();
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(&y);
        let mut h = self.initial_step(&f, &y, &k1);
        let mut next_grid = self.grid.map(|g| t0 + dir * g);
        let mut grid_index = 1u64;
        let mut reject_streak = 0;

        for _ in 0..self.max_steps {
            h = h.min(self.max_step);
            let mut hit_grid = false;
            if let (Some(tg), Some(g)) = (next_grid, self.grid) {
                let remaining = (tg - t) * dir;
                if h >= remaining * (1.0 - 1e-12) {
                    h = remaining;
                    hit_grid = true;
                } else if h > 0.5 * remaining && g > 0.0 {
                    // Avoid leaving a sliver before the grid point.
                    h = 0.5 * remaining;
                }
            }
            // Slow algebraic escapes reach very large t; only steps lost in
            // the rounding of t count as underflow there.
            if h < self.h_min.max(8.0 * f64::EPSILON * t.abs()) {
                return Err(OdeError::StepUnderflow { t, h });
            }
            let hs = dir * h;

            let mut yt = [0.0; 2];
            let stage = |yt: &mut State, terms: &[(f64, &State)]| {
                for i in 0..2 {
                    yt[i] = y[i] + hs * terms.iter().map(|(a, k)| a * k[i]).sum::<f64>();
                }
            };
            stage(&mut yt, &[(A21, &k1)]);
            let k2 = f(&yt);
            stage(&mut yt, &[(A31, &k1), (A32, &k2)]);
            let k3 = f(&yt);
            stage(&mut yt, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            let k4 = f(&yt);
            stage(&mut yt, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            let k5 = f(&yt);
            stage(
                &mut yt,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            );
            let k6 = f(&yt);
            let mut y1 = [0.0; 2];
            stage(
                &mut y1,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let k7 = f(&y1);
            let mut e = [0.0; 2];
            for i in 0..2 {
                e[i] = hs
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                        + E7 * k7[i]);
            }
            let err = self.err_norm(&y, &y1, &e);
            if !err.is_finite() || !y1[0].is_finite() || !y1[1].is_finite() {
                h *= 0.25;
                reject_streak += 1;
                if reject_streak > 60 {
                    return Err(OdeError::NonFinite(t));
                }
                continue;
            }
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err > 1.0 {
                h *= fac.min(1.0);
                reject_streak += 1;
                continue;
            }
            reject_streak = 0;

            let mut r = [[0.0; 2]; 5];
            for i in 0..2 {
                let dy = y1[i] - y[i];
                let bspl = hs * k1[i] - dy;
                r[0][i] = y[i];
                r[1][i] = dy;
                r[2][i] = bspl;
                r[3][i] = dy - hs * k7[i] - bspl;
                r[4][i] = hs
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                        + D7 * k7[i]);
            }
            let t1 = if hit_grid { next_grid.unwrap() } else { t + hs };
            let dense = DenseStep { t0: t, h: t1 - t, r };
            let ctl = observe(Step {
                t0: t,
                y0: y,
                t1,
                y1,
                dense: &dense,
                on_grid: hit_grid,
            });
            t = t1;
            y = y1;
            k1 = k7;
            if hit_grid {
                grid_index += 1;
                next_grid = self.grid.map(|g| t0 + dir * g * grid_index as f64);
            }
            if let Control::Stop = ctl {
                return Ok((t, y, true));
            }
            h *= fac;
        }
        Ok((t, y, false))
    }
}
