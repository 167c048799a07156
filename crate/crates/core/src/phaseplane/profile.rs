use serde::Serialize;

use super::launch::tail_below;
use super::{PhaseError, Trajectory};
use crate::model::ModelParams;

/// Monotone wave profile `f(ξ)` anchored at `f(0) = 1/2`.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileTable {
    pub c: f64,
    /// `(ξ, f)` in increasing `ξ`.
    pub samples: Vec<(f64, f64)>,
    /// `f'(ξ)` at each sample.
    pub slopes: Vec<f64>,
}

/// Value of `f` below which the lower tail is considered reached.
const TAIL_LEVEL: f64 = 1e-6;

impl ProfileTable {
    pub fn xi_range(&self) -> (f64, f64) {
        (self.samples[0].0, self.samples[self.samples.len() - 1].0)
    }

    /// Cubic Hermite interpolation; `None` outside the table.
    pub fn eval(&self, xi: f64) -> Option<f64> {
        let (lo, hi) = self.xi_range();
        if !(xi >= lo && xi <= hi) {
            return None;
        }
        let i = self.samples.partition_point(|s| s.0 <= xi).clamp(1, self.samples.len() - 1);
        let ((x0, f0), (x1, f1)) = (self.samples[i - 1], self.samples[i]);
        let (d0, d1) = (self.slopes[i - 1], self.slopes[i]);
        let h = x1 - x0;
        let t = (xi - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        Some(
            (2.0 * t3 - 3.0 * t2 + 1.0) * f0
                + (t3 - 2.0 * t2 + t) * h * d0
                + (-2.0 * t3 + 3.0 * t2) * f1
                + (t3 - t2) * h * d1,
        )
    }

    /// Like [`ProfileTable::eval`], continued by `0` to the left and `1` to
    /// the right of the table.
    pub fn eval_extended(&self, xi: f64) -> f64 {
        let (lo, hi) = self.xi_range();
        if xi < lo {
            0.0
        } else if xi > hi {
            1.0
        } else {
            self.eval(xi).unwrap()
        }
    }

    /// `ξ` at which `f` takes `level`, by bisection on the interpolant.
    pub fn xi_at(&self, level: f64) -> Option<f64> {
        let i = self.samples.partition_point(|s| s.1 < level);
        if i == 0 || i == self.samples.len() {
            return None;
        }
        let (mut a, mut b) = (self.samples[i - 1].0, self.samples[i].0);
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if self.eval(m).unwrap() < level {
                a = m;
            } else {
                b = m;
            }
        }
        Some(0.5 * (a + b))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("xi,f\n");
        for (xi, f) in &self.samples {
            s.push_str(&format!("{:.16e},{:.16e}\n", xi, f));
        }
        s
    }
}

/// Turn a direct connection into the profile `f(ξ)` with `f(0) = 1/2`,
/// extending the lower tail along the local power law when the trajectory
/// was launched above `1e-6`.
pub fn reconstruct_profile(
    traj: &Trajectory,
    params: &ModelParams,
    c: f64,
) -> Result<ProfileTable, PhaseError> {
    if !traj.connection.is_direct() {
        return Err(PhaseError::NotAConnection(traj.connection));
    }
    let mut rows: Vec<(f64, f64, f64)> = Vec::with_capacity(traj.points.len() + 64);
    let (xi0, p0) = traj.points[0];
    for (dxi, x, y) in tail_below(params, c, p0.x, 0.5 * TAIL_LEVEL.min(p0.x)) {
        rows.push((xi0 + dxi, x, y));
    }
    for (xi, p) in &traj.points {
        if let Some(last) = rows.last() {
            if *xi <= last.0 || p.x <= last.1 {
                continue;
            }
        }
        rows.push((*xi, p.x, p.y));
    }
    let mut table = ProfileTable {
        c,
        samples: rows.iter().map(|r| (r.0, r.1)).collect(),
        slopes: rows.iter().map(|r| r.2).collect(),
    };
    let anchor = table.xi_at(0.5).ok_or(PhaseError::NotAConnection(traj.connection))?;
    for s in &mut table.samples {
        s.0 -= anchor;
    }
    Ok(table)
}
