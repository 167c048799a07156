use serde::Serialize;

use super::{PdeError, Simulation};
use crate::model::{p2_eigen, pow, ModelParams};
use crate::ode::{Control, Dopri5, State, Tolerances};
use crate::phaseplane::{
    shoot, tail_below, ConnectionClass, EventKind, PhaseError, ProfileTable, ShootOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WaveKind {
    Subsolution,
    Supersolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Truncation {
    /// Zero to the left of the interface.
    ZeroLeft,
    /// One to the right of the interface.
    OneRight,
}

/// Traveling wave `U(x, t) = f(x + ct − R)` cut at `f = 0` or `f = 1`, with
/// the interface at local coordinate `0`.
#[derive(Debug, Clone, Serialize)]
pub struct TruncatedWave {
    pub kind: WaveKind,
    pub truncation: Truncation,
    pub c: f64,
    pub r: f64,
    pub profile: ProfileTable,
    /// Exponential rate continuing the table past its untruncated end.
    pub tail_rate: f64,
}

impl TruncatedWave {
    /// Profile value at local coordinate `s`.
    pub fn value(&self, s: f64) -> f64 {
        let (lo, hi) = self.profile.xi_range();
        let samples = &self.profile.samples;
        match self.truncation {
            Truncation::ZeroLeft if s <= 0.0 => 0.0,
            Truncation::ZeroLeft if s > hi => {
                let gap = 1.0 - samples[samples.len() - 1].1;
                1.0 - gap * (self.tail_rate * (s - hi)).exp()
            }
            Truncation::OneRight if s >= 0.0 => 1.0,
            Truncation::OneRight if s < lo => samples[0].1 * (self.tail_rate * (s - lo)).exp(),
            _ => self.profile.eval(s).unwrap(),
        }
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        self.value(x + self.c * t - self.r)
    }
}

const SUB_ETA: f64 = 1e-7;
const SAMPLE_STEP: f64 = 0.02;

fn require(params: &ModelParams, c: f64, want: ConnectionClass) -> Result<(), PdeError> {
    let t = shoot(params, c, &ShootOptions::default())?;
    if t.connection != want {
        return Err(PdeError::WrongVelocitySide { c, class: t.connection });
    }
    Ok(())
}

/// Subsolution for `c` below the critical velocity: the orbit entering `P2`
/// along the strong direction, followed backward until `f = 0` and cut there.
pub fn build_subsolution(params: &ModelParams, c: f64, r: f64) -> Result<TruncatedWave, PdeError> {
    require(params, c, ConnectionClass::DirectLeading)?;
    let e = p2_eigen(params, c);
    let lm = e.lambda_minus;
    let (n1, dpq, kn, q) = (params.n - 1.0, params.p - params.q, params.kn(), params.q);
    // Coordinates centered at P2: z = X − 1.
    let field = move |s: &State| {
        let x = (1.0 + s[0]).max(0.0);
        let reaction = pow(x, q) * (dpq * s[0].max(-1.0).ln_1p()).exp_m1();
        [s[1], c * s[1] - kn * pow(x, n1) * s[1] - reaction]
    };
    let mut solver = Dopri5::new(Tolerances { rtol: 1e-10, atol: 1e-14 });
    solver.grid = Some(SAMPLE_STEP);
    let mut rows = vec![(0.0, 1.0 - SUB_ETA, -SUB_ETA * lm)];
    let mut hit: Option<(f64, f64)> = None;
    let mut bad = false;
    solver
        .integrate(field, 0.0, [-SUB_ETA, -SUB_ETA * lm], -1.0, |st| {
            if st.y1[0] <= -1.0 {
                let (xi, s) = st.dense.find_root(|s| s[0] + 1.0, 1e-13);
                hit = Some((xi, s[1]));
                return Control::Stop;
            }
            if st.y1[1] <= 0.0 || st.t1 < -1e4 {
                bad = true;
                return Control::Stop;
            }
            if st.on_grid {
                rows.push((st.t1, 1.0 + st.y1[0], st.y1[1]));
            }
            Control::Continue
        })
        .map_err(PhaseError::from)?;
    let Some((xi0, y0)) = hit.filter(|_| !bad) else {
        return Err(PdeError::WrongVelocitySide { c, class: ConnectionClass::Undetermined });
    };
    rows.retain(|r| r.0 > xi0 + 1e-9);
    rows.push((xi0, 0.0, y0));
    rows.reverse();
    let profile = ProfileTable {
        c,
        samples: rows.iter().map(|r| (r.0 - xi0, r.1)).collect(),
        slopes: rows.iter().map(|r| r.2).collect(),
    };
    Ok(TruncatedWave {
        kind: WaveKind::Subsolution,
        truncation: Truncation::ZeroLeft,
        c,
        r,
        profile,
        tail_rate: lm,
    })
}

/// Supersolution for `c` above the critical velocity: the overshooting orbit
/// from `P1`, cut at its first crossing of `f = 1`.
pub fn build_supersolution(
    params: &ModelParams,
    c: f64,
    r: f64,
) -> Result<TruncatedWave, PdeError> {
    let opts = ShootOptions { max_step: SAMPLE_STEP, ..Default::default() };
    let t = shoot(params, c, &opts)?;
    if t.connection != ConnectionClass::Overshoot {
        return Err(PdeError::WrongVelocitySide { c, class: t.connection });
    }
    let Some(cross) = t.events.iter().find(|e| e.kind == EventKind::CrossedX1) else {
        return Err(PdeError::WrongVelocitySide { c, class: t.connection });
    };
    let (xi1, p0) = (cross.xi, t.points[0].1);
    let mut rows: Vec<(f64, f64, f64)> = tail_below(params, c, p0.x, 1e-8)
        .into_iter()
        .rev()
        .collect();
    rows.extend(t.points.iter().take_while(|(xi, _)| *xi < xi1).map(|(xi, p)| (*xi, p.x, p.y)));
    rows.push((xi1, 1.0, cross.point.y));
    let first = rows[0];
    let profile = ProfileTable {
        c,
        samples: rows.iter().map(|r| (r.0 - xi1, r.1)).collect(),
        slopes: rows.iter().map(|r| r.2).collect(),
    };
    Ok(TruncatedWave {
        kind: WaveKind::Supersolution,
        truncation: Truncation::OneRight,
        c,
        r,
        profile,
        tail_rate: first.2 / first.1,
    })
}

const ORDER_TOL: f64 = 1e-6;

/// Whether the solution stays on the correct side of the moving wave at every
/// recorded snapshot.
pub fn comparison_check(sim: &Simulation, wave: &TruncatedWave) -> Result<bool, PdeError> {
    let ordered = |t: f64, u: &[f64]| {
        sim.grid.nodes().zip(u).all(|(x, &v)| {
            let w = wave.eval(x, t);
            match wave.kind {
                WaveKind::Subsolution => v >= w - ORDER_TOL,
                WaveKind::Supersolution => v <= w + ORDER_TOL,
            }
        })
    };
    let Some(first) = sim.snapshots.first() else {
        return Ok(ordered(sim.final_field.t, &sim.final_field.u));
    };
    if !ordered(first.t, &first.u) {
        return Err(PdeError::InitialOrderViolated);
    }
    Ok(sim.snapshots.iter().all(|f| ordered(f.t, &f.u)) && ordered(sim.final_field.t, &sim.final_field.u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_params;

    fn m() -> ModelParams {
        validate_params(3.0, 3.0, 1.0, 2.0).unwrap()
    }

    #[test]
    fn subsolution_shape() {
        let w = build_subsolution(&m(), 1.0, 0.0).unwrap();
        assert_eq!(w.eval(-3.0, 0.0), 0.0);
        assert_eq!(w.eval(0.0, 0.0), 0.0);
        assert!(w.profile.slopes[0] > 0.0);
        let mut prev = 0.0;
        for i in 1..400 {
            let v = w.eval(i as f64 * 0.05, 0.0);
            assert!(v >= prev && v <= 1.0, "{i} {v} {prev}");
            prev = v;
        }
        assert!(prev > 0.99);
    }

    #[test]
    fn supersolution_shape() {
        let w = build_supersolution(&m(), 2.0, 0.0).unwrap();
        assert_eq!(w.eval(0.0, 0.0), 1.0);
        assert_eq!(w.eval(4.0, 0.0), 1.0);
        let mut prev = 1.0;
        for i in 1..400 {
            let v = w.eval(-(i as f64) * 0.05, 0.0);
            assert!(v <= prev && v > 0.0);
            prev = v;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn wrong_side() {
        assert!(matches!(
            build_subsolution(&m(), 2.0, 0.0),
            Err(PdeError::WrongVelocitySide { .. })
        ));
        assert!(matches!(
            build_supersolution(&m(), 1.0, 0.0),
            Err(PdeError::WrongVelocitySide { .. })
        ));
    }
}
