//! Explicit finite-difference simulation of `u_t = u_xx + k(uⁿ)_x + u^p − u^q`
//! on a truncated line, with front tracking and comparison against truncated
//! traveling waves.

mod bracket;
mod front;
mod ic;
mod scheme;

pub use bracket::{
    build_subsolution, build_supersolution, comparison_check, Truncation, TruncatedWave, WaveKind,
};
pub use front::{fit_speed, front_position, shape_error, FrontTrace, SpeedFit};
pub use ic::{initial_condition, IcKind, TailParams};
pub use scheme::{simulate, simulate_field, stable_dt, step, SimOptions, Simulation, Summary};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::critical::CriticalError;
use crate::phaseplane::{ConnectionClass, PhaseError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PdeError {
    #[error("grid needs L > 0, dx > 0 and at least 100 intervals (L = {l}, dx = {dx})")]
    InvalidGrid { l: f64, dx: f64 },
    #[error("dt = {dt:e} exceeds the stability bound {max:e}")]
    CflViolated { dt: f64, max: f64 },
    #[error("u = {u} left [0, 1] at t = {t}, x = {x}")]
    RangeViolated { t: f64, x: f64, u: f64 },
    #[error("monotonicity lost at t = {t}")]
    MonotonicityLost { t: f64 },
    #[error("front at x = {x} came within 5 cells of the boundary at t = {t}")]
    DomainTooSmall { t: f64, x: f64 },
    #[error("level {0} is not crossed by the field")]
    NoCrossing(f64),
    #[error("{0} samples in the fit window, at least 10 are needed")]
    TooFewSamples(usize),
    #[error("invalid tail parameters: {0}")]
    InvalidTailParams(String),
    #[error("wave and solution are not ordered at t = 0")]
    InitialOrderViolated,
    #[error("velocity c = {c} gives {class:?}, on the wrong side of the critical velocity")]
    WrongVelocitySide { c: f64, class: ConnectionClass },
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Critical(#[from] CriticalError),
}

/// Uniform nodes `x_i = −L + i·dx`, `i = 0..=N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    #[serde(rename = "L")]
    pub l: f64,
    pub dx: f64,
    pub intervals: usize,
}

impl Grid {
    pub fn new(l: f64, dx: f64) -> Result<Self, PdeError> {
        if !(l > 0.0 && dx > 0.0) {
            return Err(PdeError::InvalidGrid { l, dx });
        }
        let intervals = (2.0 * l / dx).round() as usize;
        if intervals < 100 {
            return Err(PdeError::InvalidGrid { l, dx });
        }
        // Keep N·dx = 2L exactly by adjusting L to the rounded node count.
        Ok(Self { l: 0.5 * intervals as f64 * dx, dx, intervals })
    }

    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.l + i as f64 * self.dx
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.x(i))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Field {
    pub t: f64,
    pub u: Vec<f64>,
}

impl Field {
    /// Linear interpolation at `x`, clamped to the grid.
    pub fn value_at(&self, grid: &Grid, x: f64) -> f64 {
        let s = ((x + grid.l) / grid.dx).clamp(0.0, grid.intervals as f64);
        let i = (s.floor() as usize).min(grid.intervals - 1);
        let w = s - i as f64;
        (1.0 - w) * self.u[i] + w * self.u[i + 1]
    }
}
