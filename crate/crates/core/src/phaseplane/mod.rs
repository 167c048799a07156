//! The traveling-wave phase plane `X' = Y`, `Y' = cY − knX^{n−1}Y − X^p + X^q`
//! for profiles `u(x, t) = f(x + ct)`, with `X = f` and `Y = f'`.

mod launch;
mod profile;
mod shoot;

pub use launch::{launch_state, local_slope};
pub(crate) use launch::tail_below;
pub use profile::{reconstruct_profile, ProfileTable};
pub use shoot::{shoot, shoot_once, ShootOptions};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{pow, ModelParams};
use crate::ode::OdeError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "Y")]
    pub y: f64,
}

impl PhasePoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    CrossedX1,
    HitXAxis,
    NearP2,
    CrossedYAxis,
    Capped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub xi: f64,
    pub point: PhasePoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConnectionClass {
    DirectLeading,
    DirectCritical,
    Overshoot,
    Undetermined,
}

impl ConnectionClass {
    pub fn is_direct(self) -> bool {
        matches!(self, Self::DirectLeading | Self::DirectCritical)
    }
}

/// Components of the final offset from `P2` in the eigenbasis, recorded when a
/// node is reached: `(X − 1, Y) = a·e₊ + b·e₋`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Approach {
    pub a: f64,
    pub b: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub params: ModelParams,
    pub c: f64,
    pub delta: f64,
    /// `(ξ, point)` in increasing `ξ`.
    pub points: Vec<(f64, PhasePoint)>,
    pub events: Vec<Event>,
    pub connection: ConnectionClass,
    pub x0_crossing: Option<f64>,
    /// The eigen-gap at `P2` was below the tangency threshold.
    pub degenerate: bool,
    pub approach: Option<Approach>,
}

impl Trajectory {
    pub fn last(&self) -> PhasePoint {
        self.points.last().map(|p| p.1).unwrap_or(PhasePoint::new(0.0, 0.0))
    }

    /// `Y` at `X` by linear interpolation along the monotone (`Y > 0`) part.
    pub fn y_at(&self, x: f64) -> Option<f64> {
        let pts: Vec<PhasePoint> = self
            .points
            .iter()
            .map(|p| p.1)
            .take_while(|p| p.y > 0.0)
            .collect();
        let i = pts.partition_point(|p| p.x < x);
        if i == 0 || i == pts.len() {
            return None;
        }
        let (a, b) = (pts[i - 1], pts[i]);
        let t = (x - a.x) / (b.x - a.x);
        Some(a.y + t * (b.y - a.y))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("xi,X,Y\n");
        for (xi, p) in &self.points {
            s.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", xi, p.x, p.y));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhaseError {
    #[error("launch offset delta = {0:e} must lie in (0, 1e-3]")]
    DeltaOutOfRange(f64),
    #[error("integration failed: {0}")]
    IntegrationFailure(#[from] OdeError),
    #[error("trajectory crossed Y = 0 at X = {x} <= 1")]
    IntegrityViolation { x: f64, xi: f64 },
    #[error("trajectory is not a connection to P2 ({0:?})")]
    NotAConnection(ConnectionClass),
}

/// Right-hand side of the phase-plane system. `X` is clamped at zero.
pub fn vector_field(params: &ModelParams, c: f64, pt: PhasePoint) -> (f64, f64) {
    let x = pt.x.max(0.0);
    let y = pt.y;
    let dy = c * y - params.kn() * pow(x, params.n - 1.0) * y - pow(x, params.p) + pow(x, params.q);
    (y, dy)
}

/// Flux of the phase flow through the curve `Y = g(X)` at `X`, signed so that
/// a positive value means the flow enters the region between the curve and
/// the `X`-axis.
pub fn flow_sign_across(
    params: &ModelParams,
    c: f64,
    curve_value: f64,
    curve_slope: f64,
    x: f64,
) -> f64 {
    let (dx, dy) = vector_field(params, c, PhasePoint::new(x, curve_value));
    curve_slope * dx - dy
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_params;

    #[test]
    fn field_examples() {
        let m = validate_params(3.0, 3.0, 1.0, 1.0).unwrap();
        assert_eq!(vector_field(&m, 0.0, PhasePoint::new(1.0, 0.0)), (0.0, 0.0));
        let (a, b) = vector_field(&m, 0.0, PhasePoint::new(0.5, 0.375));
        assert_eq!(a, 0.375);
        assert!((b - 0.09375).abs() < 1e-15);
        let m = validate_params(2.5, 4.2, 1.7, 0.3).unwrap();
        assert_eq!(vector_field(&m, -1.2, PhasePoint::new(0.0, 0.0)), (0.0, 0.0));
    }

    #[test]
    fn flow_sign_on_basic_curve() {
        let m = validate_params(3.0, 3.0, 1.0, 2.0).unwrap();
        let g = |x: f64| x - x.powi(3);
        let dg = |x: f64| 1.0 - 3.0 * x * x;
        assert!(flow_sign_across(&m, 0.0, g(0.5), dg(0.5), 0.5) > 0.0);
        assert_eq!(flow_sign_across(&m, 0.0, g(0.0), dg(0.0), 0.0), 0.0);
        assert_eq!(flow_sign_across(&m, 0.0, g(1.0), dg(1.0), 1.0), 0.0);
    }

    #[test]
    fn flow_sign_on_eps_curve_is_outward() {
        let (n, q) = (3.0f64, 2.0f64);
        let k = 2.0 * (n - q).sqrt() / n;
        let m = validate_params(n, n, q, k).unwrap();
        let eps = q * (q - 1.0) / (n * (n - 1.0) - q * (q - 1.0));
        let a = k * (1.0 + eps);
        let x: f64 = 0.5;
        let g = a * (x.powf(q) - x.powf(n));
        let dg = a * (q * x.powf(q - 1.0) - n * x.powf(n - 1.0));
        assert!(flow_sign_across(&m, 0.0, g, dg, x) < 0.0);
    }
}
