//! Parameter self-map of the `c = 0` phase plane and the change of variables
//! `U = X^{p−q}`, `W = Y X^{−(1+q)/2} / d`, `d = √(2/(q+1))`, under which
//! orbits satisfy
//!
//! ```text
//! dU/dη = 2(p−q)/(q+1) · U W
//! dW/dη = −kn d · U^e W − U + 1 − W²,   e = (2n−1−q) / (2(p−q))
//! ```
//!
//! with `dη/dξ = X^{(q−1)/2} / d`. All three coefficients are invariant under
//! the map, so mapped parameter sets share orbits and `k*·√n`.

use serde::Serialize;
use thiserror::Error;

use crate::critical::{kstar, CriticalError};
use crate::model::{validate_params, ModelError, ModelParams};
use crate::phaseplane::{PhasePoint, Trajectory};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SelfMapError {
    #[error("mapped parameters leave the valid range: {0}")]
    TargetOutOfRange(ModelError),
    #[error("transform undefined at X = 0")]
    OriginUndefined,
    #[error("trajectory velocity is {0}, the map applies at c = 0")]
    NotCZero(f64),
    #[error("trajectory has too few points for differencing")]
    TooFewPoints,
    #[error(transparent)]
    Critical(#[from] CriticalError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfMapPair {
    pub source: ModelParams,
    pub target: ModelParams,
    pub n2: f64,
}

/// Unchecked image `(n₂, p₂, q₂, k₂)` of `(n, p, q, k)`.
pub fn raw_map(n: f64, p: f64, q: f64, k: f64, n2: f64) -> (f64, f64, f64, f64) {
    let r = n2 / n;
    (n2, (p + 1.0) * r - 1.0, (q + 1.0) * r - 1.0, k * (n / n2).sqrt())
}

pub fn map_params(source: &ModelParams, n2: f64) -> Result<SelfMapPair, SelfMapError> {
    let (n, p, q, k) = raw_map(source.n, source.p, source.q, source.k, n2);
    let target = validate_params(n, p, q, k).map_err(SelfMapError::TargetOutOfRange)?;
    Ok(SelfMapPair { source: *source, target, n2 })
}

pub fn transform_point(source: &ModelParams, pt: PhasePoint) -> Result<(f64, f64), SelfMapError> {
    if pt.x <= 0.0 {
        return Err(SelfMapError::OriginUndefined);
    }
    let d = (2.0 / (source.q + 1.0)).sqrt();
    let u = pt.x.powf(source.p - source.q);
    let w = pt.y * pt.x.powf(-0.5 * (1.0 + source.q)) / d;
    Ok((u, w))
}

/// Coefficients `(2(p−q)/(q+1), kn·d, e)` of the transformed system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformedCoeffs {
    pub growth: f64,
    pub damping: f64,
    pub exponent: f64,
}

impl TransformedCoeffs {
    pub fn of(n: f64, p: f64, q: f64, k: f64) -> Self {
        Self {
            growth: 2.0 * (p - q) / (q + 1.0),
            damping: k * n * (2.0 / (q + 1.0)).sqrt(),
            exponent: (2.0 * n - 1.0 - q) / (2.0 * (p - q)),
        }
    }
}

/// Residual of the transformed system along `traj`, evaluated with the
/// coefficients of the image of `source` under the map with parameter `n2`.
pub fn transformed_residual(
    source: &ModelParams,
    traj: &Trajectory,
    n2: f64,
) -> Result<f64, SelfMapError> {
    let (n, p, q, k) = raw_map(source.n, source.p, source.q, source.k, n2);
    residual_with(source, traj, TransformedCoeffs::of(n, p, q, k))
}

/// Residual of the transformed system along `traj` for given coefficients.
/// Derivatives are centered differences on the trajectory samples; use a
/// uniformly sampled shot.
pub fn residual_with(
    source: &ModelParams,
    traj: &Trajectory,
    coeffs: TransformedCoeffs,
) -> Result<f64, SelfMapError> {
    if traj.c != 0.0 {
        return Err(SelfMapError::NotCZero(traj.c));
    }
    let d = (2.0 / (source.q + 1.0)).sqrt();
    let pts: Vec<(f64, PhasePoint)> = traj
        .points
        .iter()
        .copied()
        .take_while(|(_, p)| p.y > 0.0 && p.x < 1.0)
        .collect();
    if pts.len() < 5 {
        return Err(SelfMapError::TooFewPoints);
    }
    let mut eta = Vec::with_capacity(pts.len());
    let mut uw = Vec::with_capacity(pts.len());
    let rate = |x: f64| x.powf(0.5 * (source.q - 1.0)) / d;
    let mut acc = 0.0;
    for (i, (xi, pt)) in pts.iter().enumerate() {
        if i > 0 {
            let (xi0, p0) = pts[i - 1];
            acc += 0.5 * (xi - xi0) * (rate(p0.x) + rate(pt.x));
        }
        eta.push(acc);
        uw.push(transform_point(source, *pt)?);
    }
    let mut worst: f64 = 0.0;
    for i in 1..pts.len() - 1 {
        let (h0, h1) = (eta[i] - eta[i - 1], eta[i + 1] - eta[i]);
        let deriv = |f: &dyn Fn(usize) -> f64| {
            (-h1 / (h0 * (h0 + h1))) * f(i - 1)
                + ((h1 - h0) / (h0 * h1)) * f(i)
                + (h0 / (h1 * (h0 + h1))) * f(i + 1)
        };
        let du = deriv(&|j| uw[j].0);
        let dw = deriv(&|j| uw[j].1);
        let (u, w) = uw[i];
        let ru = du - coeffs.growth * u * w;
        let rw = dw - (-coeffs.damping * u.powf(coeffs.exponent) * w - u + 1.0 - w * w);
        worst = worst.max(ru.abs()).max(rw.abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub source: (f64, f64, f64),
    pub target: (f64, f64, f64),
    pub kstar_source: f64,
    pub kstar_target: f64,
    /// `|k*₂√n₂ − k*₁√n₁|`.
    pub invariant_gap: f64,
}

pub fn kstar_invariance(
    (n, p, q): (f64, f64, f64),
    n2: f64,
    tol: f64,
) -> Result<InvarianceReport, SelfMapError> {
    let source = validate_params(n, p, q, 1.0)?;
    let pair = map_params(&source, n2)?;
    let t = pair.target;
    let (a, b) = rayon::join(|| kstar(n, p, q, tol), || kstar(t.n, t.p, t.q, tol));
    let (a, b) = (a?, b?);
    Ok(InvarianceReport {
        source: (n, p, q),
        target: (t.n, t.p, t.q),
        kstar_source: a.value,
        kstar_target: b.value,
        invariant_gap: (b.value * t.n.sqrt() - a.value * n.sqrt()).abs(),
    })
}
