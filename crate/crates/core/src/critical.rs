//! Critical velocity `c̄` and threshold coefficient `k*` by bisection on the
//! outcome of phase-plane shots.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{cbar_bracket, validate_params, ModelError, ModelParams};
use crate::phaseplane::{shoot, ConnectionClass, PhaseError, ShootOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalResult {
    pub value: f64,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub tol: f64,
    pub evaluations: usize,
    #[serde(skip)]
    pub endpoint_classes: (Option<ConnectionClass>, Option<ConnectionClass>),
}

impl CriticalResult {
    pub fn width(&self) -> f64 {
        self.bracket_hi - self.bracket_lo
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CriticalError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error("shot at {what} = {at} stayed undetermined after delta retries")]
    ShootUndetermined { what: &'static str, at: f64 },
    #[error("no sign change of the predicate after 10 bracket widenings")]
    BracketExhausted,
    #[error("evaluation budget of {0} shots exhausted")]
    BudgetExhausted(usize),
    #[error("tolerance {0:e} is below 1e-10")]
    TolTooSmall(f64),
}

pub const DEFAULT_TOL: f64 = 1e-8;
pub const BUDGET: usize = 80;

fn classify(
    params: &ModelParams,
    c: f64,
    opts: &ShootOptions,
    what: &'static str,
    at: f64,
) -> Result<ConnectionClass, CriticalError> {
    match shoot(params, c, opts)?.connection {
        ConnectionClass::Undetermined => Err(CriticalError::ShootUndetermined { what, at }),
        class => Ok(class),
    }
}

fn check_tol(tol: f64) -> Result<(), CriticalError> {
    if tol >= 1e-10 {
        Ok(())
    } else {
        Err(CriticalError::TolTooSmall(tol))
    }
}

pub fn cbar(params: &ModelParams, tol: f64) -> Result<CriticalResult, CriticalError> {
    cbar_with(params, tol, &ShootOptions::default())
}

/// Bisect `c` on "the shot is a direct connection" over
/// `[−2√(p−q), kn − 2√(p−q)]`.
pub fn cbar_with(
    params: &ModelParams,
    tol: f64,
    opts: &ShootOptions,
) -> Result<CriticalResult, CriticalError> {
    check_tol(tol)?;
    let (mut lo, mut hi) = cbar_bracket(params);
    let class = |c: f64| classify(params, c, opts, "c", c);
    let (lo_class, hi_class) = rayon::join(|| class(lo), || class(hi));
    let (mut lo_class, hi_class) = (lo_class?, hi_class?);
    let mut evaluations = 2;

    let step = (hi - lo).max(1.0);
    let mut widen = 0;
    while !lo_class.is_direct() {
        if widen == 10 {
            return Err(CriticalError::BracketExhausted);
        }
        lo -= step;
        lo_class = class(lo)?;
        evaluations += 1;
        widen += 1;
    }

    if hi_class.is_direct() {
        // The supremum sits on the node/focus boundary; just above it P2 is a
        // focus and every shot overshoots.
        let above = hi + tol;
        let above_class = class(above)?;
        evaluations += 1;
        if !above_class.is_direct() {
            return Ok(CriticalResult {
                value: hi,
                bracket_lo: hi,
                bracket_hi: above,
                tol,
                evaluations,
                endpoint_classes: (Some(hi_class), Some(above_class)),
            });
        }
        return Err(CriticalError::BracketExhausted);
    }

    let mut classes = (lo_class, hi_class);
    while hi - lo > tol {
        if evaluations >= BUDGET {
            return Err(CriticalError::BudgetExhausted(BUDGET));
        }
        let mid = 0.5 * (lo + hi);
        let cm = class(mid)?;
        evaluations += 1;
        if cm.is_direct() {
            lo = mid;
            classes.0 = cm;
        } else {
            hi = mid;
            classes.1 = cm;
        }
    }
    Ok(CriticalResult {
        value: 0.5 * (lo + hi),
        bracket_lo: lo,
        bracket_hi: hi,
        tol,
        evaluations,
        endpoint_classes: (Some(classes.0), Some(classes.1)),
    })
}

pub fn kstar(n: f64, p: f64, q: f64, tol: f64) -> Result<CriticalResult, CriticalError> {
    kstar_with(n, p, q, tol, &ShootOptions::default())
}

/// Relative offset used to confirm the closed form when `n ≤ (q+1)/2`.
const CLOSED_FORM_CHECK: f64 = 1e-4;

/// Bisect `k` on "the shot at `c = 0` is a direct connection".
pub fn kstar_with(
    n: f64,
    p: f64,
    q: f64,
    tol: f64,
    opts: &ShootOptions,
) -> Result<CriticalResult, CriticalError> {
    check_tol(tol)?;
    let base = validate_params(n, p, q, 1.0)?;
    let pred = |k: f64| -> Result<ConnectionClass, CriticalError> {
        let m = base.with_k(k)?;
        classify(&m, 0.0, opts, "k", k)
    };
    let k_low = 2.0 * (p - q).sqrt() / n;
    let mut evaluations = 0;

    if base.convection_dominated() {
        let (below, above) = (k_low * (1.0 - CLOSED_FORM_CHECK), k_low * (1.0 + CLOSED_FORM_CHECK));
        let (cb, ca) = rayon::join(|| pred(below), || pred(above));
        let (cb, ca) = (cb?, ca?);
        evaluations += 2;
        if !cb.is_direct() && ca.is_direct() {
            return Ok(CriticalResult {
                value: k_low,
                bracket_lo: below,
                bracket_hi: above,
                tol,
                evaluations,
                endpoint_classes: (Some(cb), Some(ca)),
            });
        }
    }

    let (mut lo, mut hi) = (k_low, (p / n).max(1.0));
    let (cl, ch) = rayon::join(|| pred(lo), || pred(hi));
    let (mut cl, mut ch) = (cl?, ch?);
    evaluations += 2;
    let mut widen = 0;
    while cl.is_direct() || !ch.is_direct() {
        if widen == 10 {
            return Err(CriticalError::BracketExhausted);
        }
        if cl.is_direct() {
            lo /= 1.5;
            cl = pred(lo)?;
            evaluations += 1;
        }
        if !ch.is_direct() {
            hi *= 1.5;
            ch = pred(hi)?;
            evaluations += 1;
        }
        widen += 1;
    }
    while hi - lo > tol {
        if evaluations >= BUDGET {
            return Err(CriticalError::BudgetExhausted(BUDGET));
        }
        let mid = 0.5 * (lo + hi);
        let cm = pred(mid)?;
        evaluations += 1;
        if cm.is_direct() {
            hi = mid;
            ch = cm;
        } else {
            lo = mid;
            cl = cm;
        }
    }
    Ok(CriticalResult {
        value: 0.5 * (lo + hi),
        bracket_lo: lo,
        bracket_hi: hi,
        tol,
        evaluations,
        endpoint_classes: (Some(cl), Some(ch)),
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Closed-form `c̄` for the two parameter families where the critical
/// trajectory is known explicitly.
pub fn cbar_explicit(params: &ModelParams) -> Option<f64> {
    let ModelParams { n, p, q, k, .. } = *params;
    if close(p, n) && close(q, 1.0) && k * k * (n - 1.0) > 1.0 {
        return Some((k * k - 1.0) / k);
    }
    if close(p, 2.0 * n - 1.0) && close(q, n) && n > 1.0 {
        let threshold = (2.0 * n - 1.0) / (n * (n - 1.0).sqrt());
        if k > threshold {
            return Some((k * n + (k * k * n * n - 4.0 * n).sqrt()) / (2.0 * n));
        }
    }
    None
}
