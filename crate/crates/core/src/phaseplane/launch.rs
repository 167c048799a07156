use super::{PhaseError, PhasePoint};
use crate::model::{pow, ModelParams};

/// Linear damping at `P1`; for `n = 1` the convection term is linear in `Y`.
fn effective_c(params: &ModelParams, c: f64) -> f64 {
    if params.n == 1.0 {
        c - params.k
    } else {
        c
    }
}

/// First-order point on the outgoing trajectory of `P1` at `X = delta`.
pub fn launch_state(params: &ModelParams, c: f64, delta: f64) -> Result<PhasePoint, PhaseError> {
    if !(delta > 0.0 && delta <= 1e-3) {
        return Err(PhaseError::DeltaOutOfRange(delta));
    }
    let (n, q, k) = (params.n, params.q, params.k);
    let c = effective_c(params, c);
    let y = if q == 1.0 {
        0.5 * (c + (c * c + 4.0).sqrt()) * delta
    } else if c > 0.0 {
        c * delta
    } else if c < 0.0 {
        pow(delta, q) / c.abs()
    } else {
        let half = 0.5 * (q + 1.0);
        if n > half {
            (2.0 / (q + 1.0)).sqrt() * delta.powf(half)
        } else if n == half {
            let v1 = ((k * k * n * n + 4.0 * n).sqrt() - k * n) / (2.0 * n);
            v1 * pow(delta, n)
        } else {
            pow(delta, q + 1.0 - n) / (k * n)
        }
    };
    Ok(PhasePoint::new(delta, y))
}

/// Local power-law fit `Y ≈ s·X` of the outgoing trajectory near `P1`, where
/// `m = d ln Y / d ln X`. Returns `(s, m, stiffness)`; the last entry is the
/// ratio of the transverse relaxation rate to the growth rate `X'/X`.
pub fn local_slope(params: &ModelParams, c: f64, x: f64) -> (f64, f64, f64) {
    let slope = |x: f64, m: f64| -> (f64, f64) {
        let d = params.kn() * pow(x, params.n - 1.0) - c;
        let g = pow(x, params.q - 1.0) * (1.0 - pow(x, params.p - params.q));
        let root = (d * d + 4.0 * m * g).sqrt();
        let s = if d > 0.0 {
            2.0 * g / (d + root)
        } else {
            (root - d) / (2.0 * m)
        };
        (s, d)
    };
    let h: f64 = 1e-3;
    let mut m = 1.0;
    for _ in 0..60 {
        let (sp, _) = slope(x * (1.0 + h), m);
        let (sm, _) = slope(x / (1.0 + h), m);
        let est = 1.0 + (sp.ln() - sm.ln()) / (2.0 * (1.0 + h).ln());
        if !est.is_finite() {
            break;
        }
        let next = (0.5 * (m + est)).clamp(0.5, 50.0);
        if (next - m).abs() < 1e-12 {
            m = next;
            break;
        }
        m = next;
    }
    let (s, d) = slope(x, m);
    (s, m, (d + m * s) / s)
}

const STIFFNESS_TARGET: f64 = 200.0;
/// Largest admissible `X / Y` at launch; slow algebraic escapes from a
/// center would otherwise need `ξ` beyond the resolution of `f64`.
const TIME_SCALE_TARGET: f64 = 1e6;
const MAX_LAUNCH_X: f64 = 0.05;

/// Launch point used for integration. Starts at `X = delta` on the local
/// power-law fit, moving outward along it while the trajectory is too stiff
/// for an explicit integrator or too slow to leave `P1`.
pub(crate) fn refined_launch(
    params: &ModelParams,
    c: f64,
    delta: f64,
) -> Result<PhasePoint, PhaseError> {
    launch_state(params, c, delta)?;
    let raise = |x: f64| {
        let (s, _, stiffness) = local_slope(params, c, x);
        stiffness > STIFFNESS_TARGET || 1.0 / s > TIME_SCALE_TARGET
    };
    let mut x = delta;
    if raise(delta) {
        if raise(MAX_LAUNCH_X) {
            x = MAX_LAUNCH_X;
        } else {
            let (mut lo, mut hi) = (delta.ln(), MAX_LAUNCH_X.ln());
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if raise(mid.exp()) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            x = hi.exp();
        }
    }
    let (s, _, _) = local_slope(params, c, x);
    Ok(PhasePoint::new(x, s * x))
}

/// `ξ` offsets of the outgoing trajectory below `x0`, down to `x_end`, from
/// `dξ = dX / (s X)`. Returns `(Δξ ≤ 0, X, Y)` in increasing `X`, excluding `x0`.
pub(crate) fn tail_below(
    params: &ModelParams,
    c: f64,
    x0: f64,
    x_end: f64,
) -> Vec<(f64, f64, f64)> {
    if x0 <= x_end {
        return Vec::new();
    }
    let per_decade = 40.0;
    let steps = ((x0 / x_end).log10() * per_decade).ceil().max(1.0) as usize;
    let dl = (x0 / x_end).ln() / steps as f64;
    let mut out = Vec::with_capacity(steps);
    let mut xi = 0.0;
    let mut s_prev = local_slope(params, c, x0).0;
    for i in 1..=steps {
        let x = x0 * (-(i as f64) * dl).exp();
        let s = local_slope(params, c, x).0;
        xi -= 0.5 * dl * (1.0 / s + 1.0 / s_prev);
        out.push((xi, x, s * x));
        s_prev = s;
    }
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_params;

    #[test]
    fn saddle_launch() {
        let m = validate_params(3.0, 5.0, 1.0, 1.0).unwrap();
        let p = launch_state(&m, 2.0, 1e-6).unwrap();
        assert_eq!(p.x, 1e-6);
        assert!((p.y / 1e-6 - (1.0 + 2f64.sqrt())).abs() < 1e-14);
        let m = validate_params(3.0, 3.0, 1.0, 1.0).unwrap();
        let p = launch_state(&m, 0.0, 1e-6).unwrap();
        assert!((p.y - 1e-6).abs() < 1e-20);
    }

    #[test]
    fn balanced_center_launch() {
        let m = validate_params(2.0, 4.0, 3.0, 1.0).unwrap();
        let p = launch_state(&m, 0.0, 1e-4).unwrap();
        let v1 = (12f64.sqrt() - 2.0) / 4.0;
        assert!((p.y - v1 * 1e-8).abs() < 1e-22);
    }

    #[test]
    fn other_center_launches() {
        let m = validate_params(3.0, 5.0, 2.0, 1.0).unwrap();
        let d = 1e-4;
        assert_eq!(launch_state(&m, 0.5, d).unwrap().y, 0.5 * d);
        assert!((launch_state(&m, -2.0, d).unwrap().y - d * d / 2.0).abs() < 1e-22);
        let y = launch_state(&m, 0.0, d).unwrap().y;
        assert!((y - (2.0 / 3.0f64).sqrt() * d.powf(1.5)).abs() < 1e-20);
        let m = validate_params(2.0, 5.0, 4.0, 1.0).unwrap();
        let y = launch_state(&m, 0.0, d).unwrap().y;
        assert!((y - d.powi(3) / 2.0).abs() < 1e-24);
    }

    #[test]
    fn reference_range_uses_linear_damping() {
        let m = validate_params(1.0, 2.0, 1.0, 3.0).unwrap();
        let p = launch_state(&m, 0.0, 1e-6).unwrap();
        let lam = 0.5 * (-3.0 + 13f64.sqrt());
        assert!((p.y / 1e-6 - lam).abs() < 1e-14);
    }

    #[test]
    fn delta_range() {
        let m = validate_params(3.0, 3.0, 1.0, 1.0).unwrap();
        assert!(launch_state(&m, 0.0, 0.0).is_err());
        assert!(launch_state(&m, 0.0, 2e-3).is_err());
    }

    #[test]
    fn local_slope_matches_leading_terms() {
        let m = validate_params(3.0, 5.0, 3.0, 1.0).unwrap();
        let x = 1e-5;
        let (s, e, _) = local_slope(&m, -2.0, x);
        assert!((s * x / (x.powi(3) / 2.0) - 1.0).abs() < 1e-6);
        assert!((e - 3.0).abs() < 1e-6);
        let m = validate_params(3.0, 3.0, 1.0, 1.0).unwrap();
        let (s, _, _) = local_slope(&m, 0.0, 1e-7);
        assert!((s - 1.0).abs() < 1e-6);
    }
}
