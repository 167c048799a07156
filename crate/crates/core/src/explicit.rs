//! Closed-form trajectories, invariant curves and waves of the phase-plane
//! system, used as oracles.

use serde::Serialize;
use thiserror::Error;

use crate::model::{validate_params, ModelParams};
use crate::phaseplane::{shoot, PhaseError, ShootOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseId {
    Basic,
    Curve0,
    Expl2C1,
    Expl2C2,
    Curve1,
    Curve3Estimate3,
    Curve3Estimate4,
    Complex,
    EpsCurve,
}

impl CaseId {
    pub fn name(self) -> &'static str {
        match self {
            Self::Basic => "BASIC",
            Self::Curve0 => "CURVE0",
            Self::Expl2C1 => "EXPL2_C1",
            Self::Expl2C2 => "EXPL2_C2",
            Self::Curve1 => "CURVE1",
            Self::Curve3Estimate3 => "CURVE3_EST3",
            Self::Curve3Estimate4 => "CURVE3_EST4",
            Self::Complex => "COMPLEX",
            Self::EpsCurve => "EPSCURVE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseKind {
    Trajectory,
    InvariantCurveInward,
    InvariantCurveOutward,
}

/// `Y = a (X^{e1} − X^{e2})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerCurve {
    pub a: f64,
    pub e1: f64,
    pub e2: f64,
}

impl PowerCurve {
    pub fn value(&self, x: f64) -> f64 {
        self.a * (x.powf(self.e1) - x.powf(self.e2))
    }

    pub fn slope(&self, x: f64) -> f64 {
        self.a * (self.e1 * x.powf(self.e1 - 1.0) - self.e2 * x.powf(self.e2 - 1.0))
    }
}

/// `f(ξ) = (1 + C e^{−rate·ξ})^{−scale/(n−1)}`; `scale = 1` is the exact wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveForm {
    pub rate: f64,
    pub n: f64,
    pub scale: f64,
}

impl WaveForm {
    /// `(f, f', f'')` at `ξ`.
    pub fn eval(&self, xi: f64, big_c: f64) -> (f64, f64, f64) {
        let s = self.scale / (self.n - 1.0);
        let r = self.rate;
        let e = big_c * (-r * xi).exp();
        let u = 1.0 + e;
        let f = u.powf(-s);
        let f1 = s * r * e * u.powf(-s - 1.0);
        let f2 = -s * r * r * e * u.powf(-s - 2.0) * (u - (s + 1.0) * e);
        (f, f1, f2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExplicitCase {
    pub id: CaseId,
    pub params: ModelParams,
    pub c: f64,
    pub curve: PowerCurve,
    pub kind: CaseKind,
    pub wave: Option<WaveForm>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExplicitError {
    #[error("operation does not apply to a case of kind {0:?}")]
    WrongKind(CaseKind),
    #[error("case has no closed-form wave")]
    NoWaveForm,
    #[error("at least 10 samples are required")]
    TooFewSamples,
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

fn params(n: f64, p: f64, q: f64, k: f64) -> ModelParams {
    validate_params(n, p, q, k).expect("catalogue parameters are valid")
}

fn bernoulli(id: CaseId, m: ModelParams, c: f64, a: f64) -> ExplicitCase {
    ExplicitCase {
        id,
        params: m,
        c,
        curve: PowerCurve { a, e1: 1.0, e2: m.n },
        kind: CaseKind::Trajectory,
        wave: (m.n > 1.0).then_some(WaveForm { rate: a * (m.n - 1.0), n: m.n, scale: 1.0 }),
    }
}

/// `Y = X − Xⁿ` as an invariant curve for `p = n`, `c = 0`.
pub fn basic(n: f64, q: f64, k: f64) -> ExplicitCase {
    ExplicitCase {
        id: CaseId::Basic,
        params: params(n, n, q, k),
        c: 0.0,
        curve: PowerCurve { a: 1.0, e1: 1.0, e2: n },
        kind: CaseKind::InvariantCurveInward,
        wave: None,
    }
}

/// `Y = k(X − Xⁿ)` with `c = (k² − 1)/k`, `p = n`, `q = 1`.
pub fn curve0(n: f64, k: f64) -> ExplicitCase {
    bernoulli(CaseId::Curve0, params(n, n, 1.0, k), (k * k - 1.0) / k, k)
}

/// `Y = c_i (X − Xⁿ)` for `p = 2n − 1`, `q = n`; `upper` selects `c₁`.
/// `None` when `k²n² < 4n`.
pub fn expl2(n: f64, k: f64, upper: bool) -> Option<ExplicitCase> {
    let disc = k * k * n * n - 4.0 * n;
    if disc < 0.0 {
        return None;
    }
    let root = disc.sqrt();
    let (id, c) = if upper {
        (CaseId::Expl2C1, (k * n + root) / (2.0 * n))
    } else {
        (CaseId::Expl2C2, (k * n - root) / (2.0 * n))
    };
    Some(bernoulli(id, params(n, 2.0 * n - 1.0, n, k), c, c))
}

/// `Y = X − Xⁿ` at `c = 0` for `p = 2n − 1`, `q = 1`, `k = (n+1)/n`.
pub fn curve1(n: f64) -> ExplicitCase {
    bernoulli(CaseId::Curve1, params(n, 2.0 * n - 1.0, 1.0, (n + 1.0) / n), 0.0, 1.0)
}

fn curve3(id: CaseId, n: f64, p: f64, q: f64, k: f64) -> ExplicitCase {
    ExplicitCase {
        id,
        params: params(n, p, q, k),
        c: 0.0,
        curve: PowerCurve {
            a: 2.0 / (2.0 * (q + 1.0)).sqrt(),
            e1: 0.5 * (q + 1.0),
            e2: n,
        },
        kind: CaseKind::Trajectory,
        wave: (q == 1.0 && n > 1.0).then_some(WaveForm { rate: n - 1.0, n, scale: 1.0 }),
    }
}

/// `Y = (2/√(2(q+1)))(X^{(q+1)/2} − Xⁿ)` with `p = 2n − 1`.
pub fn curve3_estimate3(n: f64, q: f64) -> ExplicitCase {
    let k = (2.0 * n + q + 1.0) / (n * (2.0 * (q + 1.0)).sqrt());
    curve3(CaseId::Curve3Estimate3, n, 2.0 * n - 1.0, q, k)
}

/// Same curve with `p = n + (q − 1)/2`, `k = 2/√(2(q+1))`.
pub fn curve3_estimate4(n: f64, q: f64) -> ExplicitCase {
    let k = 2.0 / (2.0 * (q + 1.0)).sqrt();
    curve3(CaseId::Curve3Estimate4, n, n + 0.5 * (q - 1.0), q, k)
}

/// `Y = A(X^{q+1−n} − X^{p+1−n})` with `k = (A²(p−q) + 1)/(An)`, `c = 0`.
pub fn complex(n: f64, p: f64, q: f64, a: f64) -> ExplicitCase {
    let k = (a * a * (p - q) + 1.0) / (a * n);
    ExplicitCase {
        id: CaseId::Complex,
        params: params(n, p, q, k),
        c: 0.0,
        curve: PowerCurve { a, e1: q + 1.0 - n, e2: p + 1.0 - n },
        kind: CaseKind::InvariantCurveInward,
        wave: None,
    }
}

pub fn eps_of(n: f64, q: f64) -> f64 {
    q * (q - 1.0) / (n * (n - 1.0) - q * (q - 1.0))
}

/// `Y = k(1+ε)(X^q − Xⁿ)` for `p = n`, `k = 2√(n−q)/n`, `c = 0`.
pub fn epscurve(n: f64, q: f64) -> ExplicitCase {
    let k = 2.0 * (n - q).sqrt() / n;
    ExplicitCase {
        id: CaseId::EpsCurve,
        params: params(n, n, q, k),
        c: 0.0,
        curve: PowerCurve { a: k * (1.0 + eps_of(n, q)), e1: q, e2: n },
        kind: CaseKind::InvariantCurveOutward,
        wave: None,
    }
}

/// Default instances of every catalogued case.
pub fn list_cases() -> Vec<ExplicitCase> {
    let mut v = vec![basic(3.0, 2.0, 1.5), curve0(3.0, 2.0)];
    v.extend(expl2(3.0, 2.0, true));
    v.extend(expl2(3.0, 2.0, false));
    v.extend([
        curve1(3.0),
        curve3_estimate3(7.0, 1.0),
        curve3_estimate4(5.0, 3.0),
        complex(2.0, 4.0, 3.0, 1.0),
        epscurve(3.0, 2.0),
    ]);
    v
}

impl ExplicitCase {
    /// Conditions under which the case carries its stated meaning: criticality
    /// of the trajectory, or the sign of the flow across the curve.
    pub fn valid(&self) -> bool {
        let ModelParams { n, p, q, k, .. } = self.params;
        match self.id {
            CaseId::Basic => k > 1.0 && p == n,
            CaseId::Curve0 => k * k * (n - 1.0) > 1.0,
            CaseId::Expl2C1 => n > 1.0 && k > (2.0 * n - 1.0) / (n * (n - 1.0).sqrt()),
            CaseId::Expl2C2 => k * k * n * n >= 4.0 * n,
            CaseId::Curve1 => n > 1.0,
            CaseId::Curve3Estimate3 => n > 1.5 * (q + 1.0),
            CaseId::Curve3Estimate4 => n > q + 1.0,
            CaseId::Complex => n <= 0.5 * (q + 1.0) && q + 1.0 - n > 0.0,
            CaseId::EpsCurve => q > 1.0 && q < n,
        }
    }

    /// Scalar whose sign gives the direction of the flow across the curve.
    pub fn sign_function(&self, x: f64) -> Option<f64> {
        let ModelParams { n, p, q, k, .. } = self.params;
        match self.id {
            CaseId::Basic => {
                Some((k - 1.0) * n * x.powf(n - 1.0) * (x - x.powf(n)) + x - x.powf(q))
            }
            CaseId::Complex => Some(
                p - q + (q + 1.0 - n) * x.powf(q + 1.0 - 2.0 * n)
                    - (p + 1.0 - n) * x.powf(p + 1.0 - 2.0 * n),
            ),
            CaseId::EpsCurve => {
                let e = eps_of(n, q);
                Some(
                    (1.0 + e).powi(2) * q * x.powf(q - 1.0)
                        - e * (1.0 + e) * n * x.powf(n - 1.0)
                        - n * n / (4.0 * (n - q)),
                )
            }
            _ => None,
        }
    }
}

/// `sup |Y Y' − (cY − knX^{n−1}Y − X^p + X^q)|` over `X ∈ [0.05, 0.95]`.
pub fn residual_trajectory(case: &ExplicitCase, n_samples: usize) -> Result<f64, ExplicitError> {
    if case.kind != CaseKind::Trajectory {
        return Err(ExplicitError::WrongKind(case.kind));
    }
    if n_samples < 10 {
        return Err(ExplicitError::TooFewSamples);
    }
    let ModelParams { n, p, q, k, .. } = case.params;
    let mut worst: f64 = 0.0;
    for i in 0..n_samples {
        let x = 0.05 + 0.9 * i as f64 / (n_samples - 1) as f64;
        let y = case.curve.value(x);
        let dy = case.curve.slope(x);
        let rhs = case.c * y - k * n * x.powf(n - 1.0) * y - x.powf(p) + x.powf(q);
        worst = worst.max((y * dy - rhs).abs());
    }
    Ok(worst)
}

/// Sup residual of the closed-form wave (with `C = 1`) in the profile ODE
/// over `ξ ∈ [−20, 20]`.
pub fn residual_wave(case: &ExplicitCase, n_samples: usize) -> Result<f64, ExplicitError> {
    let wave = case.wave.ok_or(ExplicitError::NoWaveForm)?;
    if n_samples < 10 {
        return Err(ExplicitError::TooFewSamples);
    }
    let ModelParams { n, p, q, k, .. } = case.params;
    let mut worst: f64 = 0.0;
    for i in 0..n_samples {
        let xi = -20.0 + 40.0 * i as f64 / (n_samples - 1) as f64;
        let (f, f1, f2) = wave.eval(xi, 1.0);
        let rhs = case.c * f1 - k * n * f.powf(n - 1.0) * f1 - f.powf(p) + f.powf(q);
        worst = worst.max((f2 - rhs).abs());
    }
    Ok(worst)
}

/// Whether the sign function has the declared sign on a uniform grid of
/// `[0, 1]`; zeros are accepted at the endpoints.
pub fn sign_check(case: &ExplicitCase, n_samples: usize) -> Result<bool, ExplicitError> {
    let inward = match case.kind {
        CaseKind::InvariantCurveInward => true,
        CaseKind::InvariantCurveOutward => false,
        k => return Err(ExplicitError::WrongKind(k)),
    };
    if n_samples < 10 {
        return Err(ExplicitError::TooFewSamples);
    }
    for i in 0..=n_samples {
        let x = i as f64 / n_samples as f64;
        let Some(v) = case.sign_function(x) else {
            return Err(ExplicitError::WrongKind(case.kind));
        };
        let endpoint = i == 0 || i == n_samples;
        let ok = if endpoint && v.abs() <= 1e-12 {
            true
        } else if v.is_nan() {
            // 0^negative at X = 0.
            endpoint
        } else if inward {
            v >= 0.0
        } else {
            v <= 0.0
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sup over the shot points (`X < 1`, `Y > 0`) of `|Y − curve(X)|`.
pub fn shoot_deviation(case: &ExplicitCase, opts: &ShootOptions) -> Result<f64, ExplicitError> {
    if case.kind != CaseKind::Trajectory {
        return Err(ExplicitError::WrongKind(case.kind));
    }
    let traj = shoot(&case.params, case.c, opts)?;
    let mut worst: f64 = 0.0;
    for (_, pt) in &traj.points {
        if pt.x < 1.0 && pt.y > 0.0 {
            worst = worst.max((pt.y - case.curve.value(pt.x)).abs());
        }
    }
    Ok(worst)
}

/// CSV table `case_id,residual,sign_ok,shoot_deviation`; inapplicable
/// entries are left empty.
pub fn verify_table(cases: &[ExplicitCase]) -> Result<String, ExplicitError> {
    use rayon::prelude::*;
    let rows: Vec<Result<String, ExplicitError>> = cases
        .par_iter()
        .map(|case| {
            let residual = match case.kind {
                CaseKind::Trajectory => format!("{:.6e}", residual_trajectory(case, 100)?),
                _ => String::new(),
            };
            let sign = match case.kind {
                CaseKind::Trajectory => String::new(),
                _ => sign_check(case, 1000)?.to_string(),
            };
            let dev = match case.kind {
                CaseKind::Trajectory => {
                    format!("{:.6e}", shoot_deviation(case, &ShootOptions::default())?)
                }
                _ => String::new(),
            };
            Ok(format!("{},{},{},{}\n", case.id.name(), residual, sign, dev))
        })
        .collect();
    let mut out = String::from("case_id,residual,sign_ok,shoot_deviation\n");
    for r in rows {
        out.push_str(&r?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phaseplane::flow_sign_across;

    #[test]
    fn catalogue_examples() {
        let c = curve0(3.0, 2.0);
        assert_eq!(c.c, 1.5);
        assert_eq!(c.curve.value(0.5), 2.0 * (0.5 - 0.125));
        let c = curve1(3.0);
        assert_eq!((c.params.p, c.params.q, c.params.k, c.c), (5.0, 1.0, 4.0 / 3.0, 0.0));
        let c = complex(2.0, 4.0, 3.0, 1.0);
        assert_eq!(c.params.k, 1.0);
        assert!((c.curve.value(0.5) - (0.25 - 0.125)).abs() < 1e-15);
        for case in list_cases() {
            assert_eq!(case.curve.value(1.0), 0.0);
            assert!(case.curve.value(0.0).abs() < 1e-300);
        }
    }

    #[test]
    fn estimate4_reduces_to_basic_threshold() {
        for n in [2.5, 3.0, 6.0] {
            let e = curve3_estimate4(n, 1.0);
            let b = curve0(n, 1.0);
            assert_eq!(e.params.p, b.params.p);
            assert_eq!(e.params.k, 1.0);
            assert_eq!(e.curve, b.curve);
        }
    }

    #[test]
    fn trajectory_residuals() {
        for case in list_cases().iter().filter(|c| c.kind == CaseKind::Trajectory) {
            let r = residual_trajectory(case, 100).unwrap();
            assert!(r < 1e-12, "{:?} {r}", case.id);
            if case.wave.is_some() {
                let r = residual_wave(case, 400).unwrap();
                assert!(r < 1e-12, "{:?} {r}", case.id);
            }
        }
    }

    #[test]
    fn negative_controls() {
        let mut wrong = curve0(3.0, 1.0);
        wrong.c = 1.0;
        assert!(residual_trajectory(&wrong, 100).unwrap() > 1e-2);
        let mut perturbed = curve0(3.0, 2.0);
        perturbed.wave.as_mut().unwrap().scale = 1.01;
        assert!(residual_wave(&perturbed, 400).unwrap() > 1e-3);
        assert!(matches!(
            residual_trajectory(&basic(3.0, 2.0, 1.5), 100),
            Err(ExplicitError::WrongKind(_))
        ));
        assert!(matches!(residual_wave(&complex(2.0, 4.0, 3.0, 1.0), 100), Err(ExplicitError::NoWaveForm)));
    }

    #[test]
    fn sign_checks() {
        assert!(sign_check(&basic(3.0, 2.0, 1.5), 1000).unwrap());
        assert!(sign_check(&complex(2.0, 4.0, 3.0, 1.0), 1000).unwrap());
        assert!(sign_check(&epscurve(3.0, 2.0), 1000).unwrap());
        assert!(!sign_check(&basic(3.0, 2.0, 0.5), 1000).unwrap());
    }

    #[test]
    fn sign_functions_agree_with_flow() {
        for case in list_cases().iter().filter(|c| c.kind != CaseKind::Trajectory) {
            for i in 1..20 {
                let x = i as f64 / 20.0;
                let g = case.curve.value(x);
                let flow = flow_sign_across(&case.params, case.c, g, case.curve.slope(x), x);
                let s = case.sign_function(x).unwrap();
                assert_eq!(flow > 0.0, s > 0.0, "{:?} at {x}", case.id);
            }
        }
    }

    #[test]
    fn shots_follow_curves() {
        for case in list_cases().iter().filter(|c| c.kind == CaseKind::Trajectory) {
            let d = shoot_deviation(case, &ShootOptions::default()).unwrap();
            assert!(d < 1e-6, "{:?} {d}", case.id);
        }
    }
}
