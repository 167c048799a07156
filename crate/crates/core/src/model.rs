//! Parameters of `u_t = u_xx + k (u^n)_x + u^p - u^q` and the spectral data of
//! the traveling-wave phase plane at the equilibrium `P2 = (1, 0)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parameter `{0}` is not finite")]
    NonFinite(&'static str),
    #[error("k = {0} must be positive; for k < 0 solve the reflected problem x -> -x with |k|")]
    NonPositiveK(f64),
    #[error("exponents must satisfy p > q (got p = {p}, q = {q})")]
    ExponentOrder { p: f64, q: f64 },
    #[error("absorption exponent q = {0} must satisfy q >= 1")]
    QTooSmall(f64),
    #[error("convection exponent n = {0} must satisfy n >= 1")]
    NTooSmall(f64),
}

/// A validated parameter tuple `(n, p, q, k)`.
///
/// Exponents are real. The main range is `n >= 2, p > q >= 1, k > 0`;
/// `1 <= n < 2` is admitted and flagged by [`ModelParams::reference_range`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub n: f64,
    pub p: f64,
    pub q: f64,
    pub k: f64,
    pub reference_range: bool,
}

impl ModelParams {
    pub fn new(n: f64, p: f64, q: f64, k: f64) -> Result<Self, ModelError> {
        validate_params(n, p, q, k)
    }

    /// Same exponents, different convection coefficient.
    pub fn with_k(&self, k: f64) -> Result<Self, ModelError> {
        validate_params(self.n, self.p, self.q, k)
    }

    pub fn kn(&self) -> f64 {
        self.k * self.n
    }

    pub fn sqrt_gap(&self) -> f64 {
        (self.p - self.q).sqrt()
    }

    /// `n <= (q + 1) / 2`: the threshold coefficient reaches its lower bound.
    pub fn convection_dominated(&self) -> bool {
        self.n <= 0.5 * (self.q + 1.0)
    }
}

impl<'de> Deserialize<'de> for ModelParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: f64,
            p: f64,
            q: f64,
            k: f64,
        }
        let r = Raw::deserialize(d)?;
        validate_params(r.n, r.p, r.q, r.k).map_err(serde::de::Error::custom)
    }
}

/// Validate `(n, p, q, k)`, naming the first violated rule.
pub fn validate_params(n: f64, p: f64, q: f64, k: f64) -> Result<ModelParams, ModelError> {
    for (name, v) in [("n", n), ("p", p), ("q", q), ("k", k)] {
        if !v.is_finite() {
            return Err(ModelError::NonFinite(name));
        }
    }
    if k <= 0.0 {
        return Err(ModelError::NonPositiveK(k));
    }
    if q < 1.0 {
        return Err(ModelError::QTooSmall(q));
    }
    if p <= q {
        return Err(ModelError::ExponentOrder { p, q });
    }
    if n < 1.0 {
        return Err(ModelError::NTooSmall(n));
    }
    Ok(ModelParams {
        n,
        p,
        q,
        k,
        reference_range: n < 2.0,
    })
}

/// `x^e` for `x >= 0`, using integer powers when the exponent allows.
#[inline]
pub(crate) fn pow(x: f64, e: f64) -> f64 {
    if e.fract() == 0.0 && e.abs() <= 64.0 {
        x.powi(e as i32)
    } else {
        x.powf(e)
    }
}

/// Local type of `P2` as `c` varies, ordered from most to least stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum P2Class {
    StableNode,
    StableFocus,
    UnstableFocus,
    UnstableNode,
}

/// Eigen-pair data of the linearization at `P2`.
///
/// For a focus (`discriminant < 0`) both `lambda_plus` and `lambda_minus` hold
/// the common real part and `imag` holds `|Im λ|`; the eigenvector slopes are
/// then set to that real part as well.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenData {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub imag: f64,
    pub e_plus: [f64; 2],
    pub e_minus: [f64; 2],
    pub discriminant: f64,
    pub p2_class: P2Class,
}

impl EigenData {
    pub fn is_node(&self) -> bool {
        self.discriminant >= 0.0
    }

    /// `|λ+ − λ−|` for a node, `2|Im λ|` for a focus.
    pub fn gap(&self) -> f64 {
        self.discriminant.abs().sqrt()
    }
}

pub fn p2_eigen(params: &ModelParams, c: f64) -> EigenData {
    let trace = c - params.kn();
    let gap2 = 4.0 * (params.p - params.q);
    let discriminant = trace * trace - gap2;
    let (lambda_plus, lambda_minus, imag) = if discriminant >= 0.0 {
        let s = discriminant.sqrt();
        // Stable evaluation of the smaller-magnitude root through the product.
        let big = 0.5 * (trace + trace.signum() * s);
        if trace == 0.0 {
            (0.5 * s, -0.5 * s, 0.0)
        } else {
            let small = (params.p - params.q) / big;
            if big < small {
                (small, big, 0.0)
            } else {
                (big, small, 0.0)
            }
        }
    } else {
        let re = 0.5 * trace;
        (re, re, 0.5 * (-discriminant).sqrt())
    };

    let two_root = 2.0 * (params.p - params.q).sqrt();
    let kn = params.kn();
    let p2_class = if c >= kn + two_root {
        P2Class::UnstableNode
    } else if c >= kn {
        P2Class::UnstableFocus
    } else if c > kn - two_root {
        P2Class::StableFocus
    } else {
        P2Class::StableNode
    };

    EigenData {
        lambda_plus,
        lambda_minus,
        imag,
        e_plus: [1.0, lambda_plus],
        e_minus: [1.0, lambda_minus],
        discriminant,
        p2_class,
    }
}

/// Velocity `kn + 2√(p−q)` at which `P2` turns from an unstable focus into an
/// unstable node; the anti-Heaviside front travels with it.
pub fn ctilde(params: &ModelParams) -> f64 {
    params.kn() + 2.0 * params.sqrt_gap()
}

/// Bracket `[−2√(p−q), kn − 2√(p−q)]` that always contains the critical velocity.
pub fn cbar_bracket(params: &ModelParams) -> (f64, f64) {
    let r = 2.0 * params.sqrt_gap();
    (-r, params.kn() - r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_rules() {
        let ok = validate_params(3.0, 3.0, 1.0, 2.0).unwrap();
        assert!(!ok.reference_range);
        assert_eq!(
            validate_params(3.0, 1.0, 1.0, 1.0),
            Err(ModelError::ExponentOrder { p: 1.0, q: 1.0 })
        );
        let r = validate_params(1.0, 2.0, 1.0, 3.0).unwrap();
        assert!(r.reference_range);
        assert!(matches!(
            validate_params(3.0, 3.0, 1.0, -1.0),
            Err(ModelError::NonPositiveK(_))
        ));
        assert!(validate_params(3.0, 3.0, 1.0, 0.0)
            .unwrap_err()
            .to_string()
            .contains("x -> -x"));
        assert!(matches!(validate_params(3.0, 3.0, 0.5, 1.0), Err(ModelError::QTooSmall(_))));
        assert!(matches!(validate_params(0.5, 3.0, 1.0, 1.0), Err(ModelError::NTooSmall(_))));
        assert!(matches!(
            validate_params(f64::NAN, 3.0, 1.0, 1.0),
            Err(ModelError::NonFinite("n"))
        ));
    }

    #[test]
    fn eigen_stable_node_example() {
        let m = validate_params(3.0, 3.0, 1.0, 2.0).unwrap();
        let e = p2_eigen(&m, 0.0);
        assert_eq!(e.discriminant, 28.0);
        assert!((e.lambda_plus - (-0.354_248_688_935_409_3)).abs() < 1e-12);
        assert!((e.lambda_minus - (-5.645_751_311_064_591)).abs() < 1e-12);
        assert_eq!(e.p2_class, P2Class::StableNode);
    }

    #[test]
    fn eigen_center_and_degenerate() {
        let m = validate_params(3.0, 3.0, 1.0, 1.0).unwrap();
        let e = p2_eigen(&m, 3.0);
        assert_eq!(e.lambda_plus, 0.0);
        assert!((e.imag - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(e.p2_class, P2Class::UnstableFocus);

        let m = validate_params(3.0, 3.0, 1.0, 0.5).unwrap();
        let c = 1.5 + 2.0 * 2f64.sqrt();
        let e = p2_eigen(&m, c);
        assert!(e.discriminant.abs() < 1e-12);
        assert!((e.lambda_plus - 2f64.sqrt()).abs() < 1e-7);
        assert!((e.lambda_minus - 2f64.sqrt()).abs() < 1e-7);
        assert_eq!(e.p2_class, P2Class::UnstableNode);
    }

    #[test]
    fn ctilde_examples() {
        let m = validate_params(3.0, 3.0, 1.0, 0.5).unwrap();
        assert!((ctilde(&m) - 4.328_427_124_746_19).abs() < 1e-12);
        let m = validate_params(2.0, 5.0, 1.0, 1.0).unwrap();
        assert_eq!(ctilde(&m), 6.0);
    }

    #[test]
    fn ctilde_k_zero_limit() {
        // k = 0 is not a valid parameter set; the formula's k → 0 limit is 2√(p−q).
        let m = validate_params(3.0, 3.0, 1.0, 1e-300).unwrap();
        assert!((ctilde(&m) - 2.0 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn class_bands() {
        let m = validate_params(3.0, 4.0, 1.0, 1.0).unwrap();
        let r = 2.0 * 3f64.sqrt();
        assert_eq!(p2_eigen(&m, 3.0 - r).p2_class, P2Class::StableNode);
        assert_eq!(p2_eigen(&m, 3.0 - r + 1e-9).p2_class, P2Class::StableFocus);
        assert_eq!(p2_eigen(&m, 3.0).p2_class, P2Class::UnstableFocus);
        assert_eq!(p2_eigen(&m, 3.0 + r).p2_class, P2Class::UnstableNode);
    }
}
