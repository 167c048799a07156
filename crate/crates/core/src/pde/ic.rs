use serde::{Deserialize, Serialize};

use super::{Field, Grid, PdeError};
use crate::model::{p2_eigen, ModelParams};

/// Tail bounds for general monotone data:
/// `u₀ ≤ C₋e^{c̄x}` (`c̄ > 0`) or `u₀ ≤ (|c̄|/(q−1))^{1/(q−1)}|x|^{−1/(q−1)}`
/// (`c̄ < 0`) on `(−∞, R₋)`, and `u₀ ≥ 1 − C₊e^{λ₋(c̄)x}` on `(R₊, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailParams {
    pub cbar: f64,
    pub lambda_minus: f64,
    pub q: f64,
    pub c_minus: f64,
    pub c_plus: f64,
    pub r_minus: f64,
    pub r_plus: f64,
}

impl TailParams {
    pub fn new(
        params: &ModelParams,
        cbar: f64,
        c_minus: f64,
        c_plus: f64,
        r_minus: f64,
        r_plus: f64,
    ) -> Result<Self, PdeError> {
        let bad = |s: &str| Err(PdeError::InvalidTailParams(s.to_string()));
        if !(c_minus > 0.0 && c_plus > 0.0) {
            return bad("C- and C+ must be positive");
        }
        if r_minus.partial_cmp(&r_plus) != Some(std::cmp::Ordering::Less) {
            return bad("R- must be below R+");
        }
        if cbar == 0.0 {
            return bad("the zero tail is not covered for c = 0");
        }
        if cbar < 0.0 && params.q <= 1.0 {
            return bad("the algebraic zero tail needs q > 1");
        }
        if cbar < 0.0 && r_minus >= 0.0 {
            return bad("the algebraic zero tail needs R- < 0");
        }
        let e = p2_eigen(params, cbar);
        if !e.is_node() {
            return bad("P2 is not a node at the given critical velocity");
        }
        Ok(Self {
            cbar,
            lambda_minus: e.lambda_minus,
            q: params.q,
            c_minus,
            c_plus,
            r_minus,
            r_plus,
        })
    }

    /// Upper bound for `u₀` on `(−∞, R₋)`.
    pub fn zero_bound(&self, x: f64) -> f64 {
        if self.cbar > 0.0 {
            self.c_minus * (self.cbar * x).exp()
        } else {
            let r = 1.0 / (self.q - 1.0);
            (self.cbar.abs() / (self.q - 1.0)).powf(r) * x.abs().powf(-r)
        }
    }

    /// Lower bound for `u₀` on `(R₊, ∞)`.
    pub fn one_bound(&self, x: f64) -> f64 {
        1.0 - self.c_plus * (self.lambda_minus * x).exp()
    }

    fn left(&self, x: f64) -> f64 {
        0.5 * self.zero_bound(x).min(1.0)
    }

    fn right(&self, x: f64) -> f64 {
        (1.0 - 0.5 * self.c_plus * (self.lambda_minus * x).exp()).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IcKind {
    Heaviside,
    AntiHeaviside,
    TailGeneral(TailParams),
}

impl IcKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Heaviside => "heaviside",
            Self::AntiHeaviside => "anti_heaviside",
            Self::TailGeneral(_) => "tail_general",
        }
    }

    /// +1 for nondecreasing data, −1 for nonincreasing.
    pub fn direction(&self) -> f64 {
        match self {
            Self::AntiHeaviside => -1.0,
            _ => 1.0,
        }
    }
}

pub fn initial_condition(kind: &IcKind, grid: &Grid) -> Result<Field, PdeError> {
    // Nodes within roundoff of 0 count as x = 0.
    let eps = 1e-9 * grid.dx;
    let u: Vec<f64> = match kind {
        IcKind::Heaviside => grid.nodes().map(|x| if x < -eps { 0.0 } else { 1.0 }).collect(),
        IcKind::AntiHeaviside => grid.nodes().map(|x| if x < -eps { 1.0 } else { 0.0 }).collect(),
        IcKind::TailGeneral(tp) => {
            let (a, b) = (tp.left(tp.r_minus), tp.right(tp.r_plus));
            if a > b {
                return Err(PdeError::InvalidTailParams(
                    "tail values do not admit a monotone blend".into(),
                ));
            }
            grid.nodes()
                .map(|x| {
                    if x <= tp.r_minus {
                        tp.left(x)
                    } else if x >= tp.r_plus {
                        tp.right(x)
                    } else {
                        a + (b - a) * (x - tp.r_minus) / (tp.r_plus - tp.r_minus)
                    }
                })
                .collect()
        }
    };
    Ok(Field { t: 0.0, u })
}
