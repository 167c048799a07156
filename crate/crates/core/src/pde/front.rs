use serde::Serialize;

use super::{Field, Grid, PdeError};
use crate::phaseplane::ProfileTable;

#[derive(Debug, Clone, Default, Serialize)]
pub struct FrontTrace {
    /// `(t, x_front)`, only at times where the level is crossed.
    pub samples: Vec<(f64, f64)>,
    pub fitted_speed: Option<f64>,
    pub fit_window: Option<(f64, f64)>,
    pub fit_residual: Option<f64>,
}

impl FrontTrace {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,x_front\n");
        for (t, x) in &self.samples {
            s.push_str(&format!("{:.16e},{:.16e}\n", t, x));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square deviation from the fitted line.
    pub residual: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

/// First crossing of `level`, linearly interpolated between nodes.
pub fn front_position(f: &Field, grid: &Grid, level: f64) -> Result<f64, PdeError> {
    for (i, w) in f.u.windows(2).enumerate() {
        let (a, b) = (w[0] - level, w[1] - level);
        if a == 0.0 && b == 0.0 {
            continue;
        }
        if a * b <= 0.0 && a != b {
            let s = a / (a - b);
            return Ok(grid.x(i) + s * grid.dx);
        }
    }
    Err(PdeError::NoCrossing(level))
}

/// Least-squares line through the samples in the final `window_fraction` of
/// the recorded time span.
pub fn fit_speed(trace: &FrontTrace, window_fraction: f64) -> Result<SpeedFit, PdeError> {
    let (Some(first), Some(last)) = (trace.samples.first(), trace.samples.last()) else {
        return Err(PdeError::TooFewSamples(0));
    };
    let t0 = last.0 - window_fraction * (last.0 - first.0);
    let pts: Vec<(f64, f64)> = trace.samples.iter().copied().filter(|s| s.0 >= t0 - 1e-12).collect();
    if pts.len() < 10 {
        return Err(PdeError::TooFewSamples(pts.len()));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mx = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let stx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - mx)).sum();
    let slope = stx / stt;
    let intercept = mx - slope * mt;
    let ss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(SpeedFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
        window: (pts[0].0, last.0),
        samples: pts.len(),
    })
}

/// Sup-norm distance between the field and the profile translated so both
/// cross `1/2` at the same point, over nodes covered by the profile table.
pub fn shape_error(f: &Field, grid: &Grid, profile: &ProfileTable) -> Result<f64, PdeError> {
    let x_front = front_position(f, grid, 0.5)?;
    let xi_half = profile.xi_at(0.5).ok_or(PdeError::NoCrossing(0.5))?;
    let mut worst: f64 = 0.0;
    for (i, x) in grid.nodes().enumerate() {
        if let Some(v) = profile.eval(x - x_front + xi_half) {
            worst = worst.max((f.u[i] - v).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_params;
    use crate::pde::{initial_condition, IcKind};
    use crate::phaseplane::{reconstruct_profile, shoot, ShootOptions};

    fn profile() -> ProfileTable {
        let m = validate_params(3.0, 3.0, 1.0, 2.0).unwrap();
        let t = shoot(&m, 1.5, &ShootOptions::default()).unwrap();
        reconstruct_profile(&t, &m, 1.5).unwrap()
    }

    fn sampled(grid: &Grid, prof: &ProfileTable, shift: f64) -> Field {
        Field { t: 0.0, u: grid.nodes().map(|x| prof.eval_extended(x - shift)).collect() }
    }

    #[test]
    fn heaviside_front() {
        let g = Grid::new(50.0, 0.1).unwrap();
        let h = initial_condition(&IcKind::Heaviside, &g).unwrap();
        assert!(front_position(&h, &g, 0.5).unwrap().abs() <= g.dx);
        let flat = Field { t: 0.0, u: vec![1.0; g.len()] };
        assert!(matches!(front_position(&flat, &g, 0.5), Err(PdeError::NoCrossing(_))));
    }

    #[test]
    fn profile_fronts_and_shape() {
        let g = Grid::new(20.0, 0.05).unwrap();
        let prof = profile();
        let f = sampled(&g, &prof, 0.0);
        assert!(front_position(&f, &g, 0.5).unwrap().abs() <= g.dx);
        let f3 = sampled(&g, &prof, 3.0);
        assert!((front_position(&f3, &g, 0.5).unwrap() - 3.0).abs() <= g.dx);
        // Linear interpolation of the crossing shifts the alignment slightly.
        assert!(shape_error(&f3, &g, &prof).unwrap() < 1e-3);
        let h = initial_condition(&IcKind::Heaviside, &g).unwrap();
        assert!(shape_error(&h, &g, &prof).unwrap() >= 0.2);
    }

    #[test]
    fn exact_profile_on_nodes() {
        // Grid nodes placed so that the half-level sits exactly on a node.
        let prof = profile();
        let g = Grid::new(20.0, 0.05).unwrap();
        let f = sampled(&g, &prof, 0.0);
        assert!(shape_error(&f, &g, &prof).unwrap() < 1e-12);
    }

    #[test]
    fn linear_trace() {
        let trace = FrontTrace {
            samples: (0..=300).map(|i| {
                let t = i as f64 * 0.1;
                (t, -1.5 * t + 0.2)
            }).collect(),
            ..Default::default()
        };
        let fit = fit_speed(&trace, 1.0 / 3.0).unwrap();
        assert!((fit.slope + 1.5).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        let short = FrontTrace { samples: trace.samples[..20].to_vec(), ..Default::default() };
        assert!(matches!(fit_speed(&short, 1.0 / 3.0), Err(PdeError::TooFewSamples(7))));
    }
}
