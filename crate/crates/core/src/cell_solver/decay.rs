use serde::Serialize;

use super::checks::{achieved_limits, plane_deviation};
use super::potentials::{PotentialKind, ScalarPotential};

/// Deviations below this level are treated as exactly zero (no decay to fit).
pub const DEVIATION_FLOOR: f64 = 1e-11;

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub kind: PotentialKind,
    /// `(t, d(t))` with `d(t) = max(d(+t), d(-t))`, `t = 1, ..., L-1`.
    pub deviations: Vec<(f64, f64)>,
    /// Fitted exponential rate; `None` when every deviation is below
    /// [`DEVIATION_FLOOR`].
    pub rate: Option<f64>,
    pub limit_plus: [f64; 3],
    pub limit_minus: [f64; 3],
}

impl Serialize for PotentialKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

pub fn decay_report(p: &ScalarPotential) -> DecayReport {
    let limits = achieved_limits(p);
    let top = p.half_height as i64;
    let deviations: Vec<(f64, f64)> = (1..top)
        .map(|t| {
            let d = plane_deviation(p, t, &limits).max(plane_deviation(p, -t, &limits));
            (t as f64, d)
        })
        .collect();
    let rate = if deviations.len() >= 2 && deviations.iter().all(|&(_, d)| d > DEVIATION_FLOOR) {
        let pts: Vec<(f64, f64)> = deviations.iter().map(|&(t, d)| (t, d.ln())).collect();
        Some(-least_squares_slope(&pts))
    } else {
        None
    };
    DecayReport {
        kind: p.kind,
        deviations,
        rate,
        limit_plus: limits.0,
        limit_minus: limits.1,
    }
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_exponential() {
        let pts: Vec<(f64, f64)> = (1..4).map(|t| (t as f64, (3.0f64 * (-2.5 * t as f64).exp()).ln())).collect();
        assert!((least_squares_slope(&pts) + 2.5).abs() < 1e-12);
    }
}
