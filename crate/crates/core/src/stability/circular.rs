use serde::{Deserialize, Serialize};

use super::StabilityError;

/// Upper bound reported by [`circular_std`]. The formula exceeds it once the
/// mean resultant length drops below `exp(-π²/2)`, and diverges at zero.
pub const CIRCULAR_STD_CAP_DEG: f64 = 180.0;

/// Width of the dispersion histogram bins.
pub const HISTOGRAM_BIN_DEG: f64 = 2.0;

/// Circular standard deviation `√(−2 ln R̄)` of angles given in degrees,
/// where `R̄` is the mean resultant length. Capped at
/// [`CIRCULAR_STD_CAP_DEG`].
pub fn circular_std(residuals_deg: &[f64]) -> Result<f64, StabilityError> {
    if residuals_deg.is_empty() {
        return Err(StabilityError::Empty);
    }
    // measured from the first residual so that equal residuals give R̄ = 1
    let first = residuals_deg[0];
    let (s, c) = residuals_deg.iter().fold((0.0, 0.0), |(s, c), d| {
        let (sin, cos) = (d - first).to_radians().sin_cos();
        (s + sin, c + cos)
    });
    let r = (s.hypot(c) / residuals_deg.len() as f64).min(1.0);
    if r <= 0.0 {
        return Ok(CIRCULAR_STD_CAP_DEG);
    }
    Ok((-2.0 * r.ln()).sqrt().to_degrees().min(CIRCULAR_STD_CAP_DEG))
}

/// Counts over `[0°, 180°]` in bins of [`HISTOGRAM_BIN_DEG`]; the last bin is
/// closed on the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn of_dispersions(values_deg: &[f64]) -> Self {
        let bins = (CIRCULAR_STD_CAP_DEG / HISTOGRAM_BIN_DEG) as usize;
        let edges = (0..=bins).map(|k| k as f64 * HISTOGRAM_BIN_DEG).collect();
        let mut counts = vec![0; bins];
        for v in values_deg {
            let k = (v.clamp(0.0, CIRCULAR_STD_CAP_DEG) / HISTOGRAM_BIN_DEG).floor() as usize;
            counts[k.min(bins - 1)] += 1;
        }
        Self { edges, counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}
