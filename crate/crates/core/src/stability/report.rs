use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::circular::{circular_std, Histogram};
use super::residuals::{residuals_for_item, Estimator, ResidualOptions};
use super::StabilityError;
use crate::image::{Interpolation, RasterImage};

/// Per-image angle dispersion over a rotation sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub estimator: Estimator,
    pub interpolation: Interpolation,
    /// Mean of the present `per_item` values; `None` if every item is
    /// degenerate.
    pub mean_std_deg: Option<f64>,
    /// Histogram of the present `per_item` values.
    pub histogram: Histogram,
    /// Circular standard deviation of each image's residuals, ignoring
    /// degenerate rotations; `None` when all rotations are degenerate.
    pub per_item: Vec<Option<f64>>,
}

impl StabilityReport {
    pub fn present(&self) -> Vec<f64> {
        self.per_item.iter().flatten().copied().collect()
    }
}

/// Runs [`angle_residuals_with`](super::angle_residuals_with) on each image
/// and aggregates.
pub fn stability_report(
    images: &[RasterImage],
    options: &ResidualOptions,
) -> Result<StabilityReport, StabilityError> {
    if images.is_empty() {
        return Err(StabilityError::Empty);
    }
    let per_item = images
        .par_iter()
        .enumerate()
        .map(|(k, img)| {
            let present: Vec<f64> = residuals_for_item(img, options, k as u64)?
                .into_iter()
                .flatten()
                .collect();
            Ok(if present.is_empty() { None } else { Some(circular_std(&present)?) })
        })
        .collect::<Result<Vec<_>, StabilityError>>()?;
    let values: Vec<f64> = per_item.iter().flatten().copied().collect();
    let mean_std_deg = (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64);
    Ok(StabilityReport {
        estimator: options.estimator,
        interpolation: options.interpolation,
        mean_std_deg,
        histogram: Histogram::of_dispersions(&values),
        per_item,
    })
}

/// Paired comparison of two reports over the same corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderingCheck {
    /// Mean of `higher − lower` over items present in both.
    pub mean_difference: f64,
    /// Standard error of that mean.
    pub standard_error: f64,
    pub pairs: usize,
    /// `mean_difference > standard_error`.
    pub holds: bool,
}

/// Tests whether `higher` disperses more than `lower` by more than one
/// standard error of the paired differences.
pub fn compare_dispersion(lower: &StabilityReport, higher: &StabilityReport) -> OrderingCheck {
    let diffs: Vec<f64> = lower
        .per_item
        .iter()
        .zip(&higher.per_item)
        .filter_map(|(a, b)| Some((*b)? - (*a)?))
        .collect();
    let n = diffs.len();
    let mean = if n == 0 { f64::NAN } else { diffs.iter().sum::<f64>() / n as f64 };
    let standard_error = if n < 2 {
        f64::NAN
    } else {
        let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    };
    OrderingCheck {
        mean_difference: mean,
        standard_error,
        pairs: n,
        holds: mean > standard_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::ramp_corpus;

    fn report(per_item: Vec<Option<f64>>) -> StabilityReport {
        let values: Vec<f64> = per_item.iter().flatten().copied().collect();
        StabilityReport {
            estimator: Estimator::Exact,
            interpolation: Interpolation::Bilinear,
            mean_std_deg: None,
            histogram: Histogram::of_dispersions(&values),
            per_item,
        }
    }

    #[test]
    fn ramps_have_near_zero_dispersion() {
        let opts = ResidualOptions {
            step_deg: 10.0,
            ..ResidualOptions::default()
        };
        let r = stability_report(&ramp_corpus(6, 64), &opts).unwrap();
        assert!(r.mean_std_deg.unwrap() <= 0.5, "{r:?}");
        assert_eq!(r.histogram.total(), 6);
        let mean = r.present().iter().sum::<f64>() / 6.0;
        assert_eq!(r.mean_std_deg, Some(mean));
    }

    #[test]
    fn json_shape() {
        let r = report(vec![Some(1.0), None]);
        let v = serde_json::to_value(&r).unwrap();
        for key in ["estimator", "interpolation", "mean_std_deg", "histogram", "per_item"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["per_item"][1], serde_json::Value::Null);
        assert_eq!(v["histogram"]["counts"].as_array().unwrap().len(), 90);
        let back: StabilityReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn paired_comparison() {
        let lo = report(vec![Some(1.0), Some(2.0), None, Some(3.0)]);
        let hi = report(vec![Some(2.0), Some(3.5), Some(9.0), Some(3.5)]);
        let c = compare_dispersion(&lo, &hi);
        assert_eq!(c.pairs, 3);
        assert_eq!(c.mean_difference, 1.0);
        // sd of {1, 1.5, 0.5} is 0.5
        assert!((c.standard_error - 0.5 / 3f64.sqrt()).abs() < 1e-15);
        assert!(c.holds);
        assert!(!compare_dispersion(&hi, &lo).holds);
        assert!(!compare_dispersion(&lo, &lo).holds);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(
            stability_report(&[], &ResidualOptions::default()),
            Err(StabilityError::Empty)
        ));
    }
}
