use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::StabilityError;
use crate::group::GroupAction;

/// A transform in a sweep, keyed by a unique descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedTransform<G> {
    pub name: String,
    pub element: G,
    /// Marks the transform whose accuracy is reported as clean. Items are
    /// passed to the predictor unchanged for it.
    pub is_identity: bool,
}

impl<G> NamedTransform<G> {
    pub fn new(name: impl Into<String>, element: G) -> Self {
        Self {
            name: name.into(),
            element,
            is_identity: false,
        }
    }

    pub fn identity(name: impl Into<String>, element: G) -> Self {
        Self {
            is_identity: true,
            ..Self::new(name, element)
        }
    }
}

/// Accuracies over an orbit sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSweepReport {
    /// Accuracy on the untransformed items.
    pub clean: f64,
    /// Mean accuracy over all transforms, identity included.
    pub average: f64,
    /// Fraction of items classified correctly under every transform.
    pub worst: f64,
    pub per_transform: BTreeMap<String, f64>,
}

/// Evaluates `predict` on every item under every transform.
///
/// Accuracies are ratios of integer counts, so two sweeps that make the same
/// predictions produce bit-identical reports.
pub fn orbit_sweep<X, G, L, P>(
    predict: P,
    items: &[X],
    labels: &[L],
    transforms: &[NamedTransform<G>],
) -> Result<OrbitSweepReport, StabilityError>
where
    X: Sync,
    G: GroupAction<X> + Sync,
    L: PartialEq + Sync,
    P: Fn(&X) -> L + Sync,
{
    if items.is_empty() || transforms.is_empty() {
        return Err(StabilityError::Empty);
    }
    if items.len() != labels.len() {
        return Err(StabilityError::LabelCount {
            items: items.len(),
            labels: labels.len(),
        });
    }
    let mut seen = HashSet::new();
    for t in transforms {
        if !seen.insert(t.name.as_str()) {
            return Err(StabilityError::DuplicateTransform(t.name.clone()));
        }
    }
    let identity = transforms
        .iter()
        .position(|t| t.is_identity)
        .ok_or(StabilityError::MissingIdentity)?;

    let correct: Vec<Vec<bool>> = transforms
        .par_iter()
        .map(|t| {
            items
                .iter()
                .zip(labels)
                .map(|(x, label)| {
                    let prediction = if t.is_identity { predict(x) } else { predict(&t.element.act(x)) };
                    prediction == *label
                })
                .collect()
        })
        .collect();

    let n = items.len();
    let count = |row: &[bool]| row.iter().filter(|&&c| c).count();
    let total: usize = correct.iter().map(|row| count(row)).sum();
    let robust = (0..n).filter(|&k| correct.iter().all(|row| row[k])).count();
    Ok(OrbitSweepReport {
        clean: count(&correct[identity]) as f64 / n as f64,
        average: total as f64 / (n * transforms.len()) as f64,
        worst: robust as f64 / n as f64,
        per_transform: transforms
            .iter()
            .zip(&correct)
            .map(|(t, row)| (t.name.clone(), count(row) as f64 / n as f64))
            .collect(),
    })
}
