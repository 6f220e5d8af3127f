//! Numerical eigenvalues against the closed-form small-coupling predictions.

use serde::{Deserialize, Serialize};
use vortex_core::lattice::{Hopping, Model, VortexSpec};
use vortex_core::lsred::{predict_manakov, predict_scalar, predict_vector, PredictedKind, PredictionSet};
use vortex_core::spectrum::Track;
use vortex_core::Complex64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub eps: f64,
    pub track_id: usize,
    pub label: String,
    pub numeric_lambda: Complex64,
    pub predicted_lambda: Complex64,
    pub abs_error: f64,
    pub rel_error: f64,
}

impl ComparisonRow {
    pub fn new(eps: f64, track_id: usize, label: &str, numeric: Complex64, predicted: Complex64) -> Self {
        let abs_error = (numeric - predicted).norm();
        let rel_error = if predicted.norm() > 0.0 { abs_error / predicted.norm() } else { f64::INFINITY };
        Self {
            eps,
            track_id,
            label: label.to_string(),
            numeric_lambda: numeric,
            predicted_lambda: predicted,
            abs_error,
            rel_error,
        }
    }
}

/// Predictions for `spec` at coupling `eps`, in the units of `spec.hopping`.
///
/// The `Laplacian` convention is mapped onto the neighbour-sum problem with
/// `ε' = ε/(1+4ε)`, `ω' = (ω+4ε)/(1+4ε)` and eigenvalues scaled by `1+4ε`.
pub fn predictions(spec: &VortexSpec, eps: f64) -> Option<PredictionSet> {
    let (eps_r, omega_r, scale) = match spec.hopping {
        Hopping::NeighborSum => (eps, spec.omega, 1.0),
        Hopping::Laplacian => {
            let d = 1.0 + 4.0 * eps;
            (eps / d, (spec.omega + 4.0 * eps) / d, d)
        }
    };
    let mut set = match spec.model {
        Model::Scalar => predict_scalar(eps_r),
        Model::Vector if spec.is_manakov() => predict_manakov(spec.delta?, spec.charges, eps_r),
        Model::Vector => predict_vector(spec.beta, omega_r, spec.charges, eps_r).ok()?,
    };
    for p in &mut set.pairs {
        p.value *= scale;
    }
    if scale != 1.0 {
        set.gammas.clear();
    }
    set.epsilon = eps;
    Some(set)
}

/// Representative of a predicted pair in the half plane used by the tracks.
fn representative(z: Complex64, kind: PredictedKind) -> Option<Complex64> {
    match kind {
        PredictedKind::Zero => None,
        PredictedKind::RealPair => Some(Complex64::new(z.re.abs(), 0.0)),
        _ => Some(Complex64::new(z.re, z.im.abs())),
    }
}

/// Assigns each prediction to the nearest unused tracked eigenvalue at every step.
pub fn compare_tracks(spec: &VortexSpec, tracks: &[Track], steps: &[f64]) -> Vec<ComparisonRow> {
    let mut rows = Vec::new();
    for (step, &eps) in steps.iter().enumerate() {
        if eps <= 0.0 {
            continue;
        }
        let Some(set) = predictions(spec, eps) else { continue };
        let cands: Vec<(usize, Complex64)> =
            tracks.iter().filter_map(|t| t.points.iter().find(|p| p.step == step).map(|p| (t.id, p.lambda))).collect();
        let mut used = vec![false; cands.len()];
        for pred in &set.pairs {
            let Some(target) = representative(pred.value, pred.kind) else { continue };
            let best = cands
                .iter()
                .enumerate()
                .filter(|(k, _)| !used[*k])
                .min_by(|a, b| (a.1 .1 - target).norm().total_cmp(&(b.1 .1 - target).norm()));
            if let Some((k, &(id, lambda))) = best {
                used[k] = true;
                rows.push(ComparisonRow::new(eps, id, &pred.label, lambda, target));
            }
        }
    }
    rows.sort_by(|a, b| {
        a.eps
            .total_cmp(&b.eps)
            .then(a.predicted_lambda.im.abs().total_cmp(&b.predicted_lambda.im.abs()))
            .then(a.predicted_lambda.re.total_cmp(&b.predicted_lambda.re))
            .then(a.track_id.cmp(&b.track_id))
    });
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use vortex_core::lattice::{ChargePair, GridShape};
    use vortex_core::spectrum::TrackPoint;

    #[test]
    fn laplacian_mapping_matches_leading_order() {
        let spec = VortexSpec::scalar(GridShape::default()).with_hopping(Hopping::Laplacian);
        let p = predictions(&spec, 0.01).unwrap();
        // (1+4ε)·2i·ε/(1+4ε) = 2iε exactly.
        assert!((p.pairs[0].value.im - 0.02).abs() < 1e-15);
        assert!((p.pairs[2].value.im - 4e-4 / 1.04).abs() < 1e-15);
    }

    #[test]
    fn manakov_without_delta_has_no_prediction() {
        let mut spec = VortexSpec::manakov(GridShape::default(), ChargePair::Equal, 0.3);
        spec.delta = None;
        assert!(predictions(&spec, 0.1).is_none());
    }

    #[test]
    fn rows_recompute_abs_error() {
        let spec = VortexSpec::scalar(GridShape::default());
        let mk = |id, im| Track {
            id,
            points: vec![TrackPoint { step: 0, epsilon: 0.05, lambda: Complex64::new(0.0, im), krein: None }],
        };
        let tracks = vec![mk(0, 0.0101), mk(1, 0.099), mk(2, 0.1003), mk(3, 0.3)];
        let rows = compare_tracks(&spec, &tracks, &[0.05]);
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].track_id, 0);
        for r in &rows {
            assert_eq!(r.abs_error, (r.numeric_lambda - r.predicted_lambda).norm());
        }
        assert!(rows.iter().all(|r| r.track_id != 3));
    }
}
