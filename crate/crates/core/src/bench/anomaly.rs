//! Synthetic anomaly-detection scenario: a sphere model whose ambient
//! points lie on the `z = 0` plane of R³, queried on that plane (inliers)
//! and at height `displacement` above it (outliers).

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extend::extend;
use crate::model::TrainingModel;
use crate::weights::{SchemeKind, WeightScheme};

use super::sphere::{make_sphere_dataset, BENCH_CURVATURE_C, POLE_MARGIN};

/// Training grid resolution of the scenario.
pub const ANOMALY_GRID: usize = 30;
/// Weighting used to score the scenario.
pub const ANOMALY_SCHEME: SchemeKind = SchemeKind::PerPointTangent;

/// Model and labelled queries of the anomaly scenario.
#[derive(Debug, Clone)]
pub struct AnomalyScenario {
    pub model: TrainingModel,
    /// Inliers first, then outliers.
    pub queries: Vec<Vec<f64>>,
    pub is_outlier: Vec<bool>,
}

/// Builds the scenario without scoring it.
pub fn anomaly_scenario_data(
    num_inliers: usize,
    num_outliers: usize,
    displacement: f64,
    seed: u64,
) -> Result<AnomalyScenario> {
    if !(displacement >= 0.0) || !displacement.is_finite() {
        return Err(Error::OutOfRange(format!(
            "displacement must be a non-negative real, got {displacement}"
        )));
    }
    let data = make_sphere_dataset(ANOMALY_GRID, 1, seed)?;
    let lift = |p: &Vec<f64>| vec![p[0], p[1], 0.0];
    let points: Vec<Vec<f64>> = data.training_params.iter().map(lift).collect();
    let model = TrainingModel::from_rows(
        &points,
        &data.images,
        data.default_epsilon(),
        BENCH_CURVATURE_C,
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let range = POLE_MARGIN * PI..=(1.0 - POLE_MARGIN) * PI;
    let mut queries = Vec::with_capacity(num_inliers + num_outliers);
    let mut is_outlier = Vec::with_capacity(num_inliers + num_outliers);
    for i in 0..num_inliers + num_outliers {
        let outlier = i >= num_inliers;
        let z = if outlier { displacement } else { 0.0 };
        queries.push(vec![
            rng.random_range(range.clone()),
            rng.random_range(range.clone()),
            z,
        ]);
        is_outlier.push(outlier);
    }
    Ok(AnomalyScenario {
        model,
        queries,
        is_outlier,
    })
}

impl AnomalyScenario {
    /// `(score, is_outlier)` per query. Queries whose extension fails score `+∞`.
    pub fn score(&self, kind: SchemeKind) -> Vec<(f64, bool)> {
        let scheme = WeightScheme::for_model(kind, &self.model);
        self.queries
            .par_iter()
            .zip(&self.is_outlier)
            .map(|(q, &label)| {
                let s = extend(q, &self.model, &scheme).map_or(f64::INFINITY, |r| r.score);
                (s, label)
            })
            .collect()
    }
}

/// Scores `num_inliers` on-manifold and `num_outliers` displaced queries.
pub fn run_anomaly_scenario(
    num_inliers: usize,
    num_outliers: usize,
    displacement: f64,
    seed: u64,
) -> Result<Vec<(f64, bool)>> {
    Ok(anomaly_scenario_data(num_inliers, num_outliers, displacement, seed)?.score(ANOMALY_SCHEME))
}
