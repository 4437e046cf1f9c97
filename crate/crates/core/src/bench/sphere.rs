//! The sphere experiment: an equally spaced grid of spherical coordinates
//! mapped onto the unit sphere, extended to random parameter pairs.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extend::extend;
use crate::index::{covering_radius, distance};
use crate::model::TrainingModel;
use crate::weights::{SchemeKind, WeightScheme};

/// Neighborhood radius in units of the training grid spacing.
pub const DEFAULT_EPSILON_SPACINGS: f64 = 2.5;
/// Curvature bound used by the sphere benchmark.
pub const BENCH_CURVATURE_C: f64 = 2.0;
/// Probe grid refinement per axis for the empirical δ.
pub const PROBE_REFINEMENT: usize = 4;
/// Queries keep φ inside `[margin·π, (1 − margin)·π]`, away from the poles.
pub const POLE_MARGIN: f64 = 0.05;

/// `(sin φ cos θ, sin φ sin θ, cos φ)` for `φ, θ ∈ [0, π]`.
pub fn sphere_map(phi: f64, theta: f64) -> Result<[f64; 3]> {
    if !(0.0..=PI).contains(&phi) || !(0.0..=PI).contains(&theta) {
        return Err(Error::OutOfRange(format!(
            "spherical coordinates ({phi}, {theta}) outside [0, π]²"
        )));
    }
    let (sp, cp) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    Ok([sp * ct, sp * st, cp])
}

fn map_params(params: &[Vec<f64>]) -> Vec<Vec<f64>> {
    params
        .iter()
        .map(|p| sphere_map(p[0], p[1]).expect("parameters in range").to_vec())
        .collect()
}

/// Training grid and random queries of the sphere experiment.
#[derive(Debug, Clone)]
pub struct SphereDataset {
    pub grid_per_axis: usize,
    pub seed: u64,
    /// `(φ, θ)` grid, row-major in φ. These are the ambient training points.
    pub training_params: Vec<Vec<f64>>,
    /// Images of the grid on the unit sphere.
    pub images: Vec<Vec<f64>>,
    pub query_params: Vec<Vec<f64>>,
    /// Exact images of the queries.
    pub query_images: Vec<Vec<f64>>,
}

/// Equally spaced `grid_per_axis²` training pairs on `[0, π]²` plus
/// `num_queries` seeded random queries.
pub fn make_sphere_dataset(grid_per_axis: usize, num_queries: usize, seed: u64) -> Result<SphereDataset> {
    if grid_per_axis < 2 {
        return Err(Error::OutOfRange(format!(
            "grid_per_axis must be at least 2, got {grid_per_axis}"
        )));
    }
    if num_queries < 1 {
        return Err(Error::OutOfRange("num_queries must be at least 1".into()));
    }
    let axis = grid_axis(grid_per_axis);
    let training_params: Vec<Vec<f64>> = axis
        .iter()
        .flat_map(|&phi| axis.iter().map(move |&theta| vec![phi, theta]))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let query_params: Vec<Vec<f64>> = (0..num_queries)
        .map(|_| {
            vec![
                rng.random_range(POLE_MARGIN * PI..=(1.0 - POLE_MARGIN) * PI),
                rng.random_range(0.0..=PI),
            ]
        })
        .collect();
    Ok(SphereDataset {
        grid_per_axis,
        seed,
        images: map_params(&training_params),
        query_images: map_params(&query_params),
        training_params,
        query_params,
    })
}

fn grid_axis(n: usize) -> Vec<f64> {
    let h = PI / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { PI } else { i as f64 * h })
        .collect()
}

impl SphereDataset {
    pub fn training_size(&self) -> usize {
        self.training_params.len()
    }

    pub fn grid_spacing(&self) -> f64 {
        PI / (self.grid_per_axis - 1) as f64
    }

    pub fn default_epsilon(&self) -> f64 {
        DEFAULT_EPSILON_SPACINGS * self.grid_spacing()
    }

    pub fn model(&self, epsilon: f64, curvature_c: f64) -> Result<TrainingModel> {
        TrainingModel::from_rows(&self.training_params, &self.images, epsilon, curvature_c)
    }

    /// A grid `PROBE_REFINEMENT` times finer per axis, row-major flat.
    pub fn probe_grid(&self) -> Vec<f64> {
        let axis = grid_axis(PROBE_REFINEMENT * (self.grid_per_axis - 1) + 1);
        axis.iter()
            .flat_map(|&phi| axis.iter().flat_map(move |&theta| [phi, theta]))
            .collect()
    }

    /// Empirical covering radius δ of the training grid over the probe grid.
    pub fn delta(&self) -> f64 {
        covering_radius(&self.training_params.concat(), &self.probe_grid(), 2)
    }

    /// Empirical Lipschitz constant of the sphere map: the largest
    /// `‖ψ(a) − ψ(b)‖ / ‖a − b‖` over training pairs and over each query
    /// and its nearest training point.
    pub fn lipschitz_k(&self) -> f64 {
        let p = self.training_size();
        let pairs = (0..p)
            .into_par_iter()
            .map(|i| {
                let mut best = 0.0f64;
                for j in (i + 1)..p {
                    let da = distance(&self.training_params[i], &self.training_params[j]);
                    if da > 0.0 {
                        best = best.max(distance(&self.images[i], &self.images[j]) / da);
                    }
                }
                best
            })
            .reduce(|| 0.0, f64::max);
        let index = crate::index::build_index(&self.training_params.concat(), 2);
        let queries = self
            .query_params
            .iter()
            .zip(&self.query_images)
            .filter_map(|(q, img)| {
                let hit = *index.nearest(q, 1).first()?;
                (hit.distance > 0.0).then(|| distance(img, &self.images[hit.index]) / hit.distance)
            })
            .fold(0.0, f64::max);
        pairs.max(queries)
    }
}

/// Per-run benchmark settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub grid_per_axis: usize,
    pub num_queries: usize,
    pub seed: u64,
    /// Neighborhood radius; `None` means [`DEFAULT_EPSILON_SPACINGS`] grid spacings.
    pub epsilon: Option<f64>,
    pub curvature_c: f64,
}

impl BenchConfig {
    pub fn new(grid_per_axis: usize, num_queries: usize, seed: u64) -> Self {
        BenchConfig {
            grid_per_axis,
            num_queries,
            seed,
            epsilon: None,
            curvature_c: BENCH_CURVATURE_C,
        }
    }
}

/// Outcome of one scheme on one sphere dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub scheme: SchemeKind,
    pub training_size: usize,
    pub num_queries: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub curvature_c: f64,
    pub mean_error: f64,
    pub max_error: f64,
    /// Error per query; `None` where the extension failed.
    pub per_query_errors: Vec<Option<f64>>,
    pub failures: usize,
    /// Empirical covering radius.
    pub delta: f64,
    /// Empirical Lipschitz constant.
    pub lipschitz_k: f64,
    /// Queries whose error exceeds `3·K·δ`.
    pub bound_violations: usize,
}

impl BenchReport {
    pub fn error_bound(&self) -> f64 {
        3.0 * self.lipschitz_k * self.delta
    }
}

/// Dataset, model and diagnostics shared by the schemes of one run.
#[derive(Debug, Clone)]
pub struct SphereBench {
    pub config: BenchConfig,
    pub data: SphereDataset,
    pub model: TrainingModel,
    pub delta: f64,
    pub lipschitz_k: f64,
}

impl SphereBench {
    pub fn new(config: BenchConfig) -> Result<Self> {
        let data = make_sphere_dataset(config.grid_per_axis, config.num_queries, config.seed)?;
        let epsilon = config.epsilon.unwrap_or_else(|| data.default_epsilon());
        let model = data.model(epsilon, config.curvature_c)?;
        Ok(SphereBench {
            delta: data.delta(),
            lipschitz_k: data.lipschitz_k(),
            config,
            data,
            model,
        })
    }

    pub fn run(&self, kind: SchemeKind) -> Result<BenchReport> {
        let scheme = WeightScheme::new(kind, self.config.curvature_c)?;
        let per_query_errors: Vec<Option<f64>> = self
            .data
            .query_params
            .par_iter()
            .zip(&self.data.query_images)
            .map(|(q, truth)| {
                extend(q, &self.model, &scheme)
                    .ok()
                    .map(|r| distance(&r.embedding, truth))
            })
            .collect();
        let ok: Vec<f64> = per_query_errors.iter().flatten().copied().collect();
        let bound = 3.0 * self.lipschitz_k * self.delta;
        let mean_error = if ok.is_empty() {
            f64::NAN
        } else {
            ok.iter().sum::<f64>() / ok.len() as f64
        };
        Ok(BenchReport {
            scheme: kind,
            training_size: self.data.training_size(),
            num_queries: self.data.query_params.len(),
            seed: self.config.seed,
            epsilon: self.model.epsilon(),
            curvature_c: self.config.curvature_c,
            mean_error,
            max_error: ok.iter().copied().fold(f64::NAN, f64::max),
            failures: per_query_errors.len() - ok.len(),
            bound_violations: ok.iter().filter(|&&e| e > bound).count(),
            per_query_errors,
            delta: self.delta,
            lipschitz_k: self.lipschitz_k,
        })
    }

    pub fn run_all(&self) -> Result<Vec<BenchReport>> {
        SchemeKind::ALL.iter().map(|&k| self.run(k)).collect()
    }
}

/// One scheme on a fresh sphere dataset with the default radius and
/// [`BENCH_CURVATURE_C`].
pub fn run_sphere_bench(
    grid_per_axis: usize,
    num_queries: usize,
    scheme: SchemeKind,
    seed: u64,
) -> Result<BenchReport> {
    SphereBench::new(BenchConfig::new(grid_per_axis, num_queries, seed))?.run(scheme)
}
