//! Side-by-side extension of a scalar function with the tangent scheme and
//! the three reference methods, over a sweep of training-set sizes.

use std::fmt;

use nalgebra::DVector;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::baselines::{
    build_gaussian_kernel, laplacian_pyramid_extend, laplacian_pyramid_fit, max_squared_distance,
    mse_fit, EigenSystem, GaussianKernelConfig, MseOptions, NystromExtender,
};
use crate::error::{Error, Result};
use crate::extend::extend;
use crate::model::TrainingModel;
use crate::weights::{SchemeKind, WeightScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Pbe,
    Nystrom,
    Mse,
    LaplacianPyramid,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Pbe, Method::Nystrom, Method::Mse, Method::LaplacianPyramid];

    pub fn label(self) -> &'static str {
        match self {
            Method::Pbe => "pbe",
            Method::Nystrom => "nystrom",
            Method::Mse => "mse",
            Method::LaplacianPyramid => "laplacian-pyramid",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareConfig {
    /// Training-set sizes; sizes above the model size are clamped to it.
    pub sizes: Vec<usize>,
    /// Stopping residual for MSE and the Laplacian pyramid.
    pub err: f64,
    pub seed: u64,
    pub scheme: SchemeKind,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            sizes: vec![100, 400, 900],
            err: 1e-3,
            seed: 0,
            scheme: SchemeKind::PerPointTangent,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub method: Method,
    pub training_size: usize,
    pub query_id: usize,
    /// `None` where the method failed for this query or training size.
    pub value: Option<f64>,
    pub truth: Option<f64>,
}

impl CompareRow {
    pub fn abs_error(&self) -> Option<f64> {
        Some((self.value? - self.truth?).abs())
    }
}

#[derive(Debug)]
pub struct MethodFailure {
    pub method: Method,
    pub training_size: usize,
    pub error: Error,
}

#[derive(Debug, Default)]
pub struct Comparison {
    pub rows: Vec<CompareRow>,
    pub failures: Vec<MethodFailure>,
}

impl Comparison {
    /// Mean absolute error of one method at one size, over queries with truth.
    pub fn mean_error(&self, method: Method, training_size: usize) -> Option<f64> {
        let errs: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.method == method && r.training_size == training_size)
            .filter_map(CompareRow::abs_error)
            .collect();
        (!errs.is_empty()).then(|| errs.iter().sum::<f64>() / errs.len() as f64)
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.rows.iter().map(|r| r.training_size).collect();
        s.sort_unstable();
        s.dedup();
        s
    }
}

fn fit_and_evaluate(
    method: Method,
    points: &[Vec<f64>],
    f: &DVector<f64>,
    queries: &[Vec<f64>],
    model_epsilon: f64,
    cfg: &CompareConfig,
) -> Result<Vec<Option<f64>>> {
    match method {
        Method::Pbe => {
            let images: Vec<Vec<f64>> = f.iter().map(|v| vec![*v]).collect();
            let model = TrainingModel::from_rows(points, &images, model_epsilon, 1.0)?;
            let scheme = WeightScheme::for_model(cfg.scheme, &model);
            Ok(queries
                .par_iter()
                .map(|q| extend(q, &model, &scheme).ok().map(|r| r.embedding[0]))
                .collect())
        }
        Method::Nystrom => {
            let kcfg = GaussianKernelConfig::median_heuristic(points)?;
            let eig = EigenSystem::from_kernel(&build_gaussian_kernel(points, &kcfg))?;
            let ext = NystromExtender::new(f, &eig, points, &kcfg, eig.retained())?;
            Ok(queries.par_iter().map(|q| Some(ext.evaluate(q))).collect())
        }
        Method::Mse => {
            let t = max_squared_distance(points)?;
            let opts = MseOptions {
                seed: cfg.seed,
                ..MseOptions::default()
            };
            let fitted = mse_fit(points, f, t, cfg.err, &opts)?;
            Ok(queries.par_iter().map(|q| Some(fitted.evaluate(q))).collect())
        }
        Method::LaplacianPyramid => {
            let sigma0 = max_squared_distance(points)?;
            let levels = laplacian_pyramid_fit(points, f, sigma0, cfg.err)?;
            Ok(queries
                .par_iter()
                .map(|q| Some(laplacian_pyramid_extend(&levels, points, f, q)))
                .collect())
        }
    }
}

/// Extends `f` (one value per model point) to every query with all four
/// methods, for each training size. Subsets are drawn with the config seed;
/// the tangent scheme keeps the model's radius.
pub fn run_comparison(
    model: &TrainingModel,
    f: &[f64],
    queries: &[Vec<f64>],
    truth: Option<&[f64]>,
    cfg: &CompareConfig,
) -> Result<Comparison> {
    let p = model.len();
    if f.len() != p {
        return Err(Error::InvalidInput(format!(
            "function has {} values for {p} training points",
            f.len()
        )));
    }
    if let Some(t) = truth {
        if t.len() != queries.len() {
            return Err(Error::InvalidInput("one truth value per query expected".into()));
        }
    }
    if let Some(q) = queries.iter().find(|q| q.len() != model.ambient_dim()) {
        return Err(Error::InvalidInput(format!(
            "query of dimension {} for a model of dimension {}",
            q.len(),
            model.ambient_dim()
        )));
    }
    if !(cfg.err >= 0.0) {
        return Err(Error::OutOfRange(format!("err must be non-negative, got {}", cfg.err)));
    }
    let mut sizes: Vec<usize> = cfg.sizes.iter().map(|&s| s.min(p)).filter(|&s| s >= 2).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.is_empty() {
        return Err(Error::OutOfRange("need a training size of at least 2".into()));
    }

    let mut out = Comparison::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for &size in &sizes {
        let rows: Vec<usize> = if size == p {
            (0..p).collect()
        } else {
            let mut r = sample(&mut rng, p, size).into_vec();
            r.sort_unstable();
            r
        };
        let points: Vec<Vec<f64>> = rows.iter().map(|&j| model.point(j).to_vec()).collect();
        let fs = DVector::from_iterator(size, rows.iter().map(|&j| f[j]));
        for method in Method::ALL {
            let values = match fit_and_evaluate(method, &points, &fs, queries, model.epsilon(), cfg) {
                Ok(v) => v,
                Err(error) => {
                    out.failures.push(MethodFailure {
                        method,
                        training_size: size,
                        error,
                    });
                    vec![None; queries.len()]
                }
            };
            out.rows.extend(values.into_iter().enumerate().map(|(query_id, value)| CompareRow {
                method,
                training_size: size,
                query_id,
                value,
                truth: truth.map(|t| t[query_id]),
            }));
        }
    }
    Ok(out)
}
