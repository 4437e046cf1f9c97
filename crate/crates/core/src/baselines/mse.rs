//! Multiscale extension: at each scale the residual is projected onto a
//! column subset of a Gaussian kernel and extended through the same
//! kernel columns.

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::kernel::{build_gaussian_kernel, point_dim, GaussianKernelConfig};
use super::rid::randomized_id;
use crate::error::{Error, Result};

pub const MAX_SCALES: usize = 20;
/// Relative singular-value threshold of the rank estimate.
pub const RANK_THRESHOLD: f64 = 1e-3;
/// Smallest allowed `σ_min / σ_max` of a scale's basis.
pub const BASIS_CONDITION_LIMIT: f64 = 1e-12;
/// Columns in the first rank-estimation sketch.
const INITIAL_RANK_COLUMNS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MseOptions {
    pub max_scales: usize,
    pub rank_threshold: f64,
    pub seed: u64,
}

impl Default for MseOptions {
    fn default() -> Self {
        MseOptions {
            max_scales: MAX_SCALES,
            rank_threshold: RANK_THRESHOLD,
            seed: 0,
        }
    }
}

/// One fitted scale.
#[derive(Debug, Clone, PartialEq)]
pub struct MseScale {
    pub scale: usize,
    /// `T / 2^scale`.
    pub epsilon_s: f64,
    pub rank: usize,
    pub sampled_indices: Vec<usize>,
    /// p×rank kernel columns.
    pub basis: DMatrix<f64>,
    /// Coordinates of the projection in `basis`.
    pub coefficients: DVector<f64>,
}

/// Fitted multiscale approximation, evaluable at new points.
#[derive(Debug, Clone)]
pub struct MseModel {
    points: Vec<Vec<f64>>,
    pub scales: Vec<MseScale>,
    /// Accumulated approximation at the training points.
    pub approximation: DVector<f64>,
    pub residual_norm: f64,
}

impl MseModel {
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.scales
            .iter()
            .map(|s| {
                let cfg = GaussianKernelConfig { epsilon: s.epsilon_s };
                s.sampled_indices
                    .iter()
                    .zip(s.coefficients.iter())
                    .map(|(&i, c)| cfg.eval(x, &self.points[i]) * c)
                    .sum::<f64>()
            })
            .sum()
    }
}

/// Least-squares coordinates of `f` in the columns of `b`.
fn project(b: &DMatrix<f64>, f: &DVector<f64>) -> Result<DVector<f64>> {
    if b.nrows() != f.len() || b.ncols() == 0 {
        return Err(Error::InvalidInput("basis and function disagree in size".into()));
    }
    let svd = b.clone().svd(true, true);
    let (min, max) = svd
        .singular_values
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    if !(min >= BASIS_CONDITION_LIMIT * max) || max == 0.0 {
        return Err(Error::IllConditionedBasis { condition: max / min });
    }
    svd.solve(f, 0.0).map_err(|e| Error::InvalidInput(e.into()))
}

/// Projects `f` onto the span of `b_s` and extends the projection to `x`.
pub fn single_scale_extend(
    b_s: &DMatrix<f64>,
    sampled_indices: &[usize],
    points: &[Vec<f64>],
    x: &[f64],
    f: &DVector<f64>,
    cfg: &GaussianKernelConfig,
) -> Result<(DVector<f64>, f64)> {
    if sampled_indices.len() != b_s.ncols() {
        return Err(Error::InvalidInput("one sampled index per basis column expected".into()));
    }
    let c = project(b_s, f)?;
    let value = sampled_indices
        .iter()
        .zip(c.iter())
        .map(|(&i, ci)| cfg.eval(x, &points[i]) * ci)
        .sum();
    Ok((b_s * c, value))
}

/// Numerical rank of `kernel` from the singular values of a random column
/// sample, doubling the sample while it is full rank. Capped at `p − 1`.
pub fn estimate_rank(kernel: &DMatrix<f64>, threshold: f64, rng: &mut ChaCha8Rng) -> usize {
    let p = kernel.ncols();
    let mut cols = INITIAL_RANK_COLUMNS.min(p);
    loop {
        let mut idx = sample(rng, p, cols).into_vec();
        idx.sort_unstable();
        let sv = kernel.select_columns(&idx).singular_values();
        let cut = threshold * sv.max();
        let count = sv.iter().filter(|&&s| s > cut).count();
        if count < cols || cols == p {
            return count.clamp(1, p.saturating_sub(1).max(1));
        }
        cols = (2 * cols).min(p);
    }
}

/// Fits scales `ε_s = t / 2^s` until the training residual is at most `err`.
pub fn mse_fit(
    points: &[Vec<f64>],
    f: &DVector<f64>,
    t: f64,
    err: f64,
    opts: &MseOptions,
) -> Result<MseModel> {
    point_dim(points)?;
    let p = points.len();
    if p < 2 {
        return Err(Error::InvalidInput("need at least two training points".into()));
    }
    if f.len() != p {
        return Err(Error::InvalidInput("function length differs from point count".into()));
    }
    if !(t > 0.0 && t.is_finite()) || !(err >= 0.0) {
        return Err(Error::OutOfRange(format!("need t > 0 and err ≥ 0, got t={t}, err={err}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut approximation = DVector::zeros(p);
    let mut scales = Vec::new();
    let mut residual = f.clone();
    for scale in 0..opts.max_scales {
        if residual.norm() <= err {
            break;
        }
        let epsilon_s = t / 2f64.powi(scale as i32);
        let cfg = GaussianKernelConfig::new(epsilon_s)?;
        let kernel = build_gaussian_kernel(points, &cfg);
        let rank = estimate_rank(&kernel, opts.rank_threshold, &mut rng);
        let id = randomized_id(&kernel, rank, &mut rng)?;
        let coefficients = project(&id.basis, &residual)?;
        let fitted = &id.basis * &coefficients;
        residual -= &fitted;
        approximation += fitted;
        scales.push(MseScale {
            scale,
            epsilon_s,
            rank,
            sampled_indices: id.indices,
            basis: id.basis,
            coefficients,
        });
    }
    let residual_norm = residual.norm();
    if residual_norm > err {
        return Err(Error::NoConvergence {
            iterations: scales.len(),
            residual: residual_norm,
            target: err,
        });
    }
    Ok(MseModel {
        points: points.to_vec(),
        scales,
        approximation,
        residual_norm,
    })
}

/// Approximation of `f` on the training points and its value at `x`.
pub fn mse_extend(
    points: &[Vec<f64>],
    f: &DVector<f64>,
    x: &[f64],
    t: f64,
    err: f64,
) -> Result<(DVector<f64>, f64)> {
    let model = mse_fit(points, f, t, err, &MseOptions::default())?;
    let value = model.evaluate(x);
    Ok((model.approximation, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn grid(n: usize) -> Vec<Vec<f64>> {
        (0..n)
            .flat_map(|i| (0..n).map(move |j| vec![i as f64 / (n - 1) as f64, j as f64 / (n - 1) as f64]))
            .collect()
    }

    #[test]
    fn in_span_and_orthogonal() {
        let pts = grid(3);
        let cfg = GaussianKernelConfig::new(0.2).unwrap();
        let k = build_gaussian_kernel(&pts, &cfg);
        let idx = [0usize, 4, 8];
        let b = k.select_columns(&idx);
        let f = &b * DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let (proj, v) = single_scale_extend(&b, &idx, &pts, &pts[4], &f, &cfg).unwrap();
        assert!((&proj - &f).norm() < 1e-12);
        assert!((v - f[4]).abs() < 1e-12);

        let q = b.clone().qr().q();
        let mut g = DVector::from_element(9, 1.0);
        g -= &q * (q.transpose() * &g);
        let (proj, _) = single_scale_extend(&b, &idx, &pts, &pts[1], &g, &cfg).unwrap();
        assert!(proj.norm() < 1e-12);
    }

    #[test]
    fn projection_matches_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = DMatrix::<f64>::from_fn(8, 3, |_, _| rng.random_range(-1.0..1.0));
        let f = DVector::<f64>::from_fn(8, |_, _| rng.random_range(-1.0..1.0));
        let pts = grid(3);
        let cfg = GaussianKernelConfig::new(1.0).unwrap();
        let (proj, _) = single_scale_extend(&b, &[0, 1, 2], &pts, &pts[0], &f, &cfg).unwrap();
        let btb = b.transpose() * &b;
        let c = btb.cholesky().unwrap().solve(&(b.transpose() * &f));
        assert!((proj - &b * c).norm() < 1e-8);
    }

    #[test]
    fn dependent_basis_is_rejected() {
        let b = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 1.0, 2.0, 1.0, 2.0]);
        let f = DVector::from_element(3, 1.0);
        let pts = grid(2);
        let cfg = GaussianKernelConfig::new(1.0).unwrap();
        let err = single_scale_extend(&b, &[0, 1], &pts, &pts[0], &f, &cfg).unwrap_err();
        assert!(matches!(err, Error::IllConditionedBasis { .. }));
    }

    #[test]
    fn zero_function_needs_no_scales() {
        let pts = grid(5);
        let (approx, v) = mse_extend(&pts, &DVector::zeros(25), &[0.3, 0.3], 1.0, 1e-3).unwrap();
        assert_eq!(approx, DVector::zeros(25));
        assert_eq!(v, 0.0);
    }

    #[test]
    fn residual_meets_target() {
        let pts = grid(10);
        let f = DVector::from_iterator(100, pts.iter().map(|p| (p[0] * p[0] + p[1] * p[1]).sqrt()));
        let model = mse_fit(&pts, &f, 2.0, 1e-3, &MseOptions::default()).unwrap();
        assert!(model.residual_norm <= 1e-3);
        assert!((&f - &model.approximation).norm() <= 1e-3);
        for s in &model.scales {
            assert_eq!(s.epsilon_s, 2.0 / 2f64.powi(s.scale as i32));
            assert!(s.rank < 100);
        }
        for (j, p) in pts.iter().enumerate() {
            assert!((model.evaluate(p) - model.approximation[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn unreachable_target_reports_residual() {
        let pts = grid(4);
        let f = DVector::from_iterator(16, pts.iter().map(|p| p[0].sin()));
        let opts = MseOptions { max_scales: 1, ..MseOptions::default() };
        match mse_fit(&pts, &f, 1.0, 0.0, &opts).unwrap_err() {
            Error::NoConvergence { iterations, residual, .. } => {
                assert_eq!(iterations, 1);
                assert!(residual > 0.0);
            }
            e => panic!("{e}"),
        }
    }
}
