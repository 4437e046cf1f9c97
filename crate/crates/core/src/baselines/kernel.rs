//! Gaussian kernels `g_ε(x, x′) = exp(−‖x − x′‖² / ε)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::index::squared_distance;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianKernelConfig {
    /// Kernel width ε.
    pub epsilon: f64,
}

impl GaussianKernelConfig {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::OutOfRange(format!("kernel width must be positive, got {epsilon}")));
        }
        Ok(GaussianKernelConfig { epsilon })
    }

    /// Width set to the median squared pairwise distance.
    pub fn median_heuristic(points: &[Vec<f64>]) -> Result<Self> {
        let mut d2 = pairwise_squared_distances(points)?;
        if d2.is_empty() {
            return Err(Error::InvalidInput("need at least two points".into()));
        }
        let mid = d2.len() / 2;
        let (_, m, _) = d2.select_nth_unstable_by(mid, f64::total_cmp);
        Self::new(*m)
    }

    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        (-squared_distance(a, b) / self.epsilon).exp()
    }
}

/// Checks that `points` is non-empty with a common positive dimension.
pub(crate) fn point_dim(points: &[Vec<f64>]) -> Result<usize> {
    let dim = points
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InvalidInput("no points".into()))?;
    if dim == 0 {
        return Err(Error::InvalidInput("points have dimension 0".into()));
    }
    for (row, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                row,
                expected: dim,
                found: p.len(),
            });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("point {row} is not finite")));
        }
    }
    Ok(dim)
}

/// Squared distances of all unordered pairs.
pub fn pairwise_squared_distances(points: &[Vec<f64>]) -> Result<Vec<f64>> {
    point_dim(points)?;
    let p = points.len();
    let mut out = Vec::with_capacity(p * (p - 1) / 2);
    for i in 0..p {
        for j in (i + 1)..p {
            out.push(squared_distance(&points[i], &points[j]));
        }
    }
    Ok(out)
}

/// Largest squared pairwise distance, or 0 for a single point.
pub fn max_squared_distance(points: &[Vec<f64>]) -> Result<f64> {
    Ok(pairwise_squared_distances(points)?.into_iter().fold(0.0, f64::max))
}

/// `G_ij = exp(−‖x_i − x_j‖² / ε)`.
pub fn build_gaussian_kernel(points: &[Vec<f64>], cfg: &GaussianKernelConfig) -> DMatrix<f64> {
    let p = points.len();
    let mut g = DMatrix::<f64>::identity(p, p);
    for i in 0..p {
        for j in (i + 1)..p {
            let v = cfg.eval(&points[i], &points[j]);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identical_points() {
        let g = build_gaussian_kernel(&[vec![1.0, 2.0], vec![1.0, 2.0]], &GaussianKernelConfig::new(0.3).unwrap());
        assert_eq!(g, DMatrix::from_element(2, 2, 1.0));
    }

    #[test]
    fn unit_distance() {
        let g = build_gaussian_kernel(&[vec![0.0], vec![1.0]], &GaussianKernelConfig::new(1.0).unwrap());
        assert_eq!(g[(0, 1)], (-1.0f64).exp());
        assert_eq!(g[(1, 0)], (-1.0f64).exp());
    }

    #[test]
    fn matches_elementwise_formula_and_is_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Vec<f64>> = (0..10)
            .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let cfg = GaussianKernelConfig::new(0.7).unwrap();
        let g = build_gaussian_kernel(&pts, &cfg);
        for i in 0..10 {
            for j in 0..10 {
                let d2: f64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b) * (a - b)).sum();
                assert!((g[(i, j)] - (-d2 / 0.7).exp()).abs() <= 1e-15);
            }
        }
        let eig = g.clone().symmetric_eigen().eigenvalues;
        let max = eig.max();
        assert!(eig.iter().all(|&l| l >= -1e-10 * max));
    }

    #[test]
    fn width_validation_and_median() {
        assert!(GaussianKernelConfig::new(0.0).is_err());
        assert!(GaussianKernelConfig::new(f64::NAN).is_err());
        let pts = vec![vec![0.0], vec![1.0], vec![3.0]];
        // Squared distances 1, 9, 4.
        assert_eq!(GaussianKernelConfig::median_heuristic(&pts).unwrap().epsilon, 4.0);
        assert_eq!(max_squared_distance(&pts).unwrap(), 9.0);
        assert!(GaussianKernelConfig::median_heuristic(&pts[..1]).is_err());
    }
}
