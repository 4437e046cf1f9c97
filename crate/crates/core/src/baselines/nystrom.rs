//! Nyström extension of kernel eigenvectors and of functions expanded in them.
//!
//! Uses the kernel-matrix convention `φ̂(x) = (1/λ) Σ_j g(x, x_j) φ_j`, which
//! reproduces `φ_j` at training points.

use nalgebra::{DMatrix, DVector};

use super::kernel::{point_dim, GaussianKernelConfig};
use crate::error::{Error, Result};

/// Eigenvalues below this fraction of the largest cannot be extended.
pub const SPECTRUM_CUTOFF: f64 = 1e-12;
/// Retained eigenvalues exceed `RETAINED_CUTOFF_SCALE / p²` of the largest,
/// so larger samples resolve more of the spectrum.
pub const RETAINED_CUTOFF_SCALE: f64 = 1e-2;

/// Eigenpairs of a symmetric kernel matrix, sorted by descending eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, one per eigenvalue.
    pub eigenvectors: Vec<DVector<f64>>,
}

impl EigenSystem {
    pub fn from_kernel(g: &DMatrix<f64>) -> Result<Self> {
        if !g.is_square() || g.is_empty() {
            return Err(Error::InvalidInput("kernel must be square and non-empty".into()));
        }
        let sym = (g + g.transpose()) * 0.5;
        let eig = sym.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        Ok(EigenSystem {
            eigenvalues: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
            eigenvectors: order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// Number of leading eigenvalues above `rel · λ_max`.
    pub fn count_above(&self, rel: f64) -> usize {
        let cut = rel * self.lambda_max();
        self.eigenvalues.iter().take_while(|&&l| l > cut).count()
    }

    /// Relative cutoff of [`EigenSystem::retained`].
    pub fn retained_cutoff(&self) -> f64 {
        let p = self.len() as f64;
        (RETAINED_CUTOFF_SCALE / (p * p)).max(SPECTRUM_CUTOFF)
    }

    /// Leading eigenpairs that extend accurately.
    pub fn retained(&self) -> usize {
        self.count_above(self.retained_cutoff())
    }
}

fn check_lambda(lambda: f64, lambda_max: f64) -> Result<()> {
    let cutoff = SPECTRUM_CUTOFF * lambda_max.abs();
    if !(lambda.abs() > cutoff) {
        return Err(Error::SpectrumCutoff { eigenvalue: lambda, cutoff });
    }
    Ok(())
}

fn kernel_row(x_star: &[f64], points: &[Vec<f64>], cfg: &GaussianKernelConfig) -> DVector<f64> {
    DVector::from_iterator(points.len(), points.iter().map(|p| cfg.eval(x_star, p)))
}

/// Extends eigenvector `phi` with eigenvalue `lambda` to `x_star`.
pub fn nystrom_extend_eigenfunction(
    x_star: &[f64],
    points: &[Vec<f64>],
    phi: &DVector<f64>,
    lambda: f64,
    lambda_max: f64,
    cfg: &GaussianKernelConfig,
) -> Result<f64> {
    check_lambda(lambda, lambda_max)?;
    if phi.len() != points.len() {
        return Err(Error::InvalidInput("eigenvector length differs from point count".into()));
    }
    Ok(kernel_row(x_star, points, cfg).dot(phi) / lambda)
}

/// Nyström extension of a fixed function, precomputed for repeated queries.
#[derive(Debug, Clone)]
pub struct NystromExtender {
    points: Vec<Vec<f64>>,
    cfg: GaussianKernelConfig,
    /// `Σ_i (fᵀφ_i / λ_i) φ_i`.
    weights: DVector<f64>,
}

impl NystromExtender {
    pub fn new(
        f: &DVector<f64>,
        eig: &EigenSystem,
        points: &[Vec<f64>],
        cfg: &GaussianKernelConfig,
        num_components: usize,
    ) -> Result<Self> {
        point_dim(points)?;
        if f.len() != points.len() || eig.len() != points.len() {
            return Err(Error::InvalidInput("function, eigensystem and points disagree in size".into()));
        }
        if num_components == 0 || num_components > eig.len() {
            return Err(Error::OutOfRange(format!(
                "num_components must be in 1..={}, got {num_components}",
                eig.len()
            )));
        }
        let mut weights = DVector::zeros(points.len());
        for (&lambda, phi) in eig.eigenvalues.iter().zip(&eig.eigenvectors).take(num_components) {
            check_lambda(lambda, eig.lambda_max())?;
            weights.axpy(f.dot(phi) / lambda, phi, 1.0);
        }
        Ok(NystromExtender {
            points: points.to_vec(),
            cfg: *cfg,
            weights,
        })
    }

    pub fn evaluate(&self, x_star: &[f64]) -> f64 {
        kernel_row(x_star, &self.points, &self.cfg).dot(&self.weights)
    }
}

/// `f(x*) ≈ Σ_{i < num_components} (fᵀφ_i) φ̂_i(x*)`.
pub fn nystrom_extend_function(
    x_star: &[f64],
    f: &DVector<f64>,
    eig: &EigenSystem,
    points: &[Vec<f64>],
    cfg: &GaussianKernelConfig,
    num_components: usize,
) -> Result<f64> {
    Ok(NystromExtender::new(f, eig, points, cfg, num_components)?.evaluate(x_star))
}
