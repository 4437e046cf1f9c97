//! Precision blocks for the neighbor equations `ψ̂(x) = ψ(x_j) + ω_j`.
//!
//! Every block is stored in precision convention: the matrix that multiplies
//! residuals, i.e. the inverse of the error covariance of one equation. A
//! large block means a neighbor pulls the extension strongly.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::model::{Neighborhood, TrainingModel};

const SYMMETRY_TOL: f64 = 1e-10;

/// A symmetric positive-definite d×d precision matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionBlock(DMatrix<f64>);

impl PrecisionBlock {
    /// Validates symmetry (relative 1e-10) and positive definiteness (Cholesky).
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidInput("precision block must be square".into()));
        }
        if !is_symmetric(&matrix) || matrix.clone().cholesky().is_none() {
            return Err(Error::SingularBlock { index: 0 });
        }
        Ok(PrecisionBlock(matrix))
    }

    /// `scale · I_d`.
    pub fn scalar(dim: usize, scale: f64) -> Result<Self> {
        PrecisionBlock::new(DMatrix::identity(dim, dim) * scale)
    }

    // Caller guarantees SPD (e.g. a spectral form with positive eigenvalues).
    pub(crate) fn from_spd_unchecked(matrix: DMatrix<f64>) -> Self {
        PrecisionBlock(matrix)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// Multiplies the block by a positive constant.
    pub fn scaled(&self, factor: f64) -> Self {
        PrecisionBlock(&self.0 * factor)
    }
}

fn is_symmetric(m: &DMatrix<f64>) -> bool {
    let scale = m.amax().max(f64::MIN_POSITIVE);
    (m - m.transpose()).amax() <= SYMMETRY_TOL * scale
}

/// Which precision construction the extension uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// `λ_j² I_d` with `λ_j = 1/‖x − x_j‖`.
    Distance,
    /// Tangent-aware blocks from one covariance of the query's neighborhood.
    SharedTangent,
    /// Tangent-aware blocks from each neighbor's own covariance.
    PerPointTangent,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [
        SchemeKind::Distance,
        SchemeKind::SharedTangent,
        SchemeKind::PerPointTangent,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SchemeKind::Distance => "distance",
            SchemeKind::SharedTangent => "tangent",
            SchemeKind::PerPointTangent => "tangent-per-point",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distance" => Ok(SchemeKind::Distance),
            "tangent" => Ok(SchemeKind::SharedTangent),
            "tangent-per-point" => Ok(SchemeKind::PerPointTangent),
            other => Err(Error::InvalidInput(format!("unknown scheme `{other}`"))),
        }
    }
}

/// A precision construction together with the curvature bound `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightScheme {
    pub kind: SchemeKind,
    pub curvature_c: f64,
}

impl WeightScheme {
    pub fn new(kind: SchemeKind, curvature_c: f64) -> Result<Self> {
        if !(curvature_c.is_finite() && curvature_c > 0.0) {
            return Err(Error::OutOfRange(format!(
                "curvature_c must be positive, got {curvature_c}"
            )));
        }
        Ok(WeightScheme { kind, curvature_c })
    }

    /// Uses the curvature bound stored in the model.
    pub fn for_model(kind: SchemeKind, model: &TrainingModel) -> Self {
        WeightScheme {
            kind,
            curvature_c: model.curvature_c(),
        }
    }

    pub fn distance() -> Self {
        WeightScheme {
            kind: SchemeKind::Distance,
            curvature_c: 1.0,
        }
    }
}

/// Distance precisions `λ_j² I_d`, `λ_j = 1/‖x − x_j‖`.
pub fn distance_precisions(nb: &Neighborhood, embed_dim: usize) -> Result<Vec<PrecisionBlock>> {
    nb.distances
        .iter()
        .zip(&nb.indices)
        .map(|(&dist, &index)| {
            if dist == 0.0 {
                return Err(Error::ZeroDistance { index });
            }
            let lambda = 1.0 / dist;
            Ok(PrecisionBlock::from_spd_unchecked(
                DMatrix::identity(embed_dim, embed_dim) * (lambda * lambda),
            ))
        })
        .collect()
}

/// Centered second-moment matrix `(1/ε₁²)(1/k) Σ (y_j − μ)(y_j − μ)ᵀ` (d×d).
///
/// Panics on an empty input.
pub fn local_covariance(images: &[&[f64]], epsilon1: f64) -> DMatrix<f64> {
    assert!(!images.is_empty(), "local covariance of an empty set");
    let d = images[0].len();
    let k = images.len() as f64;
    let mut mean = DVector::<f64>::zeros(d);
    for y in images {
        mean += DVector::from_column_slice(y);
    }
    mean /= k;
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for y in images {
        let r = DVector::from_column_slice(y) - &mean;
        cov.ger(1.0, &r, &r, 1.0);
    }
    cov / (k * epsilon1 * epsilon1)
}

/// Eigendecomposition of a local covariance, with eigenvalues clamped at zero.
#[derive(Debug, Clone)]
pub struct CovarianceSpectrum {
    pub vectors: DMatrix<f64>,
    pub values: DVector<f64>,
}

impl CovarianceSpectrum {
    pub fn new(cov: &DMatrix<f64>) -> Self {
        let sym = (cov + cov.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        CovarianceSpectrum {
            vectors: eig.eigenvectors,
            values: eig.eigenvalues.map(|v| v.max(0.0)),
        }
    }

    /// `(δ² C + (δ/c)⁴ I)⁻¹` for neighbor distance `δ = 1/λ`.
    ///
    /// The inverse is taken through the spectrum of `C`, then re-symmetrized.
    /// Returns `None` if a resulting eigenvalue is not positive and finite.
    pub fn tangent_block(&self, distance: f64, curvature_c: f64) -> Option<DMatrix<f64>> {
        let d2 = distance * distance;
        let ridge = (distance / curvature_c).powi(4);
        let inv = self.values.map(|mu| 1.0 / (d2 * mu + ridge));
        if inv.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return None;
        }
        let scaled = DMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |r, c| {
            self.vectors[(r, c)] * inv[c]
        });
        let m = scaled * self.vectors.transpose();
        Some((&m + m.transpose()) * 0.5)
    }
}

/// Tangent-aware precisions `w_j = (λ_j⁻² cov_j + (c λ_j)⁻⁴ I)⁻¹`.
///
/// `SharedTangent` uses one covariance of the neighborhood images
/// (normalized by the neighborhood radius); `PerPointTangent` uses the
/// cached covariance of each neighbor's own ε-ball in the training set.
/// Called with `SchemeKind::Distance` it falls back to distance precisions.
pub fn tangent_precisions(
    nb: &Neighborhood,
    model: &TrainingModel,
    scheme: &WeightScheme,
) -> Result<Vec<PrecisionBlock>> {
    if nb.is_empty() {
        return Err(Error::InvalidInput("empty neighborhood".into()));
    }
    if let Some(pos) = nb.distances.iter().position(|&d| d == 0.0) {
        return Err(Error::ZeroDistance {
            index: nb.indices[pos],
        });
    }
    let c = scheme.curvature_c;
    let build = |spectrum: &CovarianceSpectrum, pos: usize| {
        spectrum
            .tangent_block(nb.distances[pos], c)
            .map(PrecisionBlock::from_spd_unchecked)
            .ok_or(Error::SingularBlock {
                index: nb.indices[pos],
            })
    };
    match scheme.kind {
        SchemeKind::Distance => distance_precisions(nb, model.embed_dim()),
        SchemeKind::SharedTangent => {
            let cov = local_covariance(&nb.images(model), nb.epsilon);
            let spectrum = CovarianceSpectrum::new(&cov);
            (0..nb.len()).map(|pos| build(&spectrum, pos)).collect()
        }
        SchemeKind::PerPointTangent => {
            let spectra = model.point_spectra();
            (0..nb.len())
                .map(|pos| build(&spectra[nb.indices[pos]], pos))
                .collect()
        }
    }
}

/// Builds the scheme's precision blocks for a neighborhood.
pub fn precisions(
    nb: &Neighborhood,
    model: &TrainingModel,
    scheme: &WeightScheme,
) -> Result<Vec<PrecisionBlock>> {
    match scheme.kind {
        SchemeKind::Distance => distance_precisions(nb, model.embed_dim()),
        _ => tangent_precisions(nb, model, scheme),
    }
}
