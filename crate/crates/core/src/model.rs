//! Training data for the extension: ambient points paired with their
//! precomputed low-dimensional images.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::index::{sort_hits, SpatialIndex};
use crate::weights::{local_covariance, CovarianceSpectrum};

/// Ambient points `x_1..x_p` in R^n with their images `ψ(x_j)` in R^d.
///
/// Immutable once built. The spatial index is built eagerly; per-point
/// covariance spectra used by the per-point tangent scheme are computed on
/// first use and cached, so a model can be shared across threads.
pub struct TrainingModel {
    ambient_dim: usize,
    embed_dim: usize,
    points: Vec<f64>,
    images: Vec<f64>,
    epsilon: f64,
    curvature_c: f64,
    index: SpatialIndex,
    point_spectra: OnceLock<Vec<CovarianceSpectrum>>,
}

impl TrainingModel {
    /// Builds a model from row-major point and image buffers.
    pub fn new(
        ambient_dim: usize,
        embed_dim: usize,
        points: Vec<f64>,
        images: Vec<f64>,
        epsilon: f64,
        curvature_c: f64,
    ) -> Result<Self> {
        if ambient_dim == 0 || embed_dim == 0 {
            return Err(Error::ValidationFailure(
                "ambient_dim and embed_dim must be positive".into(),
            ));
        }
        if points.is_empty() {
            return Err(Error::ValidationFailure("model needs at least one point".into()));
        }
        if !points.len().is_multiple_of(ambient_dim) {
            return Err(Error::ValidationFailure(format!(
                "points buffer of length {} is not a multiple of ambient_dim {ambient_dim}",
                points.len()
            )));
        }
        if !images.len().is_multiple_of(embed_dim) {
            return Err(Error::ValidationFailure(format!(
                "images buffer of length {} is not a multiple of embed_dim {embed_dim}",
                images.len()
            )));
        }
        let p = points.len() / ambient_dim;
        let q = images.len() / embed_dim;
        if p != q {
            return Err(Error::ValidationFailure(format!(
                "{p} points but {q} images"
            )));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::ValidationFailure(format!(
                "epsilon must be positive and finite, got {epsilon}"
            )));
        }
        if !(curvature_c.is_finite() && curvature_c > 0.0) {
            return Err(Error::ValidationFailure(format!(
                "curvature_c must be positive and finite, got {curvature_c}"
            )));
        }
        if let Some(i) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::ValidationFailure(format!(
                "non-finite coordinate in point {}",
                i / ambient_dim
            )));
        }
        if let Some(i) = images.iter().position(|v| !v.is_finite()) {
            return Err(Error::ValidationFailure(format!(
                "non-finite coordinate in image {}",
                i / embed_dim
            )));
        }
        let index = SpatialIndex::new(points.clone(), ambient_dim);
        Ok(TrainingModel {
            ambient_dim,
            embed_dim,
            points,
            images,
            epsilon,
            curvature_c,
            index,
            point_spectra: OnceLock::new(),
        })
    }

    /// Builds a model from per-row vectors.
    pub fn from_rows(
        points: &[Vec<f64>],
        images: &[Vec<f64>],
        epsilon: f64,
        curvature_c: f64,
    ) -> Result<Self> {
        let n = points.first().map_or(0, Vec::len);
        let d = images.first().map_or(0, Vec::len);
        if let Some(j) = points.iter().position(|r| r.len() != n) {
            return Err(Error::ValidationFailure(format!(
                "point {j} has length {}, expected {n}",
                points[j].len()
            )));
        }
        if let Some(j) = images.iter().position(|r| r.len() != d) {
            return Err(Error::ValidationFailure(format!(
                "image {j} has length {}, expected {d}",
                images[j].len()
            )));
        }
        TrainingModel::new(
            n,
            d,
            points.concat(),
            images.concat(),
            epsilon,
            curvature_c,
        )
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn embed_dim(&self) -> usize {
        self.embed_dim
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.ambient_dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn curvature_c(&self) -> f64 {
        self.curvature_c
    }

    pub fn point(&self, j: usize) -> &[f64] {
        &self.points[j * self.ambient_dim..(j + 1) * self.ambient_dim]
    }

    pub fn image(&self, j: usize) -> &[f64] {
        &self.images[j * self.embed_dim..(j + 1) * self.embed_dim]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn images(&self) -> &[f64] {
        &self.images
    }

    pub fn index(&self) -> &SpatialIndex {
        &self.index
    }

    /// Same data with a different neighborhood radius or curvature bound.
    pub fn with_params(&self, epsilon: f64, curvature_c: f64) -> Result<Self> {
        TrainingModel::new(
            self.ambient_dim,
            self.embed_dim,
            self.points.clone(),
            self.images.clone(),
            epsilon,
            curvature_c,
        )
    }

    /// Subset of the training pairs, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        let mut points = Vec::with_capacity(rows.len() * self.ambient_dim);
        let mut images = Vec::with_capacity(rows.len() * self.embed_dim);
        for &j in rows {
            points.extend_from_slice(self.point(j));
            images.extend_from_slice(self.image(j));
        }
        TrainingModel::new(
            self.ambient_dim,
            self.embed_dim,
            points,
            images,
            self.epsilon,
            self.curvature_c,
        )
    }

    /// Covariance spectrum of each training image over its own ε-ball
    /// (radius `epsilon`, taken within the training set).
    pub(crate) fn point_spectra(&self) -> &[CovarianceSpectrum] {
        self.point_spectra.get_or_init(|| {
            (0..self.len())
                .map(|j| {
                    let hits = self.index.within_radius(self.point(j), self.epsilon);
                    let imgs: Vec<&[f64]> = hits.iter().map(|h| self.image(h.index)).collect();
                    CovarianceSpectrum::new(&local_covariance(&imgs, self.epsilon))
                })
                .collect()
        })
    }
}

impl Clone for TrainingModel {
    fn clone(&self) -> Self {
        TrainingModel {
            ambient_dim: self.ambient_dim,
            embed_dim: self.embed_dim,
            points: self.points.clone(),
            images: self.images.clone(),
            epsilon: self.epsilon,
            curvature_c: self.curvature_c,
            index: self.index.clone(),
            point_spectra: self.point_spectra.clone(),
        }
    }
}

impl PartialEq for TrainingModel {
    /// Compares data and hyperparameters bit for bit.
    fn eq(&self, other: &Self) -> bool {
        let bits = |a: &[f64], b: &[f64]| {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
        };
        self.ambient_dim == other.ambient_dim
            && self.embed_dim == other.embed_dim
            && self.epsilon.to_bits() == other.epsilon.to_bits()
            && self.curvature_c.to_bits() == other.curvature_c.to_bits()
            && bits(&self.points, &other.points)
            && bits(&self.images, &other.images)
    }
}

impl fmt::Debug for TrainingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TrainingModel")
            .field("len", &self.len())
            .field("ambient_dim", &self.ambient_dim)
            .field("embed_dim", &self.embed_dim)
            .field("epsilon", &self.epsilon)
            .field("curvature_c", &self.curvature_c)
            .finish()
    }
}

/// Training points inside the ε-ball of a query, nearest first.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhood {
    pub query: Vec<f64>,
    pub indices: Vec<usize>,
    pub distances: Vec<f64>,
    /// Radius the neighborhood was built with.
    pub epsilon: f64,
}

impl Neighborhood {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Images of the members, in neighborhood order.
    pub fn images<'m>(&self, model: &'m TrainingModel) -> Vec<&'m [f64]> {
        self.indices.iter().map(|&j| model.image(j)).collect()
    }
}

/// Training points within `epsilon` of `x`, sorted by distance then index.
pub fn find_neighbors(x: &[f64], model: &TrainingModel, epsilon: f64) -> Result<Neighborhood> {
    if x.len() != model.ambient_dim() {
        return Err(Error::InvalidInput(format!(
            "query has dimension {}, model expects {}",
            x.len(),
            model.ambient_dim()
        )));
    }
    if !(epsilon > 0.0) {
        return Err(Error::OutOfRange(format!("epsilon must be positive, got {epsilon}")));
    }
    let mut hits = model.index().within_radius(x, epsilon);
    if hits.is_empty() {
        return Err(Error::EmptyNeighborhood { epsilon });
    }
    sort_hits(&mut hits);
    Ok(Neighborhood {
        query: x.to_vec(),
        indices: hits.iter().map(|h| h.index).collect(),
        distances: hits.iter().map(|h| h.distance).collect(),
        epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::distance;

    fn line_model() -> TrainingModel {
        TrainingModel::new(1, 1, vec![0.0, 1.0, 2.0], vec![0.0, 10.0, 20.0], 1.0, 1.0).unwrap()
    }

    #[test]
    fn ball_on_a_line() {
        let nb = find_neighbors(&[0.9], &line_model(), 1.0).unwrap();
        assert_eq!(nb.indices, vec![1, 0]);
        assert!((nb.distances[0] - 0.1).abs() < 1e-15);
        assert!((nb.distances[1] - 0.9).abs() < 1e-15);
    }

    #[test]
    fn training_point_is_its_own_neighbor() {
        let m = line_model();
        let nb = find_neighbors(m.point(2), &m, 0.01).unwrap();
        assert_eq!(nb.indices, vec![2]);
        assert_eq!(nb.distances, vec![0.0]);
    }

    #[test]
    fn empty_ball_is_an_error() {
        let err = find_neighbors(&[10.0], &line_model(), 1.0).unwrap_err();
        assert!(matches!(err, Error::EmptyNeighborhood { .. }));
    }

    #[test]
    fn ties_break_by_index() {
        let m = TrainingModel::new(1, 1, vec![1.0, -1.0, 1.0], vec![0.0; 3], 1.0, 1.0).unwrap();
        let nb = find_neighbors(&[0.0], &m, 1.0).unwrap();
        assert_eq!(nb.indices, vec![0, 1, 2]);
    }

    #[test]
    fn sphere_grid_matches_scan() {
        let data = crate::bench::make_sphere_dataset(30, 20, 5).unwrap();
        let model = data.model(2.5 * data.grid_spacing(), 1.0).unwrap();
        let eps = 2.5 * data.grid_spacing();
        for q in &data.query_params {
            let nb = find_neighbors(q, &model, eps).unwrap();
            assert!(nb.len() >= 3);
            let mut scan: Vec<(f64, usize)> = (0..model.len())
                .map(|j| (distance(q, model.point(j)), j))
                .filter(|(d, _)| *d <= eps)
                .collect();
            scan.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            assert_eq!(nb.indices, scan.iter().map(|s| s.1).collect::<Vec<_>>());
        }
    }

    #[test]
    fn validation_rejects_bad_models() {
        assert!(TrainingModel::new(1, 1, vec![0.0, 1.0], vec![0.0], 1.0, 1.0).is_err());
        assert!(TrainingModel::new(1, 1, vec![0.0], vec![0.0], 0.0, 1.0).is_err());
        assert!(TrainingModel::new(1, 1, vec![0.0], vec![0.0], 1.0, -1.0).is_err());
        assert!(TrainingModel::new(1, 1, vec![f64::NAN], vec![0.0], 1.0, 1.0).is_err());
        assert!(TrainingModel::new(2, 1, vec![0.0], vec![0.0], 1.0, 1.0).is_err());
    }
}
