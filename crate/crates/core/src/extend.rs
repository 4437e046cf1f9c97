//! PCA-based out-of-sample extension of a single query point.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gls::{gls_extend, squared_mahalanobis};
use crate::model::{find_neighbors, Neighborhood, TrainingModel};
use crate::weights::{precisions, WeightScheme};

/// How many times the radius is doubled when the ball holds fewer than
/// `embed_dim` training points.
pub const MAX_RADIUS_DOUBLINGS: usize = 4;

/// Extension of one query.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionResult {
    /// `ψ̂(x)`.
    pub embedding: Vec<f64>,
    /// Mahalanobis abnormality score `m(x)`.
    pub score: f64,
    /// `m(x)²`, kept for comparisons against squared residual magnitudes.
    pub squared_score: f64,
    pub neighbor_count: usize,
    pub epsilon_used: f64,
}

/// Extends the training map to `x`.
///
/// A query that coincides with a training point returns that point's image
/// with score 0. Otherwise the ε-ball is widened by doubling (at most
/// [`MAX_RADIUS_DOUBLINGS`] times) until it holds `embed_dim` points; with
/// fewer but at least one point the extension still proceeds and
/// `epsilon_used` records the final radius.
pub fn extend(x: &[f64], model: &TrainingModel, scheme: &WeightScheme) -> Result<ExtensionResult> {
    if x.len() != model.ambient_dim() {
        return Err(Error::InvalidInput(format!(
            "query has dimension {}, model expects {}",
            x.len(),
            model.ambient_dim()
        )));
    }
    if let Some(hit) = model.index().nearest(x, 1).first() {
        if hit.distance == 0.0 {
            return Ok(ExtensionResult {
                embedding: model.image(hit.index).to_vec(),
                score: 0.0,
                squared_score: 0.0,
                neighbor_count: 1,
                epsilon_used: model.epsilon(),
            });
        }
    }
    let nb = grow_neighborhood(x, model)?;
    extend_in(&nb, model, scheme)
}

/// Runs the weighting, GLS and scoring steps on a given neighborhood.
pub fn extend_in(
    nb: &Neighborhood,
    model: &TrainingModel,
    scheme: &WeightScheme,
) -> Result<ExtensionResult> {
    let blocks = precisions(nb, model, scheme)?;
    let images = nb.images(model);
    let y = gls_extend(&blocks, &images)?;
    let squared_score = squared_mahalanobis(&y, &blocks, &images)?;
    Ok(ExtensionResult {
        embedding: y.as_slice().to_vec(),
        score: squared_score.sqrt(),
        squared_score,
        neighbor_count: nb.len(),
        epsilon_used: nb.epsilon,
    })
}

fn grow_neighborhood(x: &[f64], model: &TrainingModel) -> Result<Neighborhood> {
    let mut eps = model.epsilon();
    let mut best = None;
    for attempt in 0..=MAX_RADIUS_DOUBLINGS {
        if attempt > 0 {
            eps *= 2.0;
        }
        match find_neighbors(x, model, eps) {
            Ok(nb) if nb.len() >= model.embed_dim() => return Ok(nb),
            Ok(nb) => best = Some(nb),
            Err(Error::EmptyNeighborhood { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    best.ok_or(Error::EmptyNeighborhood { epsilon: eps })
}

/// Extends every query in parallel; results keep the input order.
pub fn extend_batch(
    queries: &[Vec<f64>],
    model: &TrainingModel,
    scheme: &WeightScheme,
) -> Vec<Result<ExtensionResult>> {
    queries
        .par_iter()
        .map(|q| extend(q, model, scheme))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::SchemeKind;

    fn plane_model() -> TrainingModel {
        // 5×5 grid in the plane, mapped by (u, v) ↦ (u, v, u·v).
        let mut pts = Vec::new();
        let mut imgs = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                let (u, v) = (i as f64 * 0.25, j as f64 * 0.25);
                pts.push(vec![u, v]);
                imgs.push(vec![u, v, u * v]);
            }
        }
        TrainingModel::from_rows(&pts, &imgs, 0.3, 1.0).unwrap()
    }

    #[test]
    fn training_points_are_reproduced_exactly() {
        let m = plane_model();
        for kind in SchemeKind::ALL {
            let s = WeightScheme::for_model(kind, &m);
            for j in 0..m.len() {
                let r = extend(m.point(j), &m, &s).unwrap();
                assert_eq!(r.embedding, m.image(j));
                assert_eq!(r.score, 0.0);
            }
        }
    }

    #[test]
    fn radius_doubles_for_sparse_queries() {
        let m = plane_model();
        let r = extend(&[2.0, 2.0], &m, &WeightScheme::distance()).unwrap();
        assert!(r.epsilon_used > m.epsilon());
        assert!(r.neighbor_count >= 1);
    }

    #[test]
    fn far_query_has_empty_neighborhood() {
        let m = plane_model();
        let err = extend(&[100.0, 0.0], &m, &WeightScheme::distance()).unwrap_err();
        assert!(matches!(err, Error::EmptyNeighborhood { .. }));
    }

    #[test]
    fn approaching_a_training_point_converges() {
        let m = plane_model();
        let j = 12;
        let dir = [0.6, 0.8];
        for kind in SchemeKind::ALL {
            let s = WeightScheme::for_model(kind, &m);
            let mut last = f64::INFINITY;
            for e in 1..=6 {
                let t = 10f64.powi(-e);
                let x = [m.point(j)[0] + t * dir[0], m.point(j)[1] + t * dir[1]];
                let r = extend(&x, &m, &s).unwrap();
                let err = crate::index::distance(&r.embedding, m.image(j));
                assert!(err <= last + 1e-15, "{kind}: {err} at {t} after {last}");
                assert!(err <= 2.0 * t, "{kind}: error {err} at offset {t}");
                last = err;
            }
            assert!(last <= 1e-5, "{kind}: final error {last}");
        }
    }

    #[test]
    fn batch_preserves_order() {
        let m = plane_model();
        let qs = vec![vec![0.1, 0.1], vec![0.6, 0.4], vec![100.0, 0.0], vec![0.9, 0.9]];
        let s = WeightScheme::for_model(SchemeKind::SharedTangent, &m);
        let out = extend_batch(&qs, &m, &s);
        assert!(out[2].is_err());
        for (q, r) in qs.iter().zip(&out) {
            if let Ok(r) = r {
                assert_eq!(r, &extend(q, &m, &s).unwrap());
            }
        }
    }
}
