//! PCA-based out-of-sample extension for nonlinear dimensionality-reduction
//! maps.
//!
//! Given training points `x_j` and their embeddings `ψ(x_j)`, a new point is
//! embedded by a weighted least-squares fit over its ε-neighbors, where each
//! neighbor's weight reflects its distance and the local tangent geometry of
//! the embedded manifold. The fit residual is a Mahalanobis abnormality score.
//!
//! ```
//! use pbe::{extend, SchemeKind, TrainingModel, WeightScheme};
//!
//! let points = vec![vec![0.0], vec![1.0], vec![2.0]];
//! let images = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 4.0]];
//! let model = TrainingModel::from_rows(&points, &images, 1.5, 1.0).unwrap();
//! let scheme = WeightScheme::for_model(SchemeKind::Distance, &model);
//! let out = extend(&[0.5], &model, &scheme).unwrap();
//! assert!((out.embedding[0] - 0.5).abs() < 0.2);
//! ```

pub mod baselines;
pub mod bench;
pub mod cli;
pub mod error;
pub mod extend;
pub mod gls;
pub mod index;
pub mod io;
pub mod model;
pub mod weights;

pub use error::{Error, Result};
pub use extend::{extend, extend_batch, extend_in, ExtensionResult};
pub use gls::{gls_extend, mahalanobis_score, squared_mahalanobis};
pub use index::{build_index, covering_radius, SpatialIndex};
pub use model::{find_neighbors, Neighborhood, TrainingModel};
pub use weights::{
    distance_precisions, local_covariance, precisions, tangent_precisions, PrecisionBlock,
    SchemeKind, WeightScheme,
};
