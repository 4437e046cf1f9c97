//! Reference extension methods: Nyström, multiscale extension (MSE) and
//! Laplacian pyramids, each extending a scalar function from the training
//! points to new points.

pub mod kernel;
pub mod mse;
pub mod nystrom;
pub mod pyramid;
pub mod rid;

pub use kernel::{
    build_gaussian_kernel, max_squared_distance, pairwise_squared_distances, GaussianKernelConfig,
};
pub use mse::{mse_extend, mse_fit, single_scale_extend, MseModel, MseOptions, MseScale};
pub use nystrom::{
    nystrom_extend_eigenfunction, nystrom_extend_function, EigenSystem, NystromExtender,
};
pub use pyramid::{laplacian_pyramid_extend, laplacian_pyramid_fit, PyramidLevel};
pub use rid::{randomized_id, InterpolativeDecomposition};
