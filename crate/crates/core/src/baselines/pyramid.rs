//! Laplacian pyramids: repeated Gaussian smoothing of the residual with the
//! kernel width halved at every level.

use nalgebra::DVector;
use rayon::prelude::*;

use super::kernel::point_dim;
use crate::error::{Error, Result};
use crate::index::squared_distance;

pub const MAX_LEVELS: usize = 15;

#[derive(Debug, Clone, PartialEq)]
pub struct PyramidLevel {
    pub level: usize,
    /// `σ₀ / 2^level`.
    pub sigma: f64,
    /// Input of this level: `f` at level 0, else `f − Σ_{i<level} s_i`.
    pub residual: DVector<f64>,
    /// Smoothed residual `s_level` at the training points.
    pub approximation: DVector<f64>,
}

/// `Σ_i k(y, x_i) v_i` with weights `exp(−‖y − x_i‖²/σ)` normalized to sum
/// to 1 at `y`. Distances are shifted by their minimum so the weights never
/// all underflow.
fn smooth_at(y: &[f64], points: &[Vec<f64>], values: &DVector<f64>, sigma: f64) -> f64 {
    let d2: Vec<f64> = points.iter().map(|p| squared_distance(y, p)).collect();
    let shift = d2.iter().copied().fold(f64::INFINITY, f64::min);
    let (mut num, mut den) = (0.0, 0.0);
    for (d, v) in d2.iter().zip(values.iter()) {
        let w = (-(d - shift) / sigma).exp();
        num += w * v;
        den += w;
    }
    num / den
}

fn smooth_all(points: &[Vec<f64>], values: &DVector<f64>, sigma: f64) -> DVector<f64> {
    let out: Vec<f64> = points
        .par_iter()
        .map(|x| smooth_at(x, points, values, sigma))
        .collect();
    DVector::from_vec(out)
}

/// Fits levels until `‖f − Σ s_l‖ < err`. A level that increases the
/// residual norm aborts the fit.
pub fn laplacian_pyramid_fit(
    points: &[Vec<f64>],
    f: &DVector<f64>,
    sigma0: f64,
    err: f64,
) -> Result<Vec<PyramidLevel>> {
    point_dim(points)?;
    if f.len() != points.len() {
        return Err(Error::InvalidInput("function length differs from point count".into()));
    }
    if !(sigma0 > 0.0 && sigma0.is_finite()) || !(err >= 0.0) {
        return Err(Error::OutOfRange(format!(
            "need sigma0 > 0 and err ≥ 0, got sigma0={sigma0}, err={err}"
        )));
    }
    let done = |r: f64| r < err || r == 0.0;
    let mut levels: Vec<PyramidLevel> = Vec::new();
    let mut residual = f.clone();
    let mut norm = residual.norm();
    for level in 0..MAX_LEVELS {
        if done(norm) {
            return Ok(levels);
        }
        let sigma = sigma0 / 2f64.powi(level as i32);
        let approximation = smooth_all(points, &residual, sigma);
        let next = &residual - &approximation;
        let next_norm = next.norm();
        let level_input = std::mem::replace(&mut residual, next);
        levels.push(PyramidLevel {
            level,
            sigma,
            residual: level_input,
            approximation,
        });
        if level > 0 && next_norm > norm {
            return Err(Error::NoConvergence {
                iterations: levels.len(),
                residual: next_norm,
                target: err,
            });
        }
        norm = next_norm;
    }
    if done(norm) {
        Ok(levels)
    } else {
        Err(Error::NoConvergence {
            iterations: levels.len(),
            residual: norm,
            target: err,
        })
    }
}

/// `Σ_l s_l(y)`, with `s_0` smoothing `f` and later levels their residuals.
pub fn laplacian_pyramid_extend(
    levels: &[PyramidLevel],
    points: &[Vec<f64>],
    f: &DVector<f64>,
    y: &[f64],
) -> f64 {
    levels
        .iter()
        .map(|l| {
            let values = if l.level == 0 { f } else { &l.residual };
            smooth_at(y, points, values, l.sigma)
        })
        .sum()
}
