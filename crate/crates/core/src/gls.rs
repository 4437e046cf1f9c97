//! Closed-form generalized least squares for the stacked neighbor system
//! `J ψ̂ = Ψ + Ω` with block-diagonal precision.
//!
//! With `J = [I_d; …; I_d]` and precision blocks `P_j`, the normal equations
//! collapse to `(Σ P_j) ψ̂ = Σ P_j ψ(x_j)`, a single d×d SPD solve.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::weights::PrecisionBlock;

fn check_inputs(blocks: &[PrecisionBlock], images: &[&[f64]]) -> Result<usize> {
    if blocks.is_empty() {
        return Err(Error::InvalidInput("no neighbor equations".into()));
    }
    if blocks.len() != images.len() {
        return Err(Error::InvalidInput(format!(
            "{} precision blocks for {} images",
            blocks.len(),
            images.len()
        )));
    }
    let d = blocks[0].dim();
    if blocks.iter().any(|b| b.dim() != d) || images.iter().any(|y| y.len() != d) {
        return Err(Error::InvalidInput("inconsistent embedding dimension".into()));
    }
    Ok(d)
}

/// `ψ̂ = (Σ P_j)⁻¹ Σ P_j ψ(x_j)`.
///
/// Solved as an offset from the image with the heaviest block, so that a
/// dominant near-singular weight does not swamp the result with roundoff.
pub fn gls_extend(blocks: &[PrecisionBlock], images: &[&[f64]]) -> Result<DVector<f64>> {
    let d = check_inputs(blocks, images)?;
    let anchor = blocks
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.matrix().trace().total_cmp(&b.1.matrix().trace()))
        .map(|(j, _)| DVector::from_column_slice(images[j]))
        .expect("non-empty");
    let mut lhs = DMatrix::<f64>::zeros(d, d);
    let mut rhs = DVector::<f64>::zeros(d);
    for (block, y) in blocks.iter().zip(images) {
        let p = block.matrix();
        lhs += p;
        rhs.gemv(1.0, p, &(DVector::from_column_slice(y) - &anchor), 1.0);
    }
    let lhs = (&lhs + lhs.transpose()) * 0.5;
    let chol = lhs.cholesky().ok_or(Error::SingularSystem)?;
    let sol = chol.solve(&rhs) + anchor;
    if sol.iter().all(|v| v.is_finite()) {
        Ok(sol)
    } else {
        Err(Error::SingularSystem)
    }
}

/// `Σ_j (ŷ − ψ(x_j))ᵀ P_j (ŷ − ψ(x_j))`.
pub fn squared_mahalanobis(
    y_hat: &DVector<f64>,
    blocks: &[PrecisionBlock],
    images: &[&[f64]],
) -> Result<f64> {
    let d = check_inputs(blocks, images)?;
    if y_hat.len() != d {
        return Err(Error::InvalidInput("estimate has the wrong dimension".into()));
    }
    let total: f64 = blocks
        .iter()
        .zip(images)
        .map(|(block, y)| {
            let r = y_hat - DVector::from_column_slice(y);
            (r.transpose() * block.matrix() * &r)[(0, 0)]
        })
        .sum();
    // Quadratic forms of SPD blocks; clamp roundoff below zero.
    Ok(total.max(0.0))
}

/// Abnormality score `m(x) = ‖J ψ̂ − Ψ‖_W`.
pub fn mahalanobis_score(
    y_hat: &DVector<f64>,
    blocks: &[PrecisionBlock],
    images: &[&[f64]],
) -> Result<f64> {
    squared_mahalanobis(y_hat, blocks, images).map(f64::sqrt)
}
