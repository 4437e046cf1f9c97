//! Randomized interpolative decomposition `A ≈ B P` where `B` holds `l`
//! columns of `A`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Fresh sketches drawn after a rank-deficient one.
pub const MAX_SKETCH_RETRIES: usize = 3;
/// Pivots below this fraction of the first are treated as zero.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct InterpolativeDecomposition {
    /// The selected columns of `A`, m×l.
    pub basis: DMatrix<f64>,
    /// Column indices of `A` forming `basis`, in pivot order.
    pub indices: Vec<usize>,
    /// l×n interpolation matrix with `basis · interpolation ≈ A`.
    pub interpolation: DMatrix<f64>,
}

impl InterpolativeDecomposition {
    pub fn reconstruction(&self) -> DMatrix<f64> {
        &self.basis * &self.interpolation
    }
}

/// Rank-`l` interpolative decomposition from a Gaussian sketch `W = G A`
/// and column-pivoted QR of `W`.
pub fn randomized_id<R: Rng + ?Sized>(
    a: &DMatrix<f64>,
    l: usize,
    rng: &mut R,
) -> Result<InterpolativeDecomposition> {
    let (m, n) = a.shape();
    if l == 0 || l >= m.min(n) {
        return Err(Error::OutOfRange(format!(
            "rank {l} must be in 1..{} for a {m}×{n} matrix",
            m.min(n)
        )));
    }
    let mut found = 0;
    for _ in 0..=MAX_SKETCH_RETRIES {
        let g = DMatrix::<f64>::from_fn(l, m, |_, _| rng.sample(StandardNormal));
        match decompose_sketch(a, &(g * a), l) {
            Ok(id) => return Ok(id),
            Err(k) => found = found.max(k),
        }
    }
    Err(Error::RankDeficientSketch { found, wanted: l })
}

/// `Err(k)` reports the number of independent pivots found.
fn decompose_sketch(
    a: &DMatrix<f64>,
    w: &DMatrix<f64>,
    l: usize,
) -> std::result::Result<InterpolativeDecomposition, usize> {
    let n = w.ncols();
    let qr = w.clone().col_piv_qr();
    let mut order = DMatrix::from_fn(1, n, |_, c| c as f64);
    qr.p().permute_columns(&mut order);
    let order: Vec<usize> = order.iter().map(|&v| v as usize).collect();
    let r = qr.r();

    let lead = r[(0, 0)].abs();
    let independent = (0..l)
        .take_while(|&i| lead > 0.0 && r[(i, i)].abs() > PIVOT_TOLERANCE * lead)
        .count();
    if independent < l {
        return Err(independent);
    }

    let r11 = r.view((0, 0), (l, l)).into_owned();
    let r12 = r.view((0, l), (l, n - l)).into_owned();
    let t = r11.solve_upper_triangular(&r12).ok_or(independent)?;
    let mut interpolation = DMatrix::zeros(l, n);
    for (k, &col) in order.iter().enumerate() {
        if k < l {
            interpolation[(k, col)] = 1.0;
        } else {
            interpolation.set_column(col, &t.column(k - l));
        }
    }
    let indices = order[..l].to_vec();
    Ok(InterpolativeDecomposition {
        basis: a.select_columns(&indices),
        indices,
        interpolation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spectral_norm(m: &DMatrix<f64>) -> f64 {
        m.singular_values().max()
    }

    /// Random orthogonal-ish factors with prescribed singular values.
    fn with_spectrum(n: usize, sigma: impl Fn(usize) -> f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let u = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal)).qr().q();
        let v = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal)).qr().q();
        let s = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |i, _| sigma(i)));
        u * s * v.transpose()
    }

    #[test]
    fn rank_one_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let u = DMatrix::from_fn(6, 1, |i, _| i as f64 + 1.0);
        let v = DMatrix::from_fn(1, 5, |_, j| (j as f64).cos());
        let a = &u * &v;
        let id = randomized_id(&a, 1, &mut rng).unwrap();
        assert!(spectral_norm(&(&a - id.reconstruction())) <= 1e-10);
        assert_eq!(id.basis.column(0), a.column(id.indices[0]));
    }

    #[test]
    fn identity_error_is_at_the_floor() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = DMatrix::<f64>::identity(5, 5);
        let id = randomized_id(&a, 4, &mut rng).unwrap();
        let err = spectral_norm(&(&a - id.reconstruction()));
        assert!((1.0 - 1e-12..=10.0).contains(&err), "{err}");
        assert!(randomized_id(&a, 5, &mut rng).is_err());
    }

    #[test]
    fn geometric_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = with_spectrum(50, |i| 2f64.powi(-(i as i32 + 1)), &mut rng);
        let sigma11 = {
            let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
            s.sort_by(|x, y| y.total_cmp(x));
            s[10]
        };
        let id = randomized_id(&a, 10, &mut rng).unwrap();
        let err = spectral_norm(&(&a - id.reconstruction()));
        assert!(err <= 500.0 * sigma11, "{err} vs {sigma11}");
    }

    #[test]
    fn zero_matrix_exhausts_retries() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let err = randomized_id(&DMatrix::zeros(4, 4), 2, &mut rng).unwrap_err();
        assert!(matches!(err, Error::RankDeficientSketch { found: 0, wanted: 2 }));
    }
}
