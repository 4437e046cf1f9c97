#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use pbe::PrecisionBlock;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_chacha::ChaCha8Rng;

/// A random neighbor system: SPD precision blocks and images.
pub struct Instance {
    pub blocks: Vec<PrecisionBlock>,
    pub images: Vec<Vec<f64>>,
}

impl Instance {
    pub fn image_refs(&self) -> Vec<&[f64]> {
        self.images.iter().map(Vec::as_slice).collect()
    }
}

pub fn random_spd(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::<f64>::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    let scale = 10f64.powf(rng.random_range(-2.0..2.0));
    (&m * m.transpose() + DMatrix::identity(d, d) * 0.1) * scale
}

pub fn random_instance(k: usize, d: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Instance {
        blocks: (0..k)
            .map(|_| PrecisionBlock::new(random_spd(d, &mut rng)).unwrap())
            .collect(),
        images: (0..k)
            .map(|_| (0..d).map(|_| rng.random_range(-5.0..5.0)).collect())
            .collect(),
    }
}

/// Weighted least squares on the explicitly stacked kd×d system, whitened
/// by the Cholesky factors of the blocks and solved by SVD. Returns the
/// estimate and the weighted residual norm.
pub fn stacked_oracle(inst: &Instance) -> (DVector<f64>, f64) {
    let k = inst.blocks.len();
    let d = inst.blocks[0].dim();
    let mut a = DMatrix::<f64>::zeros(k * d, d);
    let mut b = DVector::<f64>::zeros(k * d);
    for (j, (block, y)) in inst.blocks.iter().zip(&inst.images).enumerate() {
        // P = L Lᵀ, so ‖r‖²_P = ‖Lᵀ r‖².
        let lt = block.matrix().clone().cholesky().unwrap().l().transpose();
        a.view_mut((j * d, 0), (d, d)).copy_from(&lt);
        b.rows_mut(j * d, d).copy_from(&(&lt * DVector::from_column_slice(y)));
    }
    let sol = a.clone().svd(true, true).solve(&b, 0.0).unwrap();
    let resid = (&a * &sol - b).norm();
    (sol, resid)
}

pub fn rel_err(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Low-rank-plus-noise, dense Gaussian and geometric-spectrum matrices.
pub fn random_test_matrix(trial: usize, m: usize, n: usize, l: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let mut gauss = |r, c| DMatrix::<f64>::from_fn(r, c, |_, _| rng.sample(StandardNormal));
    match trial % 3 {
        0 => gauss(m, l) * gauss(l, n) + gauss(m, n) * 1e-6,
        1 => gauss(m, n),
        _ => {
            let u = gauss(m, m).qr().q();
            let v = gauss(n, n).qr().q();
            let s = DMatrix::from_fn(m, n, |i, j| if i == j { 0.5f64.powi(i as i32) } else { 0.0 });
            u * s * v.transpose()
        }
    }
}
