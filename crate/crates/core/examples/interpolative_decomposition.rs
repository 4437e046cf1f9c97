//! Compress a Gaussian kernel matrix with a randomized interpolative
//! decomposition and compare the error with the next singular value.

use pbe::baselines::{build_gaussian_kernel, randomized_id, GaussianKernelConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> pbe::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let points: Vec<Vec<f64>> = (0..300)
        .map(|_| vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)])
        .collect();
    let kernel = build_gaussian_kernel(&points, &GaussianKernelConfig::new(0.1)?);
    let mut sv: Vec<f64> = kernel.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));

    for l in [5, 10, 20, 40] {
        let id = randomized_id(&kernel, l, &mut rng)?;
        let err = (&kernel - id.reconstruction()).singular_values().max();
        println!(
            "rank {l:>2}: error {err:.3e}, σ_(l+1) {:.3e}, first columns {:?}",
            sv[l],
            &id.indices[..5]
        );
    }
    Ok(())
}
