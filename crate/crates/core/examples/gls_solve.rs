//! Solve the weighted least-squares fit directly from precision blocks, and
//! build blocks from a neighborhood.

use nalgebra::DMatrix;
use pbe::{
    find_neighbors, gls_extend, mahalanobis_score, precisions, PrecisionBlock, SchemeKind,
    TrainingModel, WeightScheme,
};

fn main() -> pbe::Result<()> {
    // Two images with anisotropic confidence: the first is trusted along x,
    // the second along y.
    let blocks = vec![
        PrecisionBlock::new(DMatrix::from_row_slice(2, 2, &[100.0, 0.0, 0.0, 1.0]))?,
        PrecisionBlock::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 100.0]))?,
    ];
    let images: Vec<&[f64]> = vec![&[0.0, 0.0], &[1.0, 1.0]];
    let y = gls_extend(&blocks, &images)?;
    let m = mahalanobis_score(&y, &blocks, &images)?;
    println!("estimate [{:.4}, {:.4}], score {m:.4}", y[0], y[1]);

    // The same machinery on a model neighborhood.
    let points: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 * 0.1]).collect();
    let imgs: Vec<Vec<f64>> = points.iter().map(|p| vec![p[0].cos(), p[0].sin()]).collect();
    let model = TrainingModel::from_rows(&points, &imgs, 0.25, 1.0)?;
    let nb = find_neighbors(&[0.93], &model, model.epsilon())?;
    for kind in SchemeKind::ALL {
        let scheme = WeightScheme::for_model(kind, &model);
        let blocks = precisions(&nb, &model, &scheme)?;
        let images = nb.images(&model);
        let y = gls_extend(&blocks, &images)?;
        println!(
            "{:<18} {} neighbors -> [{:.5}, {:.5}] (true [{:.5}, {:.5}])",
            kind.label(),
            nb.len(),
            y[0],
            y[1],
            0.93f64.cos(),
            0.93f64.sin()
        );
    }
    Ok(())
}
