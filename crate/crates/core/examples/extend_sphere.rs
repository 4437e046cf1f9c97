//! Extend a sampled sphere map to random queries and report the error.

use pbe::bench::{make_sphere_dataset, BENCH_CURVATURE_C};
use pbe::index::distance;
use pbe::{extend_batch, SchemeKind, WeightScheme};

fn main() -> pbe::Result<()> {
    let data = make_sphere_dataset(30, 100, 0)?;
    let model = data.model(data.default_epsilon(), BENCH_CURVATURE_C)?;
    let scheme = WeightScheme::for_model(SchemeKind::PerPointTangent, &model);
    println!(
        "model: {} points, epsilon {:.4}, curvature bound {}",
        model.len(),
        model.epsilon(),
        model.curvature_c()
    );

    let results = extend_batch(&data.query_params, &model, &scheme);
    let count = results.len();
    let mut total = 0.0;
    for (i, (r, truth)) in results.into_iter().zip(&data.query_images).enumerate() {
        let r = r?;
        let err = distance(&r.embedding, truth);
        total += err;
        if i < 5 {
            println!(
                "query {i}: ({:.3}, {:.3}) -> [{:.4}, {:.4}, {:.4}] error {err:.2e}, {} neighbors, score {:.3}",
                data.query_params[i][0],
                data.query_params[i][1],
                r.embedding[0],
                r.embedding[1],
                r.embedding[2],
                r.neighbor_count,
                r.score
            );
        }
    }
    println!("mean error over {count} queries: {:.3e}", total / count as f64);
    Ok(())
}
