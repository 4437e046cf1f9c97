//! Save a model, reload it, and write extension results as CSV.

use pbe::bench::{make_sphere_dataset, BENCH_CURVATURE_C};
use pbe::io::{load_model, save_model, write_results};
use pbe::{extend_batch, SchemeKind, WeightScheme};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("pbe-model-persistence");
    std::fs::create_dir_all(&dir)?;
    let data = make_sphere_dataset(20, 10, 0)?;
    let model = data.model(data.default_epsilon(), BENCH_CURVATURE_C)?;

    let path = dir.join("model.json");
    save_model(&model, &path)?;
    let back = load_model(&path)?;
    println!(
        "saved {} points to {}; reload identical: {}",
        model.len(),
        path.display(),
        back.points() == model.points() && back.images() == model.images()
    );

    let scheme = WeightScheme::for_model(SchemeKind::PerPointTangent, &back);
    let results: Vec<_> = extend_batch(&data.query_params, &back, &scheme)
        .into_iter()
        .collect::<pbe::Result<_>>()?;
    let out = dir.join("results.csv");
    write_results(&results, &out)?;
    let text = std::fs::read_to_string(&out)?;
    for line in text.lines().take(3) {
        println!("{line}");
    }
    Ok(())
}
