//! Extend a coordinate function of the sphere with the tangent-aware
//! extension, Nyström, MSE and Laplacian pyramids over growing training sets.

use pbe::bench::{make_sphere_dataset, run_comparison, CompareConfig, Method, BENCH_CURVATURE_C};

fn main() -> pbe::Result<()> {
    let data = make_sphere_dataset(30, 100, 0)?;
    let model = data.model(data.default_epsilon(), BENCH_CURVATURE_C)?;
    let f: Vec<f64> = data.images.iter().map(|y| y[2]).collect();
    let truth: Vec<f64> = data.query_images.iter().map(|y| y[2]).collect();
    let cfg = CompareConfig {
        sizes: vec![100, 400, 900],
        err: 1e-3,
        seed: 0,
        ..CompareConfig::default()
    };
    let cmp = run_comparison(&model, &f, &data.query_params, Some(&truth), &cfg)?;

    print!("{:<18}", "method");
    for s in cmp.sizes() {
        print!(" {s:>10}");
    }
    println!();
    for m in Method::ALL {
        print!("{:<18}", m.label());
        for s in cmp.sizes() {
            match cmp.mean_error(m, s) {
                Some(e) => print!(" {e:>10.3e}"),
                None => print!(" {:>10}", "failed"),
            }
        }
        println!();
    }
    for fl in &cmp.failures {
        println!("{} at {}: {}", fl.method, fl.training_size, fl.error);
    }
    Ok(())
}
