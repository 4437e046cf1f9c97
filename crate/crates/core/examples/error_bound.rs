//! Check every extension against the 3·K·δ bound, with the covering radius
//! δ and Lipschitz constant K measured on the data.

use pbe::bench::{BenchConfig, SphereBench};

fn main() -> pbe::Result<()> {
    let bench = SphereBench::new(BenchConfig::new(30, 200, 1))?;
    println!("covering radius δ = {:.4e}", bench.delta);
    println!("Lipschitz constant K = {:.4}", bench.lipschitz_k);
    println!("bound 3Kδ = {:.4e}", 3.0 * bench.lipschitz_k * bench.delta);
    for r in bench.run_all()? {
        println!(
            "{:<18} max error {:.3e} ({:.1}% of bound), {} violations",
            r.scheme.label(),
            r.max_error,
            100.0 * r.max_error / r.error_bound(),
            r.bound_violations
        );
    }
    Ok(())
}
