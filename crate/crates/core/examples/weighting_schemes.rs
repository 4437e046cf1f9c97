//! Compare the distance, shared-tangent and per-point-tangent weightings on
//! two sphere grids.

use pbe::bench::{BenchConfig, SphereBench};

fn main() -> pbe::Result<()> {
    println!("{:<18} {:>6} {:>11} {:>11}", "scheme", "size", "mean_error", "max_error");
    for grid in [30, 50] {
        let bench = SphereBench::new(BenchConfig::new(grid, 100, 0))?;
        for r in bench.run_all()? {
            println!(
                "{:<18} {:>6} {:>11.3e} {:>11.3e}",
                r.scheme.label(),
                r.training_size,
                r.mean_error,
                r.max_error
            );
        }
    }
    Ok(())
}
