//! Score on-manifold and displaced queries and flag those above a threshold.

use pbe::bench::{anomaly_scenario_data, ANOMALY_SCHEME};

fn summary(mut v: Vec<f64>) -> (f64, f64, f64) {
    v.sort_by(f64::total_cmp);
    (v[0], v[v.len() / 2], v[v.len() - 1])
}

fn main() -> pbe::Result<()> {
    for displacement in [0.0, 0.1, 0.5] {
        let scenario = anomaly_scenario_data(50, 5, displacement, 0)?;
        let scored = scenario.score(ANOMALY_SCHEME);
        let inl = summary(scored.iter().filter(|s| !s.1).map(|s| s.0).collect());
        let out = summary(scored.iter().filter(|s| s.1).map(|s| s.0).collect());
        let threshold = 10.0 * inl.1;
        let flagged = scored.iter().filter(|s| s.0 > threshold).count();
        println!("displacement {displacement}:");
        println!("  inliers  min {:.3} median {:.3} max {:.3}", inl.0, inl.1, inl.2);
        println!("  outliers min {:.3} median {:.3} max {:.3}", out.0, out.1, out.2);
        println!("  threshold {threshold:.3} flags {flagged} of {}", scored.len());
    }
    Ok(())
}
