//! Synthetic benchmarks: the sphere experiment, an anomaly scenario and a
//! side-by-side comparison with the reference extension methods.

mod anomaly;
mod compare;
mod sphere;

pub use anomaly::{
    anomaly_scenario_data, run_anomaly_scenario, AnomalyScenario, ANOMALY_GRID, ANOMALY_SCHEME,
};
pub use compare::{
    run_comparison, CompareConfig, CompareRow, Comparison, Method, MethodFailure,
};
pub use sphere::{
    make_sphere_dataset, run_sphere_bench, sphere_map, BenchConfig, BenchReport, SphereBench,
    SphereDataset, BENCH_CURVATURE_C, DEFAULT_EPSILON_SPACINGS, POLE_MARGIN, PROBE_REFINEMENT,
};
