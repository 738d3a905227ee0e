//! Per-step planning time of the exact baseline against the table-based
//! policies as the arrival rate grows.
//!
//! cargo run --release --example planning_benchmark

use streaming_rmab::index::ConvergedFiniteHorizon;
use streaming_rmab::sim::{benchmark, TableCache};
use streaming_rmab::{ArrivalKind, ArrivalProcess, CohortSpec, Generator, LifetimeModel, Policy, SimulationConfig};

fn main() -> streaming_rmab::Result<()> {
    let lifetime = 5;
    let cohort = CohortSpec { size: 30, generator: Generator::UniformConstrained, seed: 2, lifetime }.generate()?;
    let tables = TableCache::build(&cohort, lifetime, &ConvergedFiniteHorizon::default());
    println!("table precompute: {:?}", tables.precompute);
    for rate in [5, 10, 20] {
        let config = SimulationConfig {
            horizon: 20,
            budget: rate * lifetime / 10,
            arrivals: ArrivalProcess { kind: ArrivalKind::Deterministic { rate }, lifetime: LifetimeModel::Fixed(lifetime) },
            p_start: 0.0,
            beta: 1.0,
            index_tol: 1e-6,
            seed: 2,
        };
        let report = benchmark(&config, &cohort, &tables, &[Policy::Exact, Policy::Linear, Policy::Logistic], 3)?;
        for t in &report.timings {
            println!(
                "rate {rate:>2} {:<9} mean {:>8.1} us  p90 {:>8.1} us  speedup {:>5.1}x",
                t.policy.name(),
                t.mean_ns / 1e3,
                t.p90_ns / 1e3,
                t.speedup_vs_exact.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
