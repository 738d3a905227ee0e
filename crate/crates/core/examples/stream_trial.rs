//! One simulated stream under each policy. All policies see the same
//! arrivals, initial states and transition draws.
//!
//! cargo run --release --example stream_trial

use streaming_rmab::index::ConvergedFiniteHorizon;
use streaming_rmab::sim::{run_trial, TableCache};
use streaming_rmab::{ArrivalKind, ArrivalProcess, CohortSpec, Generator, LifetimeModel, Policy, SimulationConfig};

fn main() -> streaming_rmab::Result<()> {
    let cohort = CohortSpec { size: 20, generator: Generator::UniformConstrained, seed: 9, lifetime: 5 }.generate()?;
    let config = SimulationConfig {
        horizon: 40,
        budget: 4,
        arrivals: ArrivalProcess { kind: ArrivalKind::Poisson { rate: 6.0 }, lifetime: LifetimeModel::Fixed(5) },
        p_start: 0.0,
        beta: 1.0,
        index_tol: 1e-6,
        seed: 9,
    };
    let tables = TableCache::build(&cohort, 5, &ConvergedFiniteHorizon::default());
    println!("index tables built in {:?}", tables.precompute);
    for policy in Policy::ALL {
        let r = run_trial(&config, &cohort, &tables, policy, 0)?;
        println!(
            "{:<18} total reward {:>4}  mean N(t) {:.1}  planning {:>7.1} us/step",
            policy.name(),
            r.total,
            r.mean_population(),
            r.mean_planning_ns() / 1e3
        );
    }
    Ok(())
}
