//! Plugging a different infinite-horizon index into the table-based
//! policies. Here: a fixed long horizon instead of the convergence loop.
//!
//! cargo run --release --example custom_oracle

use streaming_rmab::index::{whittle_index_finite, ConvergedFiniteHorizon, InfiniteHorizonOracle};
use streaming_rmab::sim::{run_trial, TableCache};
use streaming_rmab::{
    ArrivalKind, ArrivalProcess, CohortSpec, Generator, LifetimeModel, Policy, SimulationConfig, TransitionKernel,
};

struct FixedHorizon {
    horizon: usize,
    beta: f64,
}

impl InfiniteHorizonOracle for FixedHorizon {
    fn index(&self, kernel: &TransitionKernel, b: f64) -> streaming_rmab::Result<f64> {
        whittle_index_finite(kernel, b, self.horizon, self.beta, 1e-6)
    }
}

fn main() -> streaming_rmab::Result<()> {
    let cohort = CohortSpec { size: 10, generator: Generator::UniformConstrained, seed: 4, lifetime: 4 }.generate()?;
    let config = SimulationConfig {
        horizon: 30,
        budget: 3,
        arrivals: ArrivalProcess { kind: ArrivalKind::Deterministic { rate: 5 }, lifetime: LifetimeModel::Fixed(4) },
        p_start: 0.0,
        beta: 1.0,
        index_tol: 1e-6,
        seed: 4,
    };
    let oracles: [(&str, &dyn InfiniteHorizonOracle); 2] = [
        ("converged", &ConvergedFiniteHorizon::default()),
        ("fixed h=32", &FixedHorizon { horizon: 32, beta: 0.99 }),
    ];
    for (name, oracle) in oracles {
        let tables = TableCache::build(&cohort, 4, oracle);
        let r = run_trial(&config, &cohort, &tables, Policy::Logistic, 0)?;
        println!("{name:<11} logistic reward {} (tables in {:?})", r.total, tables.precompute);
    }
    Ok(())
}
