//! Multi-trial experiment with benefits normalized so that the exact
//! finite-horizon policy scores 100 and doing nothing scores 0.
//!
//! cargo run --release --example benefit_experiment

use streaming_rmab::experiment::{run_experiment, ArrivalName, CohortConfig, ExperimentConfig};

fn main() -> streaming_rmab::Result<()> {
    let config = ExperimentConfig {
        seed: 1,
        trials: 10,
        horizon: 30,
        budget: 6,
        arrival: ArrivalName::Deterministic,
        rate: 20.0,
        lifetime: Some(3),
        cohort: CohortConfig { size: 30, ..Default::default() },
        ..Default::default()
    };
    let summary = run_experiment(&config)?.summary(false);
    println!("{:<18} {:>8} {:>6} {:>8}", "policy", "benefit", "se", "reward");
    for p in &summary.policies {
        println!("{:<18} {:>8.1} {:>6.1} {:>8.1}", p.policy.name(), p.mean_benefit, p.se_benefit, p.mean_reward);
    }
    Ok(())
}
