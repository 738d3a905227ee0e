//! Benefit as arm lifetime varies with the expected population held fixed.
//!
//! cargo run --release --example lifetime_sweep

use streaming_rmab::experiment::{run_sweep, CohortConfig, ExperimentConfig, SweepConfig, SweepVariable};
use streaming_rmab::Policy;

fn main() -> streaming_rmab::Result<()> {
    let config = ExperimentConfig {
        trials: 8,
        policies: vec![Policy::ThresholdWhittle, Policy::Linear, Policy::Logistic],
        cohort: CohortConfig { size: 20, ..Default::default() },
        sweep: Some(SweepConfig { variable: SweepVariable::Lifetime, values: vec![3.0, 5.0, 10.0], product: Some(60.0) }),
        ..Default::default()
    };
    let out = run_sweep(&config)?;
    out.write_summary_csv(SweepVariable::Lifetime, std::io::stdout().lock())
}
