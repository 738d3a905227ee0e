//! Checking transition kernels against the natural constraints and reading
//! the belief chain they induce.
//!
//! cargo run --example kernel_validation

use streaming_rmab::arm::{BeliefChain, BeliefState};
use streaming_rmab::{Anchor, State, TransitionKernel};

fn main() -> streaming_rmab::Result<()> {
    let good = TransitionKernel::from_matrices([[0.94, 0.06], [0.54, 0.46]], [[0.54, 0.46], [0.40, 0.60]])?;
    println!("reference kernel: {:?}", good.validate()?);

    // Pulling lowers the chance of recovering, and the passive chain is anti-persistent.
    let bad = TransitionKernel::new(0.50, 0.46, 0.45, 0.60);
    let report = bad.validate()?;
    println!("bad kernel ok={} violations:", report.is_ok());
    for v in &report.violations {
        println!("  {v}");
    }
    if let Err(e) = bad.ensure_valid() {
        println!("ensure_valid: {e}");
    }

    let chain = BeliefChain::new(good, 6);
    println!("belief chain (u = 0..5):");
    for anchor in Anchor::ALL {
        let row: Vec<String> = (0..6).map(|u| format!("{:.4}", chain.get(anchor, u))).collect();
        println!("  {anchor:?}: {}", row.join(" "));
    }
    println!("passive fixed point {:.4}", good.passive_fixed_point());

    let pulled = BeliefState::after_pull(&good, State::Bad);
    println!("after pulling an arm seen in the bad state: b={:.2}, then {:.4}", pulled.b, pulled.advance(&good).b);
    Ok(())
}
