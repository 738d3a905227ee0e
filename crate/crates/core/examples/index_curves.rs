//! Finite-horizon Whittle index of the reference kernel as the residual
//! horizon grows, next to the linear and logistic estimates and the
//! infinite-horizon index they saturate at.
//!
//! cargo run --example index_curves

use streaming_rmab::index::{
    linear_index, logistic_index, myopic_index, whittle_index_finite, ConvergedFiniteHorizon, IndexEstimate,
    Interpolation,
};
use streaming_rmab::TransitionKernel;

fn main() -> streaming_rmab::Result<()> {
    let kernel = TransitionKernel::reference();
    let oracle = ConvergedFiniteHorizon::default();
    for b in [0.1, 0.9] {
        let c = oracle.converge(&kernel, b)?;
        let db = myopic_index(&kernel, b);
        println!("belief {b}: myopic {db:.4}, infinite-horizon {:.4} (converged at h={})", c.value, c.horizon);
        if let Some(fit) = IndexEstimate::new(Interpolation::Logistic, 0, db, c.value).logistic {
            println!("  logistic fit c1={:.4} c2={:.4} c3={:.4}", fit.c1, fit.c2, fit.c3);
        }
        println!("  {:>3} {:>8} {:>8} {:>8}", "h", "exact", "linear", "logistic");
        for h in [0, 1, 2, 3, 5, 8, 12, 20] {
            let exact = whittle_index_finite(&kernel, b, h, 1.0, 1e-8)?;
            println!(
                "  {h:>3} {exact:>8.4} {:>8.4} {:>8.4}",
                linear_index(h, db, c.value),
                logistic_index(h, db, c.value)
            );
        }
    }
    Ok(())
}
