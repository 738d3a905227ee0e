//! Index decay (the index is zero with no steps left, equals the discounted
//! one-step gain with one, and grows beyond that) and the expected-belief
//! advantage of an early pull, on a few random kernels.
//!
//! cargo run --example decay_and_dominance

use streaming_rmab::cohort::sample_kernel;
use streaming_rmab::index::decay_probe;
use streaming_rmab::rng;

fn main() -> streaming_rmab::Result<()> {
    let mut r = rng::stream(7, &[]);
    for _ in 0..4 {
        let k = sample_kernel(&mut r);
        let p = decay_probe(&k, 0.5, 8, 0.95, 1e-9)?;
        println!("{k:?}");
        let ms: Vec<String> = (0..=8).map(|t| format!("{:.4}", p.m(t).unwrap())).collect();
        println!("  m_t, t=0..8: {}", ms.join(" "));
        println!("  m1 by search {:.6}, closed form {:.6}", p.m1_search, p.m1_closed);
        let gaps: Vec<String> = p.gaps.iter().map(|g| format!("{g:.1e}")).collect();
        println!("  rho_a - rho_p: {}", gaps.join(" "));
        println!("  single crossing at every horizon: {}", p.verifiable);
    }
    Ok(())
}
