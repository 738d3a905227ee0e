//! An arm with a known availability window written as an ordinary restless
//! arm over an augmented state space.
//!
//! cargo run --example augmented_mdp

use streaming_rmab::index::{augmented_mdp_reduction, AugmentedState};
use streaming_rmab::TransitionKernel;

fn main() -> streaming_rmab::Result<()> {
    let k = TransitionKernel::reference();
    for (arrive, depart) in [(1, 2), (2, 4), (3, 8)] {
        let m = augmented_mdp_reduction(&k, arrive, depart, 0.0)?;
        println!("window ({arrive},{depart}): {} states, max row error {:.1e}", m.len(), m.max_row_error());
    }
    let m = augmented_mdp_reduction(&k, 2, 4, 0.0)?;
    for (i, s) in m.states.iter().enumerate() {
        let next = |a: usize| {
            m.transitions[a][i]
                .iter()
                .enumerate()
                .filter(|(_, p)| **p > 0.0)
                .map(|(j, p)| format!("{j}:{p:.2}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let label = match s {
            AugmentedState::Waiting { time } => format!("waiting t={time}"),
            AugmentedState::Present { time, omega, u, belief } => format!("t={time} omega={omega} u={u} b={belief:.3}"),
            AugmentedState::Departed => "departed".into(),
        };
        println!("{i:>2} {label:<28} passive -> {:<10} active -> {}", next(0), next(1));
    }
    Ok(())
}
