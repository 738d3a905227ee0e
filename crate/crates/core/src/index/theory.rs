//! Numerical checks of the structural results the index policies rely on:
//! index decay, single crossing in the subsidy, threshold structure, and the
//! reduction of a streaming arm to a standard restless arm.

use serde::Serialize;

use crate::arm::{dominance_gaps, expected_belief_trajectory, Action, Anchor, BeliefChain, TransitionKernel};
use crate::error::{Error, Result};
use crate::index::interp::myopic_index;
use crate::index::value::{check_inputs, ValueSolver};
use crate::index::whittle::whittle_index_finite;

/// Values closer than this count as a tie between actions.
pub const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Choice {
    Active,
    Passive,
    Tie,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossingReport {
    /// The optimal action leaves "active" at most once and never returns.
    pub single_crossing: bool,
    /// First grid subsidy at which active stops being optimal.
    pub crossing: Option<f64>,
    /// The grid never left one action, so the crossing lies outside it.
    pub inconclusive: bool,
    pub grid: Vec<(f64, Choice)>,
}

/// Sweeps the subsidy over `[lo, hi]` in `resolution` steps and checks that
/// the optimal action switches from active to passive at most once.
pub fn indexability_probe(
    kernel: &TransitionKernel,
    b: f64,
    h: usize,
    beta: f64,
    resolution: usize,
    (lo, hi): (f64, f64),
) -> Result<CrossingReport> {
    check_inputs(b, beta)?;
    if resolution == 0 || !(hi > lo) {
        return Err(Error::MalformedInput("probe needs a positive resolution and lo < hi".into()));
    }
    let mut solver = ValueSolver::new(*kernel, b, h, beta);
    let grid: Vec<(f64, Choice)> = (0..=resolution)
        .map(|i| {
            let m = lo + (hi - lo) * i as f64 / resolution as f64;
            let choice = match solver.pair(m).best_action(TIE_EPS) {
                Some(Action::Active) => Choice::Active,
                Some(Action::Passive) => Choice::Passive,
                None => Choice::Tie,
            };
            (m, choice)
        })
        .collect();
    Ok(summarize(grid))
}

fn summarize(grid: Vec<(f64, Choice)>) -> CrossingReport {
    let crossing_at = grid.iter().position(|(_, c)| *c != Choice::Active);
    let single_crossing = match crossing_at {
        None => true,
        Some(i) => grid[i..].iter().all(|(_, c)| *c != Choice::Active),
    };
    let first = grid[0].1;
    let inconclusive = grid.iter().all(|(_, c)| *c == first);
    CrossingReport { single_crossing, crossing: crossing_at.map(|i| grid[i].0), inconclusive, grid }
}

/// Finite-horizon indices of one belief for horizons `0..=t_max`, checked
/// against the closed form of the one-step index.
#[derive(Debug, Clone, Serialize)]
pub struct DecayProbe {
    pub belief: f64,
    pub beta: f64,
    pub m0: f64,
    /// `beta * db`.
    pub m1_closed: f64,
    /// One-step index found by bisection.
    pub m1_search: f64,
    /// `m_t` for `t = 2..=t_max`.
    pub m_series: Vec<f64>,
    /// Expected belief for `t = 0..=t_max` after an active first step.
    pub rho_active: Vec<f64>,
    /// Same, after a passive first step.
    pub rho_passive: Vec<f64>,
    /// `rho_active(t) - rho_passive(t)` for `t = 1..=t_max`.
    pub gaps: Vec<f64>,
    /// Every horizon passed the single-crossing probe.
    pub verifiable: bool,
}

impl DecayProbe {
    /// `m_t` for horizon `t` (0, 1, or any in the series).
    pub fn m(&self, t: usize) -> Option<f64> {
        match t {
            0 => Some(self.m0),
            1 => Some(self.m1_search),
            t => self.m_series.get(t - 2).copied(),
        }
    }

    /// Smallest `m_t - m_1` over the series.
    pub fn min_decay_margin(&self) -> f64 {
        self.m_series.iter().map(|m| m - self.m1_search).fold(f64::INFINITY, f64::min)
    }
}

pub fn decay_probe(kernel: &TransitionKernel, b: f64, t_max: usize, beta: f64, tol: f64) -> Result<DecayProbe> {
    kernel.ensure_valid()?;
    check_inputs(b, beta)?;
    let m0 = whittle_index_finite(kernel, b, 0, beta, tol)?;
    let m1_closed = beta * myopic_index(kernel, b);
    let m1_search = whittle_index_finite(kernel, b, 1, beta, tol)?;
    let m_series = (2..=t_max).map(|t| whittle_index_finite(kernel, b, t, beta, tol)).collect::<Result<Vec<_>>>()?;

    let mut verifiable = true;
    for h in 1..=t_max {
        let report = indexability_probe(kernel, b, h, beta, 200, (-1.0, 1.0))?;
        verifiable &= report.single_crossing;
    }

    // Follow the policy that is optimal along the passive-first trajectory at
    // subsidy m1, and apply the same action sequence after an active start.
    let mut tail = Vec::with_capacity(t_max.saturating_sub(1));
    let mut belief = kernel.step(b, Action::Passive);
    for t in 1..t_max {
        let action = ValueSolver::new(*kernel, belief, t_max - t, beta)
            .pair(m1_closed)
            .best_action(TIE_EPS)
            .unwrap_or(Action::Passive);
        tail.push(action);
        belief = kernel.step(belief, action);
    }
    let mut with_active = vec![Action::Active];
    with_active.extend_from_slice(&tail);
    let mut with_passive = vec![Action::Passive];
    with_passive.extend_from_slice(&tail);
    let rho_active = expected_belief_trajectory(kernel, b, if t_max == 0 { &[] } else { &with_active });
    let rho_passive = expected_belief_trajectory(kernel, b, if t_max == 0 { &[] } else { &with_passive });
    let gaps = if t_max == 0 { Vec::new() } else { dominance_gaps(kernel, b, &tail) };

    Ok(DecayProbe { belief: b, beta, m0, m1_closed, m1_search, m_series, rho_active, rho_passive, gaps, verifiable })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ThresholdClass {
    /// Passive above a belief threshold, active below, for every subsidy.
    Forward,
    /// Active above a belief threshold, passive below, for every subsidy.
    Reverse,
    Mixed,
}

/// Classifies a kernel by the shape of its optimal finite-horizon policy
/// over the belief-chain nodes (`u < chain_len`) at horizon `h`, for a
/// subsidy grid over `[-1, 1]`.
pub fn classify_threshold(
    kernel: &TransitionKernel,
    h: usize,
    beta: f64,
    chain_len: usize,
    resolution: usize,
) -> Result<ThresholdClass> {
    let chain = BeliefChain::new(*kernel, chain_len);
    let mut beliefs: Vec<f64> =
        Anchor::ALL.iter().flat_map(|a| (0..chain_len).map(|u| chain.get(*a, u))).collect();
    beliefs.sort_by(f64::total_cmp);
    beliefs.dedup();
    let mut solvers: Vec<ValueSolver> = beliefs.iter().map(|b| ValueSolver::new(*kernel, *b, h, beta)).collect();

    let (mut forward, mut reverse) = (true, true);
    for i in 0..=resolution.max(1) {
        let m = -1.0 + 2.0 * i as f64 / resolution.max(1) as f64;
        // Along increasing belief, forward means active* then passive*.
        let actions: Vec<Option<Action>> = solvers.iter_mut().map(|s| s.pair(m).best_action(TIE_EPS)).collect();
        forward &= is_monotone(&actions, Action::Active);
        reverse &= is_monotone(&actions, Action::Passive);
    }
    Ok(match (forward, reverse) {
        (true, _) => ThresholdClass::Forward,
        (false, true) => ThresholdClass::Reverse,
        (false, false) => ThresholdClass::Mixed,
    })
}

/// True when no `first` action follows the other action (ties are neutral).
fn is_monotone(actions: &[Option<Action>], first: Action) -> bool {
    let mut switched = false;
    for a in actions.iter().flatten() {
        if *a != first {
            switched = true;
        } else if switched {
            return false;
        }
    }
    true
}

/// A state of the availability-augmented belief model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum AugmentedState {
    /// Not yet arrived at `time`.
    Waiting { time: usize },
    /// Present at `time`, last observed `omega` `u` steps ago.
    Present { time: usize, omega: u8, u: usize, belief: f64 },
    /// Departed; absorbing.
    Departed,
}

/// Explicit finite MDP of one arm with a known availability window.
#[derive(Debug, Clone, Serialize)]
pub struct AugmentedMdp {
    pub states: Vec<AugmentedState>,
    /// `transitions[action][from][to]`, action 0 passive, 1 active.
    pub transitions: [Vec<Vec<f64>>; 2],
    /// Distribution over states at time 1.
    pub initial: Vec<f64>,
}

impl AugmentedMdp {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn sink(&self) -> usize {
        self.states.len() - 1
    }

    /// Largest `|row sum - 1|` over both actions.
    pub fn max_row_error(&self) -> f64 {
        self.transitions
            .iter()
            .flat_map(|t| t.iter().map(|row| (row.iter().sum::<f64>() - 1.0).abs()))
            .fold(0.0, f64::max)
    }
}

/// Builds the belief model of an arm that arrives at `t_arrive` and departs
/// at `t_depart` as a standard restless arm over
/// `t_depart + (t_depart - t_arrive)^2` states:
///
/// * `t_arrive - 1` deterministic waiting states,
/// * for each present time `t`, the `2 (t - t_arrive + 1)` nodes
///   `(omega, u)` with `u <= t - t_arrive`,
/// * one absorbing departed state.
///
/// Passive moves `(omega, u)` to `(omega, u + 1)`; active reveals the
/// post-transition state, landing on `(1, 0)` with probability
/// `b P11a + (1 - b) P01a` and on `(0, 0)` otherwise. `p_start` is the
/// probability of arriving in the good state.
pub fn augmented_mdp_reduction(
    kernel: &TransitionKernel,
    t_arrive: usize,
    t_depart: usize,
    p_start: f64,
) -> Result<AugmentedMdp> {
    if t_arrive == 0 || t_arrive >= t_depart {
        return Err(Error::InvalidWindow { arrive: t_arrive, depart: t_depart });
    }
    if !(0.0..=1.0).contains(&p_start) {
        return Err(Error::MalformedInput(format!("start probability {p_start} outside [0,1]")));
    }
    let width = t_depart - t_arrive;
    let mut states: Vec<AugmentedState> = (1..t_arrive).map(|time| AugmentedState::Waiting { time }).collect();
    // layer_start[j] is the first state of present time t_arrive + j;
    // node (omega, u) sits at layer_start[j] + 2u + omega.
    let mut layer_start = Vec::with_capacity(width);
    for j in 0..width {
        layer_start.push(states.len());
        for u in 0..=j {
            for omega in 0..2u8 {
                let belief = BeliefChain::new(*kernel, u + 1).get(Anchor::Observed(omega_state(omega)), u);
                states.push(AugmentedState::Present { time: t_arrive + j, omega, u, belief });
            }
        }
    }
    states.push(AugmentedState::Departed);
    let n = states.len();
    let sink = n - 1;
    let node = |j: usize, omega: u8, u: usize| layer_start[j] + 2 * u + omega as usize;

    let mut transitions = [vec![vec![0.0; n]; n], vec![vec![0.0; n]; n]];
    let mut initial = vec![0.0; n];
    for (i, s) in states.iter().enumerate() {
        match *s {
            AugmentedState::Waiting { time } => {
                for t in transitions.iter_mut() {
                    if time + 1 < t_arrive {
                        t[i][i + 1] = 1.0;
                    } else {
                        t[i][node(0, 1, 0)] = p_start;
                        t[i][node(0, 0, 0)] += 1.0 - p_start;
                    }
                }
            }
            AugmentedState::Present { time, omega, u, belief } => {
                let j = time - t_arrive;
                if j + 1 == width {
                    transitions[0][i][sink] = 1.0;
                    transitions[1][i][sink] = 1.0;
                } else {
                    transitions[0][i][node(j + 1, omega, u + 1)] = 1.0;
                    let good = kernel.step(belief, Action::Active);
                    transitions[1][i][node(j + 1, 1, 0)] = good;
                    transitions[1][i][node(j + 1, 0, 0)] = 1.0 - good;
                }
            }
            AugmentedState::Departed => {
                transitions[0][i][sink] = 1.0;
                transitions[1][i][sink] = 1.0;
            }
        }
    }
    if t_arrive == 1 {
        initial[node(0, 1, 0)] = p_start;
        initial[node(0, 0, 0)] += 1.0 - p_start;
    } else {
        initial[0] = 1.0;
    }
    Ok(AugmentedMdp { states, transitions, initial })
}

fn omega_state(omega: u8) -> crate::arm::State {
    if omega == 0 {
        crate::arm::State::Bad
    } else {
        crate::arm::State::Good
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const K: TransitionKernel = TransitionKernel::reference();

    #[test]
    fn reference_kernel_single_crossing() {
        let chain = BeliefChain::new(K, 11);
        for anchor in Anchor::ALL {
            for u in 0..11 {
                for h in 1..=10 {
                    let r = indexability_probe(&K, chain.get(anchor, u), h, 1.0, 400, (-1.0, 1.0)).unwrap();
                    assert!(r.single_crossing, "{anchor:?} u={u} h={h}");
                    assert!(!r.inconclusive);
                }
            }
        }
    }

    #[test]
    fn probe_sides_of_crossing() {
        let w = whittle_index_finite(&K, 0.1, 3, 1.0, 1e-10).unwrap();
        let r = indexability_probe(&K, 0.1, 3, 1.0, 1000, (-1.0, 1.0)).unwrap();
        for (m, c) in &r.grid {
            if *m < w - 1e-6 {
                assert_eq!(*c, Choice::Active, "m={m}");
            } else if *m > w + 1e-6 {
                assert_eq!(*c, Choice::Passive, "m={m}");
            }
        }
        assert!((r.crossing.unwrap() - w).abs() <= 2.0 / 1000.0 + 1e-9);
    }

    #[test]
    fn tie_counts_as_crossing() {
        // At h = 0 the gap is exactly m, so the grid point m = 0 is a tie.
        let r = indexability_probe(&K, 0.3, 0, 1.0, 4, (-1.0, 1.0)).unwrap();
        let choices: Vec<Choice> = r.grid.iter().map(|(_, c)| *c).collect();
        assert_eq!(choices, vec![Choice::Active, Choice::Active, Choice::Tie, Choice::Passive, Choice::Passive]);
        assert!(r.single_crossing);
        assert_eq!(r.crossing, Some(0.0));
    }

    #[test]
    fn summarize_flags_reentry_and_flat_grids() {
        let g = vec![(0.0, Choice::Active), (1.0, Choice::Passive), (2.0, Choice::Active)];
        assert!(!summarize(g).single_crossing);
        let g = vec![(0.0, Choice::Passive), (1.0, Choice::Passive)];
        let r = summarize(g);
        assert!(r.single_crossing && r.inconclusive);
    }

    #[test]
    fn decay_on_reference_kernel() {
        let p = decay_probe(&K, 0.1, 10, 1.0, 1e-10).unwrap();
        assert_eq!(p.m0, 0.0);
        assert!((p.m1_closed - 0.374).abs() < 1e-12);
        assert!((p.m1_search - p.m1_closed).abs() < 1e-6);
        assert!(p.verifiable);
        assert!(p.min_decay_margin() > 0.0);
        for t in 1..=10 {
            assert!(p.rho_active[t] > p.rho_passive[t], "t={t}");
            assert!(p.gaps[t - 1] > 0.0);
        }
    }

    #[test]
    fn reduction_state_counts() {
        for (a, d, n) in [(2, 4, 8), (1, 2, 3), (3, 8, 33)] {
            let mdp = augmented_mdp_reduction(&K, a, d, 0.0).unwrap();
            assert_eq!(mdp.len(), n);
            assert!(mdp.max_row_error() < 1e-12);
            let sink = mdp.sink();
            for t in &mdp.transitions {
                assert_eq!(t[sink][sink], 1.0);
            }
            assert!((mdp.initial.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reduction_rejects_bad_window() {
        assert!(matches!(augmented_mdp_reduction(&K, 4, 4, 0.0), Err(Error::InvalidWindow { .. })));
        assert!(matches!(augmented_mdp_reduction(&K, 0, 4, 0.0), Err(Error::InvalidWindow { .. })));
    }

    #[test]
    fn reduction_passive_walk_follows_chain() {
        let mdp = augmented_mdp_reduction(&K, 1, 4, 1.0).unwrap();
        // Start in (1, 0), stay passive: beliefs follow the observed-good chain.
        let mut at = mdp.initial.iter().position(|p| *p == 1.0).unwrap();
        for u in 0..3 {
            match mdp.states[at] {
                AugmentedState::Present { belief, u: uu, omega, .. } => {
                    assert_eq!((omega, uu), (1, u));
                    assert_eq!(belief, crate::arm::belief_value(&K, crate::arm::State::Good, u));
                }
                ref s => panic!("unexpected {s:?}"),
            }
            at = mdp.transitions[0][at].iter().position(|p| *p == 1.0).unwrap();
        }
        assert_eq!(at, mdp.sink());
    }

    #[test]
    fn classifier_separates_patterns() {
        // Intervention helps much more from the bad state: forward pattern.
        let fwd = TransitionKernel::new(0.05, 0.5, 0.6, 0.55 + 0.1);
        assert_eq!(classify_threshold(&fwd, 20, 1.0, 8, 40).unwrap(), ThresholdClass::Forward);
        // Intervention helps only from the good state: reverse pattern.
        let rev = TransitionKernel::new(0.1, 0.3, 0.11, 0.95);
        assert_ne!(classify_threshold(&rev, 20, 1.0, 8, 40).unwrap(), ThresholdClass::Forward);
    }
}
