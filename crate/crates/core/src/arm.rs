//! Two-state, two-action partially observable arms.
//!
//! An arm is either in the bad state (0) or the good state (1). Pulling it
//! (the active action) reveals the current state; otherwise the planner only
//! tracks a belief, the probability of being in the good state. Beliefs are
//! fully determined by where the chain was last anchored and how many passive
//! steps have elapsed since, so they are addressed by the integer pair
//! `(anchor, u)` and never compared as floats.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum State {
    Bad = 0,
    Good = 1,
}

impl State {
    pub fn from_bit(bit: u8) -> Result<State> {
        match bit {
            0 => Ok(State::Bad),
            1 => Ok(State::Good),
            other => Err(Error::MalformedInput(format!("state must be 0 or 1, got {other}"))),
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            State::Bad => 0.0,
            State::Good => 1.0,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Passive,
    Active,
}

/// Passive and active 2x2 transition matrices of one arm, stored as the
/// probabilities of moving into the good state. Rows are implied:
/// `P_{s0} = 1 - P_{s1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionKernel {
    pub p01_p: f64,
    pub p11_p: f64,
    pub p01_a: f64,
    pub p11_a: f64,
}

/// One violated natural constraint of a [`TransitionKernel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Violation {
    OutOfRange(Entry),
    /// `p01_a > p01_p`
    ActiveLiftsBad,
    /// `p11_a > p11_p`
    ActiveLiftsGood,
    /// `p11_a > p01_a`
    ActiveSticky,
    /// `p11_p > p01_p`
    PassiveSticky,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Entry {
    P01Passive,
    P11Passive,
    P01Active,
    P11Active,
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Entry::P01Passive => "p01_p",
            Entry::P11Passive => "p11_p",
            Entry::P01Active => "p01_a",
            Entry::P11Active => "p11_a",
        })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutOfRange(e) => write!(f, "{e} in [0,1]"),
            Violation::ActiveLiftsBad => f.write_str("p01_a>p01_p"),
            Violation::ActiveLiftsGood => f.write_str("p11_a>p11_p"),
            Violation::ActiveSticky => f.write_str("p11_a>p01_a"),
            Violation::PassiveSticky => f.write_str("p11_p>p01_p"),
        }
    }
}

/// Outcome of [`TransitionKernel::validate`]: empty when the kernel is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl TransitionKernel {
    pub const fn new(p01_p: f64, p11_p: f64, p01_a: f64, p11_a: f64) -> Self {
        Self { p01_p, p11_p, p01_a, p11_a }
    }

    /// The example arm used throughout the index-decay analysis:
    /// `P^p = [[0.94, 0.06], [0.54, 0.46]]`, `P^a = [[0.54, 0.46], [0.40, 0.60]]`.
    pub const fn reference() -> Self {
        Self::new(0.06, 0.46, 0.46, 0.60)
    }

    /// Builds a kernel from full row-stochastic matrices indexed `[from][to]`.
    pub fn from_matrices(passive: [[f64; 2]; 2], active: [[f64; 2]; 2]) -> Result<Self> {
        for row in passive.iter().chain(active.iter()) {
            if row.iter().any(|x| !x.is_finite()) || (row[0] + row[1] - 1.0).abs() > 1e-9 {
                return Err(Error::MalformedInput(format!("row {row:?} is not stochastic")));
            }
        }
        Ok(Self::new(passive[0][1], passive[1][1], active[0][1], active[1][1]))
    }

    /// Checks range and natural-constraint inequalities, listing every
    /// violation. Non-finite entries are rejected outright.
    pub fn validate(&self) -> Result<ValidityReport> {
        let entries = [
            (Entry::P01Passive, self.p01_p),
            (Entry::P11Passive, self.p11_p),
            (Entry::P01Active, self.p01_a),
            (Entry::P11Active, self.p11_a),
        ];
        if let Some((e, v)) = entries.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::MalformedInput(format!("{e} is not finite ({v})")));
        }
        let mut violations: Vec<Violation> = entries
            .iter()
            .filter(|(_, v)| !(0.0..=1.0).contains(v))
            .map(|(e, _)| Violation::OutOfRange(*e))
            .collect();
        if !(self.p01_a > self.p01_p) {
            violations.push(Violation::ActiveLiftsBad);
        }
        if !(self.p11_a > self.p11_p) {
            violations.push(Violation::ActiveLiftsGood);
        }
        if !(self.p11_a > self.p01_a) {
            violations.push(Violation::ActiveSticky);
        }
        if !(self.p11_p > self.p01_p) {
            violations.push(Violation::PassiveSticky);
        }
        Ok(ValidityReport { violations })
    }

    /// Like [`validate`](Self::validate) but turns violations into an error.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate()?;
        if report.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidKernel(report.violations))
        }
    }

    /// `P^{action}_{state,1}`.
    #[inline]
    pub fn to_good(&self, state: State, action: Action) -> f64 {
        match (state, action) {
            (State::Bad, Action::Passive) => self.p01_p,
            (State::Good, Action::Passive) => self.p11_p,
            (State::Bad, Action::Active) => self.p01_a,
            (State::Good, Action::Active) => self.p11_a,
        }
    }

    /// One-step belief update `b P_11 + (1 - b) P_01` under `action`.
    #[inline]
    pub fn step(&self, b: f64, action: Action) -> f64 {
        match action {
            Action::Passive => b * self.p11_p + (1.0 - b) * self.p01_p,
            Action::Active => b * self.p11_a + (1.0 - b) * self.p01_a,
        }
    }

    #[inline]
    pub fn passive_step(&self, b: f64) -> f64 {
        self.step(b, Action::Passive)
    }

    /// Limit of the passive belief chain, `p01_p / (1 - p11_p + p01_p)`.
    pub fn passive_fixed_point(&self) -> f64 {
        self.p01_p / (1.0 - self.p11_p + self.p01_p)
    }

    /// `P_11 - P_01` for `action`; the contraction factor of the belief map.
    #[inline]
    pub fn persistence(&self, action: Action) -> f64 {
        match action {
            Action::Passive => self.p11_p - self.p01_p,
            Action::Active => self.p11_a - self.p01_a,
        }
    }
}

/// Belief after `u` passive steps from an observed state.
pub fn belief_value(kernel: &TransitionKernel, omega: State, u: usize) -> f64 {
    passive_walk(kernel, omega.as_f64(), u)
}

fn passive_walk(kernel: &TransitionKernel, start: f64, u: usize) -> f64 {
    (0..u).fold(start, |b, _| kernel.passive_step(b))
}

/// Where a belief chain starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Anchor {
    /// The state was observed at this step (`b = omega` at `u = 0`).
    Observed(State),
    /// The arm was pulled while in `State` one step before `u = 0`, so
    /// `b = P^a_{s1}` at `u = 0`.
    Activated(State),
}

impl Anchor {
    pub const ALL: [Anchor; 4] = [
        Anchor::Observed(State::Bad),
        Anchor::Observed(State::Good),
        Anchor::Activated(State::Bad),
        Anchor::Activated(State::Good),
    ];

    pub fn slot(self) -> usize {
        match self {
            Anchor::Observed(s) => s.index(),
            Anchor::Activated(s) => 2 + s.index(),
        }
    }

    pub fn origin(self, kernel: &TransitionKernel) -> f64 {
        match self {
            Anchor::Observed(s) => s.as_f64(),
            Anchor::Activated(s) => kernel.to_good(s, Action::Active),
        }
    }

    /// The last observed state behind this anchor.
    pub fn omega(self) -> State {
        match self {
            Anchor::Observed(s) | Anchor::Activated(s) => s,
        }
    }
}

/// A node of the belief chain together with its value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeliefState {
    pub anchor: Anchor,
    pub u: usize,
    pub b: f64,
}

impl BeliefState {
    pub fn at(kernel: &TransitionKernel, anchor: Anchor, u: usize) -> Self {
        Self { anchor, u, b: passive_walk(kernel, anchor.origin(kernel), u) }
    }

    pub fn omega(&self) -> State {
        self.anchor.omega()
    }

    /// Next node after a passive step.
    pub fn advance(&self, kernel: &TransitionKernel) -> Self {
        Self { anchor: self.anchor, u: self.u + 1, b: kernel.passive_step(self.b) }
    }

    /// Belief one step after pulling an arm whose state was just revealed.
    pub fn after_pull(kernel: &TransitionKernel, observed: State) -> Self {
        Self::at(kernel, Anchor::Activated(observed), 0)
    }
}

/// Belief immediately after observing the arm's state.
pub fn collapse_belief(observation: State) -> BeliefState {
    BeliefState { anchor: Anchor::Observed(observation), u: 0, b: observation.as_f64() }
}

/// Samples the next hidden state: good iff `draw < P^{action}_{state,1}`.
pub fn evolve_hidden_state(
    kernel: &TransitionKernel,
    state: State,
    action: Action,
    draw: f64,
) -> Result<State> {
    if !(0.0..1.0).contains(&draw) {
        return Err(Error::Contract(format!("uniform draw {draw} outside [0,1)")));
    }
    Ok(if draw < kernel.to_good(state, action) { State::Good } else { State::Bad })
}

/// Belief values for all four anchors, cached up to a chain length.
#[derive(Debug, Clone)]
pub struct BeliefChain {
    kernel: TransitionKernel,
    values: [Vec<f64>; 4],
}

impl BeliefChain {
    pub fn new(kernel: TransitionKernel, len: usize) -> Self {
        let mut chain = Self { kernel, values: Default::default() };
        chain.extend_to(len);
        chain
    }

    pub fn kernel(&self) -> &TransitionKernel {
        &self.kernel
    }

    /// Number of cached nodes per anchor (`u` in `0..len`).
    pub fn len(&self) -> usize {
        self.values[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn extend_to(&mut self, len: usize) {
        for anchor in Anchor::ALL {
            let k = self.kernel;
            let v = &mut self.values[anchor.slot()];
            if v.is_empty() && len > 0 {
                v.push(anchor.origin(&k));
            }
            while v.len() < len {
                let last = *v.last().unwrap();
                v.push(k.passive_step(last));
            }
        }
    }

    /// Cached value, or a fresh walk past the cached length.
    pub fn get(&self, anchor: Anchor, u: usize) -> f64 {
        match self.values[anchor.slot()].get(u) {
            Some(b) => *b,
            None => BeliefState::at(&self.kernel, anchor, u).b,
        }
    }
}

/// Expected belief trajectory `rho(t)` from `b0` under an open-loop action
/// sequence; `rho.len() == actions.len() + 1`.
pub fn expected_belief_trajectory(kernel: &TransitionKernel, b0: f64, actions: &[Action]) -> Vec<f64> {
    let mut rho = Vec::with_capacity(actions.len() + 1);
    rho.push(b0);
    for &a in actions {
        let last = *rho.last().unwrap();
        rho.push(kernel.step(last, a));
    }
    rho
}

/// `rho^a(t) - rho^p(t)` for `t = 1..=tail.len() + 1` where the two
/// trajectories start at `b0`, take active resp. passive at step 0 and then
/// follow `tail`. Computed from the affine recurrence on the difference
/// itself so that tiny gaps do not cancel to zero.
pub fn dominance_gaps(kernel: &TransitionKernel, b0: f64, tail: &[Action]) -> Vec<f64> {
    let first = kernel.step(b0, Action::Active) - kernel.step(b0, Action::Passive);
    let mut gaps = Vec::with_capacity(tail.len() + 1);
    gaps.push(first);
    for &a in tail {
        let last = *gaps.last().unwrap();
        gaps.push(last * kernel.persistence(a));
    }
    gaps
}

/// One arm of a streaming bandit instance.
///
/// The hidden state is only visible inside the crate; policies see
/// [`ArmView`]s.
#[derive(Debug, Clone)]
pub struct Arm {
    pub id: usize,
    /// Index of the kernel in the cohort the arm was drawn from.
    pub kernel_id: usize,
    pub kernel: TransitionKernel,
    pub arrival_time: usize,
    pub lifetime: usize,
    pub(crate) hidden_state: State,
    pub belief: BeliefState,
}

impl Arm {
    pub(crate) fn new(
        id: usize,
        kernel_id: usize,
        kernel: TransitionKernel,
        arrival_time: usize,
        lifetime: usize,
        initial: State,
    ) -> Self {
        Self {
            id,
            kernel_id,
            kernel,
            arrival_time,
            lifetime,
            hidden_state: initial,
            belief: collapse_belief(initial),
        }
    }

    /// `arrival_time + lifetime - t`; the arm is present while this is positive.
    pub fn residual_horizon(&self, t: usize) -> usize {
        (self.arrival_time + self.lifetime).saturating_sub(t)
    }

    /// Rewarded steps left after `t`, the horizon handed to index policies.
    pub fn steps_to_go(&self, t: usize) -> usize {
        self.residual_horizon(t).saturating_sub(1)
    }

    pub fn is_present(&self, t: usize) -> bool {
        t >= self.arrival_time && self.residual_horizon(t) > 0
    }

    pub fn view(&self, t: usize) -> ArmView {
        ArmView {
            id: self.id,
            kernel_id: self.kernel_id,
            kernel: self.kernel,
            belief: self.belief,
            horizon: self.steps_to_go(t),
        }
    }
}

/// What a policy may know about an arm at planning time.
#[derive(Debug, Clone, Copy)]
pub struct ArmView {
    pub id: usize,
    pub kernel_id: usize,
    pub kernel: TransitionKernel,
    pub belief: BeliefState,
    /// Remaining rewarded steps after the current one.
    pub horizon: usize,
}
