//! Discrete-time streaming simulator.
//!
//! Time runs over `t = 1..=T`. Each step: arms whose lifetime ended leave,
//! new arms arrive, the policy picks at most `k` present arms, every present
//! arm in the good state earns one unit of reward, pulled arms reveal their
//! state, and all hidden states move under their action's kernel row. An arm
//! arriving at `a` with lifetime `L` is present for `t` in `a..a+L`.

mod metrics;
mod policy;

pub use metrics::{benchmark, intervention_benefit, mean, standard_error, BenchmarkReport, PolicyTiming};
pub use policy::{select_top_k, Planner, Policy, StepPlan, TableCache};

use std::time::Instant;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::arm::{evolve_hidden_state, Action, Arm, BeliefState, State};
use crate::cohort::Cohort;
use crate::error::{Error, Result};
use crate::rng;

/// How many arms arrive at each step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArrivalKind {
    /// `n` arms at `t = 1`, none after.
    Synchronous { n: usize },
    /// Exactly `rate` arms every step.
    Deterministic { rate: usize },
    /// Poisson-distributed arrivals with mean `rate` every step.
    Poisson { rate: f64 },
}

impl ArrivalKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ArrivalKind::Poisson { rate } if !(rate.is_finite() && rate >= 0.0) => {
                Err(Error::Config(format!("poisson rate {rate} must be finite and non-negative")))
            }
            _ => Ok(()),
        }
    }

    /// Mean arrivals per step (the whole population for synchronous).
    pub fn mean_rate(&self) -> f64 {
        match *self {
            ArrivalKind::Synchronous { n } => n as f64,
            ArrivalKind::Deterministic { rate } => rate as f64,
            ArrivalKind::Poisson { rate } => rate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LifetimeModel {
    Fixed(usize),
    /// Each arm takes the lifetime of the cohort entry it was drawn from.
    Cohort,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrivalProcess {
    pub kind: ArrivalKind,
    pub lifetime: LifetimeModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduledArm {
    pub id: usize,
    pub kernel_id: usize,
    pub arrival_time: usize,
    pub lifetime: usize,
}

/// Arrival times, lifetimes and cohort draws for every arm over `1..=horizon`,
/// ordered by arrival time then id.
pub fn generate_schedule<R: Rng + ?Sized>(
    process: &ArrivalProcess,
    cohort: &Cohort,
    horizon: usize,
    rng: &mut R,
) -> Result<Vec<ScheduledArm>> {
    if horizon == 0 {
        return Err(Error::Config("horizon must be at least 1".into()));
    }
    if cohort.is_empty() {
        return Err(Error::Config("cohort has no arms".into()));
    }
    process.kind.validate()?;
    let poisson = match process.kind {
        ArrivalKind::Poisson { rate } if rate > 0.0 => {
            Some(Poisson::new(rate).map_err(|e| Error::Config(format!("poisson rate: {e}")))?)
        }
        _ => None,
    };
    let mut arms = Vec::new();
    for t in 1..=horizon {
        let count = match process.kind {
            ArrivalKind::Synchronous { n } => if t == 1 { n } else { 0 },
            ArrivalKind::Deterministic { rate } => rate,
            ArrivalKind::Poisson { .. } => poisson.as_ref().map_or(0, |d| d.sample(rng) as usize),
        };
        for _ in 0..count {
            let kernel_id = rng.random_range(0..cohort.len());
            let lifetime = match process.lifetime {
                LifetimeModel::Fixed(l) => l,
                LifetimeModel::Cohort => cohort.entries[kernel_id].lifetime,
            };
            if lifetime == 0 {
                return Err(Error::Config("lifetime must be at least 1".into()));
            }
            arms.push(ScheduledArm { id: arms.len(), kernel_id, arrival_time: t, lifetime });
        }
    }
    Ok(arms)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// Number of steps `T`.
    pub horizon: usize,
    /// Pulls per step `k`.
    pub budget: usize,
    pub arrivals: ArrivalProcess,
    /// Probability that an arriving arm starts in the good state.
    pub p_start: f64,
    /// Discount of the exact finite-horizon index.
    pub beta: f64,
    /// Bisection tolerance of the exact index.
    pub index_tol: f64,
    pub seed: u64,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.p_start) {
            return Err(Error::Config(format!("p_start {} outside [0,1]", self.p_start)));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::Config(format!("beta {} outside (0,1]", self.beta)));
        }
        if !(self.index_tol > 0.0) {
            return Err(Error::Config(format!("index tolerance {} must be positive", self.index_tol)));
        }
        if let LifetimeModel::Fixed(0) = self.arrivals.lifetime {
            return Err(Error::Config("lifetime must be at least 1".into()));
        }
        self.arrivals.kind.validate()
    }

    /// Longest lifetime an arm can have, which bounds belief-chain depth.
    pub fn max_lifetime(&self, cohort: &Cohort) -> usize {
        match self.arrivals.lifetime {
            LifetimeModel::Fixed(l) => l,
            LifetimeModel::Cohort => cohort.entries.iter().map(|e| e.lifetime).max().unwrap_or(0),
        }
    }

    /// Seed of trial `trial`, shared by all policies.
    pub fn trial_seed(&self, trial: usize) -> u64 {
        rng::derive(self.seed, &[trial as u64])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub policy: Policy,
    pub trial: usize,
    pub seed: u64,
    /// `R_t`: present arms in the good state at step `t` (index `t - 1`).
    pub rewards: Vec<usize>,
    pub total: usize,
    /// `N(t)`: arms present at step `t`.
    pub population: Vec<usize>,
    /// `X(t)`: arrivals at step `t`.
    pub arrivals: Vec<usize>,
    /// `Y(t)`: departures at the start of step `t`.
    pub departures: Vec<usize>,
    pub pulls: Vec<usize>,
    /// Arm-steps whose index could not be computed.
    pub failures: usize,
    pub first_failure: Option<String>,
    /// Planning wall time per step in nanoseconds; not reproducible.
    #[serde(skip)]
    pub planning_ns: Vec<u64>,
}

impl SimulationResult {
    pub fn mean_population(&self) -> f64 {
        mean(&self.population.iter().map(|&n| n as f64).collect::<Vec<_>>())
    }

    /// The result with wall-clock fields cleared, for reproducibility checks.
    pub fn without_timing(mut self) -> Self {
        self.planning_ns.clear();
        self
    }

    pub fn mean_planning_ns(&self) -> f64 {
        mean(&self.planning_ns.iter().map(|&n| n as f64).collect::<Vec<_>>())
    }
}

struct LiveArm {
    arm: Arm,
    rng: rand_chacha::ChaCha8Rng,
}

/// Runs one trial of one policy. All randomness except the random policy's
/// scores comes from per-arm streams keyed by `(seed, trial, arm id)`, so
/// every policy faces the same arrivals, initial states and transition
/// draws.
pub fn run_trial(
    config: &SimulationConfig,
    cohort: &Cohort,
    tables: &TableCache,
    policy: Policy,
    trial: usize,
) -> Result<SimulationResult> {
    config.validate()?;
    let seed = config.trial_seed(trial);
    let schedule = generate_schedule(&config.arrivals, cohort, config.horizon, &mut rng::stream(seed, &[rng::ARRIVALS]))?;
    let mut planner = Planner::new(policy, config.beta, config.index_tol, tables, rng::stream(seed, &[rng::POLICY]));

    let t_max = config.horizon;
    let mut out = SimulationResult {
        policy,
        trial,
        seed,
        rewards: Vec::with_capacity(t_max),
        total: 0,
        population: Vec::with_capacity(t_max),
        arrivals: Vec::with_capacity(t_max),
        departures: Vec::with_capacity(t_max),
        pulls: Vec::with_capacity(t_max),
        failures: 0,
        first_failure: None,
        planning_ns: Vec::with_capacity(t_max),
    };
    let mut live: Vec<LiveArm> = Vec::new();
    let mut next = 0;
    let mut views = Vec::new();
    let mut pulled = Vec::new();
    for t in 1..=t_max {
        let before = live.len();
        live.retain(|a| a.arm.is_present(t));
        out.departures.push(before - live.len());

        let mut arrived = 0;
        while next < schedule.len() && schedule[next].arrival_time == t {
            let s = schedule[next];
            let mut arm_rng = rng::stream(seed, &[rng::ARM, s.id as u64]);
            let initial = if arm_rng.random::<f64>() < config.p_start { State::Good } else { State::Bad };
            let kernel = cohort.entries[s.kernel_id].kernel;
            live.push(LiveArm { arm: Arm::new(s.id, s.kernel_id, kernel, t, s.lifetime, initial), rng: arm_rng });
            next += 1;
            arrived += 1;
        }
        out.arrivals.push(arrived);
        out.population.push(live.len());

        views.clear();
        views.extend(live.iter().map(|a| a.arm.view(t)));
        let start = Instant::now();
        let plan = planner.plan(&views, config.budget);
        out.planning_ns.push(start.elapsed().as_nanos() as u64);
        if let Some((id, msg)) = plan.failures.first() {
            out.first_failure.get_or_insert_with(|| format!("arm {id} at t={t}: {msg}"));
        }
        out.failures += plan.failures.len();
        out.pulls.push(plan.active.len());

        pulled.clear();
        pulled.resize(live.len(), false);
        for &i in &plan.active {
            pulled[i] = true;
        }
        let reward = live.iter().filter(|a| a.arm.hidden_state == State::Good).count();
        out.rewards.push(reward);
        out.total += reward;

        for (a, &active) in live.iter_mut().zip(&pulled) {
            let arm = &mut a.arm;
            let action = if active { Action::Active } else { Action::Passive };
            arm.belief = if active {
                BeliefState::after_pull(&arm.kernel, arm.hidden_state)
            } else {
                arm.belief.advance(&arm.kernel)
            };
            arm.hidden_state = evolve_hidden_state(&arm.kernel, arm.hidden_state, action, a.rng.random())?;
        }
    }
    Ok(out)
}
