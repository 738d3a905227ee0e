//! Per-step planning: index policies and top-k selection.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arm::ArmView;
use crate::cohort::Cohort;
use crate::error::{Error, Result};
use crate::index::{
    linear_index, logistic_index, myopic_index, precompute_index_table, whittle_index_finite, IndexTable,
    InfiniteHorizonOracle,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    NoIntervention,
    Random,
    Myopic,
    ThresholdWhittle,
    Linear,
    Logistic,
    Exact,
}

impl Policy {
    pub const ALL: [Policy; 7] = [
        Policy::NoIntervention,
        Policy::Random,
        Policy::Myopic,
        Policy::ThresholdWhittle,
        Policy::Linear,
        Policy::Logistic,
        Policy::Exact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Policy::NoIntervention => "no_intervention",
            Policy::Random => "random",
            Policy::Myopic => "myopic",
            Policy::ThresholdWhittle => "threshold_whittle",
            Policy::Linear => "linear",
            Policy::Logistic => "logistic",
            Policy::Exact => "exact",
        }
    }

    /// Whether the policy reads precomputed infinite-horizon tables.
    pub fn needs_tables(self) -> bool {
        matches!(self, Policy::ThresholdWhittle | Policy::Linear | Policy::Logistic)
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown policy `{s}`")))
    }
}

/// Infinite-horizon index tables for every kernel of a cohort.
///
/// A kernel whose table could not be built keeps the error message; arms
/// using it then score `-inf` under table-based policies.
#[derive(Debug, Default)]
pub struct TableCache {
    tables: Vec<std::result::Result<IndexTable, String>>,
    /// Wall time spent building the tables.
    pub precompute: Duration,
}

impl TableCache {
    /// Builds tables covering lifetime `depth` for every cohort entry. Runs on
    /// the current rayon pool; the result does not depend on thread count.
    pub fn build(cohort: &Cohort, depth: usize, oracle: &dyn InfiniteHorizonOracle) -> Self {
        let start = Instant::now();
        let tables = cohort
            .entries
            .par_iter()
            .map(|e| precompute_index_table(&e.kernel, depth, oracle).map_err(|err| err.to_string()))
            .collect();
        Self { tables, precompute: start.elapsed() }
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn get(&self, kernel_id: usize) -> Result<&IndexTable> {
        match self.tables.get(kernel_id) {
            Some(Ok(t)) => Ok(t),
            Some(Err(msg)) => Err(Error::Contract(format!("no index table for kernel {kernel_id}: {msg}"))),
            None => Err(Error::Contract(format!("kernel {kernel_id} has no table entry"))),
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = (usize, &str)> {
        self.tables.iter().enumerate().filter_map(|(i, t)| t.as_ref().err().map(|m| (i, m.as_str())))
    }
}

/// Actions chosen for one step, as positions into the planned views.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepPlan {
    pub active: Vec<usize>,
    /// `(arm id, message)` for arms whose index could not be computed.
    pub failures: Vec<(usize, String)>,
}

/// Positions of the `k` largest scores, ties broken by lower id. NaN counts
/// as `-inf`.
pub fn select_top_k(ids: &[usize], scores: &[f64], k: usize) -> Vec<usize> {
    debug_assert_eq!(ids.len(), scores.len());
    let key = |i: usize| if scores[i].is_nan() { f64::NEG_INFINITY } else { scores[i] };
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| match key(b).total_cmp(&key(a)) {
        Ordering::Equal => ids[a].cmp(&ids[b]),
        o => o,
    });
    order.truncate(k);
    order
}

/// Computes per-arm indices for one policy.
pub struct Planner<'a> {
    pub policy: Policy,
    /// Discount of the exact finite-horizon index.
    pub beta: f64,
    /// Bisection tolerance of the exact index.
    pub tol: f64,
    tables: &'a TableCache,
    rng: ChaCha8Rng,
    scores: Vec<f64>,
    ids: Vec<usize>,
}

impl<'a> Planner<'a> {
    pub fn new(policy: Policy, beta: f64, tol: f64, tables: &'a TableCache, rng: ChaCha8Rng) -> Self {
        Self { policy, beta, tol, tables, rng, scores: Vec::new(), ids: Vec::new() }
    }

    /// The policy's priority of one arm. Random draws advance the planner's
    /// stream.
    pub fn index(&mut self, view: &ArmView) -> Result<f64> {
        let b = view.belief.b;
        match self.policy {
            Policy::NoIntervention => Ok(0.0),
            Policy::Random => Ok(self.rng.random()),
            Policy::Myopic => Ok(myopic_index(&view.kernel, b)),
            Policy::ThresholdWhittle | Policy::Linear | Policy::Logistic => {
                let table = self.tables.get(view.kernel_id)?;
                let w_inf = table.lookup(&view.belief).ok_or_else(|| {
                    Error::Contract(format!("belief node u={} beyond table depth {}", view.belief.u, table.depth()))
                })?;
                Ok(match self.policy {
                    Policy::ThresholdWhittle => w_inf,
                    Policy::Linear => linear_index(view.horizon, myopic_index(&view.kernel, b), w_inf),
                    _ => logistic_index(view.horizon, myopic_index(&view.kernel, b), w_inf),
                })
            }
            Policy::Exact => whittle_index_finite(&view.kernel, b, view.horizon, self.beta, self.tol),
        }
    }

    /// Picks at most `k` arms. Arms whose index fails score `-inf`.
    pub fn plan(&mut self, views: &[ArmView], k: usize) -> StepPlan {
        let mut plan = StepPlan::default();
        if self.policy == Policy::NoIntervention || k == 0 {
            return plan;
        }
        self.scores.clear();
        self.ids.clear();
        for v in views {
            let score = match self.index(v) {
                Ok(s) => s,
                Err(e) => {
                    plan.failures.push((v.id, e.to_string()));
                    f64::NEG_INFINITY
                }
            };
            self.scores.push(score);
            self.ids.push(v.id);
        }
        plan.active = select_top_k(&self.ids, &self.scores, k);
        plan
    }
}
