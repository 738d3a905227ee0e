//! Streaming restless multi-armed bandits.
//!
//! Arms are two-state partially observable processes that arrive over time
//! and stay for a known lifetime. At each step a planner may pull at most `k`
//! present arms. This crate computes per-arm priority indices for that
//! problem (exact finite-horizon Whittle indices, the infinite-horizon index,
//! and cheap linear and logistic interpolations between them), simulates
//! arrival streams under those policies, and drives reproducible experiments.

pub mod arm;
pub mod cohort;
pub mod error;
pub mod experiment;
pub mod index;
pub mod rng;
pub mod sim;

pub use arm::{Action, Anchor, Arm, ArmView, BeliefState, State, TransitionKernel};
pub use cohort::{Cohort, CohortEntry, CohortSpec, Generator};
pub use error::{Error, Result};
pub use sim::{ArrivalKind, ArrivalProcess, LifetimeModel, Policy, SimulationConfig, SimulationResult};
