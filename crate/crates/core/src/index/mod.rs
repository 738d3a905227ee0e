//! Index computations for single arms: value functions, exact finite-horizon
//! Whittle indices, the infinite-horizon oracle, myopic and interpolated
//! indices, and the structural checks behind them.

pub mod interp;
pub mod table;
pub mod theory;
pub mod value;
pub mod whittle;

pub use interp::{linear_index, logistic_index, myopic_index, IndexEstimate, Interpolation, LogisticFit};
pub use table::{precompute_index_table, IndexTable};
pub use theory::{
    augmented_mdp_reduction, classify_threshold, decay_probe, indexability_probe, AugmentedMdp, AugmentedState,
    Choice, CrossingReport, DecayProbe, ThresholdClass,
};
pub use value::{value_pair, ValuePair, ValueQuery, ValueSolver};
pub use whittle::{
    whittle_index_finite, whittle_index_infinite, Converged, ConvergedFiniteHorizon, InfiniteHorizonOracle,
    DEFAULT_BETA_INF, DEFAULT_TOL,
};
