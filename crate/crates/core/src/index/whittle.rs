//! Whittle indices by bisection over the passive subsidy.

use crate::arm::TransitionKernel;
use crate::error::{Error, Result};
use crate::index::value::{check_inputs, ValueSolver};

pub const DEFAULT_TOL: f64 = 1e-4;

/// Discount of the infinite-horizon oracle. Under total reward (`beta = 1`)
/// finite-horizon indices of some beliefs oscillate with the parity of the
/// horizon and have no limit; a discount just below one restores
/// convergence.
pub const DEFAULT_BETA_INF: f64 = 0.99;

/// Bracket used by the subsidy search: starts at `[-initial, initial]` and
/// doubles up to `[-max, max]` until `V^p - V^a` changes sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub initial: f64,
    pub max: f64,
}

impl Default for Bracket {
    fn default() -> Self {
        Self { initial: 1.0, max: 8.0 }
    }
}

/// Finite-horizon Whittle index of belief `b` with `h` rewarded steps left.
///
/// Returns the midpoint of a bracket of width at most `tol` around the
/// indifference point. `h = 0` returns exactly `0.0`.
pub fn whittle_index_finite(kernel: &TransitionKernel, b: f64, h: usize, beta: f64, tol: f64) -> Result<f64> {
    check_inputs(b, beta)?;
    if !(tol > 0.0) {
        return Err(Error::MalformedInput(format!("tolerance {tol} must be positive")));
    }
    if h == 0 {
        return Ok(0.0);
    }
    let mut solver = ValueSolver::new(*kernel, b, h, beta);
    search(&mut solver, tol, Bracket::default())
}

/// Relative tolerance under which `V^p` and `V^a` count as equal. With
/// `beta = 1` the gap can be identically zero over a subsidy interval, and
/// only rounding noise decides its sign there.
pub const INDIFFERENCE_RTOL: f64 = 1e-11;

/// Bisects for the infimum subsidy at which passivity is (weakly) optimal.
pub(crate) fn search(solver: &mut ValueSolver, tol: f64, bracket: Bracket) -> Result<f64> {
    let mut passive_ok = |m: f64| {
        let p = solver.pair(m);
        let eps = INDIFFERENCE_RTOL * p.v_passive.abs().max(p.v_active.abs()).max(1.0);
        (p.gap() >= -eps, p.gap())
    };
    let mut half = bracket.initial;
    let (mut lo, mut hi);
    loop {
        lo = -half;
        hi = half;
        let (lo_ok, d_lo) = passive_ok(lo);
        let (hi_ok, d_hi) = passive_ok(hi);
        if !lo_ok && hi_ok {
            break;
        }
        half *= 2.0;
        if half > bracket.max {
            return Err(Error::NoCrossing { lo, hi, diff_lo: d_lo, diff_hi: d_hi });
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if passive_ok(mid).0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Infinite-horizon index with the horizon at which it was declared converged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Converged {
    pub value: f64,
    pub horizon: usize,
}

/// Source of the infinite-horizon (Threshold Whittle) index used as the
/// saturation value of the interpolated indices.
pub trait InfiniteHorizonOracle: Send + Sync {
    fn index(&self, kernel: &TransitionKernel, b: f64) -> Result<f64>;
}

/// Infinite-horizon index as the limit of finite-horizon indices at discount
/// `beta`: the horizon doubles from `start_horizon` until two consecutive
/// indices differ by less than `tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergedFiniteHorizon {
    pub beta: f64,
    pub start_horizon: usize,
    pub tol: f64,
    /// Bisection tolerance of each finite-horizon search.
    pub search_tol: f64,
    pub max_horizon: usize,
}

impl Default for ConvergedFiniteHorizon {
    fn default() -> Self {
        Self { beta: DEFAULT_BETA_INF, start_horizon: 16, tol: DEFAULT_TOL, search_tol: DEFAULT_TOL / 16.0, max_horizon: 4096 }
    }
}

impl ConvergedFiniteHorizon {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, search_tol: tol / 16.0, ..Self::default() }
    }

    pub fn converge(&self, kernel: &TransitionKernel, b: f64) -> Result<Converged> {
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::MalformedInput(format!("infinite-horizon discount {} outside (0,1]", self.beta)));
        }
        if self.start_horizon == 0 {
            return Err(Error::MalformedInput("start horizon must be at least 1".into()));
        }
        let mut h = self.start_horizon;
        let mut prev = whittle_index_finite(kernel, b, h, self.beta, self.search_tol)?;
        loop {
            let next_h = h * 2;
            let cur = whittle_index_finite(kernel, b, next_h, self.beta, self.search_tol)?;
            if (cur - prev).abs() < self.tol {
                return Ok(Converged { value: cur, horizon: next_h });
            }
            if next_h * 2 > self.max_horizon {
                return Err(Error::NonConvergence { horizon: next_h, previous: prev, last: cur });
            }
            prev = cur;
            h = next_h;
        }
    }
}

impl InfiniteHorizonOracle for ConvergedFiniteHorizon {
    fn index(&self, kernel: &TransitionKernel, b: f64) -> Result<f64> {
        self.converge(kernel, b).map(|c| c.value)
    }
}

/// Infinite-horizon index with a caller-chosen starting horizon.
pub fn whittle_index_infinite(
    kernel: &TransitionKernel,
    b: f64,
    beta_inf: f64,
    h_cap: usize,
    tol: f64,
) -> Result<Converged> {
    ConvergedFiniteHorizon { beta: beta_inf, start_horizon: h_cap, ..ConvergedFiniteHorizon::with_tol(tol) }
        .converge(kernel, b)
}
