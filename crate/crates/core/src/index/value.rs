//! Finite-horizon value functions of a single arm under a passive subsidy.
//!
//! With residual horizon `h` (rewarded steps left after the current one):
//!
//! ```text
//! V_{m,0}(b)   = b + max(m, 0)
//! V^p_{m,h}(b) = b + m + beta * V_{m,h-1}(b P11p + (1-b) P01p)
//! V^a_{m,h}(b) = b + beta * (b V_{m,h-1}(P11a) + (1-b) V_{m,h-1}(P01a))
//! ```
//!
//! Only three passive chains are reachable from a root belief: the root's own
//! chain and the two chains anchored on the active rows. The solver sweeps
//! the residual horizon bottom-up over `(chain, u)` nodes, so one evaluation
//! costs `O(h^2)` and allocates nothing after construction.

use serde::Serialize;

use crate::arm::{Action, TransitionKernel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct ValueQuery {
    pub kernel: TransitionKernel,
    pub belief: f64,
    pub subsidy: f64,
    pub horizon: usize,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValuePair {
    pub v_passive: f64,
    pub v_active: f64,
}

impl ValuePair {
    /// `V^p - V^a`.
    pub fn gap(&self) -> f64 {
        self.v_passive - self.v_active
    }

    pub fn value(&self) -> f64 {
        self.v_passive.max(self.v_active)
    }

    /// Optimal action, or `None` when the two values agree within `eps`.
    pub fn best_action(&self, eps: f64) -> Option<Action> {
        let g = self.gap();
        if g.abs() <= eps {
            None
        } else if g > 0.0 {
            Some(Action::Passive)
        } else {
            Some(Action::Active)
        }
    }
}

pub fn value_pair(q: &ValueQuery) -> Result<ValuePair> {
    check_inputs(q.belief, q.beta)?;
    if !q.subsidy.is_finite() {
        return Err(Error::MalformedInput(format!("subsidy {} is not finite", q.subsidy)));
    }
    Ok(ValueSolver::new(q.kernel, q.belief, q.horizon, q.beta).pair(q.subsidy))
}

pub(crate) fn check_inputs(belief: f64, beta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&belief) {
        return Err(Error::MalformedInput(format!("belief {belief} outside [0,1]")));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::MalformedInput(format!("discount {beta} outside [0,1]")));
    }
    Ok(())
}

/// Reusable backward-induction solver for one `(kernel, root belief, horizon)`.
#[derive(Debug, Clone)]
pub struct ValueSolver {
    beta: f64,
    horizon: usize,
    // Belief values along the three reachable chains.
    root_b: Vec<f64>,
    act_b: [Vec<f64>; 2],
    // Scratch rows holding V at the current residual level.
    root_v: Vec<f64>,
    act_v: [Vec<f64>; 2],
}

impl ValueSolver {
    pub fn new(kernel: TransitionKernel, belief: f64, horizon: usize, beta: f64) -> Self {
        let walk = |start: f64, n: usize| {
            let mut v = Vec::with_capacity(n);
            let mut b = start;
            for _ in 0..n {
                v.push(b);
                b = kernel.passive_step(b);
            }
            v
        };
        let root_b = walk(belief, horizon + 1);
        let act_b = [walk(kernel.p01_a, horizon), walk(kernel.p11_a, horizon)];
        Self {
            beta,
            horizon,
            root_v: vec![0.0; root_b.len()],
            act_v: [vec![0.0; horizon], vec![0.0; horizon]],
            root_b,
            act_b,
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn pair(&mut self, m: f64) -> ValuePair {
        let h = self.horizon;
        let beta = self.beta;
        if h == 0 {
            let b = self.root_b[0];
            return ValuePair { v_passive: b + m, v_active: b };
        }
        let terminal = m.max(0.0);
        for (v, b) in self.root_v.iter_mut().zip(&self.root_b) {
            *v = b + terminal;
        }
        for s in 0..2 {
            for (v, b) in self.act_v[s].iter_mut().zip(&self.act_b[s]) {
                *v = b + terminal;
            }
        }
        // Level r holds root nodes u in 0..=h-r and active nodes u in 0..h-r.
        for r in 1..h {
            let pulled_bad = self.act_v[0][0];
            let pulled_good = self.act_v[1][0];
            let bellman = |b: f64, next_passive: f64| {
                let vp = b + m + beta * next_passive;
                let va = b + beta * (b * pulled_good + (1.0 - b) * pulled_bad);
                vp.max(va)
            };
            for u in 0..=(h - r) {
                self.root_v[u] = bellman(self.root_b[u], self.root_v[u + 1]);
            }
            for s in 0..2 {
                for u in 0..(h - r) {
                    self.act_v[s][u] = bellman(self.act_b[s][u], self.act_v[s][u + 1]);
                }
            }
        }
        let b = self.root_b[0];
        let v_passive = b + m + beta * self.root_v[1];
        let v_active = b + beta * (b * self.act_v[1][0] + (1.0 - b) * self.act_v[0][0]);
        ValuePair { v_passive, v_active }
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    const K: TransitionKernel = TransitionKernel::reference();

    fn q(b: f64, m: f64, h: usize, beta: f64) -> ValueQuery {
        ValueQuery { kernel: K, belief: b, subsidy: m, horizon: h, beta }
    }

    #[test]
    fn base_case() {
        let p = value_pair(&q(0.3, 0.2, 0, 1.0)).unwrap();
        assert!((p.v_passive - 0.5).abs() < 1e-15);
        assert!((p.v_active - 0.3).abs() < 1e-15);
        assert!((p.gap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn one_step_gap_at_zero_subsidy_is_myopic_gain() {
        // Closed form: V^a - V^p = beta * db - m with db = 0.1*0.14 + 0.9*0.40.
        let p = value_pair(&q(0.1, 0.0, 1, 1.0)).unwrap();
        assert!((p.v_active - p.v_passive - 0.374).abs() < 1e-12);
    }

    #[test]
    fn agrees_with_naive_recursion() {
        let kernels = [K, TransitionKernel::new(0.2, 0.7, 0.5, 0.9), TransitionKernel::new(0.01, 0.3, 0.02, 0.95)];
        for k in kernels {
            for &b in &[0.0, 0.1, 0.5, 0.93, 1.0] {
                for &m in &[-0.3, 0.0, 0.15, 0.4, 1.2] {
                    for h in 0..7 {
                        for &beta in &[0.9, 1.0] {
                            let fast = ValueSolver::new(k, b, h, beta).pair(m);
                            let (vp, va) = oracle::pair(&k, b, m, h, beta);
                            assert!((fast.v_passive - vp).abs() < 1e-12, "{k:?} b={b} m={m} h={h}");
                            assert!((fast.v_active - va).abs() < 1e-12, "{k:?} b={b} m={m} h={h}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn gap_non_decreasing_in_subsidy() {
        for h in 0..12 {
            let mut s = ValueSolver::new(K, 0.1, h, 1.0);
            let mut last = f64::NEG_INFINITY;
            for i in 0..200 {
                let m = -1.0 + i as f64 * 0.01;
                let g = s.pair(m).gap();
                assert!(g >= last - 1e-12, "h={h} m={m}");
                last = g;
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(value_pair(&q(1.2, 0.0, 1, 1.0)).is_err());
        assert!(value_pair(&q(0.2, 0.0, 1, 1.5)).is_err());
        assert!(value_pair(&q(0.2, f64::NAN, 1, 1.0)).is_err());
    }
}
