//! Interpolated finite-horizon indices.
//!
//! Both estimators pass through `W(0) = 0` and `W(1) = db` (the myopic
//! index) and saturate at the infinite-horizon index `w_inf`.

use serde::Serialize;

use crate::arm::{Action, TransitionKernel};

/// One-step expected belief gain of pulling over not pulling.
pub fn myopic_index(kernel: &TransitionKernel, b: f64) -> f64 {
    kernel.step(b, Action::Active) - kernel.step(b, Action::Passive)
}

/// `min(h * db, w_inf)`.
pub fn linear_index(h: usize, delta_b: f64, w_inf: f64) -> f64 {
    (h as f64 * delta_b).min(w_inf)
}

/// Constants of `W(h) = c1 / (1 + exp(-c2 h)) + c3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogisticFit {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl LogisticFit {
    /// Solves `W(0) = 0`, `W(1) = db`, `W(inf) = w_inf`. `None` when the
    /// system has no logistic solution (`w_inf <= 0` or `db >= w_inf`).
    pub fn solve(delta_b: f64, w_inf: f64) -> Option<Self> {
        if !(w_inf > 0.0) || !(delta_b < w_inf) || !(delta_b > -w_inf) {
            return None;
        }
        let c1 = 2.0 * w_inf;
        let x = delta_b / c1 + 0.5;
        let c2 = -(1.0 / x - 1.0).ln();
        c2.is_finite().then_some(Self { c1, c2, c3: -w_inf })
    }

    pub fn eval(&self, h: usize) -> f64 {
        self.c1 / (1.0 + (-self.c2 * h as f64).exp()) + self.c3
    }
}

/// Logistic estimate, falling back to [`linear_index`] where no fit exists.
pub fn logistic_index(h: usize, delta_b: f64, w_inf: f64) -> f64 {
    match LogisticFit::solve(delta_b, w_inf) {
        Some(fit) => fit.eval(h),
        None => linear_index(h, delta_b, w_inf),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Interpolation {
    Linear,
    Logistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexEstimate {
    pub delta_b: f64,
    pub w_inf: f64,
    pub h: usize,
    pub w_hat: f64,
    /// Present only for logistic estimates that did not fall back.
    pub logistic: Option<LogisticFit>,
}

impl IndexEstimate {
    pub fn new(mode: Interpolation, h: usize, delta_b: f64, w_inf: f64) -> Self {
        let (w_hat, logistic) = match mode {
            Interpolation::Linear => (linear_index(h, delta_b, w_inf), None),
            Interpolation::Logistic => match LogisticFit::solve(delta_b, w_inf) {
                Some(fit) => (fit.eval(h), Some(fit)),
                None => (linear_index(h, delta_b, w_inf), None),
            },
        };
        Self { delta_b, w_inf, h, w_hat, logistic }
    }
}
