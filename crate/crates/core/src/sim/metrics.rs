use serde::Serialize;

use crate::cohort::Cohort;
use crate::error::{Error, Result};
use crate::sim::{run_trial, Policy, SimulationConfig, TableCache};

/// `100 * (r_alg - r_none) / (r_ref - r_none)`.
pub fn intervention_benefit(r_alg: f64, r_none: f64, r_ref: f64) -> Result<f64> {
    let denom = r_ref - r_none;
    if denom == 0.0 {
        return Err(Error::UndefinedBenefit(r_ref));
    }
    Ok(100.0 * (r_alg - r_none) / denom)
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean (sample standard deviation over `sqrt(n)`).
pub fn standard_error(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = (q * (sorted.len() - 1) as f64).round() as usize;
    sorted[rank]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyTiming {
    pub policy: Policy,
    /// Planned steps measured over all trials.
    pub periods: usize,
    pub mean_ns: f64,
    pub p50_ns: f64,
    pub p90_ns: f64,
    /// Exact-policy mean over this policy's mean, when exact was measured.
    pub speedup_vs_exact: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkReport {
    /// Table build time, paid once per cohort before any step is planned.
    pub precompute_ns: u64,
    pub timings: Vec<PolicyTiming>,
}

impl BenchmarkReport {
    pub fn get(&self, policy: Policy) -> Option<&PolicyTiming> {
        self.timings.iter().find(|t| t.policy == policy)
    }
}

/// Per-step planning time of each policy over `trials` sequential trials.
/// Only index computation and selection are timed.
pub fn benchmark(
    config: &SimulationConfig,
    cohort: &Cohort,
    tables: &TableCache,
    policies: &[Policy],
    trials: usize,
) -> Result<BenchmarkReport> {
    if trials == 0 {
        return Err(Error::Config("benchmark needs at least one trial".into()));
    }
    let mut timings = Vec::with_capacity(policies.len());
    for &policy in policies {
        let mut samples = Vec::new();
        for trial in 0..trials {
            let r = run_trial(config, cohort, tables, policy, trial)?;
            samples.extend(r.planning_ns.iter().map(|&ns| ns as f64));
        }
        let m = mean(&samples);
        samples.sort_by(f64::total_cmp);
        timings.push(PolicyTiming {
            policy,
            periods: samples.len(),
            mean_ns: m,
            p50_ns: percentile(&samples, 0.5),
            p90_ns: percentile(&samples, 0.9),
            speedup_vs_exact: None,
        });
    }
    if let Some(exact) = timings.iter().find(|t| t.policy == Policy::Exact).map(|t| t.mean_ns) {
        for t in &mut timings {
            t.speedup_vs_exact = Some(exact / t.mean_ns.max(1.0));
        }
    }
    Ok(BenchmarkReport { precompute_ns: tables.precompute.as_nanos() as u64, timings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benefit_examples() {
        assert_eq!(intervention_benefit(150.0, 100.0, 150.0).unwrap(), 100.0);
        assert_eq!(intervention_benefit(100.0, 100.0, 150.0).unwrap(), 0.0);
        assert_eq!(intervention_benefit(155.0, 100.0, 150.0).unwrap(), 110.0);
        assert!(matches!(intervention_benefit(120.0, 100.0, 100.0), Err(Error::UndefinedBenefit(_))));
    }

    #[test]
    fn standard_error_of_known_sample() {
        // Sample sd of 1..=5 is sqrt(2.5).
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(mean(&xs), 3.0);
        assert!((standard_error(&xs) - (2.5f64 / 5.0).sqrt()).abs() < 1e-15);
        assert_eq!(standard_error(&[1.0]), 0.0);
    }
}
