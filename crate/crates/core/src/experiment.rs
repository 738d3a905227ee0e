//! Experiment drivers behind the command-line tool: a flat TOML config,
//! multi-trial simulation with normalized benefits, parameter sweeps,
//! planning-time benchmarks and index tables.
//!
//! Config schema (every key optional, defaults shown):
//!
//! ```toml
//! seed = 0
//! trials = 20
//! jobs = 1
//! horizon = 30             # steps T
//! budget = 6               # pulls per step k
//! # budget_fraction = 0.1  # overrides budget: k = round(f * rate * lifetime)
//! arrival = "deterministic" # synchronous | deterministic | poisson
//! rate = 12.0              # arrivals per step (population N for synchronous)
//! lifetime = 5             # omit to use per-arm cohort lifetimes
//! p_start = 0.0
//! beta = 1.0               # discount of the exact finite-horizon index
//! beta_inf = 0.99          # discount of the infinite-horizon index tables
//! index_tol = 1e-6
//! policies = ["no_intervention", "random", "myopic", "threshold_whittle", "linear", "logistic", "exact"]
//! timing = false           # add wall-clock fields to summaries
//! # out = "results"
//!
//! [cohort]
//! size = 50
//! generator = "uniform_constrained" # threshold_fraction | archetype_mix | from_file
//! forward = 0.5
//! non_recoverable = 0.0
//! self_correcting = 0.0
//! # path = "cohort.csv"
//!
//! [sweep]
//! variable = "lifetime"    # arrival_rate | lifetime | budget | threshold_fraction | nonrecoverable_fraction
//! values = [3, 5, 10]
//! product = 60             # keep rate * lifetime fixed when sweeping either
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arm::TransitionKernel;
use crate::cohort::{Cohort, CohortSpec, Generator};
use crate::error::{Error, Result};
use crate::index::{
    linear_index, logistic_index, myopic_index, whittle_index_finite, ConvergedFiniteHorizon, InfiniteHorizonOracle,
    DEFAULT_BETA_INF,
};
use crate::sim::{
    benchmark, intervention_benefit, mean, run_trial, standard_error, ArrivalKind, ArrivalProcess, LifetimeModel,
    Policy, SimulationConfig, SimulationResult, TableCache,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrivalName {
    Synchronous,
    Deterministic,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorName {
    UniformConstrained,
    ThresholdFraction,
    ArchetypeMix,
    FromFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CohortConfig {
    pub size: usize,
    pub generator: GeneratorName,
    pub forward: f64,
    pub non_recoverable: f64,
    pub self_correcting: f64,
    pub path: Option<PathBuf>,
}

impl Default for CohortConfig {
    fn default() -> Self {
        Self {
            size: 50,
            generator: GeneratorName::UniformConstrained,
            forward: 0.5,
            non_recoverable: 0.0,
            self_correcting: 0.0,
            path: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    ArrivalRate,
    Lifetime,
    Budget,
    ThresholdFraction,
    NonrecoverableFraction,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::ArrivalRate => "arrival_rate",
            SweepVariable::Lifetime => "lifetime",
            SweepVariable::Budget => "budget",
            SweepVariable::ThresholdFraction => "threshold_fraction",
            SweepVariable::NonrecoverableFraction => "nonrecoverable_fraction",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    /// Held fixed as `rate * lifetime` when sweeping arrival rate or lifetime.
    #[serde(default)]
    pub product: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: usize,
    pub jobs: usize,
    pub horizon: usize,
    pub budget: usize,
    pub budget_fraction: Option<f64>,
    pub arrival: ArrivalName,
    pub rate: f64,
    pub lifetime: Option<usize>,
    pub p_start: f64,
    pub beta: f64,
    pub beta_inf: f64,
    pub index_tol: f64,
    pub policies: Vec<Policy>,
    pub timing: bool,
    pub out: Option<PathBuf>,
    pub cohort: CohortConfig,
    pub sweep: Option<SweepConfig>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 20,
            jobs: 1,
            horizon: 30,
            budget: 6,
            budget_fraction: None,
            arrival: ArrivalName::Deterministic,
            rate: 12.0,
            lifetime: Some(5),
            p_start: 0.0,
            beta: 1.0,
            beta_inf: DEFAULT_BETA_INF,
            index_tol: 1e-6,
            policies: Policy::ALL.to_vec(),
            timing: false,
            out: None,
            cohort: CohortConfig::default(),
            sweep: None,
        }
    }
}

/// Lifetime written to generated cohort entries when none is configured.
const DEFAULT_COHORT_LIFETIME: usize = 5;

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Pulls per step, after applying `budget_fraction`.
    pub fn effective_budget(&self) -> usize {
        match (self.budget_fraction, self.lifetime) {
            (Some(f), Some(l)) => (f * self.rate * l as f64).round() as usize,
            _ => self.budget,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.jobs == 0 {
            return bad("jobs must be at least 1".into());
        }
        if self.policies.is_empty() {
            return bad("policy list is empty".into());
        }
        if !(self.rate.is_finite() && self.rate >= 0.0) {
            return bad(format!("rate {} must be finite and non-negative", self.rate));
        }
        if self.arrival != ArrivalName::Poisson && self.rate.fract() != 0.0 {
            return bad(format!("{:?} arrivals need an integer rate, got {}", self.arrival, self.rate));
        }
        if let Some(f) = self.budget_fraction {
            if !(f >= 0.0 && f.is_finite()) {
                return bad(format!("budget_fraction {f} must be non-negative"));
            }
            if self.lifetime.is_none() {
                return bad("budget_fraction needs a fixed lifetime".into());
            }
        }
        if !(self.beta_inf > 0.0 && self.beta_inf <= 1.0) {
            return bad(format!("beta_inf {} outside (0,1]", self.beta_inf));
        }
        if self.lifetime.is_none() && self.cohort.generator != GeneratorName::FromFile {
            return bad("lifetime may only be omitted with a cohort file".into());
        }
        if self.cohort.generator == GeneratorName::FromFile {
            match &self.cohort.path {
                None => return bad("cohort generator from_file needs cohort.path".into()),
                Some(p) if !p.exists() => return bad(format!("cohort file {} does not exist", p.display())),
                _ => {}
            }
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return bad("sweep grid is empty".into());
            }
            for &v in &s.values {
                self.at(s.variable, v, s.product)?.validate_point()?;
            }
        }
        self.validate_point()
    }

    fn validate_point(&self) -> Result<()> {
        self.cohort_spec().validate()?;
        self.simulation_config().validate()
    }

    pub fn cohort_spec(&self) -> CohortSpec {
        let c = &self.cohort;
        let generator = match c.generator {
            GeneratorName::UniformConstrained => Generator::UniformConstrained,
            GeneratorName::ThresholdFraction => Generator::ThresholdFraction { forward: c.forward },
            GeneratorName::ArchetypeMix => {
                Generator::ArchetypeMix { non_recoverable: c.non_recoverable, self_correcting: c.self_correcting }
            }
            GeneratorName::FromFile => Generator::FromFile { path: c.path.clone().unwrap_or_default() },
        };
        CohortSpec {
            size: c.size,
            generator,
            seed: self.seed,
            lifetime: self.lifetime.unwrap_or(DEFAULT_COHORT_LIFETIME),
        }
    }

    pub fn simulation_config(&self) -> SimulationConfig {
        let kind = match self.arrival {
            ArrivalName::Synchronous => ArrivalKind::Synchronous { n: self.rate as usize },
            ArrivalName::Deterministic => ArrivalKind::Deterministic { rate: self.rate as usize },
            ArrivalName::Poisson => ArrivalKind::Poisson { rate: self.rate },
        };
        let lifetime = self.lifetime.map_or(LifetimeModel::Cohort, LifetimeModel::Fixed);
        SimulationConfig {
            horizon: self.horizon,
            budget: self.effective_budget(),
            arrivals: ArrivalProcess { kind, lifetime },
            p_start: self.p_start,
            beta: self.beta,
            index_tol: self.index_tol,
            seed: self.seed,
        }
    }

    /// This config with one sweep variable set to `value`.
    pub fn at(&self, variable: SweepVariable, value: f64, product: Option<f64>) -> Result<Self> {
        let mut c = self.clone();
        c.sweep = None;
        let count = |v: f64, what: &str| {
            if v.is_finite() && v >= 0.0 {
                Ok(v.round())
            } else {
                Err(Error::Config(format!("{what} value {v} must be non-negative")))
            }
        };
        match variable {
            SweepVariable::ArrivalRate => {
                c.rate = value;
                if let Some(p) = product {
                    c.lifetime = Some(count(p / value, "lifetime")? as usize);
                }
            }
            SweepVariable::Lifetime => {
                c.lifetime = Some(count(value, "lifetime")? as usize);
                if let Some(p) = product {
                    c.rate = p / value;
                    if c.arrival != ArrivalName::Poisson {
                        c.rate = c.rate.round();
                    }
                }
            }
            SweepVariable::Budget => {
                c.budget = count(value, "budget")? as usize;
                c.budget_fraction = None;
            }
            SweepVariable::ThresholdFraction => {
                c.cohort.generator = GeneratorName::ThresholdFraction;
                c.cohort.forward = value;
            }
            SweepVariable::NonrecoverableFraction => {
                c.cohort.generator = GeneratorName::ArchetypeMix;
                c.cohort.non_recoverable = value;
            }
        }
        Ok(c)
    }

    /// Policies to run: the requested ones plus the do-nothing and exact
    /// references that benefits are normalized against, in canonical order.
    pub fn run_policies(&self) -> Vec<Policy> {
        Policy::ALL
            .into_iter()
            .filter(|p| self.policies.contains(p) || matches!(p, Policy::NoIntervention | Policy::Exact))
            .collect()
    }

    fn oracle(&self) -> ConvergedFiniteHorizon {
        ConvergedFiniteHorizon { beta: self.beta_inf, ..ConvergedFiniteHorizon::default() }
    }
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Debug, Clone)]
pub struct PolicyRuns {
    pub policy: Policy,
    pub trials: Vec<SimulationResult>,
    /// Per-trial benefit, normalized so the exact policy averages 100.
    pub benefits: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub config: ExperimentConfig,
    pub cohort: Cohort,
    pub runs: Vec<PolicyRuns>,
    pub precompute_ns: u64,
    pub table_failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicySummary {
    pub policy: Policy,
    pub trials: usize,
    pub mean_reward: f64,
    pub se_reward: f64,
    pub mean_benefit: f64,
    pub se_benefit: f64,
    pub index_failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_planning_ns: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub seed: u64,
    pub trials: usize,
    pub horizon: usize,
    pub budget: usize,
    pub arrival: ArrivalName,
    pub rate: f64,
    pub lifetime: Option<usize>,
    pub cohort_size: usize,
    pub table_failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precompute_ms: Option<f64>,
    pub policies: Vec<PolicySummary>,
}

impl ExperimentOutcome {
    pub fn get(&self, policy: Policy) -> Option<&PolicyRuns> {
        self.runs.iter().find(|r| r.policy == policy)
    }

    /// Aggregates; wall-clock fields only when `timing` is set, so default
    /// summaries are reproducible byte for byte.
    pub fn summary(&self, timing: bool) -> Summary {
        let c = &self.config;
        let policies = self
            .runs
            .iter()
            .map(|r| {
                let rewards: Vec<f64> = r.trials.iter().map(|t| t.total as f64).collect();
                PolicySummary {
                    policy: r.policy,
                    trials: r.trials.len(),
                    mean_reward: mean(&rewards),
                    se_reward: standard_error(&rewards),
                    mean_benefit: mean(&r.benefits),
                    se_benefit: standard_error(&r.benefits),
                    index_failures: r.trials.iter().map(|t| t.failures).sum(),
                    mean_planning_ns: timing.then(|| {
                        mean(&r.trials.iter().flat_map(|t| t.planning_ns.iter().map(|&n| n as f64)).collect::<Vec<_>>())
                    }),
                }
            })
            .collect();
        Summary {
            seed: c.seed,
            trials: c.trials,
            horizon: c.horizon,
            budget: c.effective_budget(),
            arrival: c.arrival,
            rate: c.rate,
            lifetime: c.lifetime,
            cohort_size: self.cohort.len(),
            table_failures: self.table_failures,
            precompute_ms: timing.then(|| self.precompute_ns as f64 / 1e6),
            policies,
        }
    }

    pub fn write_trials_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["policy", "trial", "seed", "total_reward", "benefit", "mean_population", "index_failures"])?;
        for r in &self.runs {
            for (t, b) in r.trials.iter().zip(&r.benefits) {
                w.write_record([
                    r.policy.name().to_string(),
                    t.trial.to_string(),
                    t.seed.to_string(),
                    t.total.to_string(),
                    b.to_string(),
                    t.mean_population().to_string(),
                    t.failures.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `summary.json` and `trials.csv` into `dir`.
    pub fn write(&self, dir: &Path, timing: bool) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut json = serde_json::to_string_pretty(&self.summary(timing))?;
        json.push('\n');
        fs::write(dir.join("summary.json"), json)?;
        self.write_trials_csv(fs::File::create(dir.join("trials.csv"))?)
    }
}

/// Runs every policy on shared worlds and normalizes benefits.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let cohort = config.cohort_spec().generate()?;
    run_with_cohort(config, cohort)
}

/// Like [`run_experiment`] with a ready cohort; skips cohort validation.
pub fn run_with_cohort(config: &ExperimentConfig, cohort: Cohort) -> Result<ExperimentOutcome> {
    let sim = config.simulation_config();
    sim.validate()?;
    let policies = config.run_policies();
    with_pool(config.jobs, || {
        let tables = if policies.iter().any(|p| p.needs_tables()) {
            TableCache::build(&cohort, sim.max_lifetime(&cohort), &config.oracle())
        } else {
            TableCache::default()
        };
        let mut runs = Vec::with_capacity(policies.len());
        for &policy in &policies {
            let trials = (0..config.trials)
                .into_par_iter()
                .map(|t| run_trial(&sim, &cohort, &tables, policy, t))
                .collect::<Result<Vec<_>>>()?;
            runs.push(PolicyRuns { policy, trials, benefits: Vec::new() });
        }
        normalize(&mut runs)?;
        Ok(ExperimentOutcome {
            config: config.clone(),
            precompute_ns: tables.precompute.as_nanos() as u64,
            table_failures: tables.failures().count(),
            cohort: cohort.clone(),
            runs,
        })
    })?
}

/// Trial `i` of policy `p` scores `100 (R_p,i - R_none,i) / D`, with `D` the
/// mean over trials of `R_exact - R_none`. The exact policy then averages
/// exactly 100 and do-nothing exactly 0.
fn normalize(runs: &mut [PolicyRuns]) -> Result<()> {
    let totals = |p: Policy| -> Vec<f64> {
        runs.iter().find(|r| r.policy == p).map(|r| r.trials.iter().map(|t| t.total as f64).collect()).unwrap_or_default()
    };
    let none = totals(Policy::NoIntervention);
    let exact = totals(Policy::Exact);
    let gain = mean(&exact.iter().zip(&none).map(|(e, n)| e - n).collect::<Vec<_>>());
    for r in runs.iter_mut() {
        r.benefits = r
            .trials
            .iter()
            .zip(&none)
            .map(|(t, &n)| intervention_benefit(t.total as f64, n, n + gain))
            .collect::<Result<_>>()?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub variable: &'static str,
    pub value: f64,
    pub policy: Policy,
    pub trial: usize,
    pub seed: u64,
    pub total_reward: usize,
    pub benefit: f64,
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub outcome: std::result::Result<Summary, String>,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub points: Vec<SweepPoint>,
}

impl SweepOutcome {
    pub fn failed_points(&self) -> usize {
        self.points.iter().filter(|p| p.outcome.is_err()).count()
    }

    /// Long format: one row per sweep value, policy and trial.
    pub fn write_rows_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(r)?;
        }
        if self.rows.is_empty() {
            w.write_record(["variable", "value", "policy", "trial", "seed", "total_reward", "benefit"])?;
        }
        w.flush()?;
        Ok(())
    }

    /// One row per sweep value and policy; failed points carry the error.
    pub fn write_summary_csv<W: Write>(&self, variable: SweepVariable, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["variable", "value", "policy", "mean_benefit", "se_benefit", "mean_reward", "error"])?;
        for p in &self.points {
            match &p.outcome {
                Ok(s) => {
                    for ps in &s.policies {
                        w.write_record([
                            variable.name().to_string(),
                            p.value.to_string(),
                            ps.policy.name().to_string(),
                            ps.mean_benefit.to_string(),
                            ps.se_benefit.to_string(),
                            ps.mean_reward.to_string(),
                            String::new(),
                        ])?;
                    }
                }
                Err(e) => w.write_record([variable.name(), &p.value.to_string(), "", "", "", "", e])?,
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `sweep.csv` and `sweep_summary.csv` into `dir`.
    pub fn write(&self, dir: &Path, variable: SweepVariable) -> Result<()> {
        fs::create_dir_all(dir)?;
        self.write_rows_csv(fs::File::create(dir.join("sweep.csv"))?)?;
        self.write_summary_csv(variable, fs::File::create(dir.join("sweep_summary.csv"))?)
    }
}

/// One experiment per grid value. A failing grid point is recorded and the
/// sweep continues.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepOutcome> {
    let sweep = config.sweep.as_ref().ok_or_else(|| Error::Config("no [sweep] section in config".into()))?;
    config.validate()?;
    let mut out = SweepOutcome::default();
    for &value in &sweep.values {
        let point = config.at(sweep.variable, value, sweep.product)?;
        match run_experiment(&point) {
            Ok(o) => {
                for r in &o.runs {
                    for (t, &benefit) in r.trials.iter().zip(&r.benefits) {
                        out.rows.push(SweepRow {
                            variable: sweep.variable.name(),
                            value,
                            policy: r.policy,
                            trial: t.trial,
                            seed: t.seed,
                            total_reward: t.total,
                            benefit,
                        });
                    }
                }
                out.points.push(SweepPoint { value, outcome: Ok(o.summary(false)) });
            }
            Err(e) => out.points.push(SweepPoint { value, outcome: Err(e.to_string()) }),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub rate: f64,
    pub lifetime: usize,
    pub budget: usize,
    pub policy: Policy,
    pub periods: usize,
    pub mean_ns: f64,
    pub p50_ns: f64,
    pub p90_ns: f64,
    pub speedup_vs_exact: Option<f64>,
    pub precompute_ns: u64,
}

/// Planning-time benchmark at the configured point, or at every point of the
/// `[sweep]` grid. Trials run sequentially so timings are not contended.
pub fn run_bench(config: &ExperimentConfig) -> Result<Vec<BenchRow>> {
    config.validate()?;
    let points = match &config.sweep {
        Some(s) => s.values.iter().map(|&v| config.at(s.variable, v, s.product)).collect::<Result<Vec<_>>>()?,
        None => vec![config.clone()],
    };
    let mut rows = Vec::new();
    for point in points {
        let cohort = point.cohort_spec().generate()?;
        let sim = point.simulation_config();
        let policies = point.policies.clone();
        let tables = if policies.iter().any(|p| p.needs_tables()) {
            TableCache::build(&cohort, sim.max_lifetime(&cohort), &point.oracle())
        } else {
            TableCache::default()
        };
        let report = benchmark(&sim, &cohort, &tables, &policies, point.trials)?;
        for t in report.timings {
            rows.push(BenchRow {
                rate: point.rate,
                lifetime: sim.max_lifetime(&cohort),
                budget: sim.budget,
                policy: t.policy,
                periods: t.periods,
                mean_ns: t.mean_ns,
                p50_ns: t.p50_ns,
                p90_ns: t.p90_ns,
                speedup_vs_exact: t.speedup_vs_exact,
                precompute_ns: report.precompute_ns,
            });
        }
    }
    Ok(rows)
}

pub fn write_bench_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexRow {
    pub belief: f64,
    pub h: usize,
    pub exact: f64,
    pub linear: f64,
    pub logistic: f64,
    /// One-step gain, independent of `h`.
    pub myopic: f64,
    pub threshold_whittle: f64,
}

/// Indices of each estimator for every belief and `h = 0..=h_max`.
pub fn index_rows(
    kernel: &TransitionKernel,
    beliefs: &[f64],
    h_max: usize,
    beta: f64,
    beta_inf: f64,
    tol: f64,
) -> Result<Vec<IndexRow>> {
    kernel.ensure_valid()?;
    let oracle = ConvergedFiniteHorizon { beta: beta_inf, ..ConvergedFiniteHorizon::with_tol(tol.max(1e-9)) };
    let mut rows = Vec::with_capacity(beliefs.len() * (h_max + 1));
    for &b in beliefs {
        let w_inf = oracle.index(kernel, b)?;
        let db = myopic_index(kernel, b);
        for h in 0..=h_max {
            rows.push(IndexRow {
                belief: b,
                h,
                exact: whittle_index_finite(kernel, b, h, beta, tol)?,
                linear: linear_index(h, db, w_inf),
                logistic: logistic_index(h, db, w_inf),
                myopic: db,
                threshold_whittle: w_inf,
            });
        }
    }
    Ok(rows)
}

pub fn write_index_csv<W: Write>(rows: &[IndexRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
