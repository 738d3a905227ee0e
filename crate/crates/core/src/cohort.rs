//! Cohorts of arm kernels: constrained random sampling, threshold-class
//! stratified cohorts, patient archetypes, and the cohort CSV format.
//!
//! CSV layout (UTF-8, LF, `.` decimal separator):
//!
//! ```text
//! id,p01_p,p11_p,p01_a,p11_a,lifetime
//! 7,0.06,0.46,0.46,0.6,5
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arm::TransitionKernel;
use crate::error::{Error, Result};
use crate::index::theory::{classify_threshold, ThresholdClass};

pub const CSV_HEADER: [&str; 6] = ["id", "p01_p", "p11_p", "p01_a", "p11_a", "lifetime"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CohortEntry {
    pub id: usize,
    pub kernel: TransitionKernel,
    pub lifetime: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Cohort {
    pub entries: Vec<CohortEntry>,
}

impl Cohort {
    pub fn from_kernels(kernels: impl IntoIterator<Item = TransitionKernel>, lifetime: usize) -> Self {
        let entries =
            kernels.into_iter().enumerate().map(|(id, kernel)| CohortEntry { id, kernel, lifetime }).collect();
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn kernels(&self) -> impl Iterator<Item = &TransitionKernel> {
        self.entries.iter().map(|e| &e.kernel)
    }
}

/// Rejection sampler over uniform `[0,1)^4` that keeps acceptance counts.
#[derive(Debug, Clone, Copy, Default)]
pub struct KernelSampler {
    pub draws: u64,
    pub accepted: u64,
}

impl KernelSampler {
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> TransitionKernel {
        loop {
            self.draws += 1;
            let k = TransitionKernel::new(rng.random(), rng.random(), rng.random(), rng.random());
            if k.validate().map(|r| r.is_ok()).unwrap_or(false) {
                self.accepted += 1;
                return k;
            }
        }
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.draws == 0 {
            0.0
        } else {
            self.accepted as f64 / self.draws as f64
        }
    }
}

/// A uniformly drawn kernel satisfying every natural constraint.
pub fn sample_kernel<R: Rng + ?Sized>(rng: &mut R) -> TransitionKernel {
    KernelSampler::default().sample(rng)
}

/// Settings of the threshold classifier used to stratify cohorts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub horizon: usize,
    pub beta: f64,
    pub chain_len: usize,
    pub resolution: usize,
    /// Sampling attempts allowed per requested kernel.
    pub attempts_per_kernel: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self { horizon: 20, beta: 1.0, chain_len: 8, resolution: 40, attempts_per_kernel: 1000 }
    }
}

/// `size` kernels of which exactly `round(f * size)` classify as forward
/// threshold and the rest as reverse or mixed, in shuffled order.
pub fn sample_threshold_fraction_cohort<R: Rng + ?Sized>(
    size: usize,
    f: f64,
    cfg: &ClassifierConfig,
    rng: &mut R,
) -> Result<Vec<TransitionKernel>> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::MalformedInput(format!("forward fraction {f} outside [0,1]")));
    }
    let want_forward = (f * size as f64).round() as usize;
    let want_other = size - want_forward;
    let mut forward = Vec::with_capacity(want_forward);
    let mut other = Vec::with_capacity(want_other);
    let budget = cfg.attempts_per_kernel * size.max(1);
    let mut attempts = 0;
    while forward.len() < want_forward || other.len() < want_other {
        if attempts == budget {
            let class = if forward.len() < want_forward { "forward-threshold" } else { "non-forward-threshold" };
            return Err(Error::GenerationExhausted { class: class.into(), attempts });
        }
        attempts += 1;
        let k = sample_kernel(rng);
        let class = classify_threshold(&k, cfg.horizon, cfg.beta, cfg.chain_len, cfg.resolution)?;
        if class == ThresholdClass::Forward {
            if forward.len() < want_forward {
                forward.push(k);
            }
        } else if other.len() < want_other {
            other.push(k);
        }
    }
    forward.append(&mut other);
    forward.shuffle(rng);
    Ok(forward)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Archetype {
    /// Drifts back to the good state on its own.
    SelfCorrecting,
    /// Stays in the bad state with high probability, even when pulled.
    NonRecoverable,
}

/// Samples an archetype kernel. Ranges are fixed constants of this crate:
///
/// * non-recoverable: `p01_p < 0.05`, `p01_p < p01_a <= 0.1`,
///   `p11_p` in `[0.3, 0.6]`, `p11_a` in `(p11_p, 0.9]`
/// * self-correcting: `p01_p` in `[0.6, 0.8]`, `p11_p` in `(p01_p, 0.95]`,
///   `p01_a` in `(p01_p, 0.9]`, `p11_a` in `(max(p11_p, p01_a), 1]`
pub fn make_archetype<R: Rng + ?Sized>(kind: Archetype, rng: &mut R) -> TransitionKernel {
    loop {
        let k = match kind {
            Archetype::NonRecoverable => {
                let p01_p: f64 = rng.random_range(0.0..0.05);
                let p01_a = rng.random_range(p01_p..=0.1);
                let p11_p = rng.random_range(0.3..=0.6);
                let p11_a = rng.random_range(p11_p..=0.9);
                TransitionKernel::new(p01_p, p11_p, p01_a, p11_a)
            }
            Archetype::SelfCorrecting => {
                let p01_p: f64 = rng.random_range(0.6..=0.8);
                let p11_p = rng.random_range(p01_p..=0.95);
                let p01_a = rng.random_range(p01_p..=0.9);
                let p11_a = rng.random_range(p11_p.max(p01_a)..=1.0);
                TransitionKernel::new(p01_p, p11_p, p01_a, p11_a)
            }
        };
        // Range endpoints can tie; redraw until every inequality is strict.
        if k.validate().map(|r| r.is_ok()).unwrap_or(false) {
            return k;
        }
    }
}

/// How a cohort is generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    UniformConstrained,
    ThresholdFraction { forward: f64 },
    /// Given fractions of archetypes; the remainder is uniform-constrained.
    ArchetypeMix { non_recoverable: f64, self_correcting: f64 },
    FromFile { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortSpec {
    pub size: usize,
    pub generator: Generator,
    pub seed: u64,
    /// Lifetime written to generated entries.
    pub lifetime: usize,
}

impl CohortSpec {
    pub fn validate(&self) -> Result<()> {
        if self.size == 0 && !matches!(self.generator, Generator::FromFile { .. }) {
            return Err(Error::Config("cohort size must be at least 1".into()));
        }
        match &self.generator {
            Generator::ThresholdFraction { forward } if !(0.0..=1.0).contains(forward) => {
                Err(Error::Config(format!("forward fraction {forward} outside [0,1]")))
            }
            Generator::ArchetypeMix { non_recoverable: a, self_correcting: b }
                if !(0.0..=1.0).contains(a) || !(0.0..=1.0).contains(b) || a + b > 1.0 + 1e-12 =>
            {
                Err(Error::Config(format!("archetype fractions {a} + {b} must lie in [0,1] and sum to at most 1")))
            }
            _ => Ok(()),
        }
    }

    pub fn generate(&self) -> Result<Cohort> {
        self.validate()?;
        let mut rng = crate::rng::stream(self.seed, &[crate::rng::COHORT]);
        let kernels = match &self.generator {
            Generator::UniformConstrained => (0..self.size).map(|_| sample_kernel(&mut rng)).collect(),
            Generator::ThresholdFraction { forward } => {
                sample_threshold_fraction_cohort(self.size, *forward, &ClassifierConfig::default(), &mut rng)?
            }
            Generator::ArchetypeMix { non_recoverable, self_correcting } => {
                let n_nr = (non_recoverable * self.size as f64).round() as usize;
                let n_sc = ((self_correcting * self.size as f64).round() as usize).min(self.size - n_nr);
                let mut ks: Vec<TransitionKernel> = (0..self.size)
                    .map(|i| {
                        if i < n_nr {
                            make_archetype(Archetype::NonRecoverable, &mut rng)
                        } else if i < n_nr + n_sc {
                            make_archetype(Archetype::SelfCorrecting, &mut rng)
                        } else {
                            sample_kernel(&mut rng)
                        }
                    })
                    .collect();
                ks.shuffle(&mut rng);
                ks
            }
            Generator::FromFile { path } => return load_cohort_csv(path),
        };
        Ok(Cohort::from_kernels(kernels, self.lifetime))
    }
}

pub fn save_cohort_csv(cohort: &Cohort, path: impl AsRef<Path>) -> Result<()> {
    let mut out = Vec::new();
    writeln!(out, "{}", CSV_HEADER.join(","))?;
    for e in &cohort.entries {
        let k = &e.kernel;
        // `{}` on f64 prints the shortest representation that parses back
        // to the same bits.
        writeln!(out, "{},{},{},{},{},{}", e.id, k.p01_p, k.p11_p, k.p01_a, k.p11_a, e.lifetime)?;
    }
    fs::write(path, out)?;
    Ok(())
}

/// Every row problem in a cohort file, for reporting.
#[derive(Debug, Default)]
pub struct CsvReport {
    pub rows: usize,
    pub cohort: Cohort,
    pub errors: Vec<Error>,
}

impl CsvReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty() && self.rows > 0
    }
}

/// Reads a cohort file without stopping at the first bad row.
pub fn check_cohort_csv(path: impl AsRef<Path>) -> Result<CsvReport> {
    let text = fs::read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| parse_err(1, e))?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) && !header.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`, got `{}`", CSV_HEADER.join(","), header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut report = CsvReport::default();
    for (i, record) in reader.records().enumerate() {
        report.rows += 1;
        let line = 2 + i as u64;
        match record.map_err(|e| parse_err(line, e)).and_then(|r| parse_row(&r, line)) {
            Ok(entry) => report.cohort.entries.push(entry),
            Err(e) => report.errors.push(e),
        }
    }
    Ok(report)
}

/// Reads a cohort file, failing on the first malformed or invalid row.
pub fn load_cohort_csv(path: impl AsRef<Path>) -> Result<Cohort> {
    let mut report = check_cohort_csv(path)?;
    if !report.errors.is_empty() {
        return Err(report.errors.remove(0));
    }
    if report.rows == 0 {
        return Err(Error::MalformedInput("no arms in cohort file".into()));
    }
    Ok(report.cohort)
}

fn parse_err(line: u64, e: csv::Error) -> Error {
    Error::Parse { line, message: e.to_string() }
}

fn parse_row(r: &csv::StringRecord, line: u64) -> Result<CohortEntry> {
    if r.len() != CSV_HEADER.len() {
        return Err(Error::Parse { line, message: format!("expected {} fields, got {}", CSV_HEADER.len(), r.len()) });
    }
    let field = |i: usize| r.get(i).unwrap().trim();
    let int = |i: usize| {
        field(i).parse::<usize>().map_err(|e| Error::Parse { line, message: format!("{}: {e}", CSV_HEADER[i]) })
    };
    let prob = |i: usize| {
        field(i).parse::<f64>().map_err(|e| Error::Parse { line, message: format!("{}: {e}", CSV_HEADER[i]) })
    };
    let kernel = TransitionKernel::new(prob(1)?, prob(2)?, prob(3)?, prob(4)?);
    let report = kernel.validate().map_err(|e| Error::Parse { line, message: e.to_string() })?;
    if !report.is_ok() {
        return Err(Error::RowInvalid { line, violations: report.violations });
    }
    let lifetime = int(5)?;
    if lifetime == 0 {
        return Err(Error::Parse { line, message: "lifetime must be positive".into() });
    }
    Ok(CohortEntry { id: int(0)?, kernel, lifetime })
}
