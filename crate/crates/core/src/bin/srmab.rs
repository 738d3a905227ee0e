//! `srmab`: command-line front end. Exit codes: 0 success, 1 invalid input,
//! 2 runtime failure.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use streaming_rmab::cohort::check_cohort_csv;
use streaming_rmab::experiment::{
    index_rows, run_bench, run_experiment, run_sweep, write_bench_csv, write_index_csv, ExperimentConfig,
};
use streaming_rmab::index::DEFAULT_BETA_INF;
use streaming_rmab::{Error, Policy, Result, TransitionKernel};

#[derive(Parser)]
#[command(name = "srmab", version, about = "Index policies and simulations for streaming restless bandits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// TOML experiment config; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Worker threads for trials.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory (simulate, sweep) or file (index, bench).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Discount of the exact finite-horizon index.
    #[arg(long)]
    beta: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.trials {
            c.trials = v;
        }
        if let Some(v) = self.jobs {
            c.jobs = v;
        }
        if let Some(v) = &self.out {
            c.out = Some(v.clone());
        }
        if let Some(v) = self.beta {
            c.beta = v;
        }
        Ok(c)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a cohort CSV (and/or a config file).
    Validate {
        cohort: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Index table per belief and horizon for one kernel, as CSV.
    Index {
        /// p01_p,p11_p,p01_a,p11_a (defaults to 0.06,0.46,0.46,0.60).
        #[arg(long, value_delimiter = ',', num_args = 4)]
        kernel: Option<Vec<f64>>,
        /// Beliefs to tabulate; repeatable.
        #[arg(long, default_values_t = [0.0, 1.0])]
        belief: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        h_max: usize,
        #[arg(long, default_value_t = DEFAULT_BETA_INF)]
        beta_inf: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Run all configured policies; writes summary.json and trials.csv.
    Simulate {
        /// Restrict to these policies (references are always run).
        #[arg(long, value_delimiter = ',')]
        policy: Vec<Policy>,
        /// Include wall-clock fields in the summary.
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run the config's [sweep] grid; writes sweep.csv and sweep_summary.csv.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Per-step planning time of each policy, as CSV.
    Bench {
        #[arg(long, value_delimiter = ',')]
        policy: Vec<Policy>,
        #[command(flatten)]
        common: Common,
    },
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { cohort, common } => {
            if cohort.is_none() && common.config.is_none() {
                return Err(Error::Config("nothing to validate: pass a cohort file or --config".into()));
            }
            if common.config.is_some() {
                common.load()?.validate()?;
                println!("config ok");
            }
            if let Some(path) = cohort {
                let report = check_cohort_csv(&path)?;
                for e in &report.errors {
                    println!("{e}");
                }
                if report.rows == 0 {
                    return Err(Error::MalformedInput("no arms in cohort file".into()));
                }
                if !report.errors.is_empty() {
                    return Err(Error::MalformedInput(format!("{} of {} rows invalid", report.errors.len(), report.rows)));
                }
                println!("ok: {} arms", report.rows);
            }
            Ok(())
        }
        Command::Index { kernel, belief, h_max, beta_inf, tol, common } => {
            let kernel = match kernel.as_deref() {
                Some(&[a, b, c, d]) => TransitionKernel::new(a, b, c, d),
                Some(_) => return Err(Error::MalformedInput("--kernel takes four values".into())),
                None => TransitionKernel::reference(),
            };
            let beta = common.beta.unwrap_or(1.0);
            let rows = index_rows(&kernel, &belief, h_max, beta, beta_inf, tol)?;
            write_index_csv(&rows, output(&common.out)?)
        }
        Command::Simulate { policy, timing, common } => {
            let mut c = common.load()?;
            if !policy.is_empty() {
                c.policies = policy;
            }
            c.timing |= timing;
            let outcome = run_experiment(&c)?;
            match &c.out {
                Some(dir) => outcome.write(dir, c.timing),
                None => {
                    println!("{}", serde_json::to_string_pretty(&outcome.summary(c.timing))?);
                    Ok(())
                }
            }
        }
        Command::Sweep { common } => {
            let c = common.load()?;
            let outcome = run_sweep(&c)?;
            let variable = c.sweep.as_ref().map(|s| s.variable).expect("validated");
            match &c.out {
                Some(dir) => outcome.write(dir, variable)?,
                None => outcome.write_summary_csv(variable, io::stdout().lock())?,
            }
            if outcome.failed_points() > 0 {
                eprintln!("{} of {} grid points failed", outcome.failed_points(), outcome.points.len());
            }
            Ok(())
        }
        Command::Bench { policy, common } => {
            let mut c = common.load()?;
            if !policy.is_empty() {
                c.policies = policy;
            }
            let rows = run_bench(&c)?;
            for r in &rows {
                let speedup = r.speedup_vs_exact.map_or("-".into(), |s| format!("{s:.1}x"));
                eprintln!(
                    "rate={} L={} k={} {:<18} {:>10.1} us/step  speedup {speedup}",
                    r.rate,
                    r.lifetime,
                    r.budget,
                    r.policy.name(),
                    r.mean_ns / 1e3
                );
            }
            write_bench_csv(&rows, output(&c.out)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
