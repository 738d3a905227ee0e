//! Generating cohorts (uniform, threshold-stratified, archetype mixes) and
//! round-tripping them through the CSV format.
//!
//! cargo run --example cohorts

use streaming_rmab::cohort::{
    load_cohort_csv, make_archetype, save_cohort_csv, Archetype, ClassifierConfig, KernelSampler,
    sample_threshold_fraction_cohort,
};
use streaming_rmab::index::classify_threshold;
use streaming_rmab::rng;
use streaming_rmab::{CohortSpec, Generator};

fn main() -> streaming_rmab::Result<()> {
    let mut r = rng::stream(3, &[]);
    let mut sampler = KernelSampler::default();
    for _ in 0..1000 {
        sampler.sample(&mut r);
    }
    println!("rejection sampler acceptance rate: {:.3}", sampler.acceptance_rate());

    let cfg = ClassifierConfig::default();
    let ks = sample_threshold_fraction_cohort(10, 0.3, &cfg, &mut r)?;
    for k in &ks {
        println!("  {:?} {k:?}", classify_threshold(k, cfg.horizon, cfg.beta, cfg.chain_len, cfg.resolution)?);
    }

    println!("non-recoverable: {:?}", make_archetype(Archetype::NonRecoverable, &mut r));
    println!("self-correcting: {:?}", make_archetype(Archetype::SelfCorrecting, &mut r));

    let spec = CohortSpec {
        size: 5,
        generator: Generator::ArchetypeMix { non_recoverable: 0.4, self_correcting: 0.2 },
        seed: 1,
        lifetime: 5,
    };
    let cohort = spec.generate()?;
    let path = std::env::temp_dir().join("srmab_example_cohort.csv");
    save_cohort_csv(&cohort, &path)?;
    print!("{}", std::fs::read_to_string(&path)?);
    assert_eq!(load_cohort_csv(&path)?, cohort);
    println!("round trip ok ({})", path.display());
    Ok(())
}
