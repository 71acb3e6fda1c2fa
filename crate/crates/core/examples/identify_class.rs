//! Identifies one McKay–Thompson series with Rademacher sums plus theta
//! corrections and prints the certificate.
//!
//! ```text
//! cargo run --release --example identify_class -- B 4G
//! cargo run --release --example identify_class -- B 2A extended
//! ```
//!
//! Term vectors are cached under `$MF_CACHE_DIR` (default `mf-cache`).

use std::time::Instant;

use mf_core::cache::TermCache;
use mf_core::groupdata::{CharacterTable, Group};
use mf_core::identify::{describe, identify_class, IdentifyOptions, SumEvaluator};
use mf_core::moonshine::{mckay_thompson, DecompositionSet, TargetSeriesSpec};
use mf_core::rademacher::EvalParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let group: Group = args.first().map_or("B", String::as_str).parse()?;
    let class = args.get(1).map_or("3B", String::as_str);
    let opts = if args.get(2).is_some_and(|a| a == "extended") {
        IdentifyOptions::extended()
    } else {
        IdentifyOptions::restricted()
    };

    let table = CharacterTable::load_group(&mf_core::default_data_dir(), group)?;
    let spec = TargetSeriesSpec::for_group(group);
    let series = mckay_thompson(
        &table,
        &DecompositionSet::paper(group),
        &spec,
        class,
        spec.fixture_depth(),
    )?;
    let cache_dir = std::env::var("MF_CACHE_DIR").unwrap_or_else(|_| "mf-cache".into());
    let eval = SumEvaluator::new(
        EvalParams::default(),
        spec.fixture_depth(),
        Some(TermCache::new(cache_dir)),
    );

    let start = Instant::now();
    let cert = identify_class(&series, &spec, &opts, &eval);
    println!("{}", cert.to_json());
    println!(
        "{}{}: {:?} {} ({} choices, {} sums, {:.1?})",
        group,
        cert.class,
        cert.status,
        describe(&cert),
        cert.choices_tried,
        eval.evaluated(),
        start.elapsed()
    );
    Ok(())
}
