//! Runs the identification over every class up to a given order and
//! compares the outcome with the published list of identifications.
//!
//! ```text
//! cargo run --release --example reproduce_appendix_a -- B 11
//! cargo run --release --example reproduce_appendix_a -- M 6
//! ```
//!
//! Term vectors are cached under `$MF_CACHE_DIR` (default `mf-cache`), so
//! a second run is fast.

use std::time::Instant;

use mf_core::cache::TermCache;
use mf_core::groupdata::Group;
use mf_core::identify::{describe, reproduce_appendix_a, IdentifyOptions, SumEvaluator};
use mf_core::moonshine::TargetSeriesSpec;
use mf_core::rademacher::EvalParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let group: Group = args.first().map_or("B", String::as_str).parse()?;
    let max_order: u64 = args.get(1).map_or(Ok(6), |s| s.parse())?;
    let cache_dir = std::env::var("MF_CACHE_DIR").unwrap_or_else(|_| "mf-cache".into());
    let depth = TargetSeriesSpec::for_group(group).fixture_depth();
    let eval = SumEvaluator::new(EvalParams::default(), depth, Some(TermCache::new(cache_dir)));

    let start = Instant::now();
    let report = reproduce_appendix_a(
        &mf_core::default_data_dir(),
        group,
        max_order,
        None,
        &IdentifyOptions::restricted(),
        &eval,
    )?;
    for o in &report.outcomes {
        println!(
            "{:>4} {:<10} {:<5} {:?}: {}",
            o.class,
            o.expected,
            if o.agrees { "ok" } else { "DIFF" },
            o.certificate.status,
            describe(&o.certificate)
        );
        if let Some(p) = &o.published {
            println!("{:>21} published ansatz: {:?}: {}", "", p.status, describe(p));
        }
    }
    println!(
        "{}: identified {}/{} as published, no-match {}/{}, extended {}/{}; {} sums in {:.1?}",
        group.name(),
        report.identified_matching,
        report.identified_expected,
        report.no_match_confirmed,
        report.no_match_expected,
        report.extended_matching,
        report.extended_expected,
        report.sums_evaluated,
        start.elapsed()
    );
    if !report.text_list_omissions.is_empty() {
        println!(
            "published identifications missing from the summary list: {}",
            report.text_list_omissions.join(", ")
        );
    }
    Ok(())
}
