//! Rebuilds every McKay–Thompson series from the shipped character tables
//! and decompositions, and compares them with the tabulated coefficients.
//!
//! ```text
//! cargo run --release --example verify_appendix_b
//! ```

use mf_core::groupdata::{load_fixtures, CharacterTable, Group};
use mf_core::moonshine::{verify_fixtures, DecompositionSet, TargetSeriesSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = mf_core::default_data_dir();
    let fixtures = load_fixtures(&data.join("appendix_b.csv"))?;
    for group in [Group::BabyMonster, Group::Monster] {
        let table = CharacterTable::load_group(&data, group)?;
        let report = verify_fixtures(
            &table,
            &DecompositionSet::paper(group),
            &TargetSeriesSpec::for_group(group),
            &fixtures,
        );
        println!(
            "{:<13} {} coefficients over {} classes: {} mismatches, {} uncovered",
            group.name(),
            report.checked,
            report.classes,
            report.mismatches.len(),
            report.uncovered.len()
        );
        for m in report.mismatches.iter().take(10) {
            println!("  {} q^{}: table {} vs computed {}", m.class, m.n, m.expected, m.got);
        }
    }
    Ok(())
}
