//! McKay–Thompson series from character tables and the graded
//! decompositions, next to the target series they refine.
//!
//! ```text
//! cargo run --example mckay_thompson -- B 2A 3B 4G
//! cargo run --example mckay_thompson -- M 1A 2A
//! ```

use mf_core::groupdata::{CharacterTable, Group};
use mf_core::moonshine::{mckay_thompson, target_series, DecompositionSet, TargetSeriesSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let group: Group = args.first().map_or("B", String::as_str).parse()?;
    let classes: Vec<&str> = if args.len() > 1 {
        args[1..].iter().map(String::as_str).collect()
    } else {
        vec!["1A", "2A", "3B"]
    };

    let table = CharacterTable::load_group(&mf_core::default_data_dir(), group)?;
    let spec = TargetSeriesSpec::for_group(group);
    let depth = spec.fixture_depth();
    let target = target_series(&spec, depth)?;
    let decs = DecompositionSet::paper(group);

    println!("target: {}", render(target.terms().map(|(n, c)| (n, c.to_string()))));
    for class in classes {
        let mt = mckay_thompson(&table, &decs, &spec, class, depth)?;
        let q = mt.to_qseries();
        println!(
            "{:>4}: {}",
            mt.class_label,
            render(q.terms().map(|(n, c)| (n, c.to_string())))
        );
    }
    Ok(())
}

fn render(terms: impl Iterator<Item = (i64, String)>) -> String {
    terms
        .map(|(n, c)| format!("{c}q^{n}"))
        .collect::<Vec<_>>()
        .join(" ")
}
