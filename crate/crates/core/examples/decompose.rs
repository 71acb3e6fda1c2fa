//! Signed decompositions of series coefficients into irreducible
//! dimensions, plus the linear relation that makes them ambiguous.
//!
//! ```text
//! cargo run --release --example decompose -- B 8315004
//! ```

use mf_core::groupdata::{check_linear_relation, CharacterTable, Group, LinearRelation};
use mf_core::moonshine::{decomposition_search, SearchOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let group: Group = args.first().map_or("B", String::as_str).parse()?;
    let target: i128 = args.get(1).map_or(Ok(8_315_004), |s| s.parse())?;

    let table = CharacterTable::load_group(&mf_core::default_data_dir(), group)?;
    let dims = table.dims();
    let found = decomposition_search(target, &dims, &SearchOptions::new(2, 6))?;
    println!("{} decompositions of {target} with |mult| ≤ 2 over the first 6 irreps:", found.len());
    for d in &found {
        println!("  {}", d.render(group.irrep_letter()));
    }

    if group == Group::BabyMonster {
        // U6 − U5 − U3 + U2 − U1 has zero dimension, so any decomposition can
        // be shifted by it; the character values decide which shift is right.
        let rel = LinearRelation {
            terms: vec![(1, 6), (-1, 5), (-1, 3), (1, 2), (-1, 1)],
            constant: 0,
        };
        println!(
            "U6 − U5 − U3 + U2 − U1 vanishes on dimensions: {}",
            check_linear_relation(&table, &rel)?
        );
    }
    Ok(())
}
