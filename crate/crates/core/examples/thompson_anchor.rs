//! Builds `𝓕 = 2·f_3 + 248·θ` exactly and cross-checks `f_3` against the
//! numeric Rademacher sum `Z^{[−3]}_1` at default precision.
//!
//! ```text
//! cargo run --release --example thompson_anchor
//! ```

use std::time::Instant;

use mf_core::moonshine::{target_series, TargetSeriesSpec};
use mf_core::rademacher::EvalParams;
use mf_core::zagier::{seed_f3, seed_f3_rademacher};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trunc = 8;
    let f = target_series(&TargetSeriesSpec::thompson(), trunc)?;
    for (n, c) in f.terms() {
        println!("q^{n:<3} {c}");
    }

    let start = Instant::now();
    let numeric = seed_f3_rademacher(trunc, &EvalParams::default(), None)?;
    let agrees = numeric == seed_f3(trunc);
    println!(
        "f_3 from the Rademacher sum agrees with the exact seed up to q^{trunc}: {agrees} ({:.1?})",
        start.elapsed()
    );
    Ok(())
}
