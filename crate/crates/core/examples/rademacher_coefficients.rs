//! Evaluates Rademacher sum coefficients and shows how the error estimate
//! shrinks as more Kloosterman terms are summed.
//!
//! ```text
//! cargo run --release --example rademacher_coefficients -- 15 1
//! cargo run --release --example rademacher_coefficients -- 3 4 1 8
//! ```
//!
//! Arguments: `m N [v h]` for `Z^{[−m]}_{N,(v,h)}`.

use mf_core::rademacher::{rad_coefficients, EvalParams, MultiplierSystem, RademacherSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<i64> = std::env::args()
        .skip(1)
        .map(|s| s.parse())
        .collect::<Result<_, _>>()?;
    let m = args.first().copied().unwrap_or(15);
    let level = args.get(1).copied().unwrap_or(1) as u64;
    let v = args.get(2).copied().unwrap_or(0);
    let h = args.get(3).copied().unwrap_or(1) as u64;
    let spec = RademacherSpec::new(m, MultiplierSystem::new(level, v, h)?)?;
    for w in spec.validity_warnings() {
        println!("warning: {w}");
    }

    let ns = [1, 4, 5, 8, 9];
    for c_max in [250, 500, 1000, 2000] {
        let params = EvalParams::default().with_c_max(c_max);
        let results = rad_coefficients(&spec, &ns, &params, None)?;
        println!("{spec}, c_max = {c_max}");
        for r in results {
            println!(
                "  q^{:<2} {:>28.6}  ± {:.2e}  {}",
                r.n,
                r.value_f64(),
                r.error_estimate,
                r.certified_integer
                    .map_or("uncertified".to_string(), |k| format!("→ {k}"))
            );
        }
    }
    Ok(())
}
