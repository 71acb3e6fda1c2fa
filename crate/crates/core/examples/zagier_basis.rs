//! Prints the first elements `f_d` of Zagier's plus-space basis.
//!
//! ```text
//! cargo run --example zagier_basis -- 15 9
//! ```

use mf_core::zagier::basis_up_to;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let d_max: i64 = args.first().map_or(Ok(15), |s| s.parse())?;
    let trunc: i64 = args.get(1).map_or(Ok(9), |s| s.parse())?;

    for f in basis_up_to(d_max, trunc)? {
        let row: Vec<String> = f
            .series
            .terms()
            .map(|(n, c)| format!("{c}·q^{n}"))
            .collect();
        println!("f_{:<3} = {} + …", f.d, row.join(" + "));
    }
    Ok(())
}
