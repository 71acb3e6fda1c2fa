//! The Borcherds lift of `f_3` is the cube root of the `j`-function:
//! `q^{−1/3}·∏(1−q^n)^{A(n²)}` cubed equals `q·j(τ)`.
//!
//! ```text
//! cargo run --example borcherds_lift -- 50
//! ```

use mf_core::zagier::{borcherds_lift_3c, q_times_j};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trunc: i64 = std::env::args().nth(1).map_or(Ok(50), |s| s.parse())?;
    let lift = borcherds_lift_3c(trunc);
    let head: Vec<String> = (0..=8).map(|n| lift.series.int_coeff(n).to_string()).collect();
    println!("q^(1/3)·lift = {} + …", head.join(", "));
    let cube = lift.series.pow(3);
    println!(
        "cube equals q·j(τ) up to q^{trunc}: {}",
        cube == q_times_j(trunc)
    );
    Ok(())
}
