//! Exact and high-precision machinery for weight 1/2 moonshine for the
//! Monster and the Baby monster.
//!
//! The crate is organised bottom-up:
//!
//! - [`arith`]: Kronecker symbols, modular inverses, exact roots of unity,
//!   `I_{1/2}` and the genus of `X_0(M)`.
//! - [`qseries`]: exact truncated Laurent series over ℚ, plus θ, Δ, E_k and
//!   j(4τ).
//! - [`zagier`]: the basis `f_d` of the Kohnen plus-space and the Borcherds
//!   product built from `f_3`.
//! - [`rademacher`]: plus-space Rademacher sums `Z^{[−m]}_{N,ψ}` evaluated
//!   through theta-multiplier Kloosterman sums.
//! - [`groupdata`]: character tables of the Monster and Baby monster and
//!   supertraces of graded decompositions.
//! - [`moonshine`]: the target series 𝓕, 𝓖, 𝓗, McKay–Thompson series and the
//!   signed decomposition search.
//! - [`identify`]: Rademacher-ansatz search with theta corrections.
//! - [`cli`]: the `mf` command-line front end.

pub mod arith;
pub mod cache;
pub mod cli;
pub mod groupdata;
pub mod identify;
pub mod moonshine;
pub mod qseries;
pub mod rademacher;
pub mod zagier;

use std::path::PathBuf;

/// The `data/` directory shipped at the workspace root.
pub fn default_data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("..")
        .join("data")
}
