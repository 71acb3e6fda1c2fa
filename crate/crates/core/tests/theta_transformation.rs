//! Numeric check of the theta multiplier. This pins the convention used for
//! ψ₀ in the Kloosterman sums.

mod common;

use common::theta::{check, sample_errors, TOLERANCE};

#[test]
fn generator_one_zero_four_one() {
    let err = check(4, 1, 1.0 / 7.0, 0.5);
    assert!(err < TOLERANCE, "error {err:e}");
}

#[test]
fn sample_of_gamma0_four() {
    let (checked, worst) = sample_errors();
    assert!(checked > 40);
    assert!(worst < TOLERANCE, "largest error {worst:e}");
}
