//! Numeric check of the theta multiplier: for γ = (a b; c d) in Γ₀(4),
//! θ(γτ) = (c/d)·ε_d⁻¹·(cτ+d)^{1/2}·θ(τ) with the principal square root.

use mf_core::arith::{bigfloat_to_f64, eps, kronecker, mod_inverse, MpComplex, PrecisionPolicy};
use mf_core::qseries::theta_series;

pub const TOLERANCE: f64 = 1e-10;

fn policy() -> PrecisionPolicy {
    PrecisionPolicy::new(128, PrecisionPolicy::DEFAULT_THRESHOLD).unwrap()
}

/// `(re, im)` of `(aτ + b)/(cτ + d)` for `τ = x + iy`, in f64.
fn mobius(a: i64, b: i64, c: i64, d: i64, x: f64, y: f64) -> (f64, f64) {
    let (nr, ni) = (a as f64 * x + b as f64, a as f64 * y);
    let (dr, di) = (c as f64 * x + d as f64, c as f64 * y);
    let den = dr * dr + di * di;
    ((nr * dr + ni * di) / den, (ni * dr - nr * di) / den)
}

fn theta_at(x: f64, y: f64) -> (f64, f64) {
    // Terms up to q^T with |q|^T ≪ 2^-64 at this height.
    let trunc = (60.0 / (2.0 * std::f64::consts::PI * y)).ceil() as i64 + 16;
    let policy = policy();
    let ctx = policy.context();
    let tau = MpComplex {
        re: ctx.from_f64(x),
        im: ctx.from_f64(y),
    };
    let v = theta_series(1, trunc).eval_at(&tau, &policy).unwrap();
    (bigfloat_to_f64(&v.re), bigfloat_to_f64(&v.im))
}

fn cmul((a, b): (f64, f64), (c, d): (f64, f64)) -> (f64, f64) {
    (a * c - b * d, a * d + b * c)
}

fn csqrt((re, im): (f64, f64)) -> (f64, f64) {
    let r = re.hypot(im);
    let s = ((r + re) / 2.0).sqrt();
    let t = ((r - re) / 2.0).sqrt();
    (s, if im < 0.0 { -t } else { t })
}

/// `(c/d)·ε_d⁻¹` as a complex number.
fn psi0(c: i64, d: i64) -> (f64, f64) {
    let k = kronecker(c, d) as f64;
    let (er, ei) = eps(d).unwrap().inverse().to_f64_pair();
    (k * er, k * ei)
}

/// Absolute error of the transformation law at γ = (a b; c d), τ = x + iy.
pub fn check(c: i64, d: i64, x: f64, y: f64) -> f64 {
    // a·d − b·c = 1
    let a = mod_inverse(d.rem_euclid(c), c).unwrap();
    let b = (a * d - 1) / c;
    assert_eq!(a * d - b * c, 1);
    let (gx, gy) = mobius(a, b, c, d, x, y);
    let lhs = theta_at(gx, gy);
    let j = cmul(psi0(c, d), csqrt((c as f64 * x + d as f64, c as f64 * y)));
    let rhs = cmul(j, theta_at(x, y));
    (lhs.0 - rhs.0).hypot(lhs.1 - rhs.1)
}

/// Every γ with c ∈ {4, 8, 12, 16} and odd |d| ≤ 15 coprime to c, at a
/// fixed τ; returns the number of matrices checked and the largest error.
pub fn sample_errors() -> (usize, f64) {
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for c in [4i64, 8, 12, 16] {
        for d in (-15i64..=15).filter(|d| d % 2 != 0) {
            if num_integer::gcd(c, d) != 1 {
                continue;
            }
            worst = worst.max(check(c, d, 1.0 / 7.0, 0.5));
            checked += 1;
        }
    }
    (checked, worst)
}
