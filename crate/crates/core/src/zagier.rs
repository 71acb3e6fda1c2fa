//! Zagier's basis `f_d` of the Kohnen plus-space of weight 1/2 on Γ₀(4).
//!
//! `f_d = q^{−d} + O(q)` is the unique plus-space form with that principal
//! part. Here `f_0 = θ` and every `f_d` with `d > 0` is normalized to have
//! constant term 0. The basis is built in exact integer arithmetic:
//!
//! * `f_3` comes from a Rankin–Cohen bracket,
//!   `f_3 = −[θ, E₁₀(4τ)]₁ / (20·Δ(4τ))`, shifted by a multiple of θ to kill
//!   its constant term. The bracket is a holomorphic weight 25/2 plus-space
//!   form and Δ(4τ) has weight 12, so the quotient is a weight 1/2 plus-space
//!   form with principal part `q^{−3}`.
//! * For `d ≥ 4`, `f_d` is `f_{d−4}·j(4τ)` with its extra principal terms and
//!   constant term eliminated against already-built elements.
//!
//! A numeric seed from the Rademacher sum `Z^{[−3]}_1` is also available as
//! a cross-check ([`seed_f3_rademacher`]).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::qseries::{
    combine, eisenstein_series, int_inverse, int_mul, j4_series, j_series, euler_product,
    theta_series, QSeries,
};
use crate::rademacher::{EvalParams, RademacherError, RademacherSpec};

#[derive(Debug, Error)]
pub enum ZagierError {
    #[error("d = {0} is not ≡ 0, 3 (mod 4)")]
    InvalidIndex(i64),
    #[error("coefficient at q^{n} is {value}, not within {threshold} of an integer (error estimate {error:e})")]
    RoundingUncertified {
        n: i64,
        value: f64,
        error: f64,
        threshold: f64,
    },
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error(transparent)]
    Rademacher(#[from] RademacherError),
}

/// One basis element `f_d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZagierBasisElement {
    pub d: i64,
    pub series: QSeries,
}

impl ZagierBasisElement {
    /// Coefficient `A(n)` of `q^n`.
    pub fn coeff(&self, n: i64) -> BigInt {
        self.series.int_coeff(n)
    }

    fn validate(&self) -> Result<(), ZagierError> {
        let s = &self.series;
        let pp = s.principal_part();
        let expected = if self.d == 0 {
            vec![]
        } else {
            vec![(-self.d, BigRational::one())]
        };
        if pp != expected {
            return Err(ZagierError::InternalInconsistency(format!(
                "f_{} has principal part {:?}",
                self.d, pp
            )));
        }
        if !s.plus_support().is_empty() {
            return Err(ZagierError::InternalInconsistency(format!(
                "f_{} leaves the plus-space support",
                self.d
            )));
        }
        if !s.is_integral() {
            return Err(ZagierError::InternalInconsistency(format!(
                "f_{} has non-integral coefficients",
                self.d
            )));
        }
        Ok(())
    }
}

/// Exact `f_3` up to `trunc`.
pub fn seed_f3(trunc: i64) -> ZagierBasisElement {
    let trunc = trunc.max(1);
    // Work with exponents 0..=top of the bracket, top = trunc + 4.
    let top = trunc + 4;
    let len = (top + 1) as usize;
    let theta = dense(&theta_series(1, top), len);
    let e10 = dense(&eisenstein_series(10, Integer::div_floor(&top, &4)).dilate(4), len);
    let d = |v: &[BigInt]| -> Vec<BigInt> {
        v.iter()
            .enumerate()
            .map(|(n, c)| c * BigInt::from(n))
            .collect()
    };
    // 2·[θ, E10(4τ)]_1 = θ·D(E10(4τ)) − 20·D(θ)·E10(4τ)
    let a = int_mul(&theta, &d(&e10), len);
    let b = int_mul(&d(&theta), &e10, len);
    let bracket: Vec<BigInt> = a.iter().zip(&b).map(|(x, y)| x - y * 20).collect();
    debug_assert!(bracket[0].is_zero());
    // Δ(4τ) = q^4·P(q^4)
    let plen = (trunc as usize) / 4 + 2;
    let p = euler_product(plen);
    let p24 = {
        let mut r = vec![BigInt::zero(); plen];
        r[0] = BigInt::one();
        for _ in 0..24 {
            r = int_mul(&r, &p, plen);
        }
        r
    };
    let pinv = int_inverse(&p24, plen).expect("Euler product is invertible");
    let mut pinv4 = vec![BigInt::zero(); len - 1];
    for (k, c) in pinv.into_iter().enumerate() {
        if 4 * k < len - 1 {
            pinv4[4 * k] = c;
        }
    }
    // f = −(bracket/q)·P(q^4)^{-1}/40, as exponents −3, −2, …
    let x = int_mul(&bracket[1..], &pinv4, len - 1);
    // the raw quotient is integral only after the θ shift below
    let forty = BigInt::from(40);
    let coeffs: Vec<BigRational> = x
        .into_iter()
        .map(|c| BigRational::new(-c, forty.clone()))
        .collect();
    let raw = QSeries::from_dense(-3, trunc, coeffs);
    let c0 = raw.coeff(0).expect("constant term in range");
    let series = combine(&[
        (BigRational::one(), &raw),
        (-c0, &theta_series(1, trunc)),
    ]);
    ZagierBasisElement { d: 3, series }
}

fn dense(s: &QSeries, len: usize) -> Vec<BigInt> {
    (0..len as i64)
        .map(|e| s.coeff(e).map(|c| c.to_integer()).unwrap_or_default())
        .collect()
}

/// `f_3` from the numeric Rademacher sum `Z^{[−3]}_1`, one certified rounding
/// per coefficient. `Z^{[−3]}_1 = f_3 + c·θ` for a constant `c`, so the
/// constant term is measured first and removed.
pub fn seed_f3_rademacher(
    trunc: i64,
    params: &EvalParams,
    cache: Option<&crate::cache::TermCache>,
) -> Result<ZagierBasisElement, ZagierError> {
    let spec = RademacherSpec::trivial(3, 1);
    let ns: Vec<i64> = (0..=trunc)
        .filter(|n| matches!(n.rem_euclid(4), 0 | 1))
        .collect();
    let results = crate::rademacher::rad_coefficients(&spec, &ns, params, cache)?;
    let threshold = params.policy.rounding_threshold;
    let mut rounded = Vec::with_capacity(ns.len());
    for (n, r) in ns.iter().zip(&results) {
        match &r.certified_integer {
            Some(k) => rounded.push((*n, k.clone())),
            None => {
                return Err(ZagierError::RoundingUncertified {
                    n: *n,
                    value: r.value_f64(),
                    error: r.error_estimate,
                    threshold,
                })
            }
        }
    }
    let c = rounded[0].1.clone();
    let theta = theta_series(1, trunc);
    let terms = std::iter::once((-3, BigRational::one())).chain(rounded.into_iter().map(|(n, k)| {
        let t = theta.int_coeff(n);
        (n, BigRational::from_integer(k - &c * t))
    }));
    let el = ZagierBasisElement {
        d: 3,
        series: QSeries::from_terms(trunc, terms),
    };
    el.validate()?;
    Ok(el)
}

/// All `f_d` with `d ≤ d_max`, `d ≡ 0, 3 (mod 4)`, each exact up to `trunc`.
///
/// Building `f_d` to `trunc` needs `f_{d−4}` to `trunc + 4`, so `f_3` is
/// seeded to `trunc + d_max − 3`.
pub fn basis_up_to(d_max: i64, trunc: i64) -> Result<Vec<ZagierBasisElement>, ZagierError> {
    let d_max = d_max.max(0);
    let reach = |d: i64| trunc + (d_max - d).max(0);
    let mut built: Vec<ZagierBasisElement> = Vec::new();
    for d in 0..=d_max {
        if !is_basis_index(d) {
            continue;
        }
        let el = match d {
            0 => ZagierBasisElement {
                d: 0,
                series: theta_series(1, reach(0)),
            },
            3 => seed_f3(reach(3)),
            _ => {
                let prev = built
                    .iter()
                    .find(|e| e.d == d - 4)
                    .expect("f_{d-4} is built before f_d");
                let t = reach(d);
                let mut s = prev.series.mul(&j4_series(t + d)).truncate(t);
                for lower in (0..d).rev().filter(|&k| is_basis_index(k)) {
                    let e = if lower == 0 { 0 } else { -lower };
                    let c = s.coeff(e).unwrap_or_else(BigRational::zero);
                    if c.is_zero() {
                        continue;
                    }
                    let f = &built.iter().find(|b| b.d == lower).unwrap().series;
                    s = combine(&[(BigRational::one(), &s), (-c, f)]).truncate(t);
                }
                ZagierBasisElement { d, series: s }
            }
        };
        el.validate()?;
        built.push(el);
    }
    Ok(built
        .into_iter()
        .map(|e| ZagierBasisElement {
            d: e.d,
            series: e.series.truncate(trunc),
        })
        .collect())
}

pub fn is_basis_index(d: i64) -> bool {
    d >= 0 && matches!(d % 4, 0 | 3)
}

/// The single element `f_d` up to `trunc`.
pub fn zagier_basis(d: i64, trunc: i64) -> Result<ZagierBasisElement, ZagierError> {
    if !is_basis_index(d) {
        return Err(ZagierError::InvalidIndex(d));
    }
    let all = basis_up_to(d, trunc)?;
    Ok(all.into_iter().find(|e| e.d == d).expect("requested index is built"))
}

/// [`zagier_basis`] backed by one text file per `(d, trunc)` in `dir`.
///
/// A file that fails to parse or validate is recomputed and rewritten; a
/// write failure only costs the cache, never the result.
pub fn basis_cached(
    d: i64,
    trunc: i64,
    dir: Option<&std::path::Path>,
) -> Result<ZagierBasisElement, ZagierError> {
    let Some(dir) = dir else {
        return zagier_basis(d, trunc);
    };
    let path = dir.join(format!("f{d}_t{trunc}.qs"));
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(series) = QSeries::from_text(&text) {
            let el = ZagierBasisElement { d, series };
            if el.series.trunc() == trunc && el.validate().is_ok() {
                return Ok(el);
            }
        }
    }
    let el = zagier_basis(d, trunc)?;
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    let written = std::fs::create_dir_all(dir)
        .and_then(|_| std::fs::write(&tmp, el.series.to_text()))
        .and_then(|_| std::fs::rename(&tmp, &path));
    if written.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    Ok(el)
}

/// `q^{−1/3}·∏_{n>0}(1−q^n)^{A(n²)}` with `A` the coefficients of `f_3`.
#[derive(Debug, Clone)]
pub struct BorcherdsLift {
    /// Exponent of the overall `q` prefactor.
    pub prefactor: BigRational,
    /// The product itself, a power series with constant term 1.
    pub series: QSeries,
}

/// Builds the product by the logarithmic-derivative recursion
/// `k·P_k = Σ_{j=1}^{k} b_j P_{k−j}`, `b_j = −Σ_{n|j} n·A(n²)`.
pub fn borcherds_lift_3c(trunc: i64) -> BorcherdsLift {
    let trunc = trunc.max(1);
    let f3 = seed_f3(trunc * trunc);
    borcherds_lift_from(&f3, trunc)
}

pub fn borcherds_lift_from(f3: &ZagierBasisElement, trunc: i64) -> BorcherdsLift {
    let len = (trunc + 1) as usize;
    let a: Vec<BigInt> = (0..len as i64)
        .map(|n| if n == 0 { BigInt::zero() } else { f3.coeff(n * n) })
        .collect();
    let mut b = vec![BigInt::zero(); len];
    for n in 1..len {
        let na = &a[n] * BigInt::from(n);
        for j in (n..len).step_by(n) {
            b[j] -= &na;
        }
    }
    let mut p = vec![BigInt::zero(); len];
    p[0] = BigInt::one();
    for k in 1..len {
        let mut acc = BigInt::zero();
        for j in 1..=k {
            acc += &b[j] * &p[k - j];
        }
        let (q, r) = acc.div_rem(&BigInt::from(k));
        assert!(r.is_zero(), "product recursion left a remainder at q^{k}");
        p[k] = q;
    }
    BorcherdsLift {
        prefactor: BigRational::new(BigInt::from(-1), BigInt::from(3)),
        series: QSeries::from_integers(0, trunc, p),
    }
}

/// `q·j(τ)` up to `trunc`: the cube of the lift should equal it.
pub fn q_times_j(trunc: i64) -> QSeries {
    j_series(trunc - 1).shift(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn f3_leading_coefficients() {
        let f3 = seed_f3(12);
        let got: Vec<i64> = [1, 4, 5, 8, 9, 12]
            .iter()
            .map(|&n| f3.coeff(n).to_i64().unwrap())
            .collect();
        assert_eq!(got, vec![-248, 26752, -85995, 1707264, -4096248, 44330496]);
        assert_eq!(f3.coeff(0), BigInt::zero());
        assert_eq!(f3.coeff(-3), BigInt::one());
        f3.validate().unwrap();
    }

    #[test]
    fn recursion_reaches_f15() {
        let basis = basis_up_to(15, 9).unwrap();
        let ds: Vec<i64> = basis.iter().map(|e| e.d).collect();
        assert_eq!(ds, vec![0, 3, 4, 7, 8, 11, 12, 15]);
        let f7 = basis.iter().find(|e| e.d == 7).unwrap();
        let f15 = basis.iter().find(|e| e.d == 15).unwrap();
        assert_eq!(f7.coeff(1), BigInt::from(-4119));
        assert_eq!(f15.coeff(1), BigInt::from(-192513));
    }

    #[test]
    fn theta_is_f0() {
        assert_eq!(zagier_basis(0, 20).unwrap().series, theta_series(1, 20));
        assert!(matches!(zagier_basis(5, 20), Err(ZagierError::InvalidIndex(5))));
    }

    #[test]
    fn lift_small() {
        let lift = borcherds_lift_3c(6);
        assert_eq!(lift.series.int_coeff(0), BigInt::one());
        assert_eq!(lift.series.int_coeff(1), BigInt::from(248));
        assert_eq!(lift.series.pow(3), q_times_j(6));
    }
}
